"""
Geometry objects of the nexus/bus construction.

A nexus copy owns a set of lines: X-group H-rows and V-columns, Y-group
V-columns and H-rows. Each line carries one straight run of like-index
wires; the chain of a variable is the union of its H-run and V-run.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from cpcg.models.chimera import ChimeraSpec, Shore

Cell = Tuple[int, int]
RelativeQubit = Tuple[int, int, Shore, int]


class Subset(str, enum.Enum):
    """Variable subset of a nexus"""
    X = "X"
    Y = "Y"


class Face(str, enum.Enum):
    """Nexus face an interface is exposed on"""
    UP = "UP"
    DOWN = "DOWN"
    LEFT = "LEFT"
    RIGHT = "RIGHT"


@dataclass(frozen=True)
class Interface:
    """Wires of one variable group exposed on one nexus face"""

    face: Face
    subset: Subset
    group: int
    variables: Tuple[int, ...]
    wires: Dict[int, int]
    anchor: Cell

    @property
    def is_injective(self) -> bool:
        return len(set(self.wires.values())) == len(self.wires)


@dataclass(frozen=True)
class NexusLines:
    """Absolute line positions owned by one nexus copy"""

    copy: int
    x_rows: Tuple[int, ...]
    x_cols: Tuple[int, ...]
    y_rows: Tuple[int, ...] = ()
    y_cols: Tuple[int, ...] = ()

    @property
    def top_row(self) -> int:
        return self.y_rows[0] if self.y_rows else self.x_rows[0]

    @property
    def bottom_row(self) -> int:
        return self.x_rows[-1]

    @property
    def left_col(self) -> int:
        return self.x_cols[0]

    @property
    def right_col(self) -> int:
        return self.y_cols[-1] if self.y_cols else self.x_cols[-1]

    @property
    def anchor(self) -> Cell:
        return self.top_row, self.left_col

    @property
    def extent(self) -> int:
        """Largest line index used, plus one"""
        return max(self.bottom_row, self.right_col) + 1


@dataclass(frozen=True)
class NexusTemplate:
    """
    One embedded copy of K_m on a k-wide footprint, in relative coordinates.

    Chains are sets of (row, col, shore, wire) relative to the top-left cell.
    """

    m: int
    L: int
    k: int
    x_vars: Tuple[int, ...]
    y_vars: Tuple[int, ...]
    lines: NexusLines
    chains: Dict[int, FrozenSet[RelativeQubit]]
    cells: FrozenSet[Cell]
    interfaces: Tuple[Interface, ...]

    @property
    def stride(self) -> int:
        return (self.k + 1) // 2

    @property
    def y_line_count(self) -> int:
        return self.k - self.stride

    def locate(self, variable: int) -> Tuple[Subset, int, int]:
        """(subset, group, default wire) of a nexus variable"""
        if variable < len(self.x_vars):
            return Subset.X, variable // self.L, variable % self.L
        p = variable - len(self.x_vars)
        return Subset.Y, p // self.L, p % self.L

    def group_vars(self, subset: Subset, group: int) -> Tuple[int, ...]:
        members = self.x_vars if subset is Subset.X else self.y_vars
        return tuple(members[group * self.L:(group + 1) * self.L])

    def groups(self, subset: Subset) -> range:
        members = self.x_vars if subset is Subset.X else self.y_vars
        return range(-(-len(members) // self.L))


@dataclass(frozen=True)
class Placement:
    """A nexus copy placed on the chip"""

    index: int
    anchor: Cell
    cells: FrozenSet[Cell]


@dataclass(frozen=True)
class BusRun:
    """
    A straight run of wires owned by one (copy, subset, group).

    ``shore`` H means the run lies along row ``line`` over columns
    start..stop; V means it lies along column ``line`` over rows start..stop.
    """

    copy: int
    subset: Subset
    group: int
    shore: Shore
    line: int
    start: int
    stop: int
    wires: Dict[int, int] = field(hash=False)

    def cells(self) -> Iterator[Cell]:
        for pos in range(self.start, self.stop + 1):
            yield (self.line, pos) if self.shore is Shore.H else (pos, self.line)

    @property
    def length(self) -> int:
        return self.stop - self.start + 1

    def qubit(self, spec: ChimeraSpec, cell: Cell, variable: int) -> int:
        return spec.to_linear(cell[0], cell[1], self.shore, self.wires[variable])

    def qubits(self, spec: ChimeraSpec, variable: int) -> Iterator[int]:
        for cell in self.cells():
            yield self.qubit(spec, cell, variable)

    @property
    def key(self) -> Tuple[int, Subset, int, Shore]:
        return self.copy, self.subset, self.group, self.shore


@dataclass(frozen=True)
class Junction:
    """Cell where copy i's bus meets copy j's bus for one variable group"""

    cell: Cell
    pair: Tuple[int, int]
    subset: Subset
    group: int
    couplers: Tuple[Tuple[int, int], ...]


@dataclass
class BusPlan:
    """Placements, runs and junctions of a product embedding"""

    spec: ChimeraSpec
    m: int
    n: int
    template: NexusTemplate
    layout: List[NexusLines]
    placements: List[Placement]
    runs: List[BusRun]
    junctions: List[Junction] = field(default_factory=list)

    def runs_for(self, copy: int) -> List[BusRun]:
        return [run for run in self.runs if run.copy == copy]

    def run(self, key: Tuple[int, Subset, int, Shore]) -> Optional[BusRun]:
        for candidate in self.runs:
            if candidate.key == key:
                return candidate
        return None

    def nexus_cells(self) -> FrozenSet[Cell]:
        cells: FrozenSet[Cell] = frozenset()
        for placement in self.placements:
            cells |= placement.cells
        return cells

    def bus_cells(self) -> FrozenSet[Cell]:
        """Run cells outside the owning copy's footprint"""
        owned = {p.index: p.cells for p in self.placements}
        return frozenset(
            cell for run in self.runs for cell in run.cells() if cell not in owned[run.copy]
        )

    def junctions_of(self, subset: Subset) -> List[Junction]:
        return [j for j in self.junctions if j.subset is subset]
