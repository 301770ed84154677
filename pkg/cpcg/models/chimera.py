"""
Chimera hardware model.

Qubit ids follow a frozen row-major convention:
    id = 2L * (row * M + col) + shore * L + wire,   shore V=0, H=1
V-shore qubits couple vertically between rows, H-shore qubits couple
horizontally between columns, and every V-H pair inside a cell is coupled.
"""

import enum
from dataclasses import dataclass, field
from typing import FrozenSet, Iterator, NamedTuple, Tuple

import networkx as nx
import numpy as np

from cpcg.exceptions import InputError


class Shore(enum.IntEnum):
    """Cell shore; the value is the shore offset in the linear id"""
    V = 0
    H = 1


class QubitCoord(NamedTuple):
    """(row, col, shore, wire) coordinate of one qubit"""
    row: int
    col: int
    shore: Shore
    wire: int


Coupler = Tuple[int, int]


def normalize_coupler(a: int, b: int) -> Coupler:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ChimeraSpec:
    """Chimera graph C_{N,M,L}: an N x M grid of K_{L,L} cells"""

    rows: int
    cols: int
    shore: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError(f"chimera grid must be at least 1x1, got {self.rows}x{self.cols}")
        if self.shore < 2:
            raise InputError(f"shore size must be >= 2, got {self.shore}")

    @property
    def num_qubits(self) -> int:
        return 2 * self.shore * self.rows * self.cols

    @property
    def num_couplers(self) -> int:
        """Coupler count of the ideal graph"""
        L, N, M = self.shore, self.rows, self.cols
        return N * M * L * L + L * (M * (N - 1) + N * (M - 1))

    def to_linear(self, row: int, col: int, shore: int, wire: int) -> int:
        return 2 * self.shore * (row * self.cols + col) + int(shore) * self.shore + wire

    def to_coord(self, qubit: int) -> QubitCoord:
        cell, rest = divmod(qubit, 2 * self.shore)
        row, col = divmod(cell, self.cols)
        shore, wire = divmod(rest, self.shore)
        return QubitCoord(row, col, Shore(shore), wire)

    def contains(self, qubit: int) -> bool:
        return 0 <= qubit < self.num_qubits

    def contains_cell(self, row: int, col: int) -> bool:
        return 0 <= row < self.rows and 0 <= col < self.cols

    def ideal_edges(self) -> Iterator[Coupler]:
        """Yield every coupler of the fault-free graph as (low id, high id)"""
        L = self.shore
        for row in range(self.rows):
            for col in range(self.cols):
                for a in range(L):
                    v = self.to_linear(row, col, Shore.V, a)
                    for b in range(L):
                        yield v, self.to_linear(row, col, Shore.H, b)
                for wire in range(L):
                    if row + 1 < self.rows:
                        yield (self.to_linear(row, col, Shore.V, wire),
                               self.to_linear(row + 1, col, Shore.V, wire))
                    if col + 1 < self.cols:
                        yield (self.to_linear(row, col, Shore.H, wire),
                               self.to_linear(row, col + 1, Shore.H, wire))

    def describe(self) -> str:
        return f"C_{{{self.rows},{self.cols},{self.shore}}}"


@dataclass(frozen=True, eq=False)
class CapacityMap:
    """Per-cell operable wire counts, indexed [row, col]"""

    vertical: np.ndarray
    horizontal: np.ndarray

    def at(self, row: int, col: int) -> Tuple[int, int]:
        return int(self.vertical[row, col]), int(self.horizontal[row, col])

    @property
    def total(self) -> int:
        return int(self.vertical.sum() + self.horizontal.sum())


@dataclass(frozen=True)
class HardwareGraph:
    """
    A Chimera chip with its fault masks.

    ``graph`` holds only operable qubits and operable couplers and is frozen.
    ``alive`` is a boolean array of shape (N, M, 2, L) mirroring the qubits.
    """

    spec: ChimeraSpec
    dead_qubits: FrozenSet[int]
    dead_couplers: FrozenSet[Coupler]
    graph: nx.Graph = field(repr=False, compare=False)
    alive: np.ndarray = field(repr=False, compare=False)

    def is_operable(self, qubit: int) -> bool:
        return self.spec.contains(qubit) and qubit not in self.dead_qubits

    def has_coupler(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    @property
    def num_operable(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def is_ideal(self) -> bool:
        return not self.dead_qubits and not self.dead_couplers

    def qubit_alive(self, row: int, col: int, shore: int, wire: int) -> bool:
        return bool(self.alive[row, col, int(shore), wire])
