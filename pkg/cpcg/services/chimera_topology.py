"""
Chimera Topology Service

Builds Chimera hardware graphs C_{N,M,L} with fault masks:
- Coordinate/id conversion and ideal adjacency
- Dead qubits and independent dead couplers
- Operable neighbourhoods
- Per-cell capacity (operable wire counts per shore)
- Seeded random fault masks for benchmarks
"""

from typing import Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from cpcg.constants import CHIP_PRESETS, REPRESENTATIVE_509_MASK
from cpcg.exceptions import InputError
from cpcg.logger import get_logger
from cpcg.models.chimera import (
    CapacityMap,
    ChimeraSpec,
    Coupler,
    HardwareGraph,
    Shore,
    normalize_coupler,
)

logger = get_logger(__name__)


def is_ideal_coupler(spec: ChimeraSpec, a: int, b: int) -> bool:
    """True when (a, b) is a coupler of the fault-free graph"""
    if a == b or not (spec.contains(a) and spec.contains(b)):
        return False
    ca, cb = spec.to_coord(a), spec.to_coord(b)
    if (ca.row, ca.col) == (cb.row, cb.col):
        return ca.shore != cb.shore
    if ca.shore != cb.shore or ca.wire != cb.wire:
        return False
    if ca.shore is Shore.V:
        return ca.col == cb.col and abs(ca.row - cb.row) == 1
    return ca.row == cb.row and abs(ca.col - cb.col) == 1


def build_hardware(
    spec: ChimeraSpec,
    dead_qubits: Iterable[int] = (),
    dead_couplers: Iterable[Tuple[int, int]] = (),
) -> HardwareGraph:
    """
    Build the operable hardware graph of a chip.

    Args:
        spec: Chip dimensions
        dead_qubits: Inoperable qubit ids (their couplers go with them)
        dead_couplers: Inoperable couplers between otherwise working qubits

    Returns:
        Immutable HardwareGraph

    Raises:
        InputError: If a fault references a qubit or coupler not on the chip
    """
    dead_q: Set[int] = set()
    for qubit in dead_qubits:
        if not spec.contains(qubit):
            raise InputError(f"dead qubit {qubit} outside {spec.describe()} (0..{spec.num_qubits - 1})")
        dead_q.add(qubit)

    dead_c: Set[Coupler] = set()
    for a, b in dead_couplers:
        if not is_ideal_coupler(spec, a, b):
            raise InputError(f"dead coupler ({a}, {b}) is not a coupler of {spec.describe()}")
        dead_c.add(normalize_coupler(a, b))

    graph = nx.Graph()
    graph.add_nodes_from(q for q in range(spec.num_qubits) if q not in dead_q)
    graph.add_edges_from(
        (a, b) for a, b in spec.ideal_edges()
        if a not in dead_q and b not in dead_q and (a, b) not in dead_c
    )

    alive = np.ones((spec.rows, spec.cols, 2, spec.shore), dtype=bool)
    for qubit in dead_q:
        c = spec.to_coord(qubit)
        alive[c.row, c.col, int(c.shore), c.wire] = False

    logger.debug(
        f"Built {spec.describe()} with {len(dead_q)} dead qubits, {len(dead_c)} dead couplers"
    )
    return HardwareGraph(
        spec=spec,
        dead_qubits=frozenset(dead_q),
        dead_couplers=frozenset(dead_c),
        graph=nx.freeze(graph),
        alive=alive,
    )


def ideal_hardware(rows: int, cols: Optional[int] = None, shore: int = 4) -> HardwareGraph:
    """Fault-free chip; cols defaults to rows"""
    return build_hardware(ChimeraSpec(rows, cols if cols is not None else rows, shore))


def preset_hardware(name: str, with_509_mask: bool = False) -> HardwareGraph:
    """Chip preset by name, optionally with the representative three-fault mask"""
    if name not in CHIP_PRESETS:
        raise InputError(f"unknown chip preset '{name}' (known: {', '.join(sorted(CHIP_PRESETS))})")
    spec = ChimeraSpec(*CHIP_PRESETS[name])
    dead = representative_509_mask(spec) if with_509_mask else []
    return build_hardware(spec, dead)


def representative_509_mask(spec: ChimeraSpec) -> List[int]:
    """Three dead qubits: one inside the first nexus, one on a bus column, one in cell (0,0)"""
    return sorted(spec.to_linear(*coord) for coord in REPRESENTATIVE_509_MASK)


def neighbors(hw: HardwareGraph, qubit: int) -> Set[int]:
    """
    Operable neighbours reachable over operable couplers.

    Raises:
        InputError: If the qubit is dead or outside the chip
    """
    if not hw.is_operable(qubit):
        state = "dead" if hw.spec.contains(qubit) else "out of range"
        raise InputError(f"qubit {qubit} is {state}")
    return set(hw.graph.neighbors(qubit))


def capacity_map(hw: HardwareGraph) -> CapacityMap:
    """Count operable wires per cell and shore (couplers are not considered)"""
    counts = hw.alive.sum(axis=3)
    return CapacityMap(
        vertical=counts[:, :, int(Shore.V)].astype(int),
        horizontal=counts[:, :, int(Shore.H)].astype(int),
    )


def random_fault_mask(spec: ChimeraSpec, count: int, seed: int,
                      exclude: Sequence[int] = ()) -> List[int]:
    """
    Draw ``count`` distinct dead qubits with a seeded generator.

    Args:
        spec: Chip dimensions
        count: Number of dead qubits
        seed: Generator seed; the same seed always gives the same mask
        exclude: Qubits never chosen

    Returns:
        Sorted list of qubit ids
    """
    pool = np.setdiff1d(np.arange(spec.num_qubits), np.asarray(exclude, dtype=int))
    if count > len(pool):
        raise InputError(f"cannot kill {count} of {len(pool)} candidate qubits")
    rng = np.random.default_rng(seed)
    return sorted(int(q) for q in rng.choice(pool, size=count, replace=False))
