"""
Embedding Core Service

Checks and uses minor embeddings:
- Validation against a problem graph and a (possibly faulty) chip
- Chain length statistics
- Lowering a logical Ising model onto physical qubits
- Decoding physical samples back to logical variables
"""

import heapq
import statistics
from collections import Counter
from typing import Dict, FrozenSet, Hashable, List, Mapping, Optional, Tuple

import networkx as nx
import numpy as np

from cpcg.exceptions import DecodeError, InputError
from cpcg.logger import get_logger
from cpcg.models.chimera import HardwareGraph
from cpcg.models.embedding import (
    ChainStats,
    DecodePolicy,
    Embedding,
    ValidationReport,
    ViolationKind,
)
from cpcg.models.problem import IsingModel, ProblemGraph, Vartype

logger = get_logger(__name__)


def chain_coupler(hw: HardwareGraph, chain_a: FrozenSet[int], chain_b: FrozenSet[int]) -> Optional[Tuple[int, int]]:
    """Lowest-id operable coupler between two chains, as (qubit in a, qubit in b)"""
    best: Optional[Tuple[int, int]] = None
    small, large, flipped = (chain_a, chain_b, False) if len(chain_a) <= len(chain_b) else (chain_b, chain_a, True)
    for q in sorted(small):
        if q not in hw.graph:
            continue
        for p in hw.graph[q]:
            if p in large:
                pair = (p, q) if flipped else (q, p)
                if best is None or sorted(pair) < sorted(best):
                    best = pair
    return best


def validate(problem: ProblemGraph, hw: HardwareGraph, emb: Embedding) -> ValidationReport:
    """
    Check that emb is a minor embedding of problem into hw.

    Every variable must be mapped to a non-empty chain of operable qubits,
    chains must be disjoint and connected over operable couplers, and each
    problem edge needs an operable coupler between its two chains.

    Raises:
        InputError: If the embedding was made for a different chip geometry
    """
    if emb.spec != hw.spec:
        raise InputError(f"embedding targets {emb.spec.describe()} but hardware is {hw.spec.describe()}")

    report = ValidationReport()

    for variable in problem.nodes:
        if not emb.chains.get(variable):
            report.add(ViolationKind.UNMAPPED_VARIABLE, f"variable {variable} has no chain")

    owner: Dict[int, Hashable] = {}
    for variable, chain in emb.chains.items():
        for q in sorted(chain):
            if not hw.is_operable(q):
                report.add(ViolationKind.DEAD_QUBIT, f"variable {variable} uses inoperable qubit {q}")
            if q in owner:
                report.add(ViolationKind.OVERLAP, f"qubit {q} shared by {owner[q]} and {variable}")
            else:
                owner[q] = variable

    for variable, chain in emb.chains.items():
        live = [q for q in chain if q in hw.graph]
        if len(live) > 1 and not nx.is_connected(hw.graph.subgraph(live)):
            report.add(ViolationKind.DISCONNECTED_CHAIN, f"chain of {variable} is disconnected")

    for u, v in problem.edges:
        if not emb.chains.get(u) or not emb.chains.get(v):
            continue
        if chain_coupler(hw, emb.chains[u], emb.chains[v]) is None:
            report.add(ViolationKind.MISSING_EDGE, f"no coupler between chains of {u} and {v}")

    if not report.valid:
        logger.debug(f"Validation found {len(report.violations)} violations")
    return report


def chain_stats(emb: Embedding) -> ChainStats:
    """Exact statistics over chain lengths (population standard deviation)"""
    lengths = [len(c) for c in emb.chains.values()]
    if not lengths:
        return ChainStats(0, 0, 0, 0.0, 0.0, {})
    return ChainStats(
        qubit_total=sum(lengths),
        chain_min=min(lengths),
        chain_max=max(lengths),
        chain_mean=statistics.fmean(lengths),
        chain_stddev=statistics.pstdev(lengths),
        histogram=dict(sorted(Counter(lengths).items())),
    )


def spanning_tree(hw: HardwareGraph, chain: FrozenSet[int]) -> List[Tuple[int, int]]:
    """
    Deterministic spanning tree of a chain, grown lowest id first.

    Returns:
        Tree edges (parent, child) in growth order
    """
    if not chain:
        return []
    root = min(chain)
    in_tree = {root}
    frontier = [(p, root) for p in hw.graph[root] if p in chain]
    heapq.heapify(frontier)
    edges: List[Tuple[int, int]] = []
    while frontier:
        qubit, parent = heapq.heappop(frontier)
        if qubit in in_tree:
            continue
        in_tree.add(qubit)
        edges.append((parent, qubit))
        for p in hw.graph[qubit]:
            if p in chain and p not in in_tree:
                heapq.heappush(frontier, (p, qubit))
    return edges


def lower_model(model: IsingModel, emb: Embedding, hw: HardwareGraph,
                chain_strength: float) -> IsingModel:
    """
    Map a logical Ising model onto physical qubits.

    h_i is split equally over chain(i); each J_ij sits on the lowest-id
    coupler between the two chains; every chain's spanning tree edges get
    -chain_strength.

    Args:
        model: Logical model whose variables are keys of emb
        emb: Valid embedding of the model's problem graph
        hw: Target chip
        chain_strength: Ferromagnetic chain coupling magnitude (> 0)

    Returns:
        IsingModel whose variables are the sorted physical qubit ids

    Raises:
        InputError: If chain_strength is not positive or the embedding is invalid
    """
    if chain_strength <= 0:
        raise InputError(f"chain strength must be positive, got {chain_strength}")
    report = validate(model.problem_graph(), hw, emb)
    if not report.valid:
        first = report.violations[0]
        raise InputError(f"embedding invalid for model: {first.kind.value} {first.detail}")

    qubits = sorted(q for v in model.variables for q in emb.chains[v])
    index = {q: i for i, q in enumerate(qubits)}
    h = np.zeros(len(qubits))
    J: Dict[Tuple[int, int], float] = {}

    def couple(a: int, b: int, value: float):
        key = (index[a], index[b]) if index[a] < index[b] else (index[b], index[a])
        J[key] = J.get(key, 0.0) + value

    for i, variable in enumerate(model.variables):
        chain = emb.chains[variable]
        for q in chain:
            h[index[q]] += model.h[i] / len(chain)
        for a, b in spanning_tree(hw, chain):
            couple(a, b, -chain_strength)

    for (i, j), value in model.J.items():
        if value == 0:
            continue
        a, b = chain_coupler(hw, emb.chains[model.variables[i]], emb.chains[model.variables[j]])
        couple(a, b, value)

    logger.debug(f"Lowered {model.n} variables onto {len(qubits)} qubits, {len(J)} couplings")
    return IsingModel(variables=tuple(qubits), h=h, J=J)


def default_chain_strength(model: IsingModel) -> float:
    """1 + the largest total coupling magnitude (|h_i| + sum_j |J_ij|) of any variable"""
    load = np.abs(np.asarray(model.h, dtype=float)).copy()
    for (i, j), value in model.J.items():
        load[i] += abs(value)
        load[j] += abs(value)
    return 1.0 + float(load.max(initial=0.0))


def chain_offset(emb: Embedding, chain_strength: float) -> float:
    """Energy contributed by intact chain trees: -chain_strength * sum(|chain| - 1)"""
    return -chain_strength * sum(len(c) - 1 for c in emb.chains.values())


def decode(assignment: Mapping[int, int], emb: Embedding,
           policy: DecodePolicy = DecodePolicy.STRICT,
           vartype: Vartype = Vartype.SPIN) -> Dict[Hashable, int]:
    """
    Collapse chains to logical values.

    STRICT rejects any non-uniform chain; MAJORITY votes per chain and
    breaks ties toward -1 (SPIN) or 0 (BINARY).

    Raises:
        InputError: If a chain qubit has no value
        DecodeError: STRICT decoding with broken chains
    """
    low = -1 if vartype is Vartype.SPIN else 0
    result: Dict[Hashable, int] = {}
    broken = []
    for variable, chain in emb.chains.items():
        missing = [q for q in chain if q not in assignment]
        if missing:
            raise InputError(f"assignment lacks qubits {sorted(missing)[:5]} of chain {variable}")
        votes = Counter(int(assignment[q]) for q in chain)
        if len(votes) > 1:
            broken.append(variable)
        ranked = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0] != low, kv[0]))
        result[variable] = ranked[0][0]
    if broken and policy is DecodePolicy.STRICT:
        raise DecodeError(broken)
    return result
