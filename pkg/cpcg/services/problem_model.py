"""
Problem Model Service

Logical problems in graph, QUBO and Ising form:
- Complete graphs and Cartesian products (K_m □ K_n)
- K-way graph partitioning QUBO with doubly indexed variables
- QUBO -> problem graph, QUBO -> Ising with exact offset
- Energy evaluation (single assignment and numpy batches)
- Detection of K_m □ K_n structure in an arbitrary graph
"""

import math
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from cpcg.exceptions import InputError
from cpcg.logger import get_logger
from cpcg.models.problem import (
    DoublyIndexedLabeling,
    IsingModel,
    Pair,
    ProblemGraph,
    QuboMatrix,
    Vartype,
)

logger = get_logger(__name__)

Model = Union[QuboMatrix, IsingModel]


def complete_graph(m: int) -> ProblemGraph:
    """K_m on nodes 0..m-1"""
    if m < 1:
        raise InputError(f"complete graph needs m >= 1, got {m}")
    return nx.complete_graph(m)


def cartesian_product(g1: ProblemGraph, g2: ProblemGraph) -> ProblemGraph:
    """
    Cartesian product with nodes (v1, v2).

    (v1, v2) ~ (u1, u2) iff v1 == u1 and v2 ~ u2, or v2 == u2 and v1 ~ u1.
    """
    if g1.number_of_nodes() == 0 or g2.number_of_nodes() == 0:
        raise InputError("cartesian product of an empty graph")
    product = nx.cartesian_product(g1, g2)
    # stable order: first factor major
    ordered = nx.Graph()
    ordered.add_nodes_from((v1, v2) for v1 in g1.nodes for v2 in g2.nodes)
    ordered.add_edges_from(product.edges)
    return ordered


def product_graph(m: int, n: int) -> ProblemGraph:
    """K_m □ K_n with labels (a, i): a in K_m, i in K_n"""
    return cartesian_product(complete_graph(m), complete_graph(n))


def partitioning_qubo(
    g: ProblemGraph, K: int, A: float, B: float
) -> Tuple[QuboMatrix, DoublyIndexedLabeling]:
    """
    K-way partitioning QUBO maximising intra-partition edges.

    Minimises -sum_k sum_{(u,w) in E} x_uk x_wk
              + A sum_k (sum_i x_ik - P)^2 + B sum_i (sum_k x_ik - 1)^2
    with P = N / K kept real-valued. Variable index (i-1)*K + (k-1) holds x_ik.

    Args:
        g: Graph to partition (node order defines i = 1..N)
        K: Number of partitions (>= 2)
        A: Balance penalty
        B: One-slot-per-vertex penalty

    Returns:
        (QuboMatrix with constant offset, labeling variable index -> (i, k))
    """
    if K < 2:
        raise InputError(f"partitioning needs K >= 2, got {K}")
    if A <= 0 or B <= 0:
        raise InputError(f"penalties must be positive, got A={A}, B={B}")

    nodes = list(g.nodes)
    N = len(nodes)
    P = N / K
    position = {v: idx for idx, v in enumerate(nodes)}

    def var(i: int, k: int) -> int:
        return i * K + k

    terms: Dict[Pair, float] = {}

    def add(i: int, j: int, value: float):
        key = (i, j) if i <= j else (j, i)
        terms[key] = terms.get(key, 0.0) + value

    # objective: -x_uk x_wk per edge and slot
    for u, w in g.edges:
        for k in range(K):
            add(var(position[u], k), var(position[w], k), -1.0)

    # balance: A (sum_i x_ik - P)^2
    for k in range(K):
        for i in range(N):
            add(var(i, k), var(i, k), A * (1.0 - 2.0 * P))
            for i2 in range(i + 1, N):
                add(var(i, k), var(i2, k), 2.0 * A)

    # one slot per vertex: B (sum_k x_ik - 1)^2
    for i in range(N):
        for k in range(K):
            add(var(i, k), var(i, k), -B)
            for k2 in range(k + 1, K):
                add(var(i, k), var(i, k2), 2.0 * B)

    offset = A * K * P * P + B * N
    labels = [(i + 1, k + 1) for i in range(N) for k in range(K)]
    qubo = QuboMatrix.from_terms(N * K, terms, offset=offset, labels=labels)
    labeling = DoublyIndexedLabeling(
        N=N, K=K, pairs={var(i, k): (i + 1, k + 1) for i in range(N) for k in range(K)}
    )
    logger.debug(f"Partitioning QUBO: N={N}, K={K}, {len(qubo.terms)} terms, offset={offset}")
    return qubo, labeling


def qubo_problem_graph(q: QuboMatrix) -> ProblemGraph:
    """Node per variable index; edge (i, j) iff Q[i, j] != 0 off the diagonal"""
    graph = nx.Graph()
    graph.add_nodes_from(range(q.n))
    graph.add_edges_from((i, j) for (i, j), c in q.terms.items() if i != j and c != 0)
    return graph


def ising_from_qubo(q: QuboMatrix) -> Tuple[IsingModel, float]:
    """
    Substitute x = (1 + s) / 2.

    Returns:
        (IsingModel, offset) with E_qubo(x) = E_ising(s) + offset for every x
    """
    h = np.zeros(q.n)
    J: Dict[Pair, float] = {}
    offset = q.offset
    for (i, j), c in q.terms.items():
        if i == j:
            h[i] += c / 2.0
            offset += c / 2.0
        else:
            J[(i, j)] = J.get((i, j), 0.0) + c / 4.0
            h[i] += c / 4.0
            h[j] += c / 4.0
            offset += c / 4.0
    labels = q.labels if q.labels else tuple(range(q.n))
    return IsingModel(variables=tuple(labels), h=h, J=J), offset


def _check_assignment(model: Model, values: np.ndarray):
    n = model.n
    if values.shape[-1] != n:
        raise InputError(f"assignment has {values.shape[-1]} values for {n} variables")
    allowed = (0, 1) if isinstance(model, QuboMatrix) else (-1, 1)
    if not np.isin(values, allowed).all():
        raise InputError(f"assignment values must be in {allowed}")


def energy(model: Model, assignment: Sequence[int]) -> float:
    """
    Exact energy of one assignment.

    QUBO assignments use {0, 1} and include the QUBO offset; Ising
    assignments use {-1, +1}.

    Raises:
        InputError: On length or domain mismatch
    """
    values = np.asarray(assignment)
    _check_assignment(model, values.reshape(1, -1) if values.ndim == 1 else values)
    return float(energies(model, values.reshape(1, -1))[0])


def energies(model: Model, states: np.ndarray) -> np.ndarray:
    """Vectorised energies of a (batch, n) array of assignments"""
    states = np.asarray(states, dtype=float)
    if isinstance(model, QuboMatrix):
        dense = model.to_dense()
        return np.einsum("bi,ij,bj->b", states, dense, states) + model.offset
    return states @ model.h + np.einsum("bi,ij,bj->b", states, model.upper_dense(), states)


def all_states(n: int, vartype: Vartype) -> np.ndarray:
    """Every assignment of n variables, shape (2**n, n)"""
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    return bits if vartype is Vartype.BINARY else 2 * bits - 1


def ground_states(model: Model, chunk: int = 1 << 16) -> Tuple[float, List[np.ndarray]]:
    """
    Exhaustive minimum over all 2**n assignments.

    Returns:
        (ground energy, list of minimising assignments)
    """
    n = model.n
    vartype = Vartype.BINARY if isinstance(model, QuboMatrix) else Vartype.SPIN
    best = math.inf
    minimisers: List[np.ndarray] = []
    shifts = np.arange(n)
    for begin in range(0, 2 ** n, chunk):
        index = np.arange(begin, min(begin + chunk, 2 ** n))
        bits = (index[:, None] >> shifts) & 1
        states = bits if vartype is Vartype.BINARY else 2 * bits - 1
        values = energies(model, states)
        low = values.min()
        if low < best - 1e-9:
            best = float(low)
            minimisers = []
        if low <= best + 1e-9:
            minimisers.extend(states[np.abs(values - best) <= 1e-9])
    return best, minimisers


def _grid_labeling(vertex_copy: Dict[Hashable, int], vertex_slot: Dict[Hashable, int],
                   m: int, n: int) -> Optional[DoublyIndexedLabeling]:
    pairs = {v: (vertex_slot[v] + 1, vertex_copy[v] + 1) for v in vertex_copy}
    if len(set(pairs.values())) != m * n:
        return None
    return DoublyIndexedLabeling(N=m, K=n, pairs=pairs)


def _rebuild_matches(g: ProblemGraph, labeling: DoublyIndexedLabeling) -> bool:
    by_pair = {pair: v for v, pair in labeling.pairs.items()}
    expected = set()
    for (a, i), v in by_pair.items():
        for b in range(a + 1, labeling.N + 1):
            expected.add(frozenset((v, by_pair[(b, i)])))
        for j in range(i + 1, labeling.K + 1):
            expected.add(frozenset((v, by_pair[(a, j)])))
    return expected == {frozenset(e) for e in g.edges}


def _index_cliques(cliques: List[frozenset], order: Dict[Hashable, int]) -> Dict[Hashable, int]:
    ranked = sorted(cliques, key=lambda c: min(order[v] for v in c))
    return {v: idx for idx, clique in enumerate(ranked) for v in clique}


def _is_clique(g: ProblemGraph, nodes) -> bool:
    nodes = list(nodes)
    return all(g.has_edge(u, v) for idx, u in enumerate(nodes) for v in nodes[idx + 1:])


def _factor_sizes(g: ProblemGraph) -> Optional[Tuple[int, int]]:
    count = g.number_of_nodes()
    degrees = {d for _, d in g.degree}
    if count < 4 or len(degrees) != 1:
        return None
    total = degrees.pop() + 2
    disc = total * total - 4 * count
    if disc < 0:
        return None
    root = math.isqrt(disc)
    if root * root != disc or (total + root) % 2:
        return None
    m, n = (total + root) // 2, (total - root) // 2
    if n < 2 or m * n != count:
        return None
    return m, n


def detect_cpcg(g: ProblemGraph) -> Optional[Tuple[int, int, DoublyIndexedLabeling]]:
    """
    Recognise g as K_m □ K_n with m >= n >= 2.

    Returns:
        (m, n, labeling) where the labeling maps each vertex to (a, i),
        a = 1..m indexing inside a K_m copy and i = 1..n the copy;
        None when g is not such a product.
    """
    sizes = _factor_sizes(g)
    if sizes is None:
        return None
    m, n = sizes
    order = {v: idx for idx, v in enumerate(g.nodes)}

    if m != n:
        copy_edges, slot_edges = [], []
        for u, v in g.edges:
            common = len(set(g[u]) & set(g[v]))
            if common == m - 2:
                copy_edges.append((u, v))
            elif common == n - 2:
                slot_edges.append((u, v))
            else:
                return None
        copy_cliques = _class_components(g, copy_edges, m, n)
        slot_cliques = _class_components(g, slot_edges, n, m)
        if copy_cliques is None or slot_cliques is None:
            return None
    else:
        cliques = set()
        for v in g.nodes:
            parts = list(nx.connected_components(g.subgraph(g[v])))
            if len(parts) != 2 or any(len(p) != m - 1 or not _is_clique(g, p) for p in parts):
                return None
            cliques.update(frozenset(p | {v}) for p in parts)
        if len(cliques) != 2 * m:
            return None
        ranked = sorted(cliques, key=lambda c: sorted(order[v] for v in c))
        first = ranked[0]
        copy_cliques = [c for c in ranked if c == first or not (c & first)]
        slot_cliques = [c for c in ranked if c != first and c & first]
        if len(copy_cliques) != n or len(slot_cliques) != m:
            return None

    labeling = _grid_labeling(
        _index_cliques(copy_cliques, order), _index_cliques(slot_cliques, order), m, n
    )
    if labeling is None or not _rebuild_matches(g, labeling):
        return None
    logger.debug(f"Detected K_{m} □ K_{n} structure on {g.number_of_nodes()} vertices")
    return m, n, labeling


def _class_components(g: ProblemGraph, edges: List[Tuple[Hashable, Hashable]],
                      size: int, count: int) -> Optional[List[frozenset]]:
    """Components of one edge class; must be ``count`` disjoint cliques of ``size`` covering g"""
    sub = nx.Graph()
    sub.add_nodes_from(g.nodes)
    sub.add_edges_from(edges)
    parts = [frozenset(c) for c in nx.connected_components(sub)]
    if len(parts) != count:
        return None
    for part in parts:
        if len(part) != size or sub.subgraph(part).number_of_edges() != size * (size - 1) // 2:
            return None
    return parts
