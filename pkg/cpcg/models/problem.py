"""
Logical problem models: graphs, QUBO and Ising forms, doubly indexed labels.

Quadratic forms store each unordered pair once, so a coupling J[(i, j)]
with i < j contributes J * s_i * s_j exactly once to the energy.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from cpcg.exceptions import InputError

# Problem graphs are plain networkx graphs; variable labels are node keys.
ProblemGraph = nx.Graph

Pair = Tuple[int, int]


class Vartype(str, enum.Enum):
    """Variable domain of an assignment"""
    SPIN = "SPIN"
    BINARY = "BINARY"


def _normalized_terms(terms: Mapping[Pair, float], n: int) -> Dict[Pair, float]:
    folded: Dict[Pair, float] = {}
    for (i, j), coeff in terms.items():
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"term ({i}, {j}) outside dimension {n}")
        key = (i, j) if i <= j else (j, i)
        folded[key] = folded.get(key, 0.0) + float(coeff)
    return {key: folded[key] for key in sorted(folded)}


@dataclass(frozen=True)
class QuboMatrix:
    """
    Sparse upper-triangular QUBO: E(x) = sum_{i<=j} Q[i,j] x_i x_j + offset.

    ``labels`` names the variables (defaults to 0..n-1).
    """

    n: int
    terms: Dict[Pair, float]
    offset: float = 0.0
    labels: Tuple[Hashable, ...] = ()

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[Pair, float], offset: float = 0.0,
                   labels: Optional[Sequence[Hashable]] = None) -> "QuboMatrix":
        """Build a QUBO, folding (j, i) onto (i, j) and summing duplicates"""
        if n < 0:
            raise InputError(f"QUBO dimension must be non-negative, got {n}")
        names = tuple(labels) if labels is not None else tuple(range(n))
        if len(names) != n:
            raise InputError(f"expected {n} labels, got {len(names)}")
        return cls(n=n, terms=_normalized_terms(terms, n), offset=float(offset), labels=names)

    def coefficient(self, i: int, j: int) -> float:
        key = (i, j) if i <= j else (j, i)
        return self.terms.get(key, 0.0)

    def to_dense(self) -> np.ndarray:
        """Upper-triangular dense matrix (diagonal = linear terms)"""
        dense = np.zeros((self.n, self.n))
        for (i, j), coeff in self.terms.items():
            dense[i, j] += coeff
        return dense


@dataclass(frozen=True, eq=False)
class IsingModel:
    """E(s) = sum_i h_i s_i + sum_{i<j} J[i,j] s_i s_j over labelled spins"""

    variables: Tuple[Hashable, ...]
    h: np.ndarray
    J: Dict[Pair, float] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.h) != len(self.variables):
            raise InputError(f"h has {len(self.h)} entries for {len(self.variables)} variables")
        for i, j in self.J:
            if not i < j < len(self.variables):
                raise InputError(f"coupling ({i}, {j}) must satisfy i < j < {len(self.variables)}")

    @property
    def n(self) -> int:
        return len(self.variables)

    def index(self) -> Dict[Hashable, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def problem_graph(self) -> ProblemGraph:
        """Graph with a node per variable and an edge per non-zero coupling"""
        graph = nx.Graph()
        graph.add_nodes_from(self.variables)
        graph.add_edges_from(
            (self.variables[i], self.variables[j]) for (i, j), c in self.J.items() if c != 0
        )
        return graph

    def upper_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n))
        for (i, j), coeff in self.J.items():
            dense[i, j] = coeff
        return dense


@dataclass(frozen=True)
class DoublyIndexedLabeling:
    """
    Bijection between variables and 1-based pairs (i, k).

    The first index runs over a clique inside one copy, the second over copies:
    variables sharing k form a K_N clique, variables sharing i a K_K clique.
    """

    N: int
    K: int
    pairs: Dict[Hashable, Tuple[int, int]]

    def __post_init__(self):
        seen = set(self.pairs.values())
        expected = {(i, k) for i in range(1, self.N + 1) for k in range(1, self.K + 1)}
        if len(seen) != len(self.pairs) or seen != expected:
            raise InputError(f"labeling is not a bijection onto {self.N}x{self.K} pairs")

    def pair_of(self, variable: Hashable) -> Tuple[int, int]:
        return self.pairs[variable]

    def variable_of(self, i: int, k: int) -> Hashable:
        for variable, pair in self.pairs.items():
            if pair == (i, k):
                return variable
        raise KeyError((i, k))

    def variables(self) -> List[Hashable]:
        return list(self.pairs)
