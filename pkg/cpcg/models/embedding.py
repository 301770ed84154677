"""
Embedding value types: chains, statistics and validation reports.
"""

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Set

from cpcg.models.chimera import ChimeraSpec


class ViolationKind(str, enum.Enum):
    """Kinds of minor-embedding violations"""
    OVERLAP = "OVERLAP"
    DISCONNECTED_CHAIN = "DISCONNECTED_CHAIN"
    DEAD_QUBIT = "DEAD_QUBIT"
    MISSING_EDGE = "MISSING_EDGE"
    UNMAPPED_VARIABLE = "UNMAPPED_VARIABLE"


class DecodePolicy(str, enum.Enum):
    """Chain-to-variable decoding rule"""
    STRICT = "STRICT"
    MAJORITY = "MAJORITY"


@dataclass(frozen=True)
class Embedding:
    """Map from logical variable to chain of qubit ids on a Chimera spec"""

    spec: ChimeraSpec
    chains: Dict[Hashable, FrozenSet[int]]

    @classmethod
    def from_chains(cls, spec: ChimeraSpec, chains: Mapping[Hashable, Iterable[int]]) -> "Embedding":
        return cls(spec=spec, chains={v: frozenset(c) for v, c in chains.items()})

    @property
    def variables(self) -> List[Hashable]:
        return list(self.chains)

    def chain(self, variable: Hashable) -> FrozenSet[int]:
        return self.chains[variable]

    def qubits(self) -> Set[int]:
        used: Set[int] = set()
        for chain in self.chains.values():
            used |= chain
        return used

    def owners(self) -> Dict[int, Hashable]:
        """Qubit -> variable; on overlap the later variable wins"""
        return {q: v for v, chain in self.chains.items() for q in chain}

    def with_chains(self, chains: Mapping[Hashable, Iterable[int]]) -> "Embedding":
        return Embedding.from_chains(self.spec, chains)


@dataclass
class ChainStats:
    """Chain length statistics of an embedding"""

    qubit_total: int
    chain_min: int
    chain_max: int
    chain_mean: float
    chain_stddev: float
    histogram: Dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "qubit_total": self.qubit_total,
            "chain_min": self.chain_min,
            "chain_max": self.chain_max,
            "chain_mean": round(self.chain_mean, 6),
            "chain_stddev": round(self.chain_stddev, 6),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


class Violation(NamedTuple):
    kind: ViolationKind
    detail: str


@dataclass
class ValidationReport:
    """Outcome of checking an embedding against a problem and a chip"""

    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def add(self, kind: ViolationKind, detail: str):
        self.violations.append(Violation(kind, detail))

    def kinds(self) -> Set[ViolationKind]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "violations": [{"kind": v.kind.value, "detail": v.detail} for v in self.violations],
        }


@dataclass
class EmbedOutcome:
    """
    Result of an embedder that may fail.

    ``details`` carries the failure report (or success diagnostics) as flat
    key/value pairs.
    """

    success: bool
    embedding: Optional[Embedding] = None
    steps: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    def report_text(self) -> str:
        """Machine-parsable key=value lines"""
        lines = [f"success={str(self.success).lower()}", f"steps={self.steps}"]
        lines += [f"{key}={value}" for key, value in self.details.items()]
        return "\n".join(lines)
