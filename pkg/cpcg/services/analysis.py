"""
Analysis Service

Closed-form size and optimality reasoning for product embeddings:
- Chimera treewidth and the product treewidth lower bound
- Optimality certificates for the diagonal construction
- Largest embeddable products for a chip (diagonal and triangular)
- Predicted chain statistics
- Refusal certificates for products that do not fit a chip
"""

import enum
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from cpcg.exceptions import InputError
from cpcg.logger import get_logger
from cpcg.services.cpcg_embedder import oriented_size, required_size
from cpcg.services.triangular_embedder import ceil_div

logger = get_logger(__name__)


class Verdict(str, enum.Enum):
    PROVABLY_OPTIMAL = "PROVABLY_OPTIMAL"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    PROVEN_IMPOSSIBLE = "PROVEN_IMPOSSIBLE"
    BEYOND_CONSTRUCTION = "BEYOND_CONSTRUCTION"


def _as_text(fields: Dict[str, Any]) -> str:
    return "\n".join(f"{key}={'none' if value is None else value}" for key, value in fields.items())


def chimera_treewidth(N: int, L: int) -> int:
    """Treewidth of C_{N,N,L}: N * L"""
    if N < 1 or L < 1:
        raise InputError(f"N and L must be positive, got N={N}, L={L}")
    return N * L


def product_tw_lower_bound(m: int, n: int) -> Optional[int]:
    """
    Lower bound m(n+1)/2 - 1 on tw(K_m □ K_n), valid for odd n.

    Returns:
        The bound, or None (not applicable) for even n
    """
    if m < 1 or n < 1:
        raise InputError(f"m and n must be positive, got m={m}, n={n}")
    if n % 2 == 0:
        return None
    return m * (n + 1) // 2 - 1


def best_certified_bound(m: int, n: int) -> Optional[int]:
    """
    Largest applicable bound over both factor orders and the odd minors
    K_m □ K_(n-1), K_(m-1) □ K_n (treewidth is minor-monotone).
    """
    candidates = [
        product_tw_lower_bound(m, n),
        product_tw_lower_bound(n, m),
        product_tw_lower_bound(m, n - 1) if n > 1 else None,
        product_tw_lower_bound(n, m - 1) if m > 1 else None,
    ]
    known = [c for c in candidates if c is not None]
    return max(known) if known else None


@dataclass
class OptimalityCertificate:
    """Treewidth argument that no smaller square chip can host the product"""

    m: int
    n: int
    L: int
    constructive_n: int
    tw_lower_bound: Optional[int]
    chimera_tw_below: int
    min_chip_side: Optional[int]
    verdict: Verdict
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "n": self.n,
            "L": self.L,
            "constructive_N": self.constructive_n,
            "tw_lower_bound": self.tw_lower_bound,
            "chimera_tw_at_N_minus_1": self.chimera_tw_below,
            "min_chip_side": self.min_chip_side,
            "verdict": self.verdict.value,
            "reason": self.reason,
        }

    def to_text(self) -> str:
        return _as_text(self.to_dict())


def optimality_certificate(m: int, n: int, L: int) -> OptimalityCertificate:
    """
    Certify the diagonal construction's chip size as optimal.

    Applies when one factor is divisible by 2L and the other is odd: any
    C_{N',N',L} containing the product needs N'L >= tw >= b(a+1)/2 - 1
    (a odd, b the other factor), which forces N' >= N.
    """
    if m < 1 or n < 1 or L < 1:
        raise InputError(f"sizes must be positive, got m={m}, n={n}, L={L}")

    if m % (2 * L) == 0 and n % 2 == 1:
        nexus, copies = m, n
    elif n % (2 * L) == 0 and m % 2 == 1:
        nexus, copies = n, m
    else:
        N = oriented_size(m, n, L)
        return OptimalityCertificate(
            m, n, L, N, best_certified_bound(m, n), (N - 1) * L,
            None, Verdict.NOT_APPLICABLE,
            f"needs one factor divisible by {2 * L} and the other odd",
        )

    N = required_size(nexus, copies, L)
    bound = product_tw_lower_bound(nexus, copies)
    below = (N - 1) * L
    min_side = ceil_div(bound, L)
    if bound > below and min_side >= N:
        verdict, reason = Verdict.PROVABLY_OPTIMAL, f"tw >= {bound} > {below} = tw(C_{{{N - 1},{N - 1},{L}}})"
    else:
        verdict, reason = Verdict.NOT_APPLICABLE, f"bound {bound} does not exceed {below}"
    logger.debug(f"Certificate K_{m} □ K_{n}, L={L}: {verdict.value}")
    return OptimalityCertificate(m, n, L, N, bound, below, min_side, verdict, reason)


def max_embeddable_n(N: int, L: int, m: int) -> int:
    """Largest n with required_size(m, n, L) <= N (0 if not even one copy fits)"""
    if N < 1 or L < 1 or m < 1:
        raise InputError(f"sizes must be positive, got N={N}, L={L}, m={m}")
    k = ceil_div(m, L)
    if N < k:
        return 0
    return (N - k) // ceil_div(k, 2) + 1


def triangular_max_n(N: int, L: int, m: int) -> int:
    """Largest n with K_(m*n) triangular-embeddable on C_{N,N,L}"""
    if N < 1 or L < 1 or m < 1:
        raise InputError(f"sizes must be positive, got N={N}, L={L}, m={m}")
    return N * L // m


def predicted_cpcg_stats(m: int, n: int, L: int) -> Dict[str, int]:
    """
    Chain length and qubit total of the diagonal construction.

    Footprints k = ceil(m/L) <= 2 give uniform chains of n + k qubits.

    Raises:
        InputError: For footprints above 2, whose chains are not uniform
    """
    k = ceil_div(m, L)
    if k > 2:
        raise InputError(f"no closed form for footprint {k} (m={m}, L={L})")
    return {"chip_side": required_size(m, n, L), "chain_length": n + k, "qubit_total": m * n * (n + k)}


def predicted_triangular_stats(size: int, L: int) -> Dict[str, int]:
    """Chain length and qubit total of the triangular K_size"""
    side = ceil_div(size, L)
    return {"chip_side": side, "chain_length": side + 1, "qubit_total": size * (side + 1)}


@dataclass
class RefusalCertificate:
    """Why a product is not embedded on a given chip"""

    m: int
    n: int
    L: int
    chip_side: int
    required_side: int
    chimera_tw: int
    tw_lower_bound: Optional[int]
    verdict: Verdict
    notes: List[str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "n": self.n,
            "L": self.L,
            "chip_side": self.chip_side,
            "required_side": self.required_side,
            "chimera_tw": self.chimera_tw,
            "tw_lower_bound": self.tw_lower_bound,
            "verdict": self.verdict.value,
            "notes": "; ".join(self.notes),
        }

    def to_text(self) -> str:
        return _as_text(self.to_dict())


def refusal_certificate(m: int, n: int, N: int, L: int) -> RefusalCertificate:
    """
    Explain why K_m □ K_n does not fit C_{N,N,L}.

    PROVEN_IMPOSSIBLE when a certified treewidth lower bound exceeds N*L;
    otherwise BEYOND_CONSTRUCTION (the diagonal construction needs more
    rows, but no method is ruled out).
    """
    needed = oriented_size(m, n, L)
    tw_chip = chimera_treewidth(N, L)
    bound = best_certified_bound(m, n)
    notes = []
    if n % 2 == 0 and m % 2 == 0:
        notes.append("both factors even: bound taken from an odd minor")
    if bound is not None and bound > tw_chip:
        verdict = Verdict.PROVEN_IMPOSSIBLE
        notes.append(f"tw(K_{m} □ K_{n}) >= {bound} > {tw_chip} = tw(C_{{{N},{N},{L}}})")
    else:
        verdict = Verdict.BEYOND_CONSTRUCTION
        notes.append(f"construction needs C_{{{needed},{needed},{L}}}")
    return RefusalCertificate(m, n, L, N, needed, tw_chip, bound, verdict, notes)
