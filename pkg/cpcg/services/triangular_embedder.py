"""
Triangular Embedder Service

Deterministic clique embeddings:
- Lower-triangle clique scheme of K_m on a ceil(m/L)-square cell block
- Nexus templates (one embedded K_m copy with interfaces) for the
  product construction
"""

from typing import Dict, FrozenSet, List, Optional, Tuple

from cpcg.exceptions import InputError, UnsupportedSizeError
from cpcg.logger import get_logger
from cpcg.models.chimera import ChimeraSpec, Shore
from cpcg.models.embedding import Embedding
from cpcg.models.layout import (
    Cell,
    Face,
    Interface,
    NexusLines,
    NexusTemplate,
    RelativeQubit,
    Subset,
)

logger = get_logger(__name__)


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def triangular_region(m: int, L: int) -> int:
    """Side of the square cell block used by the triangular scheme"""
    return ceil_div(m, L)


def triangular_embed(m: int, L: int, origin: Cell = (0, 0),
                     spec: Optional[ChimeraSpec] = None) -> Embedding:
    """
    Embed K_m with the lower-triangle scheme.

    Variable v (r = v // L, o = v % L) gets the H-qubits of row r over
    columns 0..r and the V-qubits of column r over rows r..N_r-1, relative
    to ``origin``. Every chain has N_r + 1 qubits.

    Args:
        m: Clique size
        L: Shore size
        origin: Top-left cell of the block
        spec: Target chip; defaults to the N_r x N_r chip the block fills

    Returns:
        Embedding with variables 0..m-1

    Raises:
        InputError: If the block does not fit on the chip
    """
    if m < 1:
        raise InputError(f"clique size must be >= 1, got {m}")
    size = triangular_region(m, L)
    if spec is None:
        spec = ChimeraSpec(size, size, L)
    if spec.shore != L:
        raise InputError(f"shore size {L} does not match chip {spec.describe()}")
    r0, c0 = origin
    if r0 < 0 or c0 < 0 or r0 + size > spec.rows or c0 + size > spec.cols:
        raise InputError(
            f"K_{m} needs a {size}x{size} block at {origin}, outside {spec.describe()}"
        )

    chains: Dict[int, List[int]] = {}
    for v in range(m):
        r, o = divmod(v, L)
        chain = [spec.to_linear(r0 + r, c0 + c, Shore.H, o) for c in range(r + 1)]
        chain += [spec.to_linear(r0 + rr, c0 + r, Shore.V, o) for rr in range(r, size)]
        chains[v] = chain
    logger.debug(f"Triangular K_{m} on {size}x{size} block at {origin}")
    return Embedding.from_chains(spec, chains)


def subset_sizes(m: int, L: int, k: int) -> Tuple[int, int]:
    """(|S_X|, |S_Y|) for a nexus of footprint k"""
    y_lines = k - ceil_div(k, 2)
    size_y = min(m // 2, y_lines * L)
    return m - size_y, size_y


def relative_lines(k: int) -> NexusLines:
    """Lines of a lone nexus anchored at (0, 0)"""
    s = ceil_div(k, 2)
    gy = k - s
    return NexusLines(
        copy=0,
        x_rows=tuple(gy + g for g in range(s)),
        x_cols=tuple(range(s)),
        y_rows=tuple(range(gy)),
        y_cols=tuple(s + h for h in range(gy)),
    )


def nexus_template(m: int, L: int, k: Optional[int] = None,
                   allow_general: bool = False) -> NexusTemplate:
    """
    Build the nexus for K_m.

    With the default footprint k = 2 (m <= 2L) this is the rotated-L on cells
    (0,1), (1,0), (1,1): X-chains {H(1,0,o), H(1,1,o), V(1,0,o)} and
    Y-chains {V(0,1,o), V(1,1,o), H(0,1,o)}. X exposes LEFT and DOWN faces,
    Y exposes UP and RIGHT. Larger footprints stack L-wide groups the same
    way: X-groups on the bottom rows turning down, Y-groups on the right
    columns turning right.

    Args:
        m: Clique size
        L: Shore size
        k: Footprint in cells; None picks 2, or ceil(m/L) for general sizes
        allow_general: Permit footprints above 2 (m > 2L)

    Raises:
        UnsupportedSizeError: If m > 2L without allow_general, or m > k*L
    """
    if m < 1:
        raise InputError(f"clique size must be >= 1, got {m}")
    needed = ceil_div(m, L)
    if k is None:
        k = 2 if needed <= 2 else needed
    if k > 2 and not allow_general:
        raise UnsupportedSizeError(
            f"K_{m} needs a footprint of {k} cells (m > 2L = {2 * L}); general nexus disabled"
        )
    if k < needed:
        raise UnsupportedSizeError(f"K_{m} does not fit a footprint of {k} cells with L={L}")

    size_x, size_y = subset_sizes(m, L, k)
    x_vars = tuple(range(size_x))
    y_vars = tuple(range(size_x, m))
    lines = relative_lines(k)
    s = len(lines.x_cols)

    chains: Dict[int, FrozenSet[RelativeQubit]] = {}
    interfaces: List[Interface] = []
    last = k - 1

    for g in range(ceil_div(size_x, L)):
        members = x_vars[g * L:(g + 1) * L]
        wires = {v: v % L for v in members}
        row, col = lines.x_rows[g], lines.x_cols[g]
        for v, o in wires.items():
            cells = {(row, c, Shore.H, o) for c in range(0, last + 1)}
            cells |= {(r, col, Shore.V, o) for r in range(row, last + 1)}
            chains[v] = frozenset(cells)
        interfaces.append(Interface(Face.LEFT, Subset.X, g, members, wires, (row, 0)))
        interfaces.append(Interface(Face.DOWN, Subset.X, g, members, wires, (last, col)))

    for h in range(ceil_div(size_y, L)):
        members = y_vars[h * L:(h + 1) * L]
        wires = {v: (v - size_x) % L for v in members}
        row, col = lines.y_rows[h], lines.y_cols[h]
        for v, o in wires.items():
            cells = {(r, col, Shore.V, o) for r in range(0, last + 1)}
            cells |= {(row, c, Shore.H, o) for c in range(col, last + 1)}
            chains[v] = frozenset(cells)
        interfaces.append(Interface(Face.UP, Subset.Y, h, members, wires, (0, col)))
        interfaces.append(Interface(Face.RIGHT, Subset.Y, h, members, wires, (row, last)))

    cells = frozenset((r, c) for chain in chains.values() for r, c, _, _ in chain)
    return NexusTemplate(
        m=m, L=L, k=k, x_vars=x_vars, y_vars=y_vars, lines=lines,
        chains=chains, cells=cells, interfaces=tuple(interfaces),
    )


def template_embedding(template: NexusTemplate, spec: Optional[ChimeraSpec] = None) -> Embedding:
    """Place a template at (0, 0) of a k x k chip (or ``spec``)"""
    if spec is None:
        spec = ChimeraSpec(template.k, template.k, template.L)
    chains = {
        v: [spec.to_linear(r, c, shore, o) for r, c, shore, o in sorted(chain)]
        for v, chain in template.chains.items()
    }
    return Embedding.from_chains(spec, chains)
