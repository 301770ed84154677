"""
CPCG Embedder Service

Systematic embedding of K_m □ K_n into a square Chimera chip:
- Nexus copies placed along the main diagonal at stride ceil(k/2)
- Straight bus runs carrying each variable group away from its nexus
- Junction cells where buses of two copies meet and realise the
  inter-copy edges ((a, i), (a, j))
- Line layouts with per-line floors, shared with the fault-tolerant embedder
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Mapping, Optional, Set, Tuple

from cpcg.config import settings
from cpcg.exceptions import InputError, UnsupportedSizeError
from cpcg.logger import get_logger
from cpcg.models.chimera import ChimeraSpec, Shore
from cpcg.models.embedding import Embedding
from cpcg.models.layout import (
    BusPlan,
    BusRun,
    Cell,
    Junction,
    NexusLines,
    NexusTemplate,
    Placement,
    Subset,
)
from cpcg.models.problem import DoublyIndexedLabeling, ProblemGraph
from cpcg.services.triangular_embedder import ceil_div, nexus_template

logger = get_logger(__name__)

# (copy, family, index) -> lowest admissible line; families below
LineFloors = Dict[Tuple[int, str, int], int]
WireOverrides = Mapping[Tuple[int, Subset, int, Shore], Mapping[int, int]]

FAMILIES = ("y_rows", "x_rows", "x_cols", "y_cols")


def required_size(m: int, n: int, L: int) -> int:
    """Chip side N = ceil(ceil(m/L)/2) * (n-1) + ceil(m/L)"""
    if m < 1 or n < 1 or L < 1:
        raise InputError(f"sizes must be positive, got m={m}, n={n}, L={L}")
    k = ceil_div(m, L)
    return ceil_div(k, 2) * (n - 1) + k


def oriented_size(m: int, n: int, L: int) -> int:
    """Smallest chip side over both choices of nexus factor"""
    return min(required_size(m, n, L), required_size(n, m, L))


def product_template(m: int, L: int, allow_general: Optional[bool] = None) -> NexusTemplate:
    """Nexus used by the product construction: footprint k = ceil(m/L)"""
    general = settings.ALLOW_GENERAL_NEXUS if allow_general is None else allow_general
    return nexus_template(m, L, k=ceil_div(m, L), allow_general=general)


def compute_layout(template: NexusTemplate, n: int,
                   floors: Optional[LineFloors] = None) -> List[NexusLines]:
    """
    Choose the lines of every copy.

    Lines are packed greedily: each family grows strictly from copy to copy,
    Y-rows sit above X-rows and X-columns left of Y-columns within a copy.
    Without floors this reproduces the diagonal placement at (i*s, i*s).
    """
    floors = floors or {}
    s, gy = template.stride, template.y_line_count
    row_cursor = col_cursor = 0
    prev: Optional[NexusLines] = None
    layout: List[NexusLines] = []

    for i in range(n):
        def pick(family: str, count: int, start: int, prev_lines: Tuple[int, ...]) -> Tuple[int, ...]:
            nxt = max(start, prev_lines[-1] + 1 if prev_lines else 0)
            chosen = []
            for idx in range(count):
                nxt = max(nxt, floors.get((i, family, idx), 0))
                chosen.append(nxt)
                nxt += 1
            return tuple(chosen)

        y_rows = pick("y_rows", gy, row_cursor, prev.y_rows if prev else ())
        x_rows = pick("x_rows", s, max(row_cursor + gy, y_rows[-1] + 1 if y_rows else 0),
                      prev.x_rows if prev else ())
        x_cols = pick("x_cols", s, col_cursor, prev.x_cols if prev else ())
        y_cols = pick("y_cols", gy, max(col_cursor + s, x_cols[-1] + 1),
                      prev.y_cols if prev else ())
        prev = NexusLines(i, x_rows, x_cols, y_rows, y_cols)
        layout.append(prev)
        row_cursor = x_rows[0] + (s - gy)
        col_cursor = x_cols[-1] + 1

    return layout


def layout_extent(layout: List[NexusLines]) -> int:
    return max(lines.extent for lines in layout)


def default_wires(template: NexusTemplate, subset: Subset, group: int) -> Dict[int, int]:
    return {v: template.locate(v)[2] for v in template.group_vars(subset, group)}


def plan_runs(template: NexusTemplate, layout: List[NexusLines],
              wires: Optional[WireOverrides] = None) -> List[BusRun]:
    """
    One straight run per (copy, subset, group, shore), trimmed to the
    farthest cell any edge of that group needs.
    """
    wires = wires or {}
    first, last = layout[0], layout[-1]
    runs: List[BusRun] = []

    def make(i: int, subset: Subset, group: int, shore: Shore, line: int, start: int, stop: int):
        key = (i, subset, group, shore)
        assigned = dict(wires.get(key) or default_wires(template, subset, group))
        runs.append(BusRun(i, subset, group, shore, line, start, stop, assigned))

    for i, lines in enumerate(layout):
        for g in template.groups(Subset.X):
            h_stop = max(lines.y_cols[-1] if lines.y_cols else lines.x_cols[g], lines.x_cols[g])
            make(i, Subset.X, g, Shore.H, lines.x_rows[g],
                 min(first.x_cols[g], lines.x_cols[0]), h_stop)
            make(i, Subset.X, g, Shore.V, lines.x_cols[g],
                 lines.x_rows[g], max(lines.x_rows[-1], last.x_rows[g]))
        for h in template.groups(Subset.Y):
            make(i, Subset.Y, h, Shore.V, lines.y_cols[h],
                 min(first.y_rows[h], lines.y_rows[0]), lines.x_rows[-1])
            make(i, Subset.Y, h, Shore.H, lines.y_rows[h],
                 lines.y_cols[h], max(lines.y_cols[-1], last.y_cols[h]))
    return runs


def footprint(lines: NexusLines, runs: List[BusRun]) -> FrozenSet[Cell]:
    """Cells of a copy's runs inside its bounding box"""
    return frozenset(
        (r, c) for run in runs for r, c in run.cells()
        if lines.top_row <= r <= lines.bottom_row and lines.left_col <= c <= lines.right_col
    )


def plan_junctions(spec: ChimeraSpec, template: NexusTemplate, layout: List[NexusLines],
                   runs: List[BusRun]) -> List[Junction]:
    """Junction per copy pair (i < j) and variable group"""
    by_key = {run.key: run for run in runs}
    junctions: List[Junction] = []
    n = len(layout)
    for i in range(n):
        for j in range(i + 1, n):
            for g in template.groups(Subset.X):
                cell = (layout[j].x_rows[g], layout[i].x_cols[g])
                down = by_key[(i, Subset.X, g, Shore.V)]
                across = by_key[(j, Subset.X, g, Shore.H)]
                couplers = tuple(
                    (down.qubit(spec, cell, a), across.qubit(spec, cell, a))
                    for a in template.group_vars(Subset.X, g)
                )
                junctions.append(Junction(cell, (i, j), Subset.X, g, couplers))
            for h in template.groups(Subset.Y):
                cell = (layout[i].y_rows[h], layout[j].y_cols[h])
                across = by_key[(i, Subset.Y, h, Shore.H)]
                up = by_key[(j, Subset.Y, h, Shore.V)]
                couplers = tuple(
                    (across.qubit(spec, cell, a), up.qubit(spec, cell, a))
                    for a in template.group_vars(Subset.Y, h)
                )
                junctions.append(Junction(cell, (i, j), Subset.Y, h, couplers))
    return junctions


def build_plan(spec: ChimeraSpec, template: NexusTemplate, n: int,
               floors: Optional[LineFloors] = None,
               wires: Optional[WireOverrides] = None,
               with_junctions: bool = True) -> BusPlan:
    """Layout, placements, runs and (optionally) junctions on a given chip"""
    layout = compute_layout(template, n, floors)
    runs = plan_runs(template, layout, wires)
    placements = [
        Placement(i, lines.anchor, footprint(lines, [r for r in runs if r.copy == i]))
        for i, lines in enumerate(layout)
    ]
    junctions = plan_junctions(spec, template, layout, runs) if with_junctions else []
    return BusPlan(spec=spec, m=template.m, n=n, template=template, layout=layout,
                   placements=placements, runs=runs, junctions=junctions)


def chains_from_plan(plan: BusPlan) -> Dict[Tuple[int, int], List[int]]:
    """Chain of (a, i) = union of copy i's runs carrying a, keyed in (i, a) order"""
    chains: Dict[Tuple[int, int], List[int]] = {
        (a, i): [] for i in range(plan.n) for a in range(plan.m)
    }
    for run in plan.runs:
        for a in run.wires:
            chains[(a, run.copy)].extend(run.qubits(plan.spec, a))
    return chains


def bus_plan(m: int, n: int, L: int, allow_general: Optional[bool] = None) -> BusPlan:
    """
    The ideal plan on C_{N,N,L}, N = required_size(m, n, L).

    Raises:
        UnsupportedSizeError: If m > 2L and the general nexus is disabled
    """
    template = product_template(m, L, allow_general)
    N = required_size(m, n, L)
    return build_plan(ChimeraSpec(N, N, L), template, n)


@dataclass
class CpcgResult:
    """Output of one product construction"""

    spec: ChimeraSpec
    embedding: Embedding
    plan: BusPlan
    steps: int
    swapped: bool = False


class CpcgEmbedder:
    """
    Deterministic K_m □ K_n embedder.

    Variables are labelled (a, i): a indexes K_m inside a nexus copy,
    i indexes the copy (K_n).
    """

    def __init__(self, L: int = 4, allow_general: Optional[bool] = None,
                 auto_orient: Optional[bool] = None):
        self.L = L
        self.allow_general = settings.ALLOW_GENERAL_NEXUS if allow_general is None else allow_general
        self.auto_orient = settings.AUTO_ORIENT_FACTORS if auto_orient is None else auto_orient

    def _supported(self, m: int) -> bool:
        return ceil_div(m, self.L) <= 2 or self.allow_general

    def _orientation(self, m: int, n: int) -> bool:
        """True when K_n should host the nexus"""
        if not self.auto_orient or m == n:
            return False
        if not self._supported(m):
            return self._supported(n)
        if not self._supported(n):
            return False
        return required_size(n, m, self.L) < required_size(m, n, self.L)

    def construct(self, m: int, n: int, chip_rows: Optional[int] = None) -> CpcgResult:
        """
        Build the product embedding.

        Args:
            m: Size of the clique hosted by each nexus
            n: Number of nexus copies
            chip_rows: Side of the target chip; defaults to required_size

        With auto_orient the nexus hosts the factor minimising required_size,
        and the other factor is tried when that orientation fails. Without it
        K_m always sits in the nexus and the caller chooses the orientation.

        Raises:
            UnsupportedSizeError: If no supported nexus exists for the factors
            InputError: If the construction does not fit a chip of side chip_rows
        """
        swapped = self._orientation(m, n)
        try:
            return self._construct(m, n, swapped, chip_rows)
        except InputError as exc:
            if not self.auto_orient or m == n:
                raise
            logger.info(f"K_{m} □ K_{n}: {exc}; trying the other factor as nexus")
            try:
                return self._construct(m, n, not swapped, chip_rows)
            except InputError:
                raise exc from None

    def _construct(self, m: int, n: int, swapped: bool, chip_rows: Optional[int]) -> CpcgResult:
        nexus_m, copies = (n, m) if swapped else (m, n)
        template = product_template(nexus_m, self.L, self.allow_general)
        N = required_size(nexus_m, copies, self.L)
        rows = N if chip_rows is None else chip_rows
        if rows < N:
            raise InputError(
                f"K_{m} □ K_{n} needs C_{{{N},{N},{self.L}}}; out of bounds on a {rows}x{rows} chip"
            )
        spec = ChimeraSpec(rows, rows, self.L)
        plan = build_plan(spec, template, copies, with_junctions=False)
        built = chains_from_plan(plan)
        steps = sum(len(chain) for chain in built.values())

        if swapped:
            chains = {(a, i): built[(i, a)] for i in range(n) for a in range(m)}
        else:
            chains = {(a, i): built[(a, i)] for i in range(n) for a in range(m)}
        embedding = Embedding.from_chains(spec, chains)
        logger.info(
            f"CPCG K_{m} □ K_{n} on {spec.describe()}: {steps} qubits"
            f"{' (nexus hosts K_' + str(n) + ')' if swapped else ''}"
        )
        return CpcgResult(spec=spec, embedding=embedding, plan=plan, steps=steps, swapped=swapped)


def cpcg_embed(m: int, n: int, L: int = 4, allow_general: Optional[bool] = None,
               auto_orient: Optional[bool] = None) -> Tuple[ChimeraSpec, Embedding]:
    """Embed K_m □ K_n on C_{N,N,L} with N = required_size(m, n, L)"""
    result = CpcgEmbedder(L, allow_general, auto_orient).construct(m, n)
    return result.spec, result.embedding


def embed_labeled_problem(problem: ProblemGraph, labeling: DoublyIndexedLabeling, L: int = 4,
                          chip_rows: Optional[int] = None,
                          allow_general: Optional[bool] = None) -> Embedding:
    """
    Embed a problem whose graph is a subgraph of K_N □ K_K.

    Variable v with labeling pair (i, k) takes the chain of product
    variable (i - 1, k - 1).

    Raises:
        InputError: If a problem edge is not an edge of the product
    """
    pairs = labeling.pairs
    missing: Set[Hashable] = set(problem.nodes) - set(pairs)
    if missing:
        raise InputError(f"labeling misses variables {sorted(map(str, missing))[:5]}")
    for u, v in problem.edges:
        (iu, ku), (iv, kv) = pairs[u], pairs[v]
        if not ((ku == kv) != (iu == iv)):
            raise InputError(f"edge ({u}, {v}) is not an edge of K_{labeling.N} □ K_{labeling.K}")
    result = CpcgEmbedder(L, allow_general, auto_orient=False).construct(
        labeling.N, labeling.K, chip_rows
    )
    chains = {v: result.embedding.chains[(i - 1, k - 1)] for v, (i, k) in pairs.items()}
    return Embedding(spec=result.spec, chains=chains)
