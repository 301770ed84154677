"""
Fault-Tolerant Embedder Service

Adapts the diagonal K_m □ K_n construction to chips with inoperable
qubits and couplers by shifting and extending nexus copies:
- Capacity census of every cell against what the plan routes through it
- A deficient line is pushed one cell further; later copies shift with it
- Each run takes the lexicographically smallest set of wires operable
  along its whole length
- Every copy is validated as K_m in isolation, then the whole product is
  validated; coupler faults trigger a wire-assignment retry, then a shift
"""

from dataclasses import dataclass, field
from itertools import combinations, islice
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from cpcg.config import settings
from cpcg.exceptions import InputError
from cpcg.logger import get_logger
from cpcg.models.chimera import CapacityMap, HardwareGraph, Shore
from cpcg.models.embedding import Embedding, EmbedOutcome
from cpcg.models.layout import BusPlan, BusRun, NexusTemplate, Subset
from cpcg.services.chimera_topology import capacity_map
from cpcg.services.cpcg_embedder import (
    LineFloors,
    build_plan,
    chains_from_plan,
    compute_layout,
    layout_extent,
    plan_junctions,
    product_template,
)
from cpcg.services.embedding_core import validate
from cpcg.services.problem_model import product_graph

logger = get_logger(__name__)

RunKey = Tuple[int, Subset, int, Shore]

# which line family a run sits on
_RUN_FAMILY = {
    (Subset.X, Shore.H): "x_rows",
    (Subset.X, Shore.V): "x_cols",
    (Subset.Y, Shore.V): "y_cols",
    (Subset.Y, Shore.H): "y_rows",
}

# bus space swept by each diagonal
_DIAGONAL_SUBSET = {"lower-left": Subset.X, "upper-right": Subset.Y}


@dataclass
class FtConfig:
    """Limits of the shift-and-extend search"""

    max_extensions: int = field(default_factory=lambda: settings.FT_MAX_EXTENSIONS)
    max_total_shift: Optional[int] = None  # None: chip side N
    coupler_retries: int = field(default_factory=lambda: settings.FT_COUPLER_RETRIES)
    diagonal_order: Tuple[str, ...] = ("lower-left", "upper-right")

    def __post_init__(self):
        if self.max_extensions < 1:
            raise InputError(f"max_extensions must be positive, got {self.max_extensions}")
        if self.max_total_shift is not None and self.max_total_shift < 1:
            raise InputError(f"max_total_shift must be positive, got {self.max_total_shift}")
        if self.coupler_retries < 0:
            raise InputError(f"coupler_retries must be non-negative, got {self.coupler_retries}")
        if sorted(self.diagonal_order) != sorted(_DIAGONAL_SUBSET):
            raise InputError(f"diagonal_order must name {sorted(_DIAGONAL_SUBSET)} once each, "
                             f"got {list(self.diagonal_order)}")

    def subset_rank(self, subset: Subset) -> int:
        """Position of a subset's bus space in the sweep"""
        return [_DIAGONAL_SUBSET[d] for d in self.diagonal_order].index(subset)


def capacity_requirements(plan: BusPlan, template: NexusTemplate) -> CapacityMap:
    """
    Wires each cell must supply for the plan.

    Every run adds its variable count to the matching shore of each cell it
    crosses; inside a nexus footprint this is exactly the template's demand.

    Raises:
        InputError: If plan and template describe different cliques
    """
    if plan.template.m != template.m or plan.template.L != template.L:
        raise InputError(
            f"plan for K_{plan.template.m} (L={plan.template.L}) does not match "
            f"template K_{template.m} (L={template.L})"
        )
    vertical = np.zeros((plan.spec.rows, plan.spec.cols), dtype=int)
    horizontal = np.zeros_like(vertical)
    for run in plan.runs:
        target = horizontal if run.shore is Shore.H else vertical
        for r, c in run.cells():
            target[r, c] += len(run.wires)
    return CapacityMap(vertical=vertical, horizontal=horizontal)


def operable_wires(hw: HardwareGraph, run: BusRun) -> List[int]:
    """Wire indices whose qubits and inter-cell couplers all work along the run"""
    shore = int(run.shore)
    if run.shore is Shore.H:
        alive = hw.alive[run.line, run.start:run.stop + 1, shore, :]
    else:
        alive = hw.alive[run.start:run.stop + 1, run.line, shore, :]
    wires = [int(o) for o in np.flatnonzero(alive.all(axis=0))]
    if not hw.dead_couplers:
        return wires
    cells = list(run.cells())
    spec = hw.spec
    return [
        o for o in wires
        if all(hw.has_coupler(spec.to_linear(*a, run.shore, o), spec.to_linear(*b, run.shore, o))
               for a, b in zip(cells, cells[1:]))
    ]


class FaultTolerantEmbedder:
    """
    Shift-and-extend K_m □ K_n embedder for a faulty square chip.

    Nexus copies are handled in diagonal order; within a copy the X-subset
    runs (lower-left bus space) precede the Y-subset runs (upper-right)
    unless FtConfig.diagonal_order says otherwise.
    """

    def __init__(self, hw: HardwareGraph, config: Optional[FtConfig] = None):
        if hw.spec.rows != hw.spec.cols:
            raise InputError(f"fault-tolerant embedding needs a square chip, got {hw.spec.describe()}")
        self.hw = hw
        self.config = config or FtConfig()
        self.capacity = capacity_map(hw)

    def embed(self, m: int, n: int) -> EmbedOutcome:
        """
        Embed K_m □ K_n, shifting and extending around faults.

        Returns:
            EmbedOutcome whose embedding passes validate(); on failure the
            details name the first nexus or run that broke a limit
        """
        hw, cfg = self.hw, self.config
        N, L = hw.spec.rows, hw.spec.shore
        template = product_template(m, L, allow_general=False)
        max_shift = cfg.max_total_shift if cfg.max_total_shift is not None else N

        if hw.num_operable < m * n:
            return self._fail("insufficient_qubits", 0, None, {},
                              detail=f"{hw.num_operable} operable qubits < {m * n} variables")

        ideal = compute_layout(template, n)
        floors: LineFloors = {}
        extensions: Dict[int, int] = {i: 0 for i in range(n)}
        attempts: Dict[RunKey, int] = {}
        problem = product_graph(m, n)
        steps = 0
        guard = 4 * n * (template.k + 1) * N + 16 * n * (cfg.coupler_retries + 1) + 64

        while steps < guard:
            steps += 1
            layout = compute_layout(template, n, floors)
            shift = max(
                max(lines.top_row - base.top_row, lines.left_col - base.left_col)
                for lines, base in zip(layout, ideal)
            )
            if layout_extent(layout) > N:
                copy = next(i for i, lines in enumerate(layout) if lines.extent > N)
                return self._fail("footprint_exceeds_chip", steps, copy, extensions,
                                  shift=shift, detail=f"copy {copy} needs {layout[copy].extent} > {N}")
            if shift > max_shift:
                copy = next(i for i, (lines, base) in enumerate(zip(layout, ideal))
                            if max(lines.top_row - base.top_row, lines.left_col - base.left_col) > max_shift)
                return self._fail("max_total_shift", steps, copy, extensions, shift=shift)

            plan = build_plan(hw.spec, template, n, floors, with_junctions=False)

            deficient = self._first_deficient_run(plan, template)
            if deficient is not None:
                if not self._bump(deficient, floors, extensions, attempts):
                    return self._fail("max_extensions", steps, deficient.copy, extensions,
                                      run=deficient, shift=shift)
                continue

            wires, short = self._assign_wires(plan, attempts)
            if short is not None:
                if not self._bump(short, floors, extensions, attempts):
                    return self._fail("max_extensions", steps, short.copy, extensions,
                                      run=short, shift=shift)
                continue

            plan = build_plan(hw.spec, template, n, floors, wires=wires)
            culprits = self._broken_runs(plan, m, n)
            if culprits:
                if not self._retry_or_bump(culprits, floors, extensions, attempts):
                    return self._fail("max_extensions", steps, culprits[0].copy, extensions,
                                      run=culprits[0], shift=shift)
                continue

            built = chains_from_plan(plan)
            embedding = Embedding.from_chains(
                hw.spec, {(a, i): built[(a, i)] for i in range(n) for a in range(m)}
            )
            report = validate(problem, hw, embedding)
            if not report.valid:
                first = report.violations[0]
                return self._fail("validation_failed", steps, None, extensions, shift=shift,
                                  detail=f"{first.kind.value}: {first.detail}")

            total_ext = sum(extensions.values())
            logger.info(
                f"FT K_{m} □ K_{n} on {hw.spec.describe()} with {len(hw.dead_qubits)} dead qubits: "
                f"{total_ext} extensions, shift {shift}, {steps} passes"
            )
            return EmbedOutcome(
                success=True, embedding=embedding, steps=steps,
                details={"extensions": total_ext, "total_shift": shift,
                         "extensions_per_copy": _per_copy(extensions)},
            )

        return self._fail("iteration_guard", steps, None, extensions)

    def _first_deficient_run(self, plan: BusPlan, template: NexusTemplate) -> Optional[BusRun]:
        required = capacity_requirements(plan, template)
        short_v = required.vertical > self.capacity.vertical
        short_h = required.horizontal > self.capacity.horizontal
        if not short_v.any() and not short_h.any():
            return None
        order = sorted(plan.runs, key=lambda run: (run.copy, self.config.subset_rank(run.subset)))
        for run in order:
            mask = short_h if run.shore is Shore.H else short_v
            if any(mask[r, c] for r, c in run.cells()):
                logger.debug(f"Capacity short on run {_describe(run)}")
                return run
        return None

    def _assign_wires(self, plan: BusPlan,
                      attempts: Dict[RunKey, int]) -> Tuple[Dict[RunKey, Dict[int, int]], Optional[BusRun]]:
        """Smallest injective operable wire set per run (skipping retried ones)"""
        wires: Dict[RunKey, Dict[int, int]] = {}
        for run in plan.runs:
            variables = sorted(run.wires)
            usable = operable_wires(self.hw, run)
            choice = next(islice(combinations(usable, len(variables)), attempts.get(run.key, 0), None), None)
            if choice is None:
                logger.debug(f"Run {_describe(run)} has {len(usable)} usable wires for {len(variables)} variables")
                return wires, run
            wires[run.key] = dict(zip(variables, choice))
        return wires, None

    def _broken_runs(self, plan: BusPlan, m: int, n: int) -> List[BusRun]:
        """Runs implicated in a nexus or junction that fails on the chip"""
        hw = self.hw
        built = chains_from_plan(plan)
        for i in range(n):
            problem = nx.relabel_nodes(nx.complete_graph(m), {a: (a, i) for a in range(m)})
            local = Embedding.from_chains(hw.spec, {(a, i): built[(a, i)] for a in range(m)})
            if not validate(problem, hw, local).valid:
                logger.debug(f"Nexus {i} fails in isolation")
                return plan.runs_for(i)
        layout = plan.layout
        for junction in plan_junctions(hw.spec, plan.template, layout, plan.runs):
            if not all(hw.has_coupler(a, b) for a, b in junction.couplers):
                i, j = junction.pair
                g = junction.group
                if junction.subset is Subset.X:
                    keys = [(i, Subset.X, g, Shore.V), (j, Subset.X, g, Shore.H)]
                else:
                    keys = [(i, Subset.Y, g, Shore.H), (j, Subset.Y, g, Shore.V)]
                logger.debug(f"Junction {junction.cell} of copies {i},{j} has a dead coupler")
                return [plan.run(key) for key in keys]
        return []

    def _retry_or_bump(self, culprits: List[BusRun], floors: LineFloors,
                       extensions: Dict[int, int], attempts: Dict[RunKey, int]) -> bool:
        for run in culprits:
            if attempts.get(run.key, 0) < self.config.coupler_retries:
                attempts[run.key] = attempts.get(run.key, 0) + 1
                logger.warning(f"Coupler fault near {_describe(run)}; advancing its wire assignment")
                return True
        return self._bump(culprits[0], floors, extensions, attempts)

    def _bump(self, run: BusRun, floors: LineFloors, extensions: Dict[int, int],
              attempts: Dict[RunKey, int]) -> bool:
        """Push the run's line one cell further; False once the copy is out of extensions"""
        if extensions[run.copy] >= self.config.max_extensions:
            return False
        family = _RUN_FAMILY[(run.subset, run.shore)]
        floors[(run.copy, family, run.group)] = run.line + 1
        extensions[run.copy] += 1
        attempts.clear()
        logger.debug(f"Extending nexus {run.copy}: {family}[{run.group}] -> {run.line + 1}")
        return True

    def _fail(self, reason: str, steps: int, copy: Optional[int], extensions: Dict[int, int],
              run: Optional[BusRun] = None, shift: int = 0, detail: str = "") -> EmbedOutcome:
        details = {
            "reason": reason,
            "nexus": copy if copy is not None else "none",
            "run": _describe(run) if run is not None else "none",
            "extensions": sum(extensions.values()),
            "total_shift": shift,
        }
        if detail:
            details["detail"] = detail
        logger.info(f"FT embedding failed: {reason} (nexus {details['nexus']})")
        return EmbedOutcome(success=False, embedding=None, steps=steps, details=details)


def _per_copy(extensions: Dict[int, int]) -> str:
    return ",".join(str(extensions[i]) for i in sorted(extensions))


def _describe(run: BusRun) -> str:
    kind = "row" if run.shore is Shore.H else "col"
    return f"copy{run.copy}/{run.subset.value}{run.group}/{kind}{run.line}[{run.start}..{run.stop}]"


def ft_cpcg_embed(hw: HardwareGraph, m: int, n: int,
                  cfg: Optional[FtConfig] = None) -> EmbedOutcome:
    """Fault-tolerant K_m □ K_n embedding on hw"""
    return FaultTolerantEmbedder(hw, cfg).embed(m, n)
