"""
Heuristic Baseline Service

CMR-style randomized minor embedding used as the comparison baseline:
- Variables placed one at a time, in a seeded random order, at the root
  minimising weighted shortest paths to the chains of placed neighbours
- Qubit weights grow exponentially with current overuse; each step builds
  one weighted sparse adjacency and runs multi-source Dijkstra on it
- Refinement sweeps tear up and re-route one variable at a time until no
  qubit is shared, with restarts after a stall
- Budgets counted in placements (steps) so runs are reproducible
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Set, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from cpcg.config import settings
from cpcg.constants import OVERUSE_PENALTY_BASE
from cpcg.exceptions import InputError
from cpcg.logger import get_logger
from cpcg.models.chimera import HardwareGraph
from cpcg.models.embedding import Embedding, EmbedOutcome
from cpcg.models.problem import ProblemGraph
from cpcg.services.embedding_core import validate

logger = get_logger(__name__)


@dataclass
class HeuristicParams:
    """Knobs of the baseline; time is optional, steps are the real budget"""

    seed: int = field(default_factory=lambda: settings.CPCG_SEED)
    max_time: Optional[float] = field(default_factory=lambda: settings.heuristic_max_time_or_none)
    tries: int = field(default_factory=lambda: settings.HEURISTIC_TRIES)
    max_no_improvement: int = field(default_factory=lambda: settings.HEURISTIC_MAX_NO_IMPROVEMENT)
    step_budget: int = field(default_factory=lambda: settings.HEURISTIC_STEP_BUDGET)

    def __post_init__(self):
        for name in ("tries", "max_no_improvement", "step_budget"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_time is not None and self.max_time <= 0:
            raise InputError(f"max_time must be positive, got {self.max_time}")

    def for_trial(self, trial: int) -> "HeuristicParams":
        """Same limits with the seed of an independent trial stream"""
        seed = int(np.random.SeedSequence([self.seed, trial]).generate_state(1)[0])
        return HeuristicParams(seed=seed, max_time=self.max_time, tries=self.tries,
                               max_no_improvement=self.max_no_improvement,
                               step_budget=self.step_budget)


class _BudgetExhausted(Exception):
    pass


class HeuristicEmbedder:
    """Multi-start weighted shortest-path embedder"""

    def __init__(self, hw: HardwareGraph, params: Optional[HeuristicParams] = None):
        self.hw = hw
        self.params = params or HeuristicParams()
        self.graph = hw.graph
        self.usage = np.zeros(hw.spec.num_qubits, dtype=int)
        self.steps = 0
        self._deadline: Optional[float] = None
        # operable qubits in id order; row/column i of the adjacency is _nodes[i]
        self._nodes = np.array(sorted(self.graph.nodes), dtype=int)
        self._index = {int(q): i for i, q in enumerate(self._nodes)}
        adjacency = nx.to_scipy_sparse_array(self.graph, nodelist=self._nodes.tolist(), format="csr")
        self._indptr, self._targets = adjacency.indptr, adjacency.indices

    def _weighted_adjacency(self) -> Tuple[sp.csr_matrix, np.ndarray]:
        """Edge (a, b) costs the current weight of qubit b"""
        weights = OVERUSE_PENALTY_BASE ** self.usage[self._nodes].astype(float)
        size = len(self._nodes)
        matrix = sp.csr_matrix((weights[self._targets], self._targets, self._indptr), shape=(size, size))
        return matrix, weights

    def _tick(self):
        self.steps += 1
        if self.steps > self.params.step_budget:
            raise _BudgetExhausted("step_budget")
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise _BudgetExhausted("max_time")

    def _claim(self, chain: Set[int], sign: int):
        for q in chain:
            self.usage[q] += sign

    def _place(self, variable: Hashable, problem: ProblemGraph,
               chains: Dict[Hashable, Set[int]], rng: np.random.Generator) -> Set[int]:
        self._tick()
        placed = [u for u in problem[variable] if chains.get(u)]
        if not placed:
            load = self.usage[self._nodes]
            candidates = self._nodes[load == load.min()]
            return {int(rng.choice(candidates))}

        matrix, weights = self._weighted_adjacency()
        dist = np.empty((len(placed), len(self._nodes)))
        predecessors = []
        for row, u in enumerate(placed):
            sources = [self._index[q] for q in chains[u]]
            dist[row], pred, _ = dijkstra(matrix, indices=sources, min_only=True, return_predecessors=True)
            predecessors.append(pred)

        # the root's own weight is paid once, not once per neighbour
        cost = dist.sum(axis=0) - (len(placed) - 1) * weights
        cost[[self._index[q] for u in placed for q in chains[u]]] = np.inf
        if not np.isfinite(cost).any():
            return {int(rng.choice(self._nodes))}

        root = int(np.argmin(cost))
        chain = {int(self._nodes[root])}
        for pred in predecessors:
            # sources carry a negative predecessor and stay out of the chain
            i = pred[root]
            while pred[i] >= 0:
                chain.add(int(self._nodes[i]))
                i = pred[i]
        return chain

    def _overuse(self) -> int:
        return int(np.clip(self.usage - 1, 0, None).sum())

    def _attempt(self, problem: ProblemGraph, rng: np.random.Generator) -> Optional[Dict[Hashable, Set[int]]]:
        self.usage[:] = 0
        variables = list(problem.nodes)
        chains: Dict[Hashable, Set[int]] = {}
        for idx in rng.permutation(len(variables)):
            v = variables[idx]
            chains[v] = self._place(v, problem, chains, rng)
            self._claim(chains[v], +1)

        best = (self._overuse(), sum(len(c) for c in chains.values()))
        stall = 0
        while True:
            if self._overuse() == 0:
                return chains
            if stall >= self.params.max_no_improvement:
                return None
            for idx in rng.permutation(len(variables)):
                v = variables[idx]
                self._claim(chains[v], -1)
                chains[v] = set()
                chains[v] = self._place(v, problem, chains, rng)
                self._claim(chains[v], +1)
            score = (self._overuse(), sum(len(c) for c in chains.values()))
            if score < best:
                best, stall = score, 0
            else:
                stall += 1

    def embed(self, problem: ProblemGraph) -> EmbedOutcome:
        """
        Try to embed problem within the step (and optional time) budget.

        Returns:
            EmbedOutcome; a successful embedding always passes validate()
        """
        params = self.params
        self.steps = 0
        self._deadline = time.perf_counter() + params.max_time if params.max_time else None
        rng = np.random.default_rng(params.seed)
        if problem.number_of_nodes() > self.hw.num_operable:
            return EmbedOutcome(False, None, 0, {"reason": "insufficient_qubits", "tries": 0})

        tries = 0
        reason = "tries_exhausted"
        try:
            while tries < params.tries:
                tries += 1
                chains = self._attempt(problem, rng)
                if chains is None:
                    logger.debug(f"Restart after try {tries} ({self.steps} steps)")
                    continue
                embedding = Embedding.from_chains(
                    self.hw.spec, {v: sorted(chains[v]) for v in problem.nodes}
                )
                if validate(problem, self.hw, embedding).valid:
                    logger.debug(f"Baseline embedded {problem.number_of_nodes()} variables in {self.steps} steps")
                    return EmbedOutcome(True, embedding, self.steps, {"tries": tries})
        except _BudgetExhausted as exhausted:
            reason = str(exhausted)
        return EmbedOutcome(False, None, self.steps, {"reason": reason, "tries": tries})


def heuristic_embed(problem: ProblemGraph, hw: HardwareGraph,
                    params: Optional[HeuristicParams] = None) -> EmbedOutcome:
    """CMR-style baseline embedding of problem into hw"""
    return HeuristicEmbedder(hw, params).embed(problem)


@dataclass
class SuccessRate:
    """Per-trial outcomes of repeated seeded embedding attempts"""

    rate: float
    outcomes: List[bool]
    steps: List[int]
    best: Optional[Embedding] = None


def success_rate(problem: ProblemGraph, hw: HardwareGraph, params: Optional[HeuristicParams] = None,
                 trials: int = 1, workers: Optional[int] = None) -> SuccessRate:
    """
    Run independent seeded trials.

    Trial t uses a stream derived from (params.seed, t), so results do not
    depend on the worker count.
    """
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    params = params or HeuristicParams()
    workers = workers or settings.BENCH_WORKERS

    def run(trial: int) -> EmbedOutcome:
        return HeuristicEmbedder(hw, params.for_trial(trial)).embed(problem)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(t) for t in range(trials)]
    outcomes = [r.success for r in results]
    solved = [r.embedding for r in results if r.success]
    best = min(solved, key=lambda e: sum(len(c) for c in e.chains.values()), default=None)
    return SuccessRate(rate=sum(outcomes) / trials, outcomes=outcomes,
                       steps=[r.steps for r in results], best=best)
