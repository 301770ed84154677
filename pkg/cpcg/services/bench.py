"""
Bench Service

Seeded comparison sweeps over product sizes, one CSV row per
(method, n, fault seed):
- success: fixed chip, success rate per method (heuristic over many trials)
- quality: qubit totals and chain statistics, chip sized per n unless fixed
- faults:  random dead-qubit masks, one row per fault seed
- scaling: construction step counts on the minimal chip for each n

Methods: cpcg (diagonal construction), triangular (K_mn clique),
baseline (randomised heuristic), ft (fault-tolerant construction).
The ``success`` column holds the success rate over the row's trials
(0 or 1 for the deterministic methods).
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd
from rich.table import Table

from cpcg.config import settings
from cpcg.constants import BASELINE_LABEL, BENCH_COLUMNS, BENCH_METHODS, BENCH_SWEEPS
from cpcg.exceptions import InputError
from cpcg.logger import get_logger
from cpcg.models.chimera import ChimeraSpec, HardwareGraph
from cpcg.models.embedding import Embedding
from cpcg.services.chimera_topology import build_hardware, random_fault_mask
from cpcg.services.cpcg_embedder import CpcgEmbedder, required_size
from cpcg.services.embedding_core import chain_stats, validate
from cpcg.services.fault_tolerant_embedder import FaultTolerantEmbedder
from cpcg.services.heuristic_baseline import HeuristicParams, success_rate
from cpcg.services.problem_model import complete_graph, product_graph
from cpcg.services.triangular_embedder import triangular_embed

logger = get_logger(__name__)

_INT_COLUMNS = ["m", "n", "L", "chip_rows", "fault_seed", "dead_count",
                "qubits", "chain_min", "chain_max", "steps"]


def parse_int_list(text: str) -> List[int]:
    """Parse "2..15", "1,3,5" or a mix such as "1..3,8" into integers"""
    values: List[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if hi < lo:
                    raise InputError(f"empty range '{part}'")
                values.extend(range(lo, hi + 1))
            elif part:
                values.append(int(part))
    except ValueError:
        raise InputError(f"not an integer list: '{text}'") from None
    if not values:
        raise InputError(f"not an integer list: '{text}'")
    return values


@dataclass
class BenchConfig:
    """One sweep; chip=None sizes the chip per n as required_size(m, n, L)"""

    sweep: str
    methods: List[str]
    m: int
    ns: List[int]
    chip: Optional[int] = None
    L: int = field(default_factory=lambda: settings.DEFAULT_SHORE_SIZE)
    trials: int = 1
    seed: int = field(default_factory=lambda: settings.CPCG_SEED)
    dead: int = 0
    fault_seeds: List[int] = field(default_factory=list)
    workers: int = field(default_factory=lambda: settings.BENCH_WORKERS)
    heuristic_tries: int = field(default_factory=lambda: settings.HEURISTIC_TRIES)
    heuristic_steps: int = field(default_factory=lambda: settings.HEURISTIC_STEP_BUDGET)
    heuristic_max_time: Optional[float] = field(default_factory=lambda: settings.heuristic_max_time_or_none)

    def __post_init__(self):
        if self.sweep not in BENCH_SWEEPS:
            raise InputError(f"unknown sweep '{self.sweep}' (known: {', '.join(BENCH_SWEEPS)})")
        unknown = [x for x in self.methods if x not in BENCH_METHODS]
        if unknown or not self.methods:
            raise InputError(f"unknown methods {unknown} (known: {', '.join(BENCH_METHODS)})")
        if self.m < 1 or not self.ns or min(self.ns) < 1:
            raise InputError("m and every n must be positive")
        if self.trials < 1 or self.workers < 1 or self.dead < 0:
            raise InputError("trials and workers must be positive, dead non-negative")
        if self.sweep in ("success", "faults") and self.chip is None:
            raise InputError(f"the {self.sweep} sweep needs a fixed chip side")
        if self.sweep == "faults" and self.dead == 0:
            raise InputError("the faults sweep needs --dead k > 0")
        if self.dead > 0 and not self.fault_seeds:
            self.fault_seeds = [1]

    def chip_for(self, n: int) -> int:
        if self.sweep == "scaling" or self.chip is None:
            return required_size(self.m, n, self.L)
        return self.chip


@dataclass
class _Task:
    method: str
    n: int
    hw: HardwareGraph
    fault_seed: Optional[int]


def _record(task: _Task, config: BenchConfig, rate: float, embedding: Optional[Embedding],
            steps: int, wall_ms: float) -> Dict[str, Any]:
    spec = task.hw.spec
    row: Dict[str, Any] = {
        "method": task.method,
        "m": config.m,
        "n": task.n,
        "L": spec.shore,
        "chip_rows": spec.rows,
        "fault_seed": task.fault_seed,
        "dead_count": len(task.hw.dead_qubits),
        "success": rate,
        "qubits": None, "chain_min": None, "chain_mean": None,
        "chain_max": None, "chain_stddev": None,
        "steps": steps,
        "wall_ms": round(wall_ms, 3),
    }
    if embedding is not None:
        stats = chain_stats(embedding)
        row.update(qubits=stats.qubit_total, chain_min=stats.chain_min,
                   chain_mean=round(stats.chain_mean, 6), chain_max=stats.chain_max,
                   chain_stddev=round(stats.chain_stddev, 6))
    return row


def _checked(problem, hw: HardwareGraph, embedding: Embedding) -> Optional[Embedding]:
    """Embeddings built for the ideal chip count only if they survive its faults"""
    if hw.is_ideal or validate(problem, hw, embedding).valid:
        return embedding
    return None


def _run(task: _Task, config: BenchConfig) -> Dict[str, Any]:
    m, n, hw = config.m, task.n, task.hw
    start = time.perf_counter()
    embedding: Optional[Embedding] = None
    rate, steps = 0.0, 0

    if task.method == "cpcg":
        try:
            result = CpcgEmbedder(hw.spec.shore).construct(m, n, chip_rows=hw.spec.rows)
            steps = result.steps
            embedding = _checked(product_graph(m, n), hw, result.embedding)
        except InputError as exc:
            logger.debug(f"cpcg K_{m} □ K_{n}: {exc}")
    elif task.method == "triangular":
        try:
            clique = triangular_embed(m * n, hw.spec.shore, spec=hw.spec)
            steps = sum(len(c) for c in clique.chains.values())
            embedding = _checked(complete_graph(m * n), hw, clique)
        except InputError as exc:
            logger.debug(f"triangular K_{m * n}: {exc}")
    elif task.method == "ft":
        try:
            outcome = FaultTolerantEmbedder(hw).embed(m, n)
            steps, embedding = outcome.steps, outcome.embedding
        except InputError as exc:
            logger.debug(f"ft K_{m} □ K_{n}: {exc}")
    else:
        params = HeuristicParams(seed=config.seed, tries=config.heuristic_tries,
                                 step_budget=config.heuristic_steps, max_time=config.heuristic_max_time)
        trials = success_rate(product_graph(m, n), hw, params, trials=config.trials, workers=1)
        wall_ms = (time.perf_counter() - start) * 1000.0
        return _record(task, config, trials.rate, trials.best,
                       round(sum(trials.steps) / len(trials.steps)), wall_ms)

    if embedding is not None:
        rate = 1.0
    return _record(task, config, rate, embedding, steps, (time.perf_counter() - start) * 1000.0)


def _tasks(config: BenchConfig) -> List[_Task]:
    tasks: List[_Task] = []
    for n in config.ns:
        spec = ChimeraSpec(config.chip_for(n), config.chip_for(n), config.L)
        masks = [(seed, random_fault_mask(spec, config.dead, seed)) for seed in config.fault_seeds] \
            if config.dead > 0 else [(None, [])]
        for fault_seed, dead in masks:
            hw = build_hardware(spec, dead)
            tasks.extend(_Task(method, n, hw, fault_seed) for method in config.methods)
    return tasks


def bench_sweep(config: BenchConfig) -> pd.DataFrame:
    """
    Run a sweep and return the BenchReport table.

    Rows come out in (n, fault seed, method) order whatever the worker count;
    every column except wall_ms is a function of the config alone.
    """
    tasks = _tasks(config)
    logger.info(f"Bench {config.sweep}: {len(tasks)} rows, methods {','.join(config.methods)}")
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda t: _run(t, config), tasks))
    else:
        rows = [_run(t, config) for t in tasks]

    frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    return frame.astype({column: "Int64" for column in _INT_COLUMNS})


def summary_table(frame: pd.DataFrame) -> Table:
    """Per method and n: mean success rate and mean qubits of successful rows"""
    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Method")
    table.add_column("n", justify="right")
    table.add_column("Success", justify="right")
    table.add_column("Qubits", justify="right")
    table.add_column("Chain max", justify="right")
    for (method, n), group in frame.groupby(["method", "n"], sort=False):
        solved = group[group["success"] > 0]
        qubits = f"{solved['qubits'].mean():.1f}" if len(solved) else "-"
        chain = str(solved["chain_max"].max()) if len(solved) else "-"
        label = BASELINE_LABEL if method == "baseline" else method
        table.add_row(label, str(n), f"{group['success'].mean():.2f}", qubits, chain)
    return table
