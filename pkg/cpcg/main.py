"""
CPCG - command-line entry point

Subcommands generate chips and problems, embed, check, lower, analyse,
render and benchmark. Results go to files (written atomically) and a
key=value summary (or JSON with --json) on stdout; logs go to stderr.

Exit codes: 0 success, 1 operational failure, 2 usage or input error.
"""

import argparse
import json
import sys
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
from rich.console import Console

from cpcg import __version__
from cpcg.config import settings
from cpcg.constants import BENCH_SWEEPS, CHIP_PRESETS, EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from cpcg.exceptions import CpcgError, InputError, UnsupportedSizeError
from cpcg.logger import get_logger, setup_logging
from cpcg.models.chimera import ChimeraSpec, HardwareGraph
from cpcg.models.embedding import Embedding
from cpcg.models.problem import ProblemGraph, QuboMatrix
from cpcg.services import file_formats as formats
from cpcg.services.analysis import (
    max_embeddable_n,
    optimality_certificate,
    predicted_cpcg_stats,
    refusal_certificate,
    triangular_max_n,
)
from cpcg.services.bench import BenchConfig, bench_sweep, parse_int_list, summary_table
from cpcg.services.chimera_topology import build_hardware, preset_hardware, random_fault_mask
from cpcg.services.cpcg_embedder import CpcgEmbedder, embed_labeled_problem, oriented_size, required_size
from cpcg.services.embedding_core import (
    chain_offset,
    chain_stats,
    default_chain_strength,
    lower_model,
    validate,
)
from cpcg.services.fault_tolerant_embedder import FaultTolerantEmbedder, FtConfig
from cpcg.services.heuristic_baseline import HeuristicEmbedder, HeuristicParams
from cpcg.services.problem_model import (
    detect_cpcg,
    ising_from_qubo,
    partitioning_qubo,
    product_graph,
    qubo_problem_graph,
)
from cpcg.services.render import render_embedding, render_plot
from cpcg.services.triangular_embedder import triangular_embed

logger = get_logger(__name__)


class _Failure(Exception):
    """Operational failure: report already printed, exit 1"""


class _Output:
    """stdout writer honouring --json"""

    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, fields: Dict[str, Any], text: Optional[str] = None):
        if self.as_json:
            print(json.dumps(fields, indent=2, default=str))
        else:
            print(text if text is not None else "\n".join(f"{k}={v}" for k, v in fields.items()))


# Loading helpers


def _load_hardware(path: Optional[str], spec: Optional[ChimeraSpec] = None) -> HardwareGraph:
    if path:
        return formats.read_hardware(path)
    if spec is None:
        raise InputError("--hardware is required")
    return build_hardware(spec)


def _load_problem(path: str) -> Tuple[ProblemGraph, Optional[QuboMatrix]]:
    """Edge list or QUBO file; QUBO graphs are keyed by the QUBO's variable labels"""
    if formats.problem_kind(path) == "qubo":
        qubo = formats.read_qubo(path)
        graph = nx.relabel_nodes(qubo_problem_graph(qubo), dict(enumerate(qubo.labels)))
        return graph, qubo
    return formats.read_edge_list(path), None


def _problem_from_args(args) -> ProblemGraph:
    if getattr(args, "problem", None):
        return _load_problem(args.problem)[0]
    if args.m is None or args.n is None:
        raise InputError("give --problem FILE or both -m and -n")
    return product_graph(args.m, args.n)


def _shore(args) -> int:
    return args.L if args.L is not None else settings.DEFAULT_SHORE_SIZE


def _stats_fields(emb: Embedding) -> Dict[str, Any]:
    stats = chain_stats(emb)
    fields: Dict[str, Any] = {"chip": emb.spec.describe(), "chains": len(emb.chains)}
    fields.update(stats.to_dict())
    return fields


def _stats_text(fields: Dict[str, Any]) -> str:
    lines = [f"{k}={v}" for k, v in fields.items() if k != "histogram"]
    lines.append("histogram=" + ",".join(f"{k}:{v}" for k, v in fields["histogram"].items()))
    return "\n".join(lines)


def _refuse(out: _Output, m: int, n: int, N: int, L: int):
    certificate = refusal_certificate(m, n, N, L)
    fields = {"refused": True, **certificate.to_dict()}
    out.emit(fields, "refused=true\n" + certificate.to_text())
    raise _Failure(f"K_{m} □ K_{n} does not fit C_{{{N},{N},{L}}}")


# Commands


def cmd_gen_chimera(args, out: _Output):
    if args.preset:
        hw = preset_hardware(args.preset, with_509_mask=args.mask509)
    else:
        if args.N is None or args.M is None or args.Lsize is None:
            raise InputError("give N M L or --preset")
        hw = build_hardware(ChimeraSpec(args.N, args.M, args.Lsize))
    if args.dead_random:
        dead = random_fault_mask(hw.spec, args.dead_random, args.seed, exclude=sorted(hw.dead_qubits))
        hw = build_hardware(hw.spec, sorted(hw.dead_qubits) + dead, hw.dead_couplers)
    formats.write_hardware(args.output, hw)
    out.emit({"chip": hw.spec.describe(), "operable": hw.num_operable,
              "dead_qubits": len(hw.dead_qubits), "output": args.output})


def cmd_gen_product(args, out: _Output):
    graph = product_graph(args.m, args.n)
    formats.write_edge_list(args.output, graph)
    out.emit({"vertices": graph.number_of_nodes(), "edges": graph.number_of_edges(),
              "output": args.output})


def cmd_gen_partition_qubo(args, out: _Output):
    graph = formats.read_edge_list(args.graph)
    qubo, _ = partitioning_qubo(graph, args.K, args.A, args.B)
    formats.write_qubo(args.output, qubo)
    out.emit({"variables": qubo.n, "terms": len(qubo.terms), "offset": qubo.offset,
              "output": args.output})


def cmd_detect(args, out: _Output):
    graph, _ = _load_problem(args.problem)
    found = detect_cpcg(graph)
    if found is None:
        out.emit({"cpcg": False}, "cpcg=false")
        raise _Failure("no K_m □ K_n structure found")
    m, n, labeling = found
    pairs = {formats.label_to_str(v): f"{i}:{k}" for v, (i, k) in labeling.pairs.items()}
    text = f"cpcg=true\nm={m}\nn={n}\n" + "\n".join(f"{v} {p}" for v, p in pairs.items())
    out.emit({"cpcg": True, "m": m, "n": n, "labeling": pairs}, text)


def _write_embedding(args, out: _Output, emb: Embedding, extra: Optional[Dict[str, Any]] = None):
    formats.write_embedding(args.output, emb)
    fields = _stats_fields(emb)
    fields.update(extra or {})
    fields["output"] = args.output
    out.emit(fields, _stats_text(fields))


def cmd_embed_cpcg(args, out: _Output):
    L = _shore(args)
    auto_orient = False if args.fixed_orientation else (args.auto_orient or None)
    embedder = CpcgEmbedder(L, allow_general=args.general or None, auto_orient=auto_orient)
    if args.problem:
        graph, _ = _load_problem(args.problem)
        found = detect_cpcg(graph)
        if found is None:
            raise _Failure(f"{args.problem} is not a K_m □ K_n problem")
        emb = embed_labeled_problem(graph, found[2], L, args.chip, args.general or None)
        _write_embedding(args, out, emb)
        return
    if args.m is None or args.n is None:
        raise InputError("give -m and -n (or --problem)")
    needed = required_size(args.m, args.n, L)
    if args.chip is not None and args.chip < needed and not embedder.auto_orient:
        _refuse(out, args.m, args.n, args.chip, L)
    try:
        result = embedder.construct(args.m, args.n, chip_rows=args.chip)
    except UnsupportedSizeError as exc:
        out.emit({"refused": True, "reason": str(exc)}, f"refused=true\nreason={exc}")
        raise _Failure(str(exc)) from None
    except InputError:
        if args.chip is None:
            raise
        _refuse(out, args.m, args.n, args.chip, L)
    _write_embedding(args, out, result.embedding, {"steps": result.steps, "swapped": result.swapped})


def cmd_embed_triangular(args, out: _Output):
    L = _shore(args)
    size = args.m * args.n
    side = args.chip if args.chip is not None else -(-size // L)
    try:
        clique = triangular_embed(size, L, spec=ChimeraSpec(side, side, L))
    except InputError as exc:
        out.emit({"refused": True, "reason": str(exc)}, f"refused=true\nreason={exc}")
        raise _Failure(str(exc)) from None
    chains = {(v % args.m, v // args.m): clique.chains[v] for v in range(size)}
    _write_embedding(args, out, clique.with_chains(chains))


def cmd_embed_heuristic(args, out: _Output):
    hw = _load_hardware(args.hardware)
    params = HeuristicParams(
        seed=args.seed if args.seed is not None else settings.CPCG_SEED,
        tries=args.tries or settings.HEURISTIC_TRIES,
        step_budget=args.steps or settings.HEURISTIC_STEP_BUDGET,
        max_time=args.max_time or settings.heuristic_max_time_or_none,
    )
    outcome = HeuristicEmbedder(hw, params).embed(_problem_from_args(args))
    if not outcome.success:
        out.emit({"success": False, "steps": outcome.steps, **outcome.details}, outcome.report_text())
        raise _Failure(f"heuristic failed: {outcome.details.get('reason')}")
    _write_embedding(args, out, outcome.embedding, {"steps": outcome.steps, **outcome.details})


def cmd_embed_ft(args, out: _Output):
    hw = _load_hardware(args.hardware)
    config = FtConfig(max_extensions=args.max_extensions) if args.max_extensions is not None else FtConfig()
    outcome = FaultTolerantEmbedder(hw, config).embed(args.m, args.n)
    if not outcome.success:
        out.emit({"success": False, "steps": outcome.steps, **outcome.details}, outcome.report_text())
        raise _Failure(f"fault-tolerant embedding failed: {outcome.details.get('reason')}")
    _write_embedding(args, out, outcome.embedding, {"steps": outcome.steps, **outcome.details})


def cmd_validate(args, out: _Output):
    emb = formats.read_embedding(args.embedding)
    hw = _load_hardware(args.hardware, emb.spec)
    report = validate(_problem_from_args(args), hw, emb)
    text = f"valid={str(report.valid).lower()}\n" + "\n".join(
        f"{v.kind.value} {v.detail}" for v in report.violations
    )
    out.emit(report.to_dict(), text.rstrip("\n"))
    if not report.valid:
        raise _Failure(f"{len(report.violations)} violations")


def cmd_stats(args, out: _Output):
    fields = _stats_fields(formats.read_embedding(args.embedding))
    out.emit(fields, _stats_text(fields))


def cmd_lower(args, out: _Output):
    qubo = formats.read_qubo(args.qubo)
    emb = formats.read_embedding(args.embedding)
    hw = _load_hardware(args.hardware, emb.spec)
    model, offset = ising_from_qubo(qubo)
    missing = [v for v in model.variables if v not in emb.chains]
    if missing:
        raise InputError(f"embedding has no chain for {formats.label_to_str(missing[0])}")
    strength = args.chain_strength if args.chain_strength is not None else default_chain_strength(model)
    used = emb.with_chains({v: emb.chains[v] for v in model.variables})
    physical = lower_model(model, used, hw, strength)
    formats.write_ising(args.output, physical)
    # E_qubo = E_physical - chain_offset + offset for intact chains
    out.emit({"qubits": physical.n, "couplings": len(physical.J), "chain_strength": strength,
              "offset": offset - chain_offset(used, strength), "output": args.output})


def cmd_analyze(args, out: _Output):
    m, n, L = args.m, args.n, _shore(args)
    needed = oriented_size(m, n, L)
    fields: Dict[str, Any] = {"m": m, "n": n, "L": L, "required_N": needed}
    try:
        fields.update({f"predicted_{k}": v for k, v in predicted_cpcg_stats(m, n, L).items()})
    except InputError:
        pass
    certificate = optimality_certificate(m, n, L)
    fields.update({f"certificate_{k}": v for k, v in certificate.to_dict().items()})
    if args.chip is not None:
        fields["chip_N"] = args.chip
        fields["max_cpcg_n"] = max_embeddable_n(args.chip, L, m)
        fields["max_triangular_n"] = triangular_max_n(args.chip, L, m)
        if args.chip < needed:
            refusal = refusal_certificate(m, n, args.chip, L)
            fields.update({f"refusal_{k}": v for k, v in refusal.to_dict().items()})
    out.emit(fields)


def cmd_render(args, out: _Output):
    if args.plot:
        svg = render_plot(formats.read_csv(args.plot))
    elif args.embedding:
        emb = formats.read_embedding(args.embedding)
        hw = formats.read_hardware(args.hardware) if args.hardware else None
        svg = render_embedding(emb, hw)
    else:
        raise InputError("give --embedding FILE or --plot CSV")
    formats.write_atomic(args.output, svg)
    out.emit({"output": args.output, "bytes": len(svg.encode("utf-8"))})


def cmd_bench(args, out: _Output):
    config = BenchConfig(
        sweep=args.sweep,
        methods=[x.strip() for x in args.methods.split(",") if x.strip()],
        m=args.m,
        ns=parse_int_list(args.n),
        chip=args.chip,
        L=_shore(args),
        trials=args.trials,
        seed=args.seed if args.seed is not None else settings.CPCG_SEED,
        dead=args.dead,
        fault_seeds=parse_int_list(args.fault_seeds) if args.fault_seeds else [],
        workers=args.workers or settings.BENCH_WORKERS,
        heuristic_steps=args.steps or settings.HEURISTIC_STEP_BUDGET,
        heuristic_max_time=args.max_time or settings.heuristic_max_time_or_none,
    )
    frame = bench_sweep(config)
    formats.write_csv(args.output, frame)
    if not out.as_json and not args.quiet:
        Console(stderr=True).print(summary_table(frame))
    out.emit({"rows": len(frame), "output": args.output})


# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpcg",
        description="Minor embedding of Cartesian products of complete graphs into Chimera chips",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--quiet", action="store_true", help="only warnings and errors on stderr")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--json", action="store_true", help="JSON on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-chimera", help="write a hardware file")
    p.add_argument("N", type=int, nargs="?")
    p.add_argument("M", type=int, nargs="?")
    p.add_argument("Lsize", metavar="L", type=int, nargs="?")
    p.add_argument("--preset", choices=sorted(CHIP_PRESETS))
    p.add_argument("--mask509", action="store_true", help="add the representative three-fault mask")
    p.add_argument("--dead-random", type=int, default=0, metavar="K")
    p.add_argument("--seed", type=int, default=settings.CPCG_SEED)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_chimera)

    p = sub.add_parser("gen-product", help="write K_m □ K_n as an edge list")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_product)

    p = sub.add_parser("gen-partition-qubo", help="write the K-way partitioning QUBO of a graph")
    p.add_argument("graph")
    p.add_argument("K", type=int)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_partition_qubo)

    p = sub.add_parser("detect", help="recognise K_m □ K_n structure")
    p.add_argument("problem")
    p.set_defaults(func=cmd_detect)

    embed = sub.add_parser("embed", help="embed a problem").add_subparsers(dest="method", required=True)

    p = embed.add_parser("cpcg")
    p.add_argument("-m", type=int)
    p.add_argument("-n", type=int)
    p.add_argument("-L", type=int)
    p.add_argument("--chip", type=int)
    p.add_argument("--problem", help="edge list or QUBO with K_m □ K_n structure")
    p.add_argument("--auto-orient", action="store_true")
    p.add_argument("--fixed-orientation", action="store_true", help="always host K_m in the nexus")
    p.add_argument("--general", action="store_true", help="allow nexuses wider than two cells")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_embed_cpcg)

    p = embed.add_parser("triangular")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-L", type=int)
    p.add_argument("--chip", type=int)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_embed_triangular)

    p = embed.add_parser("heuristic")
    p.add_argument("-m", type=int)
    p.add_argument("-n", type=int)
    p.add_argument("--problem")
    p.add_argument("--hardware", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--tries", type=int)
    p.add_argument("--step-budget", "--steps", dest="steps", type=int)
    p.add_argument("--max-time", type=float, help="seconds per call")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_embed_heuristic)

    p = embed.add_parser("ft")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--hardware", required=True)
    p.add_argument("--max-extensions", type=int)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_embed_ft)

    p = sub.add_parser("validate", help="check an embedding")
    p.add_argument("--embedding", required=True)
    p.add_argument("--problem")
    p.add_argument("-m", type=int)
    p.add_argument("-n", type=int)
    p.add_argument("--hardware")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="chain statistics of an embedding")
    p.add_argument("--embedding", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("lower", help="map a QUBO onto physical qubits")
    p.add_argument("--qubo", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--hardware")
    p.add_argument("--chain-strength", type=float)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("analyze", help="size formulas and certificates")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-L", type=int)
    p.add_argument("--chip", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="SVG of an embedding or a bench CSV")
    p.add_argument("--embedding")
    p.add_argument("--hardware")
    p.add_argument("--plot", metavar="CSV")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="seeded comparison sweep to CSV")
    p.add_argument("sweep", choices=BENCH_SWEEPS)
    p.add_argument("--methods", default="cpcg,triangular,baseline")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--n", default="2..15")
    p.add_argument("--chip", type=int)
    p.add_argument("-L", type=int)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--dead", type=int, default=0)
    p.add_argument("--fault-seeds")
    p.add_argument("--workers", type=int)
    p.add_argument("--step-budget", dest="steps", type=int, help="baseline placements per trial")
    p.add_argument("--max-time", type=float, help="baseline seconds per trial")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    if args.quiet:
        setup_logging("WARNING")
    elif args.verbose:
        setup_logging("DEBUG")
    out = _Output(args.json)

    try:
        args.func(args, out)
    except _Failure as failure:
        logger.error(str(failure))
        return EXIT_FAILURE
    except CpcgError as exc:
        logger.error(f"Input error: {exc}")
        return EXIT_USAGE
    except Exception as exc:
        logger.error(f"Unexpected error: {exc}", exc_info=True)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
