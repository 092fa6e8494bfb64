"""Command-line interface: ``batsp <command> ...``.

Exit codes: 0 success, 2 infeasible or invalid input, 3 internal invariant
violation, 4 size limit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import constructions, oracle, thintree
from .circulation import to_dot
from .exceptions import BatspError, InvariantViolation
from .files import emit_report, load_report, parse_instance
from .heldkarp import find_tau_star
from .solver import SolverConfig, solve_batsp, verify_solution

log = logging.getLogger("batsp")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    seed: int = 0
    beta_target: float | None = None
    tree_attempts: int = thintree.DEFAULT_ATTEMPTS
    thinness_mode: str = "auto"
    oracle_cap: int = 16
    closure: bool = False
    out: str | None = None
    trace: bool = False
    timings: bool = True
    summary: bool = False

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            command=args.command,
            input=getattr(args, "input", None),
            seed=getattr(args, "seed", 0),
            beta_target=getattr(args, "beta_target", None),
            tree_attempts=getattr(args, "tree_attempts", thintree.DEFAULT_ATTEMPTS),
            thinness_mode=getattr(args, "thinness_mode", "auto"),
            oracle_cap=getattr(args, "oracle_cap", 16),
            closure=getattr(args, "closure", False),
            out=getattr(args, "out", None),
            trace=getattr(args, "trace", False),
            timings=not getattr(args, "no_timings", False),
            summary=getattr(args, "summary", False),
        )

    def solver_config(self, trace=None, on_network=None) -> SolverConfig:
        return SolverConfig(
            seed=self.seed,
            beta_target=self.beta_target,
            tree_attempts=self.tree_attempts,
            thinness_mode=self.thinness_mode,
            oracle_cap=self.oracle_cap,
            trace=trace,
            on_network=on_network,
        )


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _add_solver_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta-target", type=_positive_float, default=None)
    p.add_argument("--tree-attempts", type=_positive_int, default=thintree.DEFAULT_ATTEMPTS)
    p.add_argument("--thinness-mode", choices=["auto", "exhaustive", "sampled"], default="auto")
    p.add_argument("--oracle-cap", type=_nonneg_int, default=16,
                   help="include the exact optimum when n is at most this")
    p.add_argument("--trace", action="store_true", help="LP trace as JSON lines on stderr")


def _add_io_flags(p, instance=True):
    if instance:
        p.add_argument("input")
        p.add_argument("--closure", action="store_true", help="replace costs by their metric closure")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="batsp", description="Bottleneck asymmetric TSP approximation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the approximation pipeline")
    _add_io_flags(p)
    _add_solver_flags(p)
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("--summary", action="store_true", help="single TSV line instead of JSON")
    p.add_argument("--dump-network", default=None, help="write the split circulation network as DOT")

    p = sub.add_parser("lower-bound", help="threshold search only")
    _add_io_flags(p)
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("oracle", help="exact bottleneck optimum by subset DP")
    _add_io_flags(p)
    p.add_argument("--oracle-cap", type=_nonneg_int, default=oracle.DP_MAX_N)

    p = sub.add_parser("gen", help="generate instances and constructions")
    p.add_argument("kind", choices=["metric", "extreme-point", "counterexample"])
    p.add_argument("--n", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--style", choices=["closure", "euclidean-ish"], default="closure")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", type=_positive_int, default=1)
    _add_io_flags(p, instance=False)

    p = sub.add_parser("verify", help="independently re-check a report")
    _add_io_flags(p)
    p.add_argument("report")

    p = sub.add_parser("verify-construction", help="verify the explicit constructions")
    p.add_argument("kind", choices=["extreme-point", "counterexample", "two-connectivity"])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", type=_positive_int, default=1)
    p.add_argument("--pairs", type=_positive_int, default=None)
    p.add_argument("--count", type=_positive_int, default=30)
    p.add_argument("--seed", type=int, default=0)
    _add_io_flags(p, instance=False)

    p = sub.add_parser("thinness", help="sample and certify a thin tree at tau*")
    _add_io_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta-target", type=_positive_float, default=None)
    p.add_argument("--tree-attempts", type=_positive_int, default=thintree.DEFAULT_ATTEMPTS)
    p.add_argument("--thinness-mode", choices=["auto", "exhaustive", "sampled"], default="auto")

    p = sub.add_parser("bench", help="solve a batch of seeded random metrics")
    p.add_argument("--sizes", default="6,8,10,12")
    p.add_argument("--seeds", type=_positive_int, default=5)
    p.add_argument("--style", choices=["closure", "euclidean-ish"], default="closure")
    p.add_argument("--workers", type=_positive_int, default=1)
    _add_solver_flags(p)
    _add_io_flags(p, instance=False)
    return parser


def _write(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _trace_sink(enabled):
    if not enabled:
        return None

    def sink(record):
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")

    return sink


def cmd_solve(cfg: RunConfig, args) -> int:
    inst = parse_instance(cfg.input, closure=cfg.closure)
    networks = []
    report = solve_batsp(inst, cfg.solver_config(trace=_trace_sink(cfg.trace), on_network=networks.append))
    verdict = verify_solution(inst, report)
    if not verdict:
        raise InvariantViolation(f"report failed verification: {verdict.first_failure}", stage="verify")
    if args.dump_network and networks:
        Path(args.dump_network).write_text(to_dot(networks[-1]))
    text = emit_report(report, None, timings=cfg.timings, summary=cfg.summary)
    _write(text, cfg.out)
    return 0


def cmd_lower_bound(cfg: RunConfig, args) -> int:
    inst = parse_instance(cfg.input, closure=cfg.closure)
    if inst.n < 2:
        data = {"n": inst.n, "tau_star": 0.0, "support": []}
    else:
        tau, sol = find_tau_star(inst, trace=_trace_sink(cfg.trace))
        x = sol.as_float()
        data = {
            "n": inst.n,
            "tau_star": tau,
            "is_extreme": sol.is_extreme,
            "rounds": sol.rounds,
            "support": [{"arc": [u, v], "x": float(x[u, v])} for u, v in sol.support],
        }
    _write(json.dumps(data, sort_keys=True, indent=2) + "\n", cfg.out)
    return 0


def cmd_oracle(cfg: RunConfig, args) -> int:
    inst = parse_instance(cfg.input, closure=cfg.closure)
    res = oracle.exact_bottleneck(inst, cap=args.oracle_cap)
    _write(json.dumps(res.to_dict(), sort_keys=True, indent=2) + "\n", cfg.out)
    return 0


def cmd_gen(cfg: RunConfig, args) -> int:
    if args.kind == "metric":
        data = constructions.gen_random_metric(args.n, args.seed, args.style).to_dict()
    elif args.kind == "extreme-point":
        data = constructions.build_extreme_point(args.k).to_dict()
    else:
        data = constructions.build_counterexample(args.k, args.p).to_dict()
    _write(json.dumps(data, sort_keys=True) + "\n", cfg.out)
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    inst = parse_instance(cfg.input, closure=cfg.closure)
    verdict = verify_solution(inst, load_report(args.report))
    _write(json.dumps({"ok": verdict.ok, "failures": verdict.failures}, indent=2) + "\n", cfg.out)
    return 0 if verdict else 3


def cmd_verify_construction(cfg: RunConfig, args) -> int:
    if args.kind == "extreme-point":
        data = constructions.verify_extreme_point(constructions.build_extreme_point(args.k)).to_dict()
    elif args.kind == "counterexample":
        g = constructions.build_counterexample(args.k, args.p)
        data = constructions.verify_counterexample(g, pairs=args.pairs, seed=args.seed).to_dict()
    else:
        rng = np.random.default_rng(args.seed)
        results = []
        while len(results) < args.count:
            n = int(rng.integers(5, 11))
            adj = constructions.random_graph(n, 0.6, rng)
            v = constructions.check_two_connectivity(adj, pairs=args.pairs, seed=args.seed)
            if v.hk_feasible:
                results.append(v)
        data = {
            "ok": all(results),
            "graphs": len(results),
            "articulation_points": sum(len(v.articulation_points) for v in results),
        }
    _write(json.dumps(data, sort_keys=True, indent=2) + "\n", cfg.out)
    return 0 if data["ok"] else 3


def cmd_thinness(cfg: RunConfig, args) -> int:
    inst = parse_instance(cfg.input, closure=cfg.closure)
    if inst.n < 2:
        raise BatspError("thinness needs n >= 2")
    tau, sol = find_tau_star(inst)
    z = thintree.derive_z(sol)
    tree = thintree.find_certified_thin_tree(z, cfg.beta_target, cfg.tree_attempts, cfg.seed, cfg.thinness_mode)
    data = {
        "tau_star": tau,
        "tree": [list(e) for e in tree.edges],
        "beta": tree.beta,
        "certified": tree.certified,
        "witness": sorted(tree.witness),
        "beta_target": cfg.beta_target or thintree.default_beta_target(inst.n),
        "success": tree.success,
    }
    _write(json.dumps(data, sort_keys=True, indent=2) + "\n", cfg.out)
    return 0


def _bench_one(job):
    n, seed, style, scfg = job
    inst = constructions.gen_random_metric(n, seed, style)
    t0 = time.perf_counter()
    report = solve_batsp(inst, scfg)
    ok = verify_solution(inst, report).ok
    return (n, seed, report.tau_star, report.beta_certified, report.k_used, report.bottleneck,
            report.opt, report.ratio, ok, time.perf_counter() - t0)


def cmd_bench(cfg: RunConfig, args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    scfg = cfg.solver_config()
    jobs = [(n, cfg.seed + s, args.style, scfg) for n in sizes for s in range(args.seeds)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    lines = ["n\tseed\ttau_star\tbeta\tk\tbottleneck\topt\tratio\tverified\tseconds"]
    for r in rows:
        lines.append("\t".join("" if v is None else (f"{v:.4f}" if isinstance(v, float) else str(v)) for v in r))
    _write("\n".join(lines) + "\n", cfg.out)
    return 0 if all(r[8] for r in rows) else 3


COMMANDS = {
    "solve": cmd_solve,
    "lower-bound": cmd_lower_bound,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "verify": cmd_verify,
    "verify-construction": cmd_verify_construction,
    "thinness": cmd_thinness,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig.from_args(args)
    try:
        return COMMANDS[args.command](cfg, args)
    except BatspError as exc:
        sys.stderr.write(f"batsp: error: {exc}\n")
        return exc.exit_code
    except FileNotFoundError as exc:
        sys.stderr.write(f"batsp: error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"batsp: error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
