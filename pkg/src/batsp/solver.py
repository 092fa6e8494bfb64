"""End-to-end bottleneck ATSP pipeline and report verification."""

from __future__ import annotations

import logging
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import circulation, shortcut, thintree
from .exceptions import BatspError, InfeasibleCirculation
from .heldkarp import find_tau_star
from .instance import MetricInstance, bfs_hops, threshold_graph
from .oracle import exact_bottleneck

log = logging.getLogger(__name__)

SCHEMA = "batsp-report/1"
BETA_RETRIES = 8


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    beta_target: float | None = None
    tree_attempts: int = thintree.DEFAULT_ATTEMPTS
    thinness_mode: str = "auto"
    oracle_cap: int = 0
    exact_lp: bool = False
    trace: Callable[[dict], None] | None = None
    on_network: Callable[[circulation.CirculationInstance], None] | None = None

    def __post_init__(self):
        if self.tree_attempts < 1:
            raise ValueError("tree_attempts must be >= 1")
        if self.thinness_mode not in ("auto", "exhaustive", "sampled"):
            raise ValueError(f"unknown thinness mode {self.thinness_mode!r}")
        if self.beta_target is not None and not self.beta_target > 0:
            raise ValueError("beta_target must be positive")
        if self.oracle_cap < 0:
            raise ValueError("oracle_cap must be >= 0")


@dataclass
class PipelineReport:
    name: str
    n: int
    seed: int
    tau_star: float
    beta_target: float | None
    beta_certified: float | None
    thinness_certified: bool
    k_used: int
    tour: dict
    ratio: float | None
    worst_case_bound: int | None
    opt: float | None = None
    beta_used: float | None = None
    circuit_length: int | None = None
    max_visit_count: int | None = None
    timings: dict = field(default_factory=dict)
    schema: str = SCHEMA

    @property
    def bottleneck(self) -> float:
        return self.tour["bottleneck"]

    def to_dict(self, timings: bool = True) -> dict:
        out = asdict(self)
        if not timings:
            out.pop("timings")
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineReport":
        d = dict(d)
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        d.setdefault("timings", {})
        return cls(**d)


def worst_case_bound(n: int) -> int | None:
    """``2 ceil(16 ln n / ln ln n) - 1``, the formula-level guarantee."""
    b = thintree.beta_formula(n)
    if math.isnan(b):
        return None
    return 2 * math.ceil(4 * b) - 1


def _ratio(bottleneck: float, tau: float) -> float | None:
    if tau > 0:
        return bottleneck / tau
    return 1.0 if bottleneck == 0 else None


@contextmanager
def _stage(name: str, timings: dict):
    t0 = time.perf_counter()
    try:
        yield
    except BatspError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    finally:
        timings[name] = round(time.perf_counter() - t0, 6)


def _small(inst: MetricInstance, cfg: SolverConfig, timings: dict) -> PipelineReport:
    n = inst.n
    if n == 1:
        tau, tour = 0.0, [0]
    else:
        with _stage("tau_star", timings):
            tau, _ = find_tau_star(inst, exact=cfg.exact_lp, trace=cfg.trace)
        if n == 2:
            tour = [0, 1]
        else:
            cands = ([0, 1, 2], [0, 2, 1])
            tour = min(cands, key=lambda t: (max(inst.c(t[i], t[(i + 1) % 3]) for i in range(3)), t))
    g = threshold_graph(inst, tau)
    res = shortcut.evaluate_tour(tour, inst, g, k=1, max_gap=1 if n > 1 else 0)
    opt = None
    if n <= cfg.oracle_cap:
        opt = exact_bottleneck(inst).opt_bottleneck
    return PipelineReport(
        name=inst.name, n=n, seed=cfg.seed, tau_star=tau, beta_target=None,
        beta_certified=None, thinness_certified=True, k_used=1, tour=res.to_dict(),
        ratio=_ratio(res.bottleneck, tau), worst_case_bound=worst_case_bound(n), opt=opt,
        timings=timings,
    )


def solve_batsp(inst: MetricInstance, config: SolverConfig | None = None) -> PipelineReport:
    """Threshold search, thin tree, circulation, Euler circuit, shortcut."""
    cfg = config or SolverConfig()
    timings: dict = {}
    n = inst.n
    if n <= 3:
        return _small(inst, cfg, timings)

    with _stage("tau_star", timings):
        tau, x_star = find_tau_star(inst, exact=cfg.exact_lp, trace=cfg.trace)
    g = threshold_graph(inst, tau)

    beta_target = cfg.beta_target if cfg.beta_target is not None else thintree.default_beta_target(n)
    with _stage("thin_tree", timings):
        z = thintree.derive_z(x_star)
        tree = thintree.find_certified_thin_tree(
            z, beta_target, cfg.tree_attempts, rng_seed=cfg.seed, mode=cfg.thinness_mode
        )
        t_arrow = thintree.orient_tree(tree.edges, x_star)
        tree.orientation = t_arrow

    with _stage("circulation", timings):
        beta = tree.beta
        for attempt in range(BETA_RETRIES + 1):
            inst_c = circulation.build_instance(x_star, t_arrow, beta)
            if cfg.on_network is not None:
                cfg.on_network(inst_c)
            try:
                circ = circulation.solve_integral(inst_c)
                break
            except InfeasibleCirculation:
                # Only reachable when the thinness was a sampled lower bound.
                if tree.certified or attempt == BETA_RETRIES:
                    raise
                beta *= 1.25
                log.warning("circulation infeasible with sampled beta; retrying with beta=%.4f", beta)
        mg = circulation.assemble_multigraph(inst_c, circ)

    with _stage("shortcut", timings):
        circuit = shortcut.euler_circuit(mg, start=0)
        k = mg.visit_bound
        parts = shortcut.partition_pieces(circuit, k)
        trans = shortcut.find_transversal(parts)
        res = shortcut.shortcut_tour(circuit, trans, inst, g)

    opt = None
    if n <= cfg.oracle_cap:
        with _stage("oracle", timings):
            opt = exact_bottleneck(inst).opt_bottleneck

    return PipelineReport(
        name=inst.name,
        n=n,
        seed=cfg.seed,
        tau_star=tau,
        beta_target=beta_target,
        beta_certified=tree.beta,
        thinness_certified=tree.certified,
        k_used=k,
        tour=res.to_dict(),
        ratio=_ratio(res.bottleneck, tau),
        worst_case_bound=worst_case_bound(n),
        opt=opt,
        beta_used=beta,
        circuit_length=circuit.m,
        max_visit_count=max(circuit.visit_count.values()),
        timings=timings,
    )


@dataclass
class Verdict:
    ok: bool
    failures: list[str]

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None

    def __bool__(self) -> bool:
        return self.ok


def verify_solution(inst: MetricInstance, report) -> Verdict:
    """Recheck a report against the instance without trusting its numbers."""
    if isinstance(report, PipelineReport):
        report = report.to_dict()
    fails = []
    tour_info = report["tour"]
    tour = [int(v) for v in tour_info["tour"]]
    n = inst.n
    if sorted(tour) != list(range(n)):
        return Verdict(False, ["tour is not a permutation of the vertices"])
    tau = report["tau_star"]
    k = report["k_used"]
    if n >= 2:
        edges = [(tour[i], tour[(i + 1) % n]) for i in range(n)]
        bottleneck = max(inst.c(u, v) for u, v in edges)
    else:
        edges, bottleneck = [], 0.0
    if bottleneck != tour_info["bottleneck"]:
        fails.append(f"bottleneck mismatch: reported {tour_info['bottleneck']}, recomputed {bottleneck}")
    g = threshold_graph(inst, tau)
    hops = [int(bfs_hops(g, u)[v]) for u, v in edges]
    if hops != list(tour_info.get("hops", [])):
        fails.append("hop certificate mismatch")
    bound = 2 * k - 1
    if any(h < 1 or h > bound for h in hops):
        fails.append(f"tour edge exceeds {bound} hops in the threshold graph")
    if bottleneck > bound * tau:
        fails.append(f"bottleneck {bottleneck} > (2k-1) tau* = {bound * tau}")
    if report.get("ratio") is not None and tau > 0 and not math.isclose(report["ratio"], bottleneck / tau, rel_tol=0, abs_tol=1e-12):
        fails.append("ratio mismatch")
    opt = report.get("opt")
    if opt is not None and not (tau <= opt <= bottleneck):
        fails.append(f"ordering tau* <= opt <= bottleneck violated ({tau}, {opt}, {bottleneck})")
    return Verdict(not fails, fails)
