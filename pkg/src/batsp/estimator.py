"""scikit-learn style front end for the pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .instance import MetricInstance, validate_metric
from .solver import SolverConfig, solve_batsp
from .thintree import DEFAULT_ATTEMPTS


def check_cost_matrix(X, closure: bool = False) -> MetricInstance:
    """Validate a square cost matrix and wrap it as a metric instance."""
    if isinstance(X, MetricInstance):
        inst = X
    else:
        X = check_array(X, dtype=np.float64, ensure_min_samples=1, ensure_min_features=1)
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"cost matrix must be square, got shape {X.shape}")
        inst = MetricInstance(X)
    return validate_metric(inst, "closure" if closure else "reject")


class BottleneckATSP(BaseEstimator):
    """Approximate bottleneck ATSP solver.

    ``fit`` takes an ``n x n`` cost matrix (row = tail, column = head) and
    stores the tour and its certificates in trailing-underscore attributes.

    Parameters
    ----------
    seed : int
        Seed for tree sampling; runs are deterministic given the seed.
    beta_target : float or None
        Thinness the sampler aims for; ``None`` uses ``max(2, 4 ln n / ln ln n)``.
    tree_attempts : int
        Number of spanning trees sampled.
    thinness_mode : {"auto", "exhaustive", "sampled"}
    closure : bool
        Replace the costs by their metric closure instead of rejecting
        triangle-inequality violations.
    oracle_cap : int
        Also compute the exact optimum when ``n <= oracle_cap``.
    """

    def __init__(self, seed=0, beta_target=None, tree_attempts=DEFAULT_ATTEMPTS,
                 thinness_mode="auto", closure=False, oracle_cap=0):
        self.seed = seed
        self.beta_target = beta_target
        self.tree_attempts = tree_attempts
        self.thinness_mode = thinness_mode
        self.closure = closure
        self.oracle_cap = oracle_cap

    def fit(self, X, y=None):
        inst = check_cost_matrix(X, closure=self.closure)
        cfg = SolverConfig(
            seed=self.seed,
            beta_target=self.beta_target,
            tree_attempts=self.tree_attempts,
            thinness_mode=self.thinness_mode,
            oracle_cap=self.oracle_cap,
        )
        report = solve_batsp(inst, cfg)
        self.report_ = report
        self.instance_ = inst
        self.tour_ = np.array(report.tour["tour"], dtype=np.int64)
        self.bottleneck_ = report.bottleneck
        self.tau_star_ = report.tau_star
        self.beta_ = report.beta_certified
        self.k_ = report.k_used
        self.n_vertices_ = inst.n
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).tour_

    def score(self, X=None, y=None):
        """``tau* / bottleneck`` (1.0 is provably optimal)."""
        check_is_fitted(self, "report_")
        if self.bottleneck_ == 0:
            return 1.0
        return self.tau_star_ / self.bottleneck_
