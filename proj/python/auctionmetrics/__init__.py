"""Bid and value distribution estimators for first- and second-price auctions."""

import json as _json

from ._core import (  # noqa: F401
    AuctionModel,
    EstimatorError,
    FpSampleSet,
    PiecewiseCdf,
    SpSampleSet,
    cdf_from_json,
    dkw_band,
    estimate_fp,
    estimate_sp,
    kolmogorov,
    levy,
    model_from_json,
    run_lower_bound,
    run_sweep,
    simulate_fp,
    simulate_sp,
    sup_distance,
    uniform_model,
    wasserstein1,
)

__version__ = "0.1.0"


def sweep(config, base_dir="."):
    """Run a convergence experiment given as a dict; returns the report dict."""
    return _json.loads(run_sweep(_json.dumps(config), base_dir))


def lower_bound(k, eps, lam, n, trials, seed=7):
    return _json.loads(run_lower_bound(k, eps, lam, n, trials, seed))
