"""Seeded Monte Carlo harness comparing the baseline and walk estimators.

Reproducibility contract: replicate ``j`` of a scenario with seed ``s`` draws
its noise from ``PCG64(SeedSequence(s, spawn_key=(j, attempt)))`` using
numpy's ziggurat ``standard_normal``. Replicates are processed in fixed-size
blocks whose boundaries do not depend on the worker count, and means are
taken with ``math.fsum``, so serial and parallel runs agree bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from . import altstats, likelihood
from .detect import SCORE_ALIASES, detect
from .manifold import embed_batch, truth_coordinates, zero_pass_distance_batch
from .types import DegenerateScaleError, ManifoldPoint, RiskReport, Series
from .walk import walk_batch

ESTIMATORS = ("likelihood", "cusum", "self-normalized")
DEFAULT_SEED = 20240601
# replicates per block; fixed so results never depend on the worker count
BLOCK_CELLS = 1_000_000
MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class ScenarioConfig:
    """One Monte Carlo scenario.

    ``delta`` is the mean shift in sigma units and is ignored when ``r == 0``.
    With ``known_sigma`` the estimators are handed the true ``sigma``;
    otherwise they use the plug-in rule named by ``plug_in``.
    """

    n: int
    r: int = 0
    delta: float = 0.0
    sigma: float = 1.0
    replicates: int = 10_000
    seed: int = DEFAULT_SEED
    estimator: str = "likelihood"
    known_sigma: bool = True
    plug_in: str = "pooled"
    sn_root: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0 <= self.r <= self.n - 1:
            raise ValueError(f"r must lie in 0..{self.n - 1}")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        est = SCORE_ALIASES.get(self.estimator, self.estimator)
        if est not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if est == "self-normalized" and self.n < 4:
            raise ValueError("self-normalized scores need n >= 4")
        object.__setattr__(self, "estimator", est)
        if self.r == 0:
            object.__setattr__(self, "delta", 0.0)

    @property
    def truth(self) -> tuple[float, float]:
        return truth_coordinates(self.n, self.r, self.delta)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ReplicateResults:
    """Per-replicate outcomes of one scenario, in replicate order."""

    config: ScenarioConfig
    r_mle: np.ndarray
    r_hat: np.ndarray
    delta_mle: np.ndarray
    pi0: np.ndarray
    loss_mle: np.ndarray
    loss_proposed: np.ndarray
    delta_at_truth: np.ndarray
    rejections: int = 0

    @property
    def t_mle(self) -> np.ndarray:
        return self.r_mle / self.config.n

    @property
    def t_hat(self) -> np.ndarray:
        return self.r_hat / self.config.n

    @property
    def theta_mle(self) -> np.ndarray:
        return np.arctan(self.delta_mle)

    @property
    def theta_hat(self) -> np.ndarray:
        return np.where(self.r_hat == 0, 0.0, self.theta_mle)


def replicate_rng(seed: int, index: int, attempt: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(index, attempt))
    return np.random.Generator(np.random.PCG64(ss))


def _draw(config: ScenarioConfig, index: int, attempt: int = 0) -> np.ndarray:
    z = replicate_rng(config.seed, index, attempt).standard_normal(config.n)
    x = config.sigma * z
    if config.r > 0:
        x[config.r:] += config.delta * config.sigma
    return x


def simulate_series(config: ScenarioConfig, replicate_index: int) -> Series:
    """Series for one replicate; depends only on ``(seed, replicate_index)``."""
    sigma = config.sigma if config.known_sigma else None
    return Series(_draw(config, replicate_index), sigma)


def score_block(x: np.ndarray, estimator: str, sigmas: np.ndarray,
                sn_root: bool = True) -> np.ndarray:
    if estimator == "likelihood":
        return likelihood.log_likelihood_profiles(x, sigmas)
    if estimator == "cusum":
        return altstats.cusum_profiles(x)
    return altstats.self_normalized_profiles(x, root=sn_root)


def estimate_block(x: np.ndarray, estimator: str, sigma: Optional[float],
                   plug_in: str = "pooled", sn_root: bool = True) -> dict:
    """Run both estimators on every row of ``x``.

    Returns the baseline split (argmax of the raw profile), the walk split,
    the shift at the baseline split in sigma units, ``pi(0)`` and the working
    sigmas. Rows whose plug-in sigma is zero are flagged in ``degenerate``.
    """
    B, n = x.shape
    rows = np.arange(B)
    if sigma is not None:
        sigmas = np.full(B, float(sigma))
    elif estimator == "likelihood" or plug_in == "global":
        sigmas = likelihood.resolve_sigmas(x, None, plug_in)
    else:
        # pooled at the split this estimator itself picks; its argmax is scale free
        splits = np.argmax(score_block(x, estimator, np.ones(B)), axis=1)
        sigmas = np.sqrt(likelihood.pooled_variances(x, splits))
    degenerate = ~(sigmas > 0)
    safe = np.where(degenerate, 1.0, sigmas)
    scores = score_block(x, estimator, safe, sn_root)
    r_mle = np.argmax(scores, axis=1)
    pi, r_hat = walk_batch(scores)
    diffs = np.zeros((B, n))
    diffs[:, 1:] = likelihood.raw_mean_differences(x)
    return {
        "r_mle": r_mle,
        "r_hat": r_hat,
        "delta_mle": diffs[rows, r_mle] / safe,
        "pi0": pi[:, 0],
        "sigmas": safe,
        "diffs": diffs,
        "degenerate": degenerate,
    }


def _block_size(n: int) -> int:
    return max(1, min(2_000, BLOCK_CELLS // n))


def _run_block(config: ScenarioConfig, start: int, stop: int) -> dict:
    sigma = config.sigma if config.known_sigma else None
    idx = range(start, stop)
    attempts = np.zeros(stop - start, dtype=int)
    x = np.stack([_draw(config, j) for j in idx])
    est = estimate_block(x, config.estimator, sigma, config.plug_in, config.sn_root)
    rejections = 0
    # a zero plug-in scale rejects the replicate; redraw on the next attempt stream
    for i in np.flatnonzero(est["degenerate"]):
        while True:
            attempts[i] += 1
            rejections += 1
            if attempts[i] > MAX_ATTEMPTS:
                raise DegenerateScaleError()
            row = _draw(config, start + i, int(attempts[i]))[None, :]
            one = estimate_block(row, config.estimator, sigma, config.plug_in, config.sn_root)
            if not one["degenerate"][0]:
                break
        x[i] = row[0]
        for key in est:
            est[key][i] = one[key][0]

    n = config.n
    t0, th0 = config.truth
    theta_mle = np.arctan(est["delta_mle"])
    r_mle, r_hat = est["r_mle"], est["r_hat"]
    loss_mle = zero_pass_distance_batch(r_mle / n, theta_mle, t0, th0)
    theta_hat = np.where(r_hat == 0, 0.0, theta_mle)
    loss_prop = zero_pass_distance_batch(r_hat / n, theta_hat, t0, th0)
    if config.r > 0:
        at_truth = est["diffs"][:, config.r] / est["sigmas"]
    else:
        at_truth = np.zeros(stop - start)
    return {
        "r_mle": r_mle, "r_hat": r_hat, "delta_mle": est["delta_mle"],
        "pi0": est["pi0"], "loss_mle": loss_mle, "loss_proposed": loss_prop,
        "delta_at_truth": at_truth, "rejections": rejections,
    }


def _run_block_args(args):
    return _run_block(*args)


def run_replicates(config: ScenarioConfig, workers: int = 1) -> ReplicateResults:
    """All replicates of ``config``; identical output for any ``workers``."""
    size = _block_size(config.n)
    bounds = [(config, s, min(s + size, config.replicates))
              for s in range(0, config.replicates, size)]
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block_args, bounds))
    else:
        parts = [_run_block(*b) for b in bounds]
    cat = {k: np.concatenate([p[k] for p in parts])
           for k in parts[0] if k != "rejections"}
    return ReplicateResults(config=config, rejections=sum(p["rejections"] for p in parts), **cat)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    m = math.fsum(values) / values.size
    if values.size < 2:
        return m, float("nan")
    var = math.fsum((values - m) ** 2) / (values.size - 1)
    return m, math.sqrt(var / values.size)


def summarize(results: ReplicateResults, keep_losses: bool = False) -> RiskReport:
    m_mle, se_mle = _mean_se(results.loss_mle)
    m_prop, se_prop = _mean_se(results.loss_proposed)
    return RiskReport(
        config=results.config.to_dict(),
        mean_loss_mle=m_mle,
        mean_loss_proposed=m_prop,
        se_loss_mle=se_mle,
        se_loss_proposed=se_prop,
        zero_rate=float(np.count_nonzero(results.r_hat == 0)) / results.r_hat.size,
        rejections=results.rejections,
        losses_mle=results.loss_mle if keep_losses else None,
        losses_proposed=results.loss_proposed if keep_losses else None,
    )


def monte_carlo_risk(config: ScenarioConfig, workers: int = 1,
                     keep_losses: bool = False) -> RiskReport:
    """Mean zero-pass losses of both estimators against the scenario truth."""
    return summarize(run_replicates(config, workers), keep_losses)


def zero_probability_curve(n_grid, replicates: int, seed: int = DEFAULT_SEED,
                           estimator: str = "likelihood",
                           workers: int = 1) -> list[tuple[int, float]]:
    """Fraction of no-change data sets on which the walk reports no change."""
    out = []
    for n in n_grid:
        cfg = ScenarioConfig(n=int(n), r=0, replicates=replicates, seed=seed,
                             estimator=estimator)
        res = run_replicates(cfg, workers)
        out.append((int(n), float(np.count_nonzero(res.r_hat == 0)) / res.r_hat.size))
    return out


def scatter_cloud(config: ScenarioConfig,
                  workers: int = 1) -> list[tuple[ManifoldPoint, ManifoldPoint]]:
    """Per-replicate ``(baseline point, proposed point)`` pairs on the manifold."""
    res = run_replicates(config, workers)
    u_mle = embed_batch(res.t_mle, res.theta_mle)
    u_hat = embed_batch(res.t_hat, res.theta_hat)
    return [(ManifoldPoint(*map(float, a)), ManifoldPoint(*map(float, b)))
            for a, b in zip(u_mle, u_hat)]


@dataclass(frozen=True)
class ModelFit:
    n: int
    r: int
    delta: float
    sigma: float


@dataclass(frozen=True)
class BootstrapRisk:
    """Each estimator's risk under the model it fitted itself."""

    risk_mle: float
    risk_proposed: float
    fit_mle: ModelFit
    fit_proposed: ModelFit
    report_mle: RiskReport
    report_proposed: RiskReport


def fit_models(series: Series) -> tuple[ModelFit, ModelFit]:
    """Gaussian fits implied by the MLE and by the proposed estimate.

    The proposed fit falls back to the single-mean model with whole-series
    sigma when the walk reports no change.
    """
    est = detect(series)
    n = series.n
    sigma_mle = est.sigma_used
    fit_mle = ModelFit(n, est.r_mle, est.delta_mle, sigma_mle)
    if est.r_hat == 0:
        sigma0 = series.sigma if series.sigma is not None else likelihood.pooled_sigma(series, 0)
        fit_prop = ModelFit(n, 0, 0.0, sigma0)
    else:
        fit_prop = fit_mle
    return fit_mle, fit_prop


def bootstrap_risk_from_fit(fit: ModelFit, reps: int, seed: int = DEFAULT_SEED,
                            workers: int = 1) -> RiskReport:
    cfg = ScenarioConfig(n=fit.n, r=fit.r, delta=fit.delta, sigma=fit.sigma,
                         replicates=reps, seed=seed, known_sigma=True)
    return monte_carlo_risk(cfg, workers)


def parametric_bootstrap_risk(series: Series, reps: int = 10_000,
                              seed: int = DEFAULT_SEED, workers: int = 1) -> BootstrapRisk:
    """Resample from the fitted change-point model(s) and average the losses.

    The fitted sigma is treated as known when re-estimating on the resamples.
    """
    fit_mle, fit_prop = fit_models(series)
    rep_mle = bootstrap_risk_from_fit(fit_mle, reps, seed, workers)
    rep_prop = rep_mle if fit_prop == fit_mle else bootstrap_risk_from_fit(fit_prop, reps, seed, workers)
    return BootstrapRisk(rep_mle.mean_loss_mle, rep_prop.mean_loss_proposed,
                         fit_mle, fit_prop, rep_mle, rep_prop)


def zero_decomposition(results: ReplicateResults) -> dict:
    """Empirical ``P(r_hat = 0) = sum_k delta_k p_L(k)`` on counts.

    Returns the per-split conditional zero rates, the baseline split law, and
    both sides of the identity as integer counts.
    """
    n = results.config.n
    total = results.r_hat.size
    picked = np.bincount(results.r_mle, minlength=n)
    zero_given = np.bincount(results.r_mle[results.r_hat == 0], minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        delta_k = np.where(picked > 0, zero_given / np.maximum(picked, 1), 0.0)
    return {
        "p_L": picked / total,
        "delta_k": delta_k,
        "zero_count": int(np.count_nonzero(results.r_hat == 0)),
        "sum_count": int(zero_given.sum()),
    }


def risk_difference_bound(results: ReplicateResults) -> dict:
    """Mean loss gap of baseline over proposed and its lower bound ``eta_n(r)``.

    ``eta_n(r) = c_r (E|atan D_r - atan D| - |atan D| - E|atan D_r|) p_L(r) delta_r``
    where ``D_r`` is the shift estimated at the true split on every replicate.
    """
    cfg = results.config
    gap = _mean_se(results.loss_mle - results.loss_proposed)
    if cfg.r == 0 or cfg.delta == 0.0:
        return {"mean_gap": gap[0], "se_gap": gap[1], "eta": 0.0}
    n, r = cfg.n, cfg.r
    c = (r / n) * (1 - r / n)
    th = math.atan(cfg.delta)
    th_r = np.arctan(results.delta_at_truth)
    dec = zero_decomposition(results)
    e_diff = math.fsum(np.abs(th_r - th)) / th_r.size
    e_abs = math.fsum(np.abs(th_r)) / th_r.size
    eta = c * (e_diff - abs(th) - e_abs) * dec["p_L"][r] * dec["delta_k"][r]
    return {"mean_gap": gap[0], "se_gap": gap[1], "eta": float(eta)}


def with_estimator(config: ScenarioConfig, estimator: str) -> ScenarioConfig:
    return replace(config, estimator=estimator)
