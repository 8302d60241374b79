"""End-to-end estimation on a single series."""

from __future__ import annotations

import math

import numpy as np

from . import altstats, likelihood
from .manifold import embed
from .types import ChangePointEstimate, DegenerateScaleError, LogScoreProfile, Series
from .walk import normalize_scores, proposed_change_point, stationary_distribution

SCORE_ALIASES = {
    "likelihood": "likelihood",
    "gaussian-likelihood": "likelihood",
    "cusum": "cusum",
    "sn": "self-normalized",
    "self-normalized": "self-normalized",
}


def score_profile(series: Series, score: str = "likelihood", sigma: float | None = None,
                  sn_root: bool = True) -> LogScoreProfile:
    score = SCORE_ALIASES[score]
    if score == "likelihood":
        s = sigma if sigma is not None else likelihood.working_sigma(series)
        return LogScoreProfile(likelihood.log_likelihood_profiles(series.values, [s])[0])
    if score == "cusum":
        return altstats.cusum_profile(series)
    return altstats.self_normalized_profile(series, root=sn_root)


def _sigma_for(series: Series, score: str, plug_in: str, min_segment: int) -> float:
    if series.sigma is not None:
        return series.sigma
    if score == "likelihood" or plug_in == "global":
        return likelihood.working_sigma(series, plug_in, min_segment)
    split = int(np.argmax(score_profile(series, score).scores))
    var = float(likelihood.pooled_variances(series.values, [split])[0])
    if not var > 0:
        raise DegenerateScaleError()
    return math.sqrt(var)


def detect(series: Series, score: str = "likelihood", plug_in: str = "pooled",
           min_segment: int = 1, sn_root: bool = True) -> ChangePointEstimate:
    """Baseline (argmax) and walk-based estimates of the change point and shift.

    The baseline is the argmax of the score profile, which for the Gaussian
    likelihood is the MLE. The walk estimate is the mode of the stationary law
    and is always either 0 or the baseline split.
    """
    score = SCORE_ALIASES[score]
    n = series.n
    sigma = _sigma_for(series, score, plug_in, min_segment)
    if score == "likelihood":
        profile = likelihood.log_likelihood_profile(
            Series(series.values, sigma), min_segment=min_segment)
    else:
        profile = score_profile(series, score, sigma, sn_root)
    r_mle = likelihood.mle_change_point(profile)
    delta_mle = likelihood.delta_hat(series, r_mle, sigma) if r_mle > 0 else 0.0

    pi = stationary_distribution(normalize_scores(profile))
    r_hat = proposed_change_point(pi)
    if r_hat not in (0, r_mle):
        # order preservation makes this unreachable barring exact ties
        raise RuntimeError("walk mode is neither 0 nor the baseline split")

    u_mle = embed(r_mle / n, math.atan(delta_mle))
    if r_hat == 0:
        t_hat, theta_hat, delta = 0.0, 0.0, 0.0
    else:
        t_hat, theta_hat, delta = r_hat / n, math.atan(delta_mle), delta_mle
    return ChangePointEstimate(
        n=n,
        r_mle=r_mle,
        r_hat=r_hat,
        delta_mle=delta_mle,
        delta_hat=delta,
        t_hat=t_hat,
        theta_hat=theta_hat,
        u_hat=embed(t_hat, theta_hat),
        u_mle=u_mle,
        pi0=float(pi.pi[0]),
        sigma_used=sigma,
        score_kind=profile.kind,
    )
