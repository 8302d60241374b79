"""Gaussian split log-likelihood profile and the MLE of the change point.

All heavy lifting is done on 2-D arrays of shape ``(replicates, n)`` so the
Monte Carlo harness can push whole blocks through at once; the single-series
functions are thin wrappers.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .types import DegenerateScaleError, LogScoreProfile, Series

LOG_2PI = math.log(2.0 * math.pi)


def _as_batch(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[None, :] if x.ndim == 1 else x


def split_sums(x):
    """Return centered data and its prefix sums for every split ``k = 1..n-1``.

    Centering first keeps the prefix sums small, which matters for series
    with a large common offset.
    """
    x = _as_batch(x)
    xc = x - x.mean(axis=1, keepdims=True)
    return xc, np.cumsum(xc, axis=1)[:, :-1]


def raw_mean_differences(x) -> np.ndarray:
    """``mean(x[k:]) - mean(x[:k])`` for ``k = 1..n-1`` (unscaled), shape (B, n-1)."""
    x = _as_batch(x)
    n = x.shape[1]
    _, left = split_sums(x)
    k = np.arange(1, n, dtype=float)
    # centered total is zero, so the right segment sum is -left
    return -left / (n - k) - left / k


def ratio_terms(x) -> np.ndarray:
    """Unscaled between-segment sum of squares ``k(n-k)/n * d_k**2``, shape (B, n)."""
    x = _as_batch(x)
    n = x.shape[1]
    _, left = split_sums(x)
    k = np.arange(1, n, dtype=float)
    out = np.zeros(x.shape)
    # k(n-k)/n * (S_k/k + S_k/(n-k))**2 == n * S_k**2 / (k (n-k))
    out[:, 1:] = n * left**2 / (k * (n - k))
    return out


def mle_splits(x, min_segment: int = 1) -> np.ndarray:
    """Argmax split of the likelihood profile; independent of the scale."""
    return _argmax_first(_restrict(ratio_terms(x), min_segment))


def _restrict(terms: np.ndarray, min_segment: int) -> np.ndarray:
    if min_segment <= 1:
        return terms
    n = terms.shape[1]
    out = terms.copy()
    k = np.arange(n)
    bad = (k >= 1) & ((k < min_segment) | (n - k < min_segment))
    out[:, bad] = -np.inf
    return out


def _argmax_first(a: np.ndarray) -> np.ndarray:
    # np.argmax already returns the first maximum
    return np.argmax(a, axis=1)


def pooled_variances(x, splits) -> np.ndarray:
    """Maximum-likelihood pooled variance at the given splits (0 = whole series)."""
    x = _as_batch(x)
    n = x.shape[1]
    xc = x - x.mean(axis=1, keepdims=True)
    splits = np.asarray(splits, dtype=int).reshape(-1)
    rows = np.arange(x.shape[0])
    rss0 = np.sum(xc**2, axis=1)
    within = rss0 - ratio_terms(x)[rows, splits]
    # cancellation: recompute near-degenerate rows from the segments themselves
    for i in np.flatnonzero(within <= 1e-10 * rss0):
        k = splits[i]
        a, b = xc[i, :k], xc[i, k:]
        within[i] = np.sum((b - b.mean()) ** 2) + (np.sum((a - a.mean()) ** 2) if k else 0.0)
    return np.maximum(within, 0.0) / n


def resolve_sigmas(x, sigma: Optional[float] = None, plug_in: str = "pooled",
                   min_segment: int = 1) -> np.ndarray:
    """Working standard deviation for each row of ``x``.

    A known ``sigma`` wins. Otherwise ``plug_in`` selects the pooled estimate
    at the MLE split (``"pooled"``) or the whole-series estimate (``"global"``).
    """
    x = _as_batch(x)
    if sigma is not None:
        return np.full(x.shape[0], float(sigma))
    if plug_in == "pooled":
        splits = mle_splits(x, min_segment)
    elif plug_in == "global":
        splits = np.zeros(x.shape[0], dtype=int)
    else:
        raise ValueError(f"unknown plug-in rule {plug_in!r}")
    return np.sqrt(pooled_variances(x, splits))


def log_likelihood_profiles(x, sigmas) -> np.ndarray:
    """True Gaussian log likelihoods ``log l(k)`` for every row, shape (B, n)."""
    x = _as_batch(x)
    n = x.shape[1]
    sigmas = np.asarray(sigmas, dtype=float).reshape(-1, 1)
    if np.any(sigmas <= 0):
        raise DegenerateScaleError()
    var = sigmas**2
    xc = x - x.mean(axis=1, keepdims=True)
    rss0 = np.sum(xc**2, axis=1, keepdims=True)
    base = -0.5 * n * (LOG_2PI + np.log(var)) - rss0 / (2.0 * var)
    return base + ratio_terms(x) / (2.0 * var)


def pooled_sigma(series: Series, split: int) -> float:
    """Square root of the ML pooled variance at ``split`` (0 = whole series)."""
    if not 0 <= split < series.n:
        raise ValueError(f"split {split} outside 0..{series.n - 1}")
    var = float(pooled_variances(series.values, [split])[0])
    if not var > 0:
        raise DegenerateScaleError()
    return math.sqrt(var)


def working_sigma(series: Series, plug_in: str = "pooled", min_segment: int = 1) -> float:
    if series.sigma is not None:
        return series.sigma
    s = float(resolve_sigmas(series.values, None, plug_in, min_segment)[0])
    if not s > 0:
        raise DegenerateScaleError()
    return s


def delta_hat(series: Series, k: int, sigma: Optional[float] = None) -> float:
    """Mean shift ``mean(after k) - mean(up to k)`` in units of the working sigma."""
    n = series.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"split {k} outside 1..{n - 1}")
    x = series.values
    diff = float(x[k:].mean() - x[:k].mean())
    if diff == 0.0:
        return 0.0
    s = sigma if sigma is not None else working_sigma(series)
    return diff / s


def log_likelihood_profile(series: Series, plug_in: str = "pooled",
                           min_segment: int = 1) -> LogScoreProfile:
    """Profile of ``log l(k)``, k = 0..n-1, in O(n)."""
    s = working_sigma(series, plug_in, min_segment)
    scores = log_likelihood_profiles(series.values, [s])[0]
    if min_segment > 1:
        scores = _restrict(scores[None, :], min_segment)[0]
        # keep the profile finite; excluded splits get the no-change score
        scores = np.where(np.isfinite(scores), scores, scores[0])
    return LogScoreProfile(scores, "gaussian-likelihood")


def mle_change_point(profile: LogScoreProfile) -> int:
    """Index of the largest score; ties go to the smallest index."""
    if len(profile) < 2:
        raise ValueError("profile needs at least 2 entries")
    return int(np.argmax(profile.scores))
