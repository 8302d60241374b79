"""CUSUM and self-normalized score profiles.

The statistic values are stored directly as log-scores, so feeding them to the
walk is the same as weighting the chain by ``exp(statistic)``.
"""

from __future__ import annotations

import numpy as np

from .likelihood import _as_batch
from .types import LogScoreProfile, Series

# just below log(DBL_MAX) ~ 709.78 would also do; 745 dominates any realistic score
CAP = 745.0
# relative size below which a self-normalizer counts as zero
_DEGENERATE_RTOL = 1e-10


def cusum_profiles(x) -> np.ndarray:
    """``H_n(k) = |sum_{i<=k} (x_i - mean)| / sqrt(n)``, with ``H_n(0) = 0``."""
    x = _as_batch(x)
    n = x.shape[1]
    xc = x - x.mean(axis=1, keepdims=True)
    out = np.zeros(x.shape)
    out[:, 1:] = np.abs(np.cumsum(xc, axis=1)[:, :-1]) / np.sqrt(n)
    return out


def _self_normalizers(xc: np.ndarray) -> np.ndarray:
    """``V_n(k)`` for ``k = 1..n-1`` from prefix sums, shape (B, n-1).

    With ``P_t`` the running sum of the centered data, the left block is
    ``sum_{t<=k} (P_t - t P_k / k)**2`` and the right block is
    ``sum_{t>k} ((P_t - P_k) - (t - k) m)**2`` with ``m = (P_n - P_k) / (n - k)``.
    Both expand into sums of ``P_t**2``, ``t P_t``, ``P_t`` and powers of ``t``.
    """
    B, n = xc.shape
    P = np.cumsum(xc, axis=1)                       # P_1..P_n
    t = np.arange(1, n + 1, dtype=float)
    cP2 = np.cumsum(P**2, axis=1)
    ctP = np.cumsum(t * P, axis=1)
    cP = np.cumsum(P, axis=1)

    k = t[:-1]                                      # 1..n-1
    Pk = P[:, :-1]
    sum_t2 = k * (k + 1) * (2 * k + 1) / 6.0
    a = Pk / k
    left = cP2[:, :-1] - 2.0 * a * ctP[:, :-1] + a**2 * sum_t2

    # suffix sums over t = k+1..n
    sP2 = cP2[:, -1:] - cP2[:, :-1]
    stP = ctP[:, -1:] - ctP[:, :-1]
    sP = cP[:, -1:] - cP[:, :-1]
    m_len = n - k
    m = (P[:, -1:] - Pk) / m_len
    sq = sP2 - 2.0 * Pk * sP + m_len * Pk**2             # sum (P_t - P_k)^2
    cross = stP - k * sP - Pk * (m_len * (m_len + 1) / 2.0)  # sum (t-k)(P_t - P_k)
    sum_j2 = m_len * (m_len + 1) * (2 * m_len + 1) / 6.0
    right = sq - 2.0 * m * cross + m**2 * sum_j2
    return left + right


def self_normalized_statistics(x) -> np.ndarray:
    """``G_n(k) = S_k**2 / (V_n(k) / n)`` with ``G_n(0) = 0``, shape (B, n).

    Splits with a zero self-normalizer get ``inf`` when ``S_k != 0`` and 0
    otherwise.
    """
    x = _as_batch(x)
    n = x.shape[1]
    xc = x - x.mean(axis=1, keepdims=True)
    S = np.cumsum(xc, axis=1)[:, :-1]
    V = _self_normalizers(xc)
    scale = np.sum(np.cumsum(xc, axis=1) ** 2, axis=1, keepdims=True)
    scale = np.where(scale > 0, scale, 1.0)
    zero_v = V <= _DEGENERATE_RTOL * scale
    zero_s = S**2 <= _DEGENERATE_RTOL * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        G = S**2 / (V / n)
    G = np.where(zero_v, np.where(zero_s, 0.0, np.inf), G)
    out = np.zeros(x.shape)
    out[:, 1:] = G
    return out


def self_normalized_profiles(x, root: bool = True) -> np.ndarray:
    """Self-normalized log-scores, capped at ``CAP``.

    With ``root`` the score is ``sqrt(G_n(k)) = |S_k| / sqrt(V_n(k) / n)``,
    the self-normalized counterpart of the CUSUM score and on the same scale
    as it. With ``root=False`` the squared statistic ``G_n`` itself is used,
    which makes the walk almost always agree with the argmax.
    """
    G = self_normalized_statistics(x)
    scores = np.sqrt(G) if root else G
    return np.minimum(scores, CAP)


def self_normalized_reference(values) -> np.ndarray:
    """Direct O(n^2) evaluation of ``G_n`` from its definition, for testing."""
    x = np.asarray(values, dtype=float)
    n = x.size
    xbar = x.mean()
    out = np.zeros(n)
    for k in range(1, n):
        s_k = np.sum(x[:k] - xbar)
        first, second = x[:k], x[k:]
        v = np.sum(np.cumsum(first - first.mean()) ** 2)
        v += np.sum(np.cumsum(second - second.mean()) ** 2)
        if v == 0.0:
            out[k] = 0.0 if s_k == 0.0 else CAP
        else:
            out[k] = min(s_k**2 / (v / n), CAP)
    return out


def cusum_profile(series: Series) -> LogScoreProfile:
    return LogScoreProfile(cusum_profiles(series.values)[0], "cusum")


def self_normalized_statistic(series: Series) -> np.ndarray:
    """``G_n(k)`` for k = 0..n-1 (degenerate splits capped at ``CAP``)."""
    if series.n < 4:
        raise ValueError("self-normalized statistic needs n >= 4")
    return np.minimum(self_normalized_statistics(series.values)[0], CAP)


def self_normalized_profile(series: Series, root: bool = True) -> LogScoreProfile:
    if series.n < 4:
        raise ValueError("self-normalized profile needs n >= 4")
    return LogScoreProfile(self_normalized_profiles(series.values, root)[0], "self-normalized")
