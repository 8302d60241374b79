"""Likelihood-weighted random walk on the star graph over split candidates.

Every node is self-looped and joined to node 0. With weights ``L`` the chain
moves ``i -> j`` with probability ``A[i, j] L[j] / (A L)[i]``. Its stationary
law has a closed form, so the dense matrix is only built by the oracle.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .types import LogScoreProfile, NormalizedProfile, StationaryDistribution

ORACLE_MAX_STATES = 10_000


def normalize_batch(scores) -> np.ndarray:
    """Row-wise ``exp(s - logsumexp(s))``."""
    s = np.atleast_2d(np.asarray(scores, dtype=float))
    # shifting by the max first keeps the subtraction below exact for large scores
    s = s - s.max(axis=1, keepdims=True)
    return np.exp(s - logsumexp(s, axis=1, keepdims=True))


def stationary_batch(weights) -> np.ndarray:
    """Closed-form stationary distribution for each row of normalized weights."""
    L = np.atleast_2d(np.asarray(weights, dtype=float))
    L0 = L[:, :1]
    denom = np.sum(L**2, axis=1, keepdims=True) + 2.0 * L0 * (1.0 - L0)
    pi = (L**2 + L0 * L) / denom
    pi[:, 0] = L0[:, 0] / denom[:, 0]
    return pi


def walk_batch(scores):
    """Return ``(pi, r_hat)`` for a block of score profiles."""
    pi = stationary_batch(normalize_batch(scores))
    return pi, np.argmax(pi, axis=1)


def normalize_scores(profile: LogScoreProfile) -> NormalizedProfile:
    """Map log-scores to weights ``L(i)`` that sum to one, without overflow."""
    return NormalizedProfile(normalize_batch(profile.scores)[0])


def stationary_distribution(L: NormalizedProfile) -> StationaryDistribution:
    """Stationary law of the star-graph walk.

    ``pi(0) = L0 / D`` and ``pi(i) = (L_i**2 + L0 L_i) / D`` with
    ``D = sum(L**2) + 2 L0 (1 - L0)``.
    """
    pi = stationary_batch(L.weights)[0]
    # D already equals sum of numerators up to rounding; renormalize the last ulp
    return StationaryDistribution(pi / pi.sum())


def adjacency(n: int) -> np.ndarray:
    """Star graph with self loops: ``a[i, j] = 1`` iff ``i == j`` or ``i * j == 0``."""
    a = np.eye(n)
    a[0, :] = 1.0
    a[:, 0] = 1.0
    return a


def transition_matrix(weights) -> np.ndarray:
    """Dense ``T = diag(A w)^-1 A diag(w)``."""
    w = np.asarray(weights, dtype=float)
    a = adjacency(w.size)
    return (a * w[None, :]) / (a @ w)[:, None]


def stationary_oracle(L: NormalizedProfile, tol: float = 1e-13,
                      max_rounds: int = 200) -> StationaryDistribution:
    """Power iteration from the uniform vector, accelerated by squaring.

    Round ``k`` applies ``T**(2**k)`` (``v <- v M``, ``M <- M @ M``), so chains
    whose leaves rarely return to node 0 still converge in a few dozen rounds.
    Stops after two consecutive sup-norm steps below ``tol``. Independent of
    the closed form; intended for verification only.
    """
    n = len(L)
    if n > ORACLE_MAX_STATES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_STATES} states")
    M = transition_matrix(L.weights)
    v = np.full(n, 1.0 / n)
    quiet = 0
    for _ in range(max_rounds):
        nxt = v @ M
        nxt /= nxt.sum()
        quiet = quiet + 1 if np.max(np.abs(nxt - v)) < tol else 0
        v = nxt
        if quiet == 2:
            return StationaryDistribution(v)
        M = M @ M
        M /= M.sum(axis=1, keepdims=True)
    raise RuntimeError("oracle did not converge")


def proposed_change_point(pi: StationaryDistribution) -> int:
    """Mode of the stationary law; ties go to the smallest index."""
    return int(np.argmax(pi.pi))
