import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from horncp.likelihood import log_likelihood_profiles, mle_change_point
from horncp.types import LogScoreProfile, NormalizedProfile, StationaryDistribution
from horncp.walk import (normalize_scores, proposed_change_point, stationary_distribution,
                         stationary_oracle, transition_matrix, walk_batch)


def mp_normalize(scores):
    mpmath.mp.dps = 50
    xs = [mpmath.mpf(float(s)) for s in scores]
    top = max(xs)
    total = mpmath.fsum(mpmath.exp(x - top) for x in xs)
    return np.array([float(mpmath.exp(x - top) / total) for x in xs])


def test_normalize_examples():
    np.testing.assert_allclose(normalize_scores(LogScoreProfile([0, 0, 0])).weights, [1 / 3] * 3,
                               rtol=1e-15)
    got = normalize_scores(LogScoreProfile(np.log([0.5, 0.3, 0.2]))).weights
    np.testing.assert_allclose(got, [0.5, 0.3, 0.2], rtol=1e-14)
    got = normalize_scores(LogScoreProfile([1000.0, 1001.0, 1002.0])).weights
    np.testing.assert_allclose(got, mp_normalize([1000, 1001, 1002]), rtol=1e-14)


@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-700, 700)))
def test_normalize_matches_extended_precision(s):
    got = normalize_scores(LogScoreProfile(s)).weights
    np.testing.assert_allclose(got, mp_normalize(s), rtol=1e-12, atol=1e-300)


def test_stationary_examples():
    pi = stationary_distribution(NormalizedProfile([1 / 3] * 3)).pi
    np.testing.assert_allclose(pi, [3 / 7, 2 / 7, 2 / 7], rtol=1e-14)
    pi = stationary_distribution(NormalizedProfile([0.5, 0.3, 0.2])).pi
    np.testing.assert_allclose(pi, [0.5 / 0.88, 0.24 / 0.88, 0.14 / 0.88], rtol=1e-14)
    assert proposed_change_point(StationaryDistribution(pi)) == 0
    pi = stationary_distribution(NormalizedProfile([0.05, 0.9, 0.05])).pi
    np.testing.assert_allclose(pi, [0.05 / 0.91, 0.855 / 0.91, 0.005 / 0.91], rtol=1e-14)
    assert proposed_change_point(StationaryDistribution(pi)) == 1


def test_oracle_examples():
    got = stationary_oracle(NormalizedProfile([1 / 3] * 3)).pi
    np.testing.assert_allclose(got, [3 / 7, 2 / 7, 2 / 7], atol=1e-10)
    got = stationary_oracle(NormalizedProfile([0.5, 0.3, 0.2])).pi
    np.testing.assert_allclose(got, [0.5 / 0.88, 0.24 / 0.88, 0.14 / 0.88], atol=1e-10)


@pytest.mark.parametrize("p", [0.01, 0.3, 0.5, 0.77, 0.999])
def test_two_state_chain(p):
    L = NormalizedProfile([p, 1 - p])
    T = transition_matrix(L.weights)
    np.testing.assert_allclose(T.sum(axis=1), 1.0, rtol=1e-15)
    # row 0: (p, 1-p); row 1: (p, 1-p) as well, so pi = (p, 1-p) solves pi T = pi
    expected = np.array([p, (1 - p) * (1 - p + p)])
    expected /= expected.sum()
    pi = stationary_distribution(L).pi
    np.testing.assert_allclose(pi, expected, atol=1e-14)
    np.testing.assert_allclose(pi @ T, pi, atol=1e-14)
    np.testing.assert_allclose(stationary_oracle(L).pi, expected, atol=1e-10)


def test_oracle_equivalence_random(rng):
    for _ in range(200):
        L = NormalizedProfile(normalize_scores(LogScoreProfile(rng.normal(size=50) * 4)).weights)
        a = stationary_distribution(L).pi
        b = stationary_oracle(L).pi
        assert np.max(np.abs(a - b)) < 1e-10
        assert abs(a.sum() - 1.0) < 1e-12


def test_oracle_limits():
    with pytest.raises(RuntimeError, match="oracle did not converge"):
        stationary_oracle(NormalizedProfile([0.5, 0.3, 0.2]), max_rounds=1)


@given(arrays(np.float64, st.integers(2, 60), elements=st.floats(-50, 50)))
def test_order_preservation(s):
    L = normalize_scores(LogScoreProfile(s))
    pi = stationary_distribution(L).pi
    w = L.weights[1:]
    p = pi[1:]
    # strict order among weights carries over to pi
    i, j = np.nonzero(w[:, None] > w[None, :] * (1 + 1e-12))
    assert np.all(p[i] >= p[j])
    if s.size > 1:
        assert np.argmax(p) == np.argmax(w) or np.isclose(p.max(), p[np.argmax(w)])


def test_walk_picks_zero_or_argmax(rng):
    for r, delta in ((0, 0.0), (50, 0.5), (20, 1.5)):
        x = rng.normal(size=(10_000, 100))
        if r:
            x[:, r:] += delta
        scores = log_likelihood_profiles(x, np.ones(len(x)))
        r_mle = np.argmax(scores, axis=1)
        _, r_hat = walk_batch(scores)
        assert np.all((r_hat == 0) | (r_hat == r_mle))


def test_single_profile_pipeline():
    prof = LogScoreProfile([0.0, 0.2, 3.0, 0.1])
    r = proposed_change_point(stationary_distribution(normalize_scores(prof)))
    assert r in (0, mle_change_point(prof))


def test_oracle_on_strong_change(rng):
    # weights concentrated far from node 0: a slowly mixing chain
    x = rng.normal(size=(5, 300))
    x[:, 150:] += 1.0
    for s in log_likelihood_profiles(x, np.ones(5)):
        L = normalize_scores(LogScoreProfile(s))
        assert np.max(np.abs(stationary_distribution(L).pi - stationary_oracle(L).pi)) < 1e-10
