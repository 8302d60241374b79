import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from horncp.altstats import (CAP, cusum_profile, cusum_profiles, self_normalized_profile,
                             self_normalized_reference, self_normalized_statistic,
                             self_normalized_statistics)
from horncp.likelihood import mle_change_point
from horncp.types import Series
from horncp.walk import normalize_scores, proposed_change_point, stationary_distribution


def test_cusum_examples():
    np.testing.assert_allclose(cusum_profile(Series([0, 0, 2, 2])).scores, [0, 0.5, 1.0, 0.5],
                               atol=1e-15)
    assert np.all(cusum_profile(Series([7.0] * 9)).scores == 0.0)


def test_self_normalized_examples():
    g = self_normalized_statistic(Series([0, 1, 3, 4]))
    assert g[2] == pytest.approx(72.0, rel=1e-12)
    g = self_normalized_statistic(Series([0, 0, 2, 2]))
    assert g[2] == CAP
    assert np.all(self_normalized_statistic(Series([3.0] * 6)) == 0.0)
    with pytest.raises(ValueError):
        self_normalized_statistic(Series([1.0, 2.0, 3.0]))


def test_root_profile_is_sqrt():
    x = Series([0.2, 1.1, 3.0, 4.4, 2.9, 0.7])
    np.testing.assert_allclose(self_normalized_profile(x).scores ** 2,
                               self_normalized_profile(x, root=False).scores, rtol=1e-12)


@pytest.mark.parametrize("n", [4, 10, 50, 300])
def test_fast_matches_reference(rng, n):
    for _ in range(20):
        x = rng.normal(size=n) * rng.uniform(0.1, 10) + rng.uniform(-5, 5)
        fast = np.minimum(self_normalized_statistics(x)[0], CAP)
        np.testing.assert_allclose(fast, self_normalized_reference(x), rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("c", [0.01, 1.0, 100.0])
def test_scale_behaviour(rng, c):
    x = rng.normal(size=(50, 40))
    np.testing.assert_allclose(self_normalized_statistics(c * x), self_normalized_statistics(x),
                               rtol=1e-9)
    np.testing.assert_allclose(cusum_profiles(c * x), c * cusum_profiles(x), rtol=1e-9,
                               atol=1e-15)


def test_shift_invariance_exact_on_dyadic():
    # dyadic data keep every intermediate exact, so the shift must cancel exactly
    x = np.array([0.5, -1.25, 3.0, 2.0, -0.75, 1.5, 4.25, 0.0])
    for c in (1.0, -8.0, 256.0):
        np.testing.assert_array_equal(cusum_profiles(x + c), cusum_profiles(x))
        np.testing.assert_array_equal(self_normalized_statistics(x + c),
                                      self_normalized_statistics(x))


@given(arrays(np.float64, st.integers(4, 40), elements=st.floats(-100, 100)),
       st.floats(-1e3, 1e3))
def test_shift_invariance(x, c):
    a, b = cusum_profiles(x), cusum_profiles(x + c)
    np.testing.assert_allclose(b, a, atol=1e-9 * max(1.0, abs(c), np.abs(x).max()))


def test_pipeline_picks_zero_or_argmax(rng):
    for n in (4, 10, 80):
        x = rng.normal(size=(500, n))
        x[:250, n // 2:] += 1.0
        for row in x:
            s = Series(row)
            for prof in (cusum_profile(s), self_normalized_profile(s),
                         self_normalized_profile(s, root=False)):
                r = proposed_change_point(stationary_distribution(normalize_scores(prof)))
                assert r in (0, mle_change_point(prof))
