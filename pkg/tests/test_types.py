import math

import numpy as np
import pytest

from horncp.types import (ChangePointEstimate, LogScoreProfile, ManifoldPoint,
                          NormalizedProfile, RiskReport, Series, StationaryDistribution)


def test_series_rejects_short_or_nonfinite():
    with pytest.raises(ValueError):
        Series([1.0])
    with pytest.raises(ValueError):
        Series([1.0, float("nan")])
    with pytest.raises(ValueError):
        Series([1.0, 2.0], sigma=0.0)
    with pytest.raises(ValueError):
        Series([1.0, 2.0], sigma=math.inf)


def test_series_is_immutable():
    s = Series([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0
    assert s.n == 3 and s.sigma is None


def test_profile_validation():
    with pytest.raises(ValueError):
        LogScoreProfile([0.0, np.inf])
    with pytest.raises(ValueError):
        LogScoreProfile([0.0, 1.0], kind="bogus")
    assert LogScoreProfile([0.0, 1.0], kind="cusum").kind == "cusum"


def test_normalized_and_stationary_sum_to_one():
    NormalizedProfile([0.25, 0.75])
    with pytest.raises(ValueError):
        NormalizedProfile([0.5, 0.6])
    StationaryDistribution([0.2, 0.8])
    with pytest.raises(ValueError):
        StationaryDistribution([-0.1, 1.1])


def _estimate(**kw):
    base = dict(n=10, r_mle=4, r_hat=4, delta_mle=1.0, delta_hat=1.0, t_hat=0.4,
                theta_hat=math.atan(1.0), u_hat=ManifoldPoint(0.1, 0.1, 0.1),
                u_mle=ManifoldPoint(0.1, 0.1, 0.1), pi0=0.1)
    base.update(kw)
    return ChangePointEstimate(**base)


def test_estimate_invariants():
    _estimate()
    with pytest.raises(ValueError):
        _estimate(r_hat=3)
    with pytest.raises(ValueError):
        _estimate(r_hat=0, delta_hat=1.0, u_hat=ManifoldPoint.origin())
    est = _estimate(r_hat=0, delta_hat=0.0, t_hat=0.0, theta_hat=0.0,
                    u_hat=ManifoldPoint.origin())
    assert est.to_dict()["u_hat"] == [0.0, 0.0, 0.0]


def test_relative_efficiency():
    rep = RiskReport(config={}, mean_loss_mle=0.2, mean_loss_proposed=0.15,
                     se_loss_mle=0.0, se_loss_proposed=0.0, zero_rate=0.3)
    assert rep.relative_efficiency == pytest.approx(0.25)
    with pytest.raises(ValueError):
        RiskReport(config={}, mean_loss_mle=0.2, mean_loss_proposed=0.1,
                   se_loss_mle=0, se_loss_proposed=0, zero_rate=1.5)
