"""Immutable domain types shared across the package.

Index 0 always stands for "no change". A split ``k >= 1`` means the first
segment is ``x[0:k]`` and the second is ``x[k:n]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SCORE_KINDS = ("gaussian-likelihood", "cusum", "self-normalized")


class DegenerateScaleError(ValueError):
    """Raised when a working standard deviation is zero."""

    def __init__(self, message: str = "degenerate scale"):
        super().__init__(message)


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Series:
    """Ordered real observations with an optional known noise scale."""

    values: np.ndarray
    sigma: Optional[float] = None

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("a series needs at least 2 observations")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series values must be finite")
        if self.sigma is not None:
            if not (math.isfinite(self.sigma) and self.sigma > 0):
                raise ValueError("sigma must be positive and finite")
            object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class LogScoreProfile:
    """Log-domain scores for every split candidate ``k = 0..n-1``."""

    scores: np.ndarray
    kind: str = "gaussian-likelihood"

    def __post_init__(self):
        arr = _frozen_array(self.scores)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("scores must be a non-empty vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("scores must be finite")
        if self.kind not in SCORE_KINDS:
            raise ValueError(f"unknown score kind {self.kind!r}")
        object.__setattr__(self, "scores", arr)

    def __len__(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True)
class NormalizedProfile:
    """Scores mapped to weights ``L(i)`` summing to one.

    Weights may underflow to exactly zero when the score range exceeds the
    double-precision exponent range.
    """

    weights: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.weights)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("weights must be a non-empty vector")
        if np.any(arr < 0) or np.any(arr > 1) or not np.all(np.isfinite(arr)):
            raise ValueError("weights must lie in [0, 1]")
        if abs(math.fsum(arr) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", arr)

    def __len__(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class StationaryDistribution:
    pi: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.pi)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("pi must be a non-empty vector")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("pi must be non-negative")
        if abs(math.fsum(arr) - 1.0) > 1e-10:
            raise ValueError("pi must sum to 1")
        object.__setattr__(self, "pi", arr)

    def __len__(self) -> int:
        return int(self.pi.size)


@dataclass(frozen=True)
class ManifoldPoint:
    """A point ``(u1, u2, u3)`` on the scaled horn torus."""

    u1: float
    u2: float
    u3: float

    @classmethod
    def origin(cls) -> "ManifoldPoint":
        return cls(0.0, 0.0, 0.0)

    @property
    def is_origin(self) -> bool:
        return self.u1 == 0.0 and self.u2 == 0.0 and self.u3 == 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.u1, self.u2, self.u3)

    def __iter__(self):
        return iter(self.as_tuple())


@dataclass(frozen=True)
class ChangePointEstimate:
    """MLE and proposed estimates for one series, with their manifold points."""

    n: int
    r_mle: int
    r_hat: int
    delta_mle: float
    delta_hat: float
    t_hat: float
    theta_hat: float
    u_hat: ManifoldPoint
    u_mle: ManifoldPoint
    pi0: float
    sigma_used: Optional[float] = None
    score_kind: str = "gaussian-likelihood"

    def __post_init__(self):
        if self.r_hat not in (0, self.r_mle):
            raise ValueError("r_hat must be 0 or r_mle")
        if self.r_hat == 0 and (self.delta_hat != 0.0 or not self.u_hat.is_origin):
            raise ValueError("no-change estimate must have zero shift and origin point")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError("pi0 must be a probability")

    @property
    def t_mle(self) -> float:
        return self.r_mle / self.n

    @property
    def theta_mle(self) -> float:
        return math.atan(self.delta_mle)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r_mle": self.r_mle,
            "r_hat": self.r_hat,
            "delta_hat": self.delta_hat,
            "delta_mle": self.delta_mle,
            "t_hat": self.t_hat,
            "theta_hat": self.theta_hat,
            "u_hat": list(self.u_hat.as_tuple()),
            "u_mle": list(self.u_mle.as_tuple()),
            "pi0": self.pi0,
            "sigma_used": self.sigma_used,
            "score_kind": self.score_kind,
        }


@dataclass(frozen=True)
class RiskReport:
    """Monte Carlo summary comparing the baseline and proposed estimators."""

    config: dict
    mean_loss_mle: float
    mean_loss_proposed: float
    se_loss_mle: float
    se_loss_proposed: float
    zero_rate: float
    rejections: int = 0
    losses_mle: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    losses_proposed: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.zero_rate <= 1.0:
            raise ValueError("zero_rate must lie in [0, 1]")

    @property
    def relative_efficiency(self) -> float:
        if self.mean_loss_mle > 0:
            return 1.0 - self.mean_loss_proposed / self.mean_loss_mle
        return 0.0

    def to_dict(self) -> dict:
        return {
            **self.config,
            "mean_loss_mle": self.mean_loss_mle,
            "mean_loss_proposed": self.mean_loss_proposed,
            "se_loss_mle": self.se_loss_mle,
            "se_loss_proposed": self.se_loss_proposed,
            "relative_efficiency": self.relative_efficiency,
            "zero_rate": self.zero_rate,
            "rejections": self.rejections,
        }
