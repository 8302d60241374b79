"""Horn-torus parameter space with radius ``t(1 - t)`` and its zero-pass metric.

A change at relative location ``t`` with shift ``Delta`` (sigma units) maps to
``(t, theta = arctan(Delta))`` and then to

    u = t(1-t) * [(1 - cos theta) cos 2 pi t, (1 - cos theta) sin 2 pi t, sin theta].

Every no-change configuration (``t = 0`` or ``theta = 0``) lands on the origin.
"""

from __future__ import annotations

import math

import numpy as np

from .types import ChangePointEstimate, ManifoldPoint

HALF_PI = math.pi / 2
TWO_PI = 2.0 * math.pi


def embed(t: float, theta: float) -> ManifoldPoint:
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t={t} outside [0, 1)")
    if not -HALF_PI < theta < HALF_PI:
        raise ValueError(f"theta={theta} outside (-pi/2, pi/2)")
    if t == 0.0 or theta == 0.0:
        return ManifoldPoint.origin()
    c = t * (1.0 - t)
    # 1 - cos via the half-angle form avoids cancellation for small theta
    rho = c * 2.0 * math.sin(0.5 * theta) ** 2
    angle = TWO_PI * t
    return ManifoldPoint(rho * math.cos(angle), rho * math.sin(angle), c * math.sin(theta))


def embed_shift(t: float, delta: float) -> ManifoldPoint:
    """Embed using the mean shift directly, ``theta = arctan(delta)``."""
    return embed(t, math.atan(delta))


def embed_batch(t, theta) -> np.ndarray:
    """Vectorized ``embed``; returns an array of shape (..., 3)."""
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    c = t * (1.0 - t)
    rho = c * 2.0 * np.sin(0.5 * theta) ** 2
    angle = TWO_PI * t
    out = np.stack([rho * np.cos(angle), rho * np.sin(angle), c * np.sin(theta)], axis=-1)
    zero = (t == 0.0) | (theta == 0.0)
    out[zero] = 0.0
    return out


def unembed(u: ManifoldPoint, rtol: float = 1e-10) -> tuple[float, float]:
    """Recover ``(t, theta)``; the origin maps to ``(0, 0)``."""
    if u.is_origin:
        return 0.0, 0.0
    angle = math.atan2(u.u2, u.u1)
    if angle < 0.0:
        angle += TWO_PI
    t = angle / TWO_PI
    if not 0.0 < t < 1.0:
        raise ValueError("point off manifold")
    c = t * (1.0 - t)
    # c - rho = c cos(theta) > 0 on the manifold, so atan2 stays in range
    theta = math.atan2(u.u3, c - math.hypot(u.u1, u.u2))
    if not -HALF_PI < theta < HALF_PI or theta == 0.0:
        raise ValueError("point off manifold")
    back = embed(t, theta)
    scale = max(abs(u.u1), abs(u.u2), abs(u.u3))
    err = max(abs(a - b) for a, b in zip(back, u))
    if err > rtol * scale:
        raise ValueError("point off manifold")
    return t, theta


def zero_pass_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Distance between ``(t, theta)`` coordinates.

    Points sharing a location are compared along that fibre; anything else is
    routed through the origin.
    """
    t1, th1 = a
    t2, th2 = b
    if t1 == t2:
        return t1 * (1.0 - t1) * abs(th1 - th2)
    return t1 * (1.0 - t1) * abs(th1) + t2 * (1.0 - t2) * abs(th2)


def zero_pass_distance_batch(t1, th1, t2, th2) -> np.ndarray:
    t1, th1, t2, th2 = (np.asarray(v, dtype=float) for v in (t1, th1, t2, th2))
    c1 = t1 * (1.0 - t1)
    c2 = t2 * (1.0 - t2)
    same = c1 * np.abs(th1 - th2)
    through = c1 * np.abs(th1) + c2 * np.abs(th2)
    return np.where(t1 == t2, same, through)


def truth_coordinates(n: int, r: int, delta: float) -> tuple[float, float]:
    """True ``(t, theta)``; any no-change configuration is the origin."""
    if r == 0 or delta == 0.0:
        return 0.0, 0.0
    return r / n, math.atan(delta)


def loss(estimate: ChangePointEstimate, truth: tuple[float, float],
         which: str = "proposed") -> float:
    """Zero-pass loss of one estimate against the true ``(t, theta)``."""
    if which == "proposed":
        coords = (estimate.t_hat, estimate.theta_hat)
    elif which == "mle":
        coords = (estimate.t_mle, estimate.theta_mle)
    else:
        raise ValueError(f"unknown estimator {which!r}")
    return zero_pass_distance(coords, truth)
