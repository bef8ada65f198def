"""Synthetic path generators.

Shared by the kinematic forward prediction, the template predictor and the
candidate sampler. All generators return (N, 2) waypoint arrays that start
exactly at the requested pose; curved generators insert one short leading
sample so the first polyline segment matches the requested heading to better
than 1e-9 rad.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError

# Tightest start-heading error tolerated for generated paths, radians.
_HEADING_TOL = 1e-9


def _sample_grid(length: float, step: float | None, num: int | None) -> np.ndarray:
    if length <= 0:
        raise ValidationError("path length must be positive")
    if num is not None:
        n = max(int(num), 2)
    else:
        if step is None or step <= 0:
            raise ValidationError("either a positive step or a point count is required")
        n = max(int(math.ceil(length / step)) + 1, 2)
    return np.linspace(0.0, length, n)


def _to_world(start, heading: float, local: np.ndarray) -> np.ndarray:
    ch, sh = math.cos(heading), math.sin(heading)
    x = start[0] + local[:, 0] * ch - local[:, 1] * sh
    y = start[1] + local[:, 0] * sh + local[:, 1] * ch
    return np.column_stack([x, y])


def straight_points(start, heading: float, length: float, *, step: float | None = None,
                    num: int | None = None) -> np.ndarray:
    """Waypoints of a straight ray from `start` along `heading`."""
    s = _sample_grid(length, step, num)
    return _to_world(start, heading, np.column_stack([s, np.zeros_like(s)]))


def arc_points(start, heading: float, radius: float, length: float, *,
               step: float | None = None, num: int | None = None) -> np.ndarray:
    """Waypoints of a circular arc of signed radius (positive = left turn).

    Samples lie exactly on the circle; a short leading sample keeps the
    initial chord aligned with `heading`.
    """
    if radius == 0 or not math.isfinite(radius):
        raise ValidationError("arc radius must be finite and non-zero")
    s = _sample_grid(length, step, num)
    phi = s[1:] / radius  # signed turn angle
    arc = np.column_stack([radius * np.sin(phi), radius * (1.0 - np.cos(phi))])
    # Lead with a short exact-tangent step: an on-circle sample this close to
    # the start would lose the heading to coordinate rounding at world scale,
    # while the tangent point deviates from the circle by only eps^2/(2R).
    eps = max(1e-5, math.hypot(float(start[0]), float(start[1])) * 1e-6)
    if eps < s[1] / 2:
        local = np.vstack([[0.0, 0.0], [eps, 0.0], arc])
    else:
        local = np.vstack([[0.0, 0.0], arc])
    return _to_world(start, heading, local)


def quintic_offset(u: np.ndarray) -> np.ndarray:
    """Smoothstep quintic 10u^3 - 15u^4 + 6u^5: zero slope and curvature at both ends."""
    return u ** 3 * (10.0 + u * (-15.0 + 6.0 * u))


def quintic_jerk_peak(lateral_shift: float, length: float) -> float:
    """Peak |third spatial derivative| of the quintic lateral profile, 1/m^2 scale."""
    return 60.0 * abs(lateral_shift) / length ** 3


def lane_change_points(start, heading: float, lateral_shift: float, length: float, *,
                       step: float | None = None, num: int | None = None) -> np.ndarray:
    """Waypoints of a quintic lateral shift over the given longitudinal length.

    The profile moves from offset 0 to `lateral_shift` (positive = left) with
    zero end slope and curvature. A zero shift degenerates to a straight ray.
    """
    if lateral_shift == 0.0:
        return straight_points(start, heading, length, step=step, num=num)
    s = _sample_grid(length, step, num)
    # slope at x is 30*|shift|*x^2/length^3; pick a leading sample small
    # enough that the first chord stays within the heading tolerance, but not
    # so small that world-scale coordinate rounding dominates the direction
    eps = max(1e-5, math.sqrt(_HEADING_TOL * length ** 3 / (30.0 * abs(lateral_shift))))
    if eps < s[1] / 2:
        s = np.concatenate(([0.0, eps], s[1:]))
    offsets = lateral_shift * quintic_offset(s / length)
    return _to_world(start, heading, np.column_stack([s, offsets]))
