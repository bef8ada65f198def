"""Polyline trajectory geometry: arc length, curvature and Frenet projection.

Every risk evaluation in this package projects query points onto a predicted
trajectory, so the projection here is the numerical workhorse. All types are
immutable after construction and all operations are pure, which makes them
safe to evaluate concurrently.

Conventions, fixed across the codebase:
  * lateral offset d is signed, positive to the LEFT of the travel direction;
  * arc length s is clamped to [0, total_length]; the `inside` flag records
    whether the unclamped foot point fell outside the trajectory;
  * nearest-segment ties break toward the smaller arc length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

# Consecutive waypoints closer than this are considered coincident.
MIN_SEGMENT_LENGTH = 1e-9

# Soft cap on elements handled per projection chunk (memory bound).
_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class Polyline2D:
    """Ordered 2-D waypoints in meters; at least two, neighbours distinct."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64)  # defensive copy
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValidationError("polyline points must form an (N, 2) array of x/y pairs")
        if pts.shape[0] < 2:
            raise ValidationError("polyline needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("polyline points must all be finite")
        seg = np.diff(pts, axis=0)
        if np.any(np.hypot(seg[:, 0], seg[:, 1]) <= MIN_SEGMENT_LENGTH):
            raise ValidationError(
                f"consecutive polyline points must be more than {MIN_SEGMENT_LENGTH} m apart"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


class FrenetPoint(NamedTuple):
    """Projection of a Cartesian point onto a trajectory.

    s is the arc length of the foot point, clamped to [0, total_length];
    d is the signed lateral offset (positive left); `inside` is False when
    the unclamped foot point fell before the start or past the end.
    """

    s: float
    d: float
    inside: bool


@dataclass(frozen=True)
class TrajectoryGeometry:
    """Precomputed arc length, curvature and tangent data for a polyline."""

    source: Polyline2D
    cumulative_arc_length: np.ndarray  # (N,), starts at 0, strictly increasing
    total_length: float
    per_vertex_curvature: np.ndarray  # (N,), signed, 1/m, positive = left turn
    mean_abs_curvature: float
    segment_tangents: np.ndarray  # (N-1, 2) unit vectors
    segment_lengths: np.ndarray  # (N-1,)


def _signed_curvature(pts: np.ndarray) -> np.ndarray:
    """Signed curvature per vertex from the circumcircle of vertex triples.

    The sign comes from the cross product of the adjacent segment directions
    (positive = left turn). Endpoints copy the nearest interior vertex; a
    two-point polyline has zero curvature everywhere.
    """
    n = len(pts)
    curv = np.zeros(n)
    if n < 3:
        return curv
    a = pts[1:-1] - pts[:-2]
    b = pts[2:] - pts[1:-1]
    chord = pts[2:] - pts[:-2]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    denom = (
        np.hypot(a[:, 0], a[:, 1])
        * np.hypot(b[:, 0], b[:, 1])
        * np.hypot(chord[:, 0], chord[:, 1])
    )
    # denom can only vanish if the path doubles back exactly onto itself
    interior = np.divide(2.0 * cross, denom, out=np.zeros_like(cross), where=denom > 0)
    curv[1:-1] = interior
    curv[0] = interior[0]
    curv[-1] = interior[-1]
    return curv


def build_geometry(path: Polyline2D) -> TrajectoryGeometry:
    """Precompute arc length, tangents and curvature for a polyline."""
    pts = path.points
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    tangents = seg / seg_len[:, None]
    cum = np.concatenate(([0.0], np.cumsum(seg_len)))
    curv = _signed_curvature(pts)
    for arr in (cum, curv, tangents, seg_len):
        arr.setflags(write=False)
    return TrajectoryGeometry(
        source=path,
        cumulative_arc_length=cum,
        total_length=float(cum[-1]),
        per_vertex_curvature=curv,
        mean_abs_curvature=float(np.mean(np.abs(curv))),
        segment_tangents=tangents,
        segment_lengths=seg_len,
    )


def _project_block(geom: TrajectoryGeometry, pts: np.ndarray):
    starts = geom.source.points[:-1]
    ends = geom.source.points[1:]
    tang = geom.segment_tangents
    lens = geom.segment_lengths
    nseg = len(lens)

    rel_x = pts[:, 0, None] - starts[None, :, 0]
    rel_y = pts[:, 1, None] - starts[None, :, 1]
    along = rel_x * tang[:, 0] + rel_y * tang[:, 1]  # unclamped, meters
    t = np.clip(along, 0.0, lens)
    # Snap clamped feet exactly onto the endpoint vertices: neighbouring
    # segments then tie bitwise at their shared vertex, keeping the
    # smaller-s tie-break independent of arithmetic rounding paths.
    low = along <= 0.0
    high = along >= lens
    fx = np.where(low, starts[:, 0], np.where(high, ends[:, 0], starts[:, 0] + t * tang[:, 0]))
    fy = np.where(low, starts[:, 1], np.where(high, ends[:, 1], starts[:, 1] + t * tang[:, 1]))
    dx = pts[:, 0, None] - fx
    dy = pts[:, 1, None] - fy
    dist2 = dx * dx + dy * dy

    # argmin returns the first minimum, i.e. ties resolve to the smaller s
    idx = np.argmin(dist2, axis=1)
    rows = np.arange(len(pts))
    t_sel = t[rows, idx]
    s = geom.cumulative_arc_length[idx] + t_sel
    np.minimum(s, geom.total_length, out=s)  # guard against rounding overshoot
    d = tang[idx, 0] * dy[rows, idx] - tang[idx, 1] * dx[rows, idx]

    before = (idx == 0) & (along[rows, 0] < 0.0)
    beyond = (idx == nseg - 1) & (along[rows, nseg - 1] > lens[-1])
    inside = ~(before | beyond)
    return s, d, inside


def project_points(geom: TrajectoryGeometry, points: np.ndarray):
    """Project many points at once; returns (s, d, inside) arrays.

    Vectorized over segments and points, chunked to bound intermediate
    memory. Semantics are identical to `to_frenet` applied elementwise.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("points must form an (M, 2) array")
    nseg = len(geom.segment_lengths)
    chunk = max(1, _CHUNK_ELEMENTS // max(1, nseg))
    if len(pts) <= chunk:
        return _project_block(geom, pts)
    s = np.empty(len(pts))
    d = np.empty(len(pts))
    inside = np.empty(len(pts), dtype=bool)
    for lo in range(0, len(pts), chunk):
        hi = lo + chunk
        s[lo:hi], d[lo:hi], inside[lo:hi] = _project_block(geom, pts[lo:hi])
    return s, d, inside


def to_frenet(geom: TrajectoryGeometry, point) -> FrenetPoint:
    """Project one Cartesian point onto the trajectory.

    The foot point is the globally nearest point over all segments; ties
    between equidistant segments break toward the smaller arc length.
    """
    pt = np.asarray(point, dtype=np.float64).reshape(1, 2)
    s, d, inside = _project_block(geom, pt)
    return FrenetPoint(float(s[0]), float(d[0]), bool(inside[0]))


def frenet_round_trip(geom: TrajectoryGeometry, s: float, d: float):
    """Map trajectory coordinates (s, d) back to a Cartesian point.

    Inverse of `to_frenet` wherever the lateral offset stays below the local
    radius of curvature. s must lie within [0, total_length].
    """
    if not 0.0 <= s <= geom.total_length:
        raise ValidationError(
            f"arc length {s} outside [0, {geom.total_length}]"
        )
    cum = geom.cumulative_arc_length
    i = int(np.searchsorted(cum, s, side="right")) - 1
    i = min(max(i, 0), len(geom.segment_lengths) - 1)
    t = s - cum[i]
    tx, ty = geom.segment_tangents[i]
    fx = geom.source.points[i, 0] + t * tx
    fy = geom.source.points[i, 1] + t * ty
    # left normal of (tx, ty) is (-ty, tx)
    return (fx - d * ty, fy + d * tx)
