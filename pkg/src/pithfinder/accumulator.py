"""Vote for the pith location with lines through the patch centers.

Every orientation estimate becomes an infinite line a*x + b*y + c = 0
(normalized so a^2 + b^2 = 1) through its patch center. Votes accumulate
into an integer matrix the size of the image, either at pairwise line
intersections or along every pixel each line passes through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .orientation import OrientationEstimate

PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class Line:
    a: float
    b: float
    c: float


def to_line(est: OrientationEstimate) -> Line:
    """Implicit line through the estimate's center along its angle."""
    a = math.sin(est.angle)
    b = -math.cos(est.angle)
    cx, cy = est.center
    return Line(a, b, -(a * cx + b * cy))


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5).astype(np.int64)


def lines_intersection_accumulation(lines, dims) -> np.ndarray:
    """One vote per unordered pair of non-parallel lines.

    The intersection point is rounded half up per coordinate; votes falling
    outside the image are dropped. k concurrent lines therefore give their
    common pixel k*(k-1)/2 votes.
    """
    height, width = int(dims[0]), int(dims[1])
    votes = np.zeros((height, width), dtype=np.int64)
    n = len(lines)
    if n < 2:
        return votes
    a = np.array([ln.a for ln in lines])
    b = np.array([ln.b for ln in lines])
    c = np.array([ln.c for ln in lines])
    for i in range(n - 1):
        aj, bj, cj = a[i + 1 :], b[i + 1 :], c[i + 1 :]
        det = a[i] * bj - aj * b[i]
        ok = np.abs(det) > PARALLEL_EPS
        if not ok.any():
            continue
        det = det[ok]
        x = (b[i] * cj[ok] - bj[ok] * c[i]) / det
        y = (aj[ok] * c[i] - a[i] * cj[ok]) / det
        px = _round_half_up(x)
        py = _round_half_up(y)
        inside = (px >= 0) & (px < width) & (py >= 0) & (py < height)
        np.add.at(votes, (py[inside], px[inside]), 1)
    return votes


def _clip_to_rect(line: Line, width: int, height: int):
    # Clip the infinite line to [0, width-1] x [0, height-1]. Returns two
    # endpoints or None when the line misses the rectangle.
    x0, y0 = -line.c * line.a, -line.c * line.b
    dx, dy = -line.b, line.a
    tmin, tmax = -math.inf, math.inf
    for start, step, hi in ((x0, dx, width - 1), (y0, dy, height - 1)):
        if abs(step) < PARALLEL_EPS:
            if not 0.0 <= start <= hi:
                return None
            continue
        t1, t2 = (0.0 - start) / step, (hi - start) / step
        if t1 > t2:
            t1, t2 = t2, t1
        tmin, tmax = max(tmin, t1), min(tmax, t2)
    if tmin > tmax:
        return None
    return (x0 + tmin * dx, y0 + tmin * dy), (x0 + tmax * dx, y0 + tmax * dy)


def _raster_segment(line: Line, seg, width: int, height: int):
    # 8-connected integer raster of the clipped line: one pixel per step of
    # the dominant axis, the other coordinate rounded half up from the exact
    # line equation so every pixel stays within half a pixel of the line.
    (xa, ya), (xb, yb) = seg
    eps = 1e-9
    if abs(xb - xa) >= abs(yb - ya):
        lo, hi = sorted((xa, xb))
        xs = np.arange(math.ceil(lo - eps), math.floor(hi + eps) + 1, dtype=np.int64)
        ys = _round_half_up(-(line.a * xs + line.c) / line.b)
    else:
        lo, hi = sorted((ya, yb))
        ys = np.arange(math.ceil(lo - eps), math.floor(hi + eps) + 1, dtype=np.int64)
        xs = _round_half_up(-(line.b * ys + line.c) / line.a)
    keep = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
    return xs[keep], ys[keep]


def lines_pass_through_accumulation(lines, dims) -> np.ndarray:
    """One vote per line on every pixel it crosses.

    Each line is clipped to the image rectangle and rasterized with an
    8-connected integer line rule, so a pixel collects as many votes as
    there are lines passing through it.
    """
    height, width = int(dims[0]), int(dims[1])
    votes = np.zeros((height, width), dtype=np.int64)
    for line in lines:
        seg = _clip_to_rect(line, width, height)
        if seg is None:
            continue
        xs, ys = _raster_segment(line, seg, width, height)
        votes[ys, xs] += 1
    return votes


def accumulation_space(lines, acc_type: int, dims) -> np.ndarray:
    """Dispatch on the accumulation rule: 1 = intersections, 0 = pass-through."""
    if acc_type not in (0, 1):
        raise ValueError(f"acc_type must be 0 or 1, got {acc_type}")
    if acc_type > 0:
        return lines_intersection_accumulation(lines, dims)
    return lines_pass_through_accumulation(lines, dims)
