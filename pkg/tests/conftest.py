"""Shared oracles and helpers for the test suite.

The oracles here are deliberately independent implementations: they compute
expected values from geometry or brute force rather than by calling the
code under test.
"""

import math

import numpy as np
import pytest


def angle_error_deg(a: float, b: float) -> float:
    """Angular distance between two undirected angles, in degrees."""
    d = abs((a - b) % math.pi)
    return math.degrees(min(d, math.pi - d))


def brute_force_intersections(lines, width: int, height: int) -> np.ndarray:
    """Oracle for intersection voting: explicit loop over unordered pairs."""
    votes = np.zeros((height, width), dtype=np.int64)
    n = len(lines)
    for i in range(n):
        for j in range(i + 1, n):
            l1, l2 = lines[i], lines[j]
            det = l1.a * l2.b - l2.a * l1.b
            if abs(det) <= 1e-12:
                continue
            x = (l1.b * l2.c - l2.b * l1.c) / det
            y = (l2.a * l1.c - l1.a * l2.c) / det
            px, py = math.floor(x + 0.5), math.floor(y + 0.5)
            if 0 <= px < width and 0 <= py < height:
                votes[py, px] += 1
    return votes


def min_line_distance(lines, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Perpendicular distance from each (x, y) to the nearest line."""
    best = np.full(xs.shape, np.inf)
    for ln in lines:
        best = np.minimum(best, np.abs(ln.a * xs + ln.b * ys + ln.c))
    return best


def dense_max_diameter(mask: np.ndarray, gt, n_rays: int = 3600, step: float = 0.5) -> float:
    """Independent longest-chord oracle sampling both ray directions at once.

    For each angle the full line through gt is sampled symmetrically and the
    contiguous foreground run containing gt is measured, which avoids the
    two-sided walk of the implementation under test.
    """
    height, width = mask.shape
    t_max = math.hypot(width, height)
    ts = np.arange(-t_max, t_max + step, step)
    zero = int(np.argmin(np.abs(ts)))
    best = 0.0
    for k in range(n_rays):
        theta = k * 2.0 * math.pi / n_rays
        px = np.round(gt[0] + ts * math.cos(theta)).astype(np.int64)
        py = np.round(gt[1] + ts * math.sin(theta)).astype(np.int64)
        ok = (px >= 0) & (px < width) & (py >= 0) & (py < height)
        covered = np.zeros(ts.shape, dtype=bool)
        covered[ok] = mask[py[ok], px[ok]]
        lo = zero
        while lo > 0 and covered[lo - 1]:
            lo -= 1
        hi = zero
        while hi < len(ts) - 1 and covered[hi + 1]:
            hi += 1
        best = max(best, ts[hi] - ts[lo])
    return best


def lattice_frequency(rng: np.random.Generator, size: int):
    """Random integer frequency vector inside the band-pass annulus.

    Returns (angle, cycles) describing a wave whose spectrum lands exactly
    on a bin pair, so the true orientation is recoverable without
    quantization error.
    """
    lo, hi = size / 64.0, size / 3.0
    while True:
        u, v = rng.integers(-int(hi), int(hi) + 1, size=2)
        r = math.hypot(u, v)
        if max(lo, 1.0) <= r <= hi:
            return math.atan2(v, u) % math.pi, r


def blob_mask(rng: np.random.Generator, size: int, gt) -> np.ndarray:
    """Smooth random foreground: a union of ellipses all containing gt."""
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    mask = np.zeros((size, size), dtype=bool)
    for _ in range(3):
        ax = rng.uniform(0.18, 0.42) * size
        ay = rng.uniform(0.18, 0.42) * size
        phi = rng.uniform(0, math.pi)
        # keep gt strictly inside this ellipse by centering near it
        cx = gt[0] + rng.uniform(-0.3, 0.3) * ax
        cy = gt[1] + rng.uniform(-0.3, 0.3) * ay
        u = (xx - cx) * math.cos(phi) + (yy - cy) * math.sin(phi)
        v = -(xx - cx) * math.sin(phi) + (yy - cy) * math.cos(phi)
        mask |= (u / ax) ** 2 + (v / ay) ** 2 <= 1.0
    return mask


@pytest.fixture(scope="session")
def quiet_web():
    """One noise-free spider web shared by read-only tests."""
    from pithfinder.synth import make_spiderweb

    return make_spiderweb(1000, center=(487.0, 519.0), ring_spacing=6.0, noise_sigma=0.0, seed=0)
