"""Local ring-orientation estimation from patch Fourier spectra.

Tree rings crossing a small patch look like a set of parallel stripes, so
the patch varies along essentially one direction. The energy of its 2D
Fourier transform then concentrates on a straight line through the spectrum
center, and the direction of that line equals the stripe normal in image
space, which points at the pith. Each patch therefore yields one angle in
[0, pi) plus a certainty score used to filter unreliable patches.

Spectra are DC-centered magnitude arrays indexed like images (row = y,
col = x); bin coordinates are taken relative to the center bin at
(width // 2, height // 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .patchgrid import Patch, split_image_in_blocks

LO_METHODS = ("peak", "lsr", "wlsr", "pca")

# Near-vertical spectra make a y-on-x regression unstable; above this
# slope the fit switches to the principal axis of the point cloud.
STEEP_SLOPE = 5.0

MIN_PATCH_SIDE = 8


@dataclass(frozen=True)
class OrientationEstimate:
    """Stripe-normal direction estimated at a patch center.

    angle is measured from the +x axis toward +y in [0, pi); lines are
    undirected. certainty is 0 (unusable) to 1 (fully trusted), except in
    the raw-ratio certainty mode where it is unbounded.
    """

    center: tuple[float, float]
    angle: float
    certainty: float


def compute_fourier_spectrum(patch: Patch) -> np.ndarray:
    """DC-centered magnitude spectrum of a mean-subtracted patch.

    Mean subtraction removes the DC spike; no window or log scaling is
    applied, so magnitudes stay linear for the weighted fits downstream.
    """
    block = np.asarray(patch.pixels, dtype=np.float64)
    if block.ndim != 2 or min(block.shape) < MIN_PATCH_SIDE:
        raise ValueError(f"patch must be at least {MIN_PATCH_SIDE}x{MIN_PATCH_SIDE} pixels")
    spectrum = np.fft.fftshift(np.fft.fft2(block - block.mean()))
    return np.abs(spectrum)


def band_limits(height: int) -> tuple[float, float]:
    """Radial bin range kept by the band-pass, height/64 to height/3."""
    return height / 64.0, height / 3.0


def preprocess_fourier_spectrum(spec: np.ndarray, fft_peak_th: float) -> np.ndarray:
    """Band-pass and threshold a magnitude spectrum.

    Keeps bins whose radial distance r from the center bin satisfies
    H/64 <= r <= H/3 (H = patch height), then zeroes every bin below
    fft_peak_th times the post-band-pass maximum. An all-zero result means
    the patch has no usable band energy and should be skipped.
    """
    if not 0.0 <= fft_peak_th <= 1.0:
        raise ValueError(f"fft_peak_th must be in [0, 1], got {fft_peak_th}")
    h, w = spec.shape
    lo, hi = band_limits(h)
    yy = np.arange(h, dtype=np.float64)[:, None] - h // 2
    xx = np.arange(w, dtype=np.float64)[None, :] - w // 2
    r = np.hypot(xx, yy)
    out = np.where((r >= lo) & (r <= hi), spec, 0.0)
    peak = out.max()
    if peak > 0.0:
        out[out < fft_peak_th * peak] = 0.0
    return out


def _surviving_bins(spec: np.ndarray):
    ys, xs = np.nonzero(spec)
    h, w = spec.shape
    x = (xs - w // 2).astype(np.float64)
    y = (ys - h // 2).astype(np.float64)
    return x, y, spec[ys, xs]


def _principal_angle(sxx: float, syy: float, sxy: float) -> float:
    # Principal axis of the symmetric 2x2 second-moment matrix.
    return 0.5 * math.atan2(2.0 * sxy, sxx - syy)


def _fit_certainty(sxx: float, syy: float, sxy: float) -> float:
    # Squared correlation of the bin cloud about the origin. Degenerate
    # spreads along a single axis are perfectly collinear.
    denom = sxx * syy
    if denom <= 0.0:
        return 1.0 if (sxx > 0.0) != (syy > 0.0) else 0.0
    return min(1.0, (sxy * sxy) / denom)


def lo_estimate(
    spec: np.ndarray,
    method: str,
    patch_center: tuple[float, float],
    pca_certainty: str = "gap",
) -> OrientationEstimate:
    """Estimate the dominant spectrum direction through the center bin.

    Methods:
      peak  single strongest bin; certainty is always 1. Ties resolve to
            the lowest radius, then the lowest angle.
      lsr   least-squares line through the center; certainty |R^2|.
      wlsr  same fit weighted by sqrt(magnitude); certainty |R^2|.
      pca   principal axis with magnitude weights; certainty is the
            normalized eigenvalue gap (l1-l2)/(l1+l2), or the raw ratio
            l1/l2 when pca_certainty="ratio".
    """
    if method not in LO_METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {LO_METHODS}")
    x, y, mag = _surviving_bins(spec)
    if x.size == 0:
        raise ValueError("empty spectrum: no surviving bins")

    if method == "peak":
        top = mag == mag.max()
        radius = np.hypot(x[top], y[top])
        angle = np.mod(np.arctan2(y[top], x[top]), math.pi)
        order = np.lexsort((x[top], y[top], angle, radius))
        best = order[0]
        return OrientationEstimate(patch_center, float(angle[best]), 1.0)

    if x.size < 2:
        return OrientationEstimate(patch_center, 0.0, 0.0)

    if method == "lsr":
        w = np.ones_like(mag)
    elif method == "wlsr":
        w = np.sqrt(mag)
    else:
        w = mag
    sxx = float(np.sum(w * x * x))
    syy = float(np.sum(w * y * y))
    sxy = float(np.sum(w * x * y))

    if method == "pca":
        trace = sxx + syy
        if trace <= 0.0:
            return OrientationEstimate(patch_center, 0.0, 0.0)
        gap = math.hypot(sxx - syy, 2.0 * sxy)  # = l1 - l2
        angle = _principal_angle(sxx, syy, sxy) % math.pi
        if pca_certainty == "ratio":
            lam2 = 0.5 * (trace - gap)
            certainty = math.inf if lam2 <= 0.0 else 0.5 * (trace + gap) / lam2
        elif pca_certainty == "gap":
            # hypot can overshoot the trace by an ulp on collinear clouds
            certainty = min(1.0, gap / trace)
        else:
            raise ValueError(f"unknown pca_certainty mode {pca_certainty!r}")
        return OrientationEstimate(patch_center, angle, float(certainty))

    # lsr / wlsr: regress y on x through the origin unless the cloud is
    # near-vertical, then fall back to the total-least-squares axis.
    if sxx > 0.0 and abs(sxy / sxx) <= STEEP_SLOPE:
        angle = math.atan2(sxy / sxx, 1.0) % math.pi
    else:
        angle = _principal_angle(sxx, syy, sxy) % math.pi
    return OrientationEstimate(patch_center, angle, _fit_certainty(sxx, syy, sxy))


def local_orientation_estimation(
    img: np.ndarray,
    mask: np.ndarray,
    block_overlap: float = 0.2,
    block_width_size: int = 100,
    block_height_size: int = 100,
    fft_peak_th: float = 0.8,
    lo_method: str = "pca",
    lo_certainty_th: float = 0.9,
    pca_certainty: str = "gap",
) -> list[OrientationEstimate]:
    """Per-patch orientation estimates for the whole image.

    Patches with an empty filtered spectrum are skipped; the rest are kept
    only when certainty exceeds lo_certainty_th.
    """
    estimates = []
    for patch in split_image_in_blocks(
        img, mask, block_overlap, block_width_size, block_height_size
    ):
        spec = preprocess_fourier_spectrum(compute_fourier_spectrum(patch), fft_peak_th)
        if not spec.any():
            continue
        est = lo_estimate(spec, lo_method, patch.center, pca_certainty)
        if est.certainty > lo_certainty_th:
            estimates.append(est)
    return estimates
