"""Locate the pith as the strongest cell of the smoothed accumulator."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import NoEvidenceError


def find_peak(acc: np.ndarray, peak_blur_sigma: float = 3.0) -> tuple[float, float]:
    """Blur the vote matrix and return the (x, y) of its global maximum.

    The blur is an isotropic Gaussian with standard deviation
    peak_blur_sigma, truncated at three sigmas, with zero extension past the
    borders. Exact ties are averaged per coordinate. sigma 0 skips the blur.
    """
    if peak_blur_sigma < 0:
        raise ValueError(f"peak_blur_sigma must be >= 0, got {peak_blur_sigma}")
    votes = np.asarray(acc, dtype=np.float64)
    if votes.max(initial=0.0) <= 0.0:
        raise NoEvidenceError("accumulator holds no votes")
    if peak_blur_sigma > 0:
        smooth = gaussian_filter(votes, peak_blur_sigma, mode="constant", cval=0.0, truncate=3.0)
    else:
        smooth = votes
    ys, xs = np.nonzero(smooth == smooth.max())
    return float(xs.mean()), float(ys.mean())
