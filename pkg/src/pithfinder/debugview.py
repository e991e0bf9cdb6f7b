"""Render intermediate pipeline stages as PNGs for inspection."""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np
from scipy.ndimage import gaussian_filter

from .accumulator import _clip_to_rect, to_line

LINE_COLOR = (80, 200, 80)  # BGR
CENTER_COLOR = (220, 140, 0)
MAXIMA_COLOR = (0, 0, 255)
PREDICTION_COLOR = (255, 0, 0)


def _to_u8(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    top = v.max()
    if top > 0:
        v = v / top
    return np.round(v * 255.0).astype(np.uint8)


def save_debug_images(out_dir, gray, estimates, acc, prediction, peak_blur_sigma):
    """Write the four stage snapshots into out_dir.

    input_masked: the prepared grayscale image. lines_filtered: surviving
    orientation lines over the image. accumulator: vote heatmap. peak: the
    smoothed maxima in red and the final prediction in blue.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    height, width = gray.shape

    base = np.round(np.clip(np.asarray(gray, dtype=np.float64), 0, 1) * 255).astype(np.uint8)
    cv2.imwrite(str(out_dir / "input_masked.png"), base)

    overlay = cv2.cvtColor(base, cv2.COLOR_GRAY2BGR)
    for est in estimates:
        seg = _clip_to_rect(to_line(est), width, height)
        if seg is None:
            continue
        (xa, ya), (xb, yb) = seg
        cv2.line(overlay, (round(xa), round(ya)), (round(xb), round(yb)), LINE_COLOR, 1)
    for est in estimates:
        cx, cy = est.center
        cv2.circle(overlay, (round(cx), round(cy)), 3, CENTER_COLOR, -1)
    cv2.imwrite(str(out_dir / "lines_filtered.png"), overlay)

    heat = cv2.applyColorMap(_to_u8(acc), cv2.COLORMAP_JET)
    cv2.imwrite(str(out_dir / "accumulator.png"), heat)

    votes = np.asarray(acc, dtype=np.float64)
    if peak_blur_sigma > 0:
        smooth = gaussian_filter(votes, peak_blur_sigma, mode="constant", cval=0.0, truncate=3.0)
    else:
        smooth = votes
    peak_img = cv2.applyColorMap(_to_u8(smooth), cv2.COLORMAP_JET)
    ys, xs = np.nonzero(smooth == smooth.max())
    for x, y in zip(xs, ys):
        cv2.circle(peak_img, (int(x), int(y)), 4, MAXIMA_COLOR, -1)
    cv2.circle(peak_img, (round(prediction[0]), round(prediction[1])), 7, PREDICTION_COLOR, 2)
    cv2.imwrite(str(out_dir / "peak.png"), peak_img)
