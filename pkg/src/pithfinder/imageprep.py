"""Image loading, grayscale conversion, masking and resizing.

Images are handled as numpy arrays: RGB floats in [0, 1] with shape
(H, W, 3), grayscale floats in [0, 1] with shape (H, W), and boolean
foreground masks with shape (H, W). Coordinates are (x, y) with x along
columns and y along rows.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .errors import EmptyForegroundError, ImageReadError, MaskMismatchError

# Luminance weights for the R, G, B channels.
GRAY_WEIGHTS = (0.299, 0.587, 0.114)

# Pixels at least this bright in every channel are background candidates.
BACKGROUND_WHITE_LEVEL = 0.92

MIN_NEW_SHAPE = 64


def read_rgb(path) -> np.ndarray:
    """Load an image file as float RGB in [0, 1]."""
    raw = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if raw is None:
        raise ImageReadError(f"cannot read image: {path}")
    return raw[:, :, ::-1].astype(np.float32) / 255.0


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    """Weighted luminance of an RGB array."""
    w = np.asarray(GRAY_WEIGHTS, dtype=rgb.dtype)
    return rgb @ w


def derive_mask(rgb: np.ndarray) -> np.ndarray:
    """Estimate the foreground mask of a photo with a near-white backdrop.

    Pixels bright in all three channels are background candidates; only the
    largest connected candidate region counts as background, so white
    speckles inside the subject stay in the foreground.
    """
    candidates = np.all(rgb >= BACKGROUND_WHITE_LEVEL, axis=2)
    if not candidates.any():
        return np.ones(rgb.shape[:2], dtype=bool)
    n, labels, stats, _ = cv2.connectedComponentsWithStats(
        candidates.astype(np.uint8), connectivity=8
    )
    # Label 0 is the non-candidate region; pick the largest candidate blob.
    areas = stats[1:, cv2.CC_STAT_AREA]
    background = labels == (1 + int(np.argmax(areas)))
    return ~background


def read_mask(path, image_shape) -> np.ndarray:
    """Load a mask raster (nonzero = foreground) and check its size."""
    raw = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if raw is None:
        raise ImageReadError(f"cannot read mask: {path}")
    if raw.shape != tuple(image_shape[:2]):
        raise MaskMismatchError(
            f"mask is {raw.shape}, image is {tuple(image_shape[:2])}"
        )
    return raw > 0


def prepare(rgb: np.ndarray, mask: np.ndarray, new_shape: int):
    """Resize to a new_shape x new_shape square and fill the background.

    The grayscale image is resized bilinearly and the mask with
    nearest-neighbor sampling. Aspect ratio is intentionally not preserved;
    downstream coordinates live in the resized square and are mapped back by
    the caller. Background pixels are replaced with the mean foreground
    luminance so the backdrop contributes no spectral energy.

    Returns (gray, mask) at the new size.
    """
    if new_shape < MIN_NEW_SHAPE:
        raise ValueError(f"new_shape must be >= {MIN_NEW_SHAPE}, got {new_shape}")
    if mask.shape != rgb.shape[:2]:
        raise MaskMismatchError(
            f"mask is {mask.shape}, image is {rgb.shape[:2]}"
        )
    gray = rgb_to_gray(rgb)
    size = (int(new_shape), int(new_shape))
    gray_r = cv2.resize(gray, size, interpolation=cv2.INTER_LINEAR)
    mask_r = cv2.resize(mask.astype(np.uint8), size, interpolation=cv2.INTER_NEAREST) > 0
    if not mask_r.any():
        raise EmptyForegroundError("mask holds no foreground pixels after resize")
    fill = float(gray_r[mask_r].mean())
    return np.where(mask_r, gray_r, np.float32(fill)), mask_r


def load_and_prepare(image_path, mask_path=None, new_shape: int = 1000):
    """Load an image (and optional mask file) ready for detection.

    Without a mask file the foreground is derived from the near-white
    backdrop. Returns (gray, mask), both new_shape x new_shape.
    """
    rgb = read_rgb(image_path)
    if mask_path is not None and str(mask_path) != "":
        mask = read_mask(mask_path, rgb.shape)
    else:
        mask = derive_mask(rgb)
    if not mask.any():
        raise EmptyForegroundError(f"no foreground found in {Path(image_path).name}")
    return prepare(rgb, mask, new_shape)
