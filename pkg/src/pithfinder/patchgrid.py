"""Split an image into a regular grid of rectangular patches."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError

# A patch is kept only when at least this fraction of it is foreground.
MIN_FOREGROUND_FRACTION = 0.7


@dataclass(frozen=True)
class Patch:
    """A rectangular sub-image with its footprint center in image coords."""

    pixels: np.ndarray
    center: tuple[float, float]
    foreground_fraction: float


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def split_image_in_blocks(
    img: np.ndarray,
    mask: np.ndarray,
    block_overlap: float = 0.2,
    block_width_size: int = 100,
    block_height_size: int = 100,
    min_foreground: float = MIN_FOREGROUND_FRACTION,
) -> list[Patch]:
    """Tile the image with overlapping blocks and keep the foreground ones.

    The grid starts at the image origin and advances by
    round(block_size * (1 - block_overlap)) pixels per step, half up.
    Blocks that would run past the far edge are discarded rather than
    shifted, so every patch has the full requested size. A patch survives
    only when its foreground fraction is at least ``min_foreground``.
    """
    if img.shape[:2] != mask.shape[:2]:
        raise GridError(f"image {img.shape[:2]} and mask {mask.shape[:2]} differ")
    if not 0.0 <= block_overlap < 1.0:
        raise GridError(f"block_overlap must be in [0, 1), got {block_overlap}")
    height, width = img.shape[:2]
    bw, bh = int(block_width_size), int(block_height_size)
    if bw < 1 or bh < 1:
        raise GridError("block sizes must be positive")
    if bw > width or bh > height:
        raise GridError(
            f"block {bw}x{bh} exceeds image {width}x{height}"
        )
    stride_x = _round_half_up(bw * (1.0 - block_overlap))
    stride_y = _round_half_up(bh * (1.0 - block_overlap))
    if stride_x < 1 or stride_y < 1:
        raise GridError("block stride rounds to zero")

    fg = mask.astype(np.float64)
    patches = []
    for y0 in range(0, height - bh + 1, stride_y):
        for x0 in range(0, width - bw + 1, stride_x):
            fraction = float(fg[y0 : y0 + bh, x0 : x0 + bw].mean())
            if fraction < min_foreground:
                continue
            patches.append(
                Patch(
                    pixels=img[y0 : y0 + bh, x0 : x0 + bw],
                    center=(x0 + (bw - 1) / 2.0, y0 + (bh - 1) / 2.0),
                    foreground_fraction=fraction,
                )
            )
    return patches
