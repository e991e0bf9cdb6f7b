"""End-to-end pith detection: prepare, estimate, vote, find the peak."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .accumulator import accumulation_space, to_line
from .errors import NoLinesError
from .imageprep import derive_mask, prepare, read_mask, read_rgb
from .orientation import OrientationEstimate, local_orientation_estimation
from .peak import find_peak


@dataclass(frozen=True)
class DetectionParams:
    """Pipeline knobs; defaults match the CLI defaults."""

    new_shape: int = 1000
    block_width_size: int = 100
    block_height_size: int = 100
    block_overlap: float = 0.2
    lo_method: str = "pca"
    lo_certainty_th: float = 0.9
    fft_peak_th: float = 0.8
    acc_type: int = 0
    peak_blur_sigma: float = 3.0


@dataclass
class DetectionResult:
    """Prediction in resized coordinates plus the voting artifacts."""

    x: float
    y: float
    estimates: list[OrientationEstimate] = field(repr=False, default_factory=list)
    accumulator: np.ndarray = field(repr=False, default=None)


@dataclass
class FileDetection:
    """Prediction mapped back to the original image pixels."""

    x: float
    y: float
    original_size: tuple[int, int]  # (width, height)
    resized: DetectionResult


def to_original_coords(xy, original_size, new_shape: int) -> tuple[float, float]:
    """Map a point from the resized square back to original pixels."""
    ow, oh = original_size
    return xy[0] * ow / new_shape, xy[1] * oh / new_shape


def to_resized_coords(xy, original_size, new_shape: int) -> tuple[float, float]:
    """Map a point from original pixels into the resized square."""
    ow, oh = original_size
    return xy[0] * new_shape / ow, xy[1] * new_shape / oh


def detect_pith(gray: np.ndarray, mask: np.ndarray, params: DetectionParams = DetectionParams()) -> DetectionResult:
    """Run detection on a prepared grayscale image and its mask.

    Coordinates in the result refer to the given image, which is expected to
    already be at working resolution (see imageprep.prepare).
    """
    estimates = local_orientation_estimation(
        gray,
        mask,
        block_overlap=params.block_overlap,
        block_width_size=params.block_width_size,
        block_height_size=params.block_height_size,
        fft_peak_th=params.fft_peak_th,
        lo_method=params.lo_method,
        lo_certainty_th=params.lo_certainty_th,
    )
    if not estimates:
        raise NoLinesError("no orientation estimate passed the certainty filter")
    lines = [to_line(est) for est in estimates]
    acc = accumulation_space(lines, params.acc_type, gray.shape)
    x, y = find_peak(acc, params.peak_blur_sigma)
    return DetectionResult(x=x, y=y, estimates=estimates, accumulator=acc)


def detect_file(image_path, mask_path=None, params: DetectionParams = DetectionParams()) -> FileDetection:
    """Detect the pith in an image file, reporting original-pixel coordinates."""
    rgb = read_rgb(image_path)
    if mask_path is not None and str(mask_path) != "":
        mask = read_mask(mask_path, rgb.shape)
    else:
        mask = derive_mask(rgb)
    gray, mask_r = prepare(rgb, mask, params.new_shape)
    result = detect_pith(gray, mask_r, params)
    oh, ow = rgb.shape[:2]
    x, y = to_original_coords((result.x, result.y), (ow, oh), params.new_shape)
    return FileDetection(x=x, y=y, original_size=(ow, oh), resized=result)
