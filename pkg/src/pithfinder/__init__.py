"""Pith location in tree cross-section photos.

The pipeline estimates the local ring orientation of image patches from
their Fourier spectra, turns each estimate into a line through the patch
center, accumulates votes where the lines meet and reads the pith off the
smoothed vote peak.
"""

from .errors import (
    EmptyForegroundError,
    GridError,
    ImageReadError,
    MaskMismatchError,
    NoEvidenceError,
    NoLinesError,
    PithError,
)
from .imageprep import load_and_prepare
from .orientation import LO_METHODS, OrientationEstimate, local_orientation_estimation
from .pipeline import (
    DetectionParams,
    DetectionResult,
    FileDetection,
    detect_file,
    detect_pith,
    to_original_coords,
    to_resized_coords,
)

__version__ = "0.1.0"

__all__ = [
    "DetectionParams",
    "DetectionResult",
    "FileDetection",
    "detect_file",
    "detect_pith",
    "load_and_prepare",
    "local_orientation_estimation",
    "to_original_coords",
    "to_resized_coords",
    "LO_METHODS",
    "OrientationEstimate",
    "PithError",
    "ImageReadError",
    "MaskMismatchError",
    "EmptyForegroundError",
    "GridError",
    "NoLinesError",
    "NoEvidenceError",
    "__version__",
]
