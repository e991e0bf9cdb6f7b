"""Exception types raised by the detection pipeline.

Each class carries a short machine-readable ``code`` so the CLI can emit
structured error reports.
"""


class PithError(Exception):
    """Base class for all pipeline errors."""

    code = "error"


class ImageReadError(PithError):
    """The image file is missing or cannot be decoded."""

    code = "image_unreadable"


class MaskMismatchError(PithError):
    """A mask raster does not match the image dimensions."""

    code = "mask_mismatch"


class EmptyForegroundError(PithError):
    """No foreground pixels remain after masking."""

    code = "empty_foreground"


class GridError(PithError):
    """The block grid cannot be built for the requested geometry."""

    code = "bad_block_grid"


class NoLinesError(PithError):
    """Every patch was filtered out, leaving no lines to vote with."""

    code = "no_lines"


class NoEvidenceError(PithError):
    """The accumulator holds no votes, so no peak can be located."""

    code = "no_evidence"
