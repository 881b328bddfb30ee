"""Exception types shared across the package."""


class GaitAlignError(Exception):
    """Base class for all errors raised by this package."""


class SingularMapError(GaitAlignError):
    """Affine map cannot be inverted (|det| at or below the threshold)."""


class EmptyMaskError(GaitAlignError):
    """An operation that needs foreground pixels received an empty mask."""


class RejectedMaskError(GaitAlignError):
    """Preprocessing rejected a frame as a segmentation failure.

    ``reason`` is a short machine-checkable tag ("empty", "too_short").
    """

    def __init__(self, reason: str, message: str | None = None):
        super().__init__(message or f"mask rejected: {reason}")
        self.reason = reason


class AllFramesEmptyError(GaitAlignError):
    """Every frame of a sequence was empty; nothing to align."""


class OutOfBoundsError(GaitAlignError):
    """A crop box or a transformed silhouette left the raster bounds."""


class UnsupportedSchemaError(GaitAlignError):
    """Pose file declares a keypoint schema this package does not know."""


class MalformedPoseError(GaitAlignError):
    """Pose file violates its declared schema."""


class DuplicateSequenceError(GaitAlignError):
    """Two records claim the same (subject, sequence) identity."""
