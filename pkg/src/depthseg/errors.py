"""Exception types shared across the toolkit."""


class DepthsegError(Exception):
    """Base class for all toolkit errors."""


class PgmError(DepthsegError):
    """Malformed, unsupported, or truncated PGM file."""


class EmptyHistogramError(DepthsegError):
    """Frame contains no valid (nonzero) depth pixels."""


class NoDriverFoundError(DepthsegError):
    """No segmented region passed the human-body classifier."""


class SceneSpecError(DepthsegError):
    """Structurally invalid scene or sequence description."""
