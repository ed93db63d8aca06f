"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(ValueError):
    """Evaluation requested too close to the pole of zeta at s = 1."""


class AccuracyError(RuntimeError):
    """A requested tolerance could not be met."""


class WindowError(ValueError):
    """Point or window length outside a local-spectrum window."""


class TableRangeError(ValueError):
    """Target outside the span of a ladder table."""


class ChainConsistencyError(RuntimeError):
    """Segment-chain or control-sequence invariant violated."""


class SingularPointError(ValueError):
    """Quotient evaluated too close to a zero of Z."""


class ResolutionError(RuntimeError):
    """Scan grid too coarse to bracket a root."""


class ConfigError(ValueError):
    """Malformed or out-of-bounds experiment configuration."""
