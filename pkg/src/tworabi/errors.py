"""Exception hierarchy shared by all solver stages."""


class TwoRabiError(Exception):
    """Base class; ``stage`` names the pipeline step that failed."""

    stage = "solver"


class InvalidParameters(TwoRabiError, ValueError):
    stage = "config"


class BasisMismatch(TwoRabiError, ValueError):
    stage = "config"


class TruncationInsufficient(TwoRabiError):
    stage = "truncation"


class SingularDenominator(TwoRabiError):
    stage = "singularity"


class NoConvergence(TwoRabiError):
    pass


class NotConverged(TwoRabiError):
    stage = "truncation"


class SingularJacobian(TwoRabiError):
    stage = "singularity"


class OutOfRange(TwoRabiError):
    stage = "detection"


class NonMonotoneBracket(TwoRabiError):
    stage = "detection"
