"""Exception hierarchy.

Each error class carries the CLI exit code it maps to, so the command layer
can translate failures without a lookup table.
"""


class FiberIsingError(Exception):
    exit_code = 5


class ConfigError(FiberIsingError, ValueError):
    exit_code = 2


class OutputError(FiberIsingError, OSError):
    exit_code = 4


class PoleProximity(FiberIsingError, ArithmeticError):
    """Parameters sit on (or too close to) the M^2 = W^2 pole line."""

    exit_code = 3


class NoOptimalLine(FiberIsingError, ValueError):
    """Fiber loss is too large for the shifted resonance line to exist."""

    exit_code = 2


class NumericalBreakdown(FiberIsingError, ArithmeticError):
    exit_code = 5


class NonHermitianInput(NumericalBreakdown, ValueError):
    pass


class StepTooLarge(NumericalBreakdown, ValueError):
    pass


class MonogamyViolation(NumericalBreakdown):
    pass


class BadSubset(FiberIsingError, ValueError):
    exit_code = 2
