"""Error taxonomy shared across the package.

Each class maps to one CLI exit code (see cli.EXIT_CODES).
"""


class ShapeError(ValueError):
    """Operand shapes are incompatible for the requested operation."""


class ContractError(ValueError):
    """A caller violated an operation's precondition."""


class NumericError(ArithmeticError):
    """A computation produced NaN/Inf or an iteration failed to converge."""


class DegeneratePlaneError(ValueError):
    """Two directions do not span a plane (zero or parallel vectors)."""


class ConfigError(ValueError):
    """A run configuration is malformed or violates a constraint."""
