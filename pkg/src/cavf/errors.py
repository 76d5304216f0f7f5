"""Exception types raised by the guidance library."""


class CavfError(Exception):
    """Base class for all library errors."""


class DomainError(CavfError, ValueError):
    """An input lies outside the domain where a formula is defined."""


class DegenerateBlendError(CavfError, ArithmeticError):
    """Mixed field components cancel, so the blend has no direction."""


class SingularityError(CavfError, ArithmeticError):
    """The moving-frame speed evolution hit its singular configuration."""


class ScenarioError(CavfError, ValueError):
    """A scenario file or world state violates a required invariant."""
