"""Exception types shared by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation (wrong grade, bad index)."""


class SingularPointError(DomainError):
    """Evaluation requested at the origin, where the soliton fields are singular."""


class ShellError(DomainError):
    """Evaluation on the shell r = r0 where one-sided smoothness is required."""


class StencilCollisionError(DomainError):
    """A finite-difference stencil would cross the origin or the shell."""


class ToleranceError(RuntimeError):
    """A numerical procedure failed to reach its requested tolerance."""
