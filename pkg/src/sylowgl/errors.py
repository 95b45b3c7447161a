"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`SylowGLError`,
so callers (the CLI in particular) can separate usage/budget problems from
genuine bugs.
"""


class SylowGLError(Exception):
    pass


class ContextError(SylowGLError, ValueError):
    """Invalid arithmetic context (even or composite p, n < 1, overflow risk)."""


class ContextMismatchError(SylowGLError, ValueError):
    pass


class SingularMatrixError(SylowGLError, ArithmeticError):
    pass


class InvalidReductionError(SylowGLError, ValueError):
    pass


class InvalidParameterError(SylowGLError, ValueError):
    pass


class InvalidElementError(SylowGLError, ValueError):
    pass


class BudgetExceededError(SylowGLError, RuntimeError):
    pass


class NotAMemberError(SylowGLError, ValueError):
    pass


class ContainmentError(SylowGLError, ValueError):
    pass


class NotNormalError(SylowGLError, ValueError):
    pass


class NotPGroupError(SylowGLError, ValueError):
    pass


class StructureError(SylowGLError, ValueError):
    pass


class InvalidActorError(SylowGLError, ValueError):
    pass


class InternalInconsistencyError(SylowGLError, AssertionError):
    """A self-check that must never fail did fail."""
