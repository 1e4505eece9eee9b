"""Exception hierarchy shared by the parser, unifier, type checker and evaluator."""

from __future__ import annotations

from typing import Optional

Span = Optional[tuple]


class AffError(Exception):
    """Base class.  ``span`` is a ``(start, end)`` character range or ``None``."""

    def __init__(self, message: str, span: Span = None):
        super().__init__(message)
        self.message = message
        self.span = span

    @property
    def kind(self) -> str:
        return type(self).__name__


# -- parsing ----------------------------------------------------------------

class ParseError(AffError):
    pass


class DuplicateName(ParseError):
    pass


class UnknownName(ParseError):
    pass


# -- unification --------------------------------------------------------------

class UnifyError(AffError):
    """No unifier exists.  ``left``/``right`` are the offending subtrees."""

    def __init__(self, message: str, left, right):
        super().__init__(message)
        self.left = left
        self.right = right


class ConstMismatch(UnifyError):
    """Distinct constants, or distinct connectives."""


class OccursCheck(UnifyError):
    pass


class ShapeMismatch(UnifyError):
    pass


class BinderEscape(ShapeMismatch):
    """Unifying two ``mu`` bodies would leak the bound variable."""


class DirectionError(UnifyError):
    pass


# -- type checking ----------------------------------------------------------

class TypeCheckError(AffError):
    """Inference failure, tagged with the rule that was being applied."""

    def __init__(self, message: str, span: Span = None, rule: Optional[str] = None,
                 cause: Optional[UnifyError] = None):
        super().__init__(message, span)
        self.rule = rule
        self.cause = cause

    def classes(self) -> set[str]:
        """Names of this error's class hierarchy and of its unifier cause."""
        out = {c.__name__ for c in type(self).__mro__ if issubclass(c, AffError)}
        if self.cause is not None:
            out |= {c.__name__ for c in type(self.cause).__mro__ if issubclass(c, AffError)}
        return out

    def __str__(self) -> str:
        where = f" [{self.rule}]" if self.rule else ""
        return f"{self.kind}{where}: {self.message}"


class UnboundVariable(TypeCheckError):
    """Also reports a second use of an affine variable: the first use removed it."""


class AnnotationRequired(TypeCheckError):
    pass


class UnificationFailure(TypeCheckError):
    @property
    def kind(self) -> str:
        return type(self.cause).__name__ if self.cause is not None else "UnificationFailure"


class ScopeEscape(TypeCheckError):
    pass


class InvariantViolation(TypeCheckError):
    """An internal consistency check of the engine failed."""


# -- evaluation -------------------------------------------------------------

class EvalError(AffError):
    pass


class StuckTerm(EvalError):
    pass


class FuelExhausted(EvalError):
    pass


class BlackHole(EvalError):
    """A thunk demanded its own value while being forced."""
