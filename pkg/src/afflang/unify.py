"""Most general unifiers.

``mgu`` is symmetric.  ``mgu_to`` is directional: its second argument is a
user-written type that must be at least as specific as the inferred first
argument, so a non-variable on the left never binds a variable on the right.
"""

from __future__ import annotations

from .errors import (
    BinderEscape,
    ConstMismatch,
    DirectionError,
    OccursCheck,
    ShapeMismatch,
    UnifyError,
)
from .syntax import (
    Const,
    Mu,
    Op,
    Substitution,
    TVar,
    Type,
    all_type_vars,
    alpha_eq,
    apply_subst,
    compose_subst,
    free_type_vars,
    fresh_name,
    pretty_type,
    rename,
)


def _unify(directed: bool, t1: Type, t2: Type) -> dict[str, Type]:
    if isinstance(t1, Const) and isinstance(t2, Const):
        if t1.kind == t2.kind:
            return {}
        raise ConstMismatch(f"can't unify {pretty_type(t1)} and {pretty_type(t2)}", t1, t2)

    if isinstance(t1, Op) and isinstance(t2, Op):
        if t1.op != t2.op:
            raise ConstMismatch(f"can't unify {pretty_type(t1)} and {pretty_type(t2)}", t1, t2)
        s1 = _unify(directed, t1.left, t2.left)
        s2 = _unify(directed, apply_subst(s1, t1.right), apply_subst(s1, t2.right))
        return compose_subst(s2, s1)

    if isinstance(t1, Mu) and isinstance(t2, Mu):
        return _unify_mu(directed, t1, t2)

    if isinstance(t1, TVar):
        if t2 == t1:
            return {}
        if t1.name in free_type_vars(t2):
            raise OccursCheck(
                f"occurs check failed: {t1.name} in {pretty_type(t2)}", t1, t2)
        return {t1.name: t2}

    if isinstance(t2, TVar):
        if directed:
            raise DirectionError(
                f"can't unify {pretty_type(t1)} to given type variable {t2.name}"
                " which is more general", t1, t2)
        return _unify(directed, t2, t1)

    raise ShapeMismatch(f"can't unify {pretty_type(t1)} and {pretty_type(t2)}", t1, t2)


def _unify_mu(directed: bool, t1: Mu, t2: Mu) -> dict[str, Type]:
    # Bodies are unified with both binders sharing one name.  Renaming the
    # right binder to the left one is only safe when that name is not free
    # on the right; otherwise both move to a name fresh for either side.
    b1, b2 = t1.body, t2.body
    if t1.binder == t2.binder:
        bound = t1.binder
    elif t1.binder not in free_type_vars(b2):
        bound = t1.binder
        b2 = rename(t2.binder, bound, b2)
    else:
        bound = fresh_name(all_type_vars(t1) | all_type_vars(t2))
        b1 = rename(t1.binder, bound, b1)
        b2 = rename(t2.binder, bound, b2)
    s = _unify(directed, b1, b2)
    if bound in s or any(bound in free_type_vars(v) for v in s.values()):
        raise BinderEscape(
            f"can't unify {pretty_type(t1)} and {pretty_type(t2)}:"
            f" bound variable {bound} would escape", t1, t2)
    return s


def mgu(t1: Type, t2: Type) -> dict[str, Type]:
    """Most general unifier of ``t1`` and ``t2``; raises :class:`UnifyError`."""
    return _unify(False, t1, t2)


def mgu_to(inferred: Type, given: Type) -> dict[str, Type]:
    """Unify ``inferred`` against a user-written type that must not be generalised."""
    return _unify(True, inferred, given)


def is_unifier(s: Substitution, t1: Type, t2: Type) -> bool:
    return alpha_eq(apply_subst(s, t1), apply_subst(s, t2))
