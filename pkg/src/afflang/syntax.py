"""Abstract syntax for types and terms, substitutions, contexts and globals.

Types are immutable trees built from the constants ``1``/``0``, the binary
connectives tensor, plus, with and linear implication, iso-recursive ``mu``
binders and type variables.  Structural equality (``==``) is syntactic;
use :func:`alpha_eq` to compare modulo renaming of ``mu`` binders.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

Span = Optional[Tuple[int, int]]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

class ConstKind(enum.Enum):
    ONE = "1"
    ZERO = "0"


class OpKind(enum.Enum):
    TENSOR = "*"
    PLUS = "+"
    WITH = "&"
    LOLLI = "-o"


@dataclass(frozen=True)
class Const:
    kind: ConstKind

    def __str__(self) -> str:
        return pretty_type(self)


@dataclass(frozen=True)
class Op:
    op: OpKind
    left: "Type"
    right: "Type"

    def __str__(self) -> str:
        return pretty_type(self)


@dataclass(frozen=True)
class Mu:
    binder: str
    body: "Type"

    def __str__(self) -> str:
        return pretty_type(self)


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return pretty_type(self)


Type = Union[Const, Op, Mu, TVar]

ONE = Const(ConstKind.ONE)
ZERO = Const(ConstKind.ZERO)


def tensor(a: Type, b: Type) -> Op:
    return Op(OpKind.TENSOR, a, b)


def plus(a: Type, b: Type) -> Op:
    return Op(OpKind.PLUS, a, b)


def with_(a: Type, b: Type) -> Op:
    return Op(OpKind.WITH, a, b)


def lolli(a: Type, b: Type) -> Op:
    return Op(OpKind.LOLLI, a, b)


def _free_ordered(t: Type, bound: frozenset, out: dict) -> None:
    if isinstance(t, TVar):
        if t.name not in bound:
            out.setdefault(t.name, None)
    elif isinstance(t, Op):
        _free_ordered(t.left, bound, out)
        _free_ordered(t.right, bound, out)
    elif isinstance(t, Mu):
        _free_ordered(t.body, bound | {t.binder}, out)


def free_type_vars_ordered(t: Type) -> list[str]:
    """Free variables of ``t`` in order of first occurrence."""
    out: dict = {}
    _free_ordered(t, frozenset(), out)
    return list(out)


def free_type_vars(t: Type) -> set[str]:
    return set(free_type_vars_ordered(t))


def all_type_vars(t: Type) -> set[str]:
    """Every variable name in ``t``, free or bound."""
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Op):
        return all_type_vars(t.left) | all_type_vars(t.right)
    if isinstance(t, Mu):
        return {t.binder} | all_type_vars(t.body)
    return set()


def _letter_names() -> Iterator[str]:
    for n in itertools.count():
        for c in "abcdefghijklmnopqrstuvwxyz":
            yield c if n == 0 else f"{c}{n}"


def fresh_name(avoid: Iterable[str], base: Optional[str] = None) -> str:
    """A surface-syntax variable name not in ``avoid``.

    With ``base`` the result is ``base`` followed by a number, otherwise the
    first unused name from ``a, b, ..., z, a1, ...``.
    """
    avoid = set(avoid)
    if base is None:
        return next(n for n in _letter_names() if n not in avoid)
    stem = base.rstrip("0123456789") or base
    return next(f"{stem}{i}" for i in itertools.count(1) if f"{stem}{i}" not in avoid)


# ---------------------------------------------------------------------------
# Substitutions
# ---------------------------------------------------------------------------

Substitution = Mapping[str, Type]
EMPTY_SUBST: Substitution = {}


def apply_subst(s: Substitution, t: Type) -> Type:
    """Capture-avoiding substitution of free variables of ``t``.

    A ``mu`` binder shadows its own name, and is renamed when it would
    capture a free variable of some image placed underneath it.
    """
    if not s:
        return t
    if isinstance(t, TVar):
        return s.get(t.name, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, Op):
        left, right = apply_subst(s, t.left), apply_subst(s, t.right)
        if left is t.left and right is t.right:
            return t
        return Op(t.op, left, right)
    # Mu
    fv_body = free_type_vars(t.body)
    inner = {k: v for k, v in s.items() if k != t.binder and k in fv_body}
    if not inner:
        return t
    image_fv: set[str] = set()
    for v in inner.values():
        image_fv |= free_type_vars(v)
    binder, body = t.binder, t.body
    if binder in image_fv:
        new = fresh_name(image_fv | fv_body | set(inner) | {binder}, base=binder)
        body = apply_subst({binder: TVar(new)}, body)
        binder = new
    return Mu(binder, apply_subst(inner, body))


def compose_subst(s1: Substitution, s2: Substitution) -> dict[str, Type]:
    """The substitution that applies ``s2`` first and then ``s1``."""
    out = {k: apply_subst(s1, v) for k, v in s2.items()}
    for k, v in s1.items():
        out.setdefault(k, v)
    return out


def compose_all(*subs: Substitution) -> dict[str, Type]:
    """``compose_all(s3, s2, s1)`` is ``s3 s2 s1`` (``s1`` applied first)."""
    out: dict[str, Type] = {}
    for s in reversed(subs):
        out = compose_subst(s, out)
    return out


def rename(old: str, new: str, t: Type) -> Type:
    return apply_subst({old: TVar(new)}, t)


def alpha_eq(t1: Type, t2: Type) -> bool:
    """Equality up to consistent renaming of ``mu``-bound variables."""
    def go(a: Type, b: Type, env_a: dict, env_b: dict, depth: int) -> bool:
        if isinstance(a, TVar) and isinstance(b, TVar):
            la, lb = env_a.get(a.name), env_b.get(b.name)
            if la is None and lb is None:
                return a.name == b.name
            return la == lb
        if isinstance(a, Const) and isinstance(b, Const):
            return a.kind == b.kind
        if isinstance(a, Op) and isinstance(b, Op):
            return (a.op == b.op and go(a.left, b.left, env_a, env_b, depth)
                    and go(a.right, b.right, env_a, env_b, depth))
        if isinstance(a, Mu) and isinstance(b, Mu):
            return go(a.body, b.body, {**env_a, a.binder: depth},
                      {**env_b, b.binder: depth}, depth + 1)
        return False

    return go(t1, t2, {}, {}, 0)


def unroll(t: Mu) -> Type:
    """One-step unrolling ``M[a := mu a. M]`` of a recursive type."""
    return apply_subst({t.binder: t}, t.body)


def bang_of(t: Type) -> Mu:
    """``!t``, encoded as the infinite stream ``mu a. t * a``."""
    binder = fresh_name(all_type_vars(t))
    return Mu(binder, tensor(t, TVar(binder)))


def is_bang(t: Type) -> bool:
    return (isinstance(t, Mu) and isinstance(t.body, Op) and t.body.op is OpKind.TENSOR
            and t.body.right == TVar(t.binder) and t.binder not in free_type_vars(t.body.left))


def normalize_type(t: Type) -> Type:
    """Rename free variables to ``a, b, c, ...`` in order of first occurrence."""
    names = free_type_vars_ordered(t)
    letters = itertools.islice(_letter_names(), len(names))
    return apply_subst({n: TVar(l) for n, l in zip(names, letters)}, t)


# ---------------------------------------------------------------------------
# Type pretty-printing
# ---------------------------------------------------------------------------

_OP_LEVEL = {OpKind.LOLLI: 0, OpKind.PLUS: 1, OpKind.WITH: 2, OpKind.TENSOR: 3}
_PREFIX_LEVEL = 4


def pretty_type(t: Type, synonyms: Optional[Mapping[str, Type]] = None) -> str:
    """Render ``t`` in the surface grammar accepted by the parser.

    Binary connectives are right-associative.  ``mu a. t * a`` is printed as
    ``!t`` and any subtree alpha-equal to a closed synonym body is printed
    by the synonym's name.
    """
    syn = [(name, body) for name, body in (synonyms or {}).items()
           if not free_type_vars(body)]

    def go(t: Type, level: int) -> str:
        for name, body in syn:
            if not isinstance(t, TVar) and alpha_eq(t, body):
                return name
        if isinstance(t, TVar):
            return t.name
        if isinstance(t, Const):
            return t.kind.value
        if isinstance(t, Mu):
            if is_bang(t):
                return "!" + go(t.body.left, _PREFIX_LEVEL)
            text = f"mu {t.binder}. {go(t.body, 0)}"
            return text if level == 0 else f"({text})"
        lv = _OP_LEVEL[t.op]
        text = f"{go(t.left, lv + 1)} {t.op.value} {go(t.right, lv)}"
        return text if level <= lv else f"({text})"

    return go(t, 0)


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    span: Span = field(default=None, compare=False, repr=False, kw_only=True)

    def __str__(self) -> str:
        return pretty_term(self)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class GlobalRef(Term):
    name: str


@dataclass(frozen=True)
class Lam(Term):
    binder: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class TensorPair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class LetTensor(Term):
    w0: str
    w1: str
    bound: Term
    body: Term


@dataclass(frozen=True)
class WithPair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Fst(Term):
    e: Term


@dataclass(frozen=True)
class Snd(Term):
    e: Term


@dataclass(frozen=True)
class Unit(Term):
    pass


@dataclass(frozen=True)
class Inl(Term):
    e: Term


@dataclass(frozen=True)
class Inr(Term):
    e: Term


@dataclass(frozen=True)
class Case(Term):
    scrutinee: Term
    w0: str
    branch0: Term
    w1: str
    branch1: Term


@dataclass(frozen=True)
class Absurd(Term):
    e: Term


@dataclass(frozen=True)
class Fold(Term):
    annotation: Mu
    e: Term


@dataclass(frozen=True)
class Unfold(Term):
    annotation: Optional[Mu]
    e: Term


@dataclass(frozen=True)
class Fix(Term):
    binder: str
    body: Term


@dataclass(frozen=True)
class BangGlobal(Term):
    name: str


_BINDING_FORMS = (Lam, LetTensor, Case, Fix)


def _term_vars(e: Term, out: set) -> None:
    if isinstance(e, (Var, GlobalRef, BangGlobal)):
        out.add(e.name)
    for name in ("binder", "w0", "w1"):
        if hasattr(e, name):
            out.add(getattr(e, name))
    for child in term_children(e):
        _term_vars(child, out)


def term_names(e: Term) -> set[str]:
    """All identifiers mentioned in ``e`` (variables, binders, globals)."""
    out: set[str] = set()
    _term_vars(e, out)
    return out


def term_children(e: Term) -> tuple[Term, ...]:
    if isinstance(e, Lam):
        return (e.body,)
    if isinstance(e, (App,)):
        return (e.fun, e.arg)
    if isinstance(e, (TensorPair, WithPair)):
        return (e.left, e.right)
    if isinstance(e, LetTensor):
        return (e.bound, e.body)
    if isinstance(e, (Fst, Snd, Inl, Inr, Absurd, Fold, Unfold)):
        return (e.e,)
    if isinstance(e, Case):
        return (e.scrutinee, e.branch0, e.branch1)
    if isinstance(e, Fix):
        return (e.body,)
    return ()


def free_term_vars(e: Term) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Lam):
        return free_term_vars(e.body) - {e.binder}
    if isinstance(e, Fix):
        return free_term_vars(e.body) - {e.binder}
    if isinstance(e, LetTensor):
        return free_term_vars(e.bound) | (free_term_vars(e.body) - {e.w0, e.w1})
    if isinstance(e, Case):
        return (free_term_vars(e.scrutinee) | (free_term_vars(e.branch0) - {e.w0})
                | (free_term_vars(e.branch1) - {e.w1}))
    out: set[str] = set()
    for child in term_children(e):
        out |= free_term_vars(child)
    return out


def pretty_term(e: Term, synonyms: Optional[Mapping[str, Type]] = None) -> str:
    """Render a term in surface syntax; ``parse_term`` reads it back."""

    def ty(t: Type) -> str:
        return pretty_type(t, synonyms)

    def expr(e: Term) -> str:
        if isinstance(e, Lam):
            return f"\\{e.binder}. {expr(e.body)}"
        if isinstance(e, Fix):
            return f"fix {e.binder}. {expr(e.body)}"
        if isinstance(e, LetTensor):
            return f"let {e.w0} * {e.w1} = {expr(e.bound)} in {expr(e.body)}"
        if isinstance(e, Case):
            return (f"case {expr(e.scrutinee)} of inl {e.w0} => {pair(e.branch0)}"
                    f" | inr {e.w1} => {expr(e.branch1)}")
        return pair(e)

    def pair(e: Term) -> str:
        if isinstance(e, TensorPair):
            return f"{app(e.left)} (*) {app(e.right)}"
        if isinstance(e, WithPair):
            return f"{app(e.left)} (&) {app(e.right)}"
        return app(e)

    def app(e: Term) -> str:
        if isinstance(e, App):
            return f"{app(e.fun)} {arg(e.arg, head=False)}"
        return arg(e, head=True)

    def arg(e: Term, head: bool) -> str:
        text = None
        if isinstance(e, Inl):
            text = f"inl {arg(e.e, False)}"
        elif isinstance(e, Inr):
            text = f"inr {arg(e.e, False)}"
        elif isinstance(e, Fst):
            text = f"fst {arg(e.e, False)}"
        elif isinstance(e, Snd):
            text = f"snd {arg(e.e, False)}"
        elif isinstance(e, Absurd):
            text = f"absurd {arg(e.e, False)}"
        elif isinstance(e, Fold):
            text = f"fold [{ty(e.annotation)}] {arg(e.e, False)}"
        elif isinstance(e, Unfold):
            ann = "" if e.annotation is None else f"[{ty(e.annotation)}] "
            text = f"unfold {ann}{arg(e.e, False)}"
        if text is not None:
            return text if head else f"({text})"
        return atom(e)

    def atom(e: Term) -> str:
        if isinstance(e, (Var, GlobalRef)):
            return e.name
        if isinstance(e, BangGlobal):
            return f"!{e.name}"
        if isinstance(e, Unit):
            return "tt"
        return f"({expr(e)})"

    return expr(e)


# ---------------------------------------------------------------------------
# Contexts and globals
# ---------------------------------------------------------------------------

Context = Tuple[Tuple[str, Type], ...]
EMPTY_CONTEXT: Context = ()


def ctx_names(ctx: Context) -> list[str]:
    return [n for n, _ in ctx]


def ctx_lookup(ctx: Context, name: str) -> Optional[Type]:
    for n, t in ctx:
        if n == name:
            return t
    return None


def ctx_remove(ctx: Context, *names: str) -> Context:
    return tuple((n, t) for n, t in ctx if n not in names)


def ctx_extend(ctx: Context, name: str, t: Type) -> Context:
    return ctx + ((name, t),)


def ctx_apply(s: Substitution, ctx: Context) -> Context:
    if not s:
        return ctx
    return tuple((n, apply_subst(s, t)) for n, t in ctx)


def pretty_context(ctx: Context, synonyms: Optional[Mapping[str, Type]] = None) -> str:
    if not ctx:
        return "."
    return ", ".join(f"{n} : {pretty_type(t, synonyms)}" for n, t in ctx)


@dataclass(frozen=True)
class GlobalDef:
    name: str
    scheme: Type
    body: Optional[Term]
    result: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GlobalEnv:
    """Checked global definitions plus the type synonyms used for printing."""

    defs: Mapping[str, GlobalDef] = field(default_factory=dict)
    synonyms: Mapping[str, Type] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.defs

    def __getitem__(self, name: str) -> GlobalDef:
        return self.defs[name]

    def get(self, name: str) -> Optional[GlobalDef]:
        return self.defs.get(name)

    def names(self) -> set[str]:
        return set(self.defs)

    def with_def(self, d: GlobalDef) -> "GlobalEnv":
        return GlobalEnv({**self.defs, d.name: d}, self.synonyms)

    def with_synonym(self, name: str, t: Type) -> "GlobalEnv":
        return GlobalEnv(self.defs, {**self.synonyms, name: t})


def iter_subterms(e: Term) -> Iterator[Term]:
    yield e
    for child in term_children(e):
        yield from iter_subterms(child)


def types_in_term(e: Term) -> Sequence[Type]:
    return [s.annotation for s in iter_subterms(e)
            if isinstance(s, (Fold, Unfold)) and s.annotation is not None]
