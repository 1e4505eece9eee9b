"""Call-by-need evaluation to weak head normal form.

Every variable is bound to a :class:`Thunk` that is evaluated at most once.
Pattern matching on tensors is lazy: ``let a * b = e in body`` binds ``a``
and ``b`` to projections of a shared thunk of ``e``, so infinite streams
built with ``fix`` only unfold as far as they are demanded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

from .errors import BlackHole, EvalError, FuelExhausted, StuckTerm
from .infer import desugar_bang
from .syntax import (
    Absurd,
    App,
    BangGlobal,
    Case,
    Fix,
    Fold,
    Fst,
    GlobalEnv,
    GlobalRef,
    Inl,
    Inr,
    Lam,
    LetTensor,
    Snd,
    Term,
    TensorPair,
    Unfold,
    Unit,
    Var,
    WithPair,
    pretty_term,
)

DEFAULT_FUEL = 10**6

_PENDING, _RUNNING, _DONE = range(3)


class Thunk:
    """A suspended computation, memoised after its first evaluation."""

    __slots__ = ("_compute", "_value", "_state", "evaluations")

    def __init__(self, compute: Optional[Callable[[], "Value"]] = None):
        self._compute = compute
        self._value = None
        self._state = _PENDING
        self.evaluations = 0

    @classmethod
    def of(cls, value: "Value") -> "Thunk":
        t = cls()
        t.set(value)
        return t

    def set(self, value: "Value") -> None:
        self._value, self._state, self._compute = value, _DONE, None

    @property
    def forced(self) -> bool:
        return self._state == _DONE

    def force(self) -> "Value":
        if self._state == _DONE:
            return self._value
        if self._state == _RUNNING:
            raise BlackHole("a value depends on itself")
        self._state = _RUNNING
        self.evaluations += 1
        try:
            value = self._compute()
        except BaseException:
            self._state = _PENDING
            raise
        self.set(value)
        return value


@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True, eq=False)
class VTensor:
    left: Thunk
    right: Thunk


@dataclass(frozen=True, eq=False)
class VWith:
    left: Thunk
    right: Thunk


@dataclass(frozen=True, eq=False)
class VInl:
    payload: Thunk


@dataclass(frozen=True, eq=False)
class VInr:
    payload: Thunk


@dataclass(frozen=True, eq=False)
class VClosure:
    binder: str
    body: Term
    env: Mapping[str, Thunk]


@dataclass(frozen=True, eq=False)
class VFold:
    payload: Thunk


Value = Union[VUnit, VTensor, VWith, VInl, VInr, VClosure, VFold]


class Evaluator:
    """Evaluates terms against a fixed set of global definitions.

    ``fuel`` bounds the number of evaluation steps across the lifetime of
    the evaluator; running out raises :class:`FuelExhausted`.
    """

    def __init__(self, env: GlobalEnv, fuel: int = DEFAULT_FUEL):
        self.env = env
        self.fuel = fuel
        self.steps = 0
        self._globals: dict[str, Thunk] = {}

    # -- core --------------------------------------------------------------

    def delay(self, e: Term, local: Mapping[str, Thunk]) -> Thunk:
        return Thunk(lambda: self.whnf(e, local))

    def global_thunk(self, name: str) -> Thunk:
        if name not in self._globals:
            d = self.env.get(name)
            if d is None or d.body is None:
                raise StuckTerm(f"global {name} has no definition")
            self._globals[name] = self.delay(d.body, {})
        return self._globals[name]

    def whnf(self, e: Term, local: Optional[Mapping[str, Thunk]] = None) -> Value:
        local = local or {}
        self.steps += 1
        if self.steps > self.fuel:
            raise FuelExhausted(f"evaluation exceeded {self.fuel} steps", e.span)
        try:
            return self._eval(e, local)
        except RecursionError:
            raise EvalError("evaluation nested too deeply", e.span) from None

    def _eval(self, e: Term, local: Mapping[str, Thunk]) -> Value:
        if isinstance(e, Var):
            if e.name not in local:
                raise StuckTerm(f"unbound variable {e.name}", e.span)
            return local[e.name].force()
        if isinstance(e, GlobalRef):
            return self.global_thunk(e.name).force()
        if isinstance(e, Unit):
            return VUnit()
        if isinstance(e, Lam):
            return VClosure(e.binder, e.body, local)
        if isinstance(e, App):
            f = self.whnf(e.fun, local)
            if not isinstance(f, VClosure):
                raise StuckTerm(f"applying a non-function in {pretty_term(e)}", e.span)
            return self.whnf(f.body, {**f.env, f.binder: self.delay(e.arg, local)})
        if isinstance(e, TensorPair):
            return VTensor(self.delay(e.left, local), self.delay(e.right, local))
        if isinstance(e, LetTensor):
            pair = self.delay(e.bound, local)
            return self.whnf(e.body, {
                **local,
                e.w0: Thunk(lambda: self._component(pair, e, left=True)),
                e.w1: Thunk(lambda: self._component(pair, e, left=False)),
            })
        if isinstance(e, WithPair):
            return VWith(self.delay(e.left, local), self.delay(e.right, local))
        if isinstance(e, (Fst, Snd)):
            v = self.whnf(e.e, local)
            if not isinstance(v, VWith):
                raise StuckTerm(f"projection from a non-with value in {pretty_term(e)}", e.span)
            return (v.left if isinstance(e, Fst) else v.right).force()
        if isinstance(e, Inl):
            return VInl(self.delay(e.e, local))
        if isinstance(e, Inr):
            return VInr(self.delay(e.e, local))
        if isinstance(e, Case):
            v = self.whnf(e.scrutinee, local)
            if isinstance(v, VInl):
                return self.whnf(e.branch0, {**local, e.w0: v.payload})
            if isinstance(v, VInr):
                return self.whnf(e.branch1, {**local, e.w1: v.payload})
            raise StuckTerm(f"case on a non-sum value in {pretty_term(e)}", e.span)
        if isinstance(e, Absurd):
            self.whnf(e.e, local)
            raise StuckTerm("absurd reached a value", e.span)
        if isinstance(e, Fold):
            return VFold(self.delay(e.e, local))
        if isinstance(e, Unfold):
            v = self.whnf(e.e, local)
            if not isinstance(v, VFold):
                raise StuckTerm(f"unfolding a non-fold value in {pretty_term(e)}", e.span)
            return v.payload.force()
        if isinstance(e, Fix):
            return self._fix(e, local).force()
        if isinstance(e, BangGlobal):
            return self._bang(e).force()
        raise StuckTerm(f"cannot evaluate {e!r}", e.span)

    def _component(self, pair: Thunk, e: LetTensor, left: bool) -> Value:
        v = pair.force()
        if not isinstance(v, VTensor):
            raise StuckTerm(f"tensor pattern on a non-pair in {pretty_term(e)}", e.span)
        return (v.left if left else v.right).force()

    def _fix(self, e: Fix, local: Mapping[str, Thunk]) -> Thunk:
        # The fixpoint variable is the constant stream of the result.
        stream = Thunk()
        result = self.delay(e.body, {**local, e.binder: stream})
        stream.set(VFold(Thunk.of(VTensor(result, stream))))
        return result

    def _bang(self, e: BangGlobal) -> Thunk:
        if e.name not in self.env:
            raise StuckTerm(f"unknown global {e.name}", e.span)
        return self._fix(desugar_bang(e.name, self.env[e.name].scheme), {})

    # -- observers ---------------------------------------------------------

    def stream_heads(self, value: Value, n: int) -> list[Value]:
        """Heads of the first ``n`` cells of a ``!`` stream; the tail is left unforced."""
        heads: list[Value] = []
        cell = value
        for i in range(n):
            if i:
                cell = tail.force()
            if not isinstance(cell, VFold):
                raise StuckTerm("expected a stream cell (fold)")
            pair = cell.payload.force()
            if not isinstance(pair, VTensor):
                raise StuckTerm("expected a stream cell (tensor)")
            heads.append(pair.left.force())
            tail = pair.right
        return heads

    def take_bang(self, e: Term, n: int) -> list[Value]:
        if n <= 0:
            return []
        return self.stream_heads(self.whnf(e), n)

    def nat(self, e: Term) -> int:
        return self.decode_nat(self.whnf(e))

    def decode_nat(self, v: Value) -> int:
        """Count ``inr`` layers of a ``mu n. 1 + n`` value."""
        count = 0
        while True:
            if not isinstance(v, VFold):
                raise StuckTerm("expected a natural number (fold)")
            v = v.payload.force()
            if isinstance(v, VInl):
                return count
            if not isinstance(v, VInr):
                raise StuckTerm("expected a natural number (inl/inr)")
            count += 1
            v = v.payload.force()
            self.steps += 1
            if self.steps > self.fuel:
                raise FuelExhausted(f"evaluation exceeded {self.fuel} steps")


def eval_whnf(env: GlobalEnv, e: Term, fuel: int = DEFAULT_FUEL) -> Value:
    return Evaluator(env, fuel).whnf(e)


def take_bang(env: GlobalEnv, e: Term, n: int, fuel: int = DEFAULT_FUEL) -> list[Value]:
    return Evaluator(env, fuel).take_bang(e, n)


def eval_nat(env: GlobalEnv, e: Term, fuel: int = DEFAULT_FUEL) -> int:
    return Evaluator(env, fuel).nat(e)


def render_value(v: Value, depth: int = 8) -> str:
    """Show a value, forcing sub-thunks at most ``depth`` constructors deep."""
    if isinstance(v, VUnit):
        return "tt"
    if isinstance(v, VClosure):
        return "<function>"
    if depth <= 0:
        return "..."

    def sub(t: Thunk) -> str:
        try:
            inner = render_value(t.force(), depth - 1)
        except EvalError as err:
            return f"<{err.kind}>"
        return inner if " " not in inner or inner.startswith("(") else f"({inner})"

    if isinstance(v, VInl):
        return f"inl {sub(v.payload)}"
    if isinstance(v, VInr):
        return f"inr {sub(v.payload)}"
    if isinstance(v, VFold):
        return f"fold {sub(v.payload)}"
    if isinstance(v, VTensor):
        return f"{sub(v.left)} (*) {sub(v.right)}"
    if isinstance(v, VWith):
        # Components are choices: showing one must not consume the other.
        return "<with pair>"
    return repr(v)
