"""Algorithm W for the affine calculus.

The judgment computed here is ``gamma \\ delta |- e : ty, S``: starting from the
linear context ``gamma``, checking ``e`` leaves the unused hypotheses
``delta`` and yields ``ty`` under the substitution ``S``.  Contexts are threaded
left to right through premises, so no context splitting is ever guessed.

Every result carries a :class:`Derivation` naming the rule applied at each
node.  Returned types and remaining contexts already have the returned
substitution applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import (
    AnnotationRequired,
    InvariantViolation,
    ScopeEscape,
    ShapeMismatch,
    TypeCheckError,
    UnboundVariable,
    UnificationFailure,
    UnifyError,
)
from .syntax import (
    EMPTY_CONTEXT,
    ONE,
    ZERO,
    Absurd,
    App,
    BangGlobal,
    Case,
    Context,
    Fix,
    Fold,
    Fst,
    GlobalDef,
    GlobalEnv,
    GlobalRef,
    Inl,
    Inr,
    Lam,
    LetTensor,
    Mu,
    Op,
    OpKind,
    Snd,
    Substitution,
    Term,
    TensorPair,
    TVar,
    Type,
    Unfold,
    Unit,
    Var,
    WithPair,
    alpha_eq,
    apply_subst,
    bang_of,
    compose_all,
    compose_subst,
    ctx_apply,
    ctx_extend,
    ctx_lookup,
    ctx_names,
    ctx_remove,
    all_type_vars,
    free_type_vars_ordered,
    fresh_name,
    lolli,
    plus,
    pretty_context,
    pretty_term,
    pretty_type,
    tensor,
    types_in_term,
    unroll,
    with_,
)
from .unify import mgu, mgu_to

RULES = (
    "LolliI", "LolliE", "Var", "Intro", "TensorI", "TensorE", "WithI", "WithEL",
    "WithER", "OneI", "PlusIL", "PlusIR", "PlusE", "ZeroE", "MuI", "MuEI", "MuEE",
    "Fix", "BangI",
)


@dataclass
class FreshSupply:
    """Source of type variables ``%0, %1, ...``; ``%`` never occurs in source text."""

    counter: int = 0

    def fresh(self) -> TVar:
        v = TVar(f"%{self.counter}")
        self.counter += 1
        return v


@dataclass(frozen=True)
class Derivation:
    """One rule application: ``gamma \\ remaining |- term : ty`` plus premises.

    Types are recorded as they were when the rule fired; apply the final
    substitution of the enclosing inference to read them consistently.
    ``discarded`` lists binders the rule dropped unused (weakening).
    """

    rule: str
    term: Term
    gamma: Context
    remaining: Context
    ty: Type
    children: tuple["Derivation", ...] = ()
    discarded: tuple[str, ...] = ()

    def conclusion(self, subst: Optional[Substitution] = None, synonyms=None) -> str:
        s = subst or {}
        return (f"{pretty_context(ctx_apply(s, self.gamma), synonyms)} \\ "
                f"{pretty_context(ctx_apply(s, self.remaining), synonyms)} |- "
                f"{pretty_term(self.term, synonyms)} : "
                f"{pretty_type(apply_subst(s, self.ty), synonyms)}")

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def rules(self) -> set[str]:
        return {n.rule for n in self.walk()}

    def to_text(self, subst: Optional[Substitution] = None, synonyms=None) -> str:
        lines: list[str] = []

        def go(node: Derivation, depth: int) -> None:
            lines.append(f"{'  ' * depth}{node.rule}: {node.conclusion(subst, synonyms)}")
            for c in node.children:
                go(c, depth + 1)

        go(self, 0)
        return "\n".join(lines)

    def to_json(self, subst: Optional[Substitution] = None, synonyms=None) -> dict:
        return {
            "rule": self.rule,
            "conclusion": self.conclusion(subst, synonyms),
            "discarded": list(self.discarded),
            "children": [c.to_json(subst, synonyms) for c in self.children],
        }


@dataclass(frozen=True)
class InferenceResult:
    remaining: Context
    ty: Type
    subst: dict
    trace: Derivation


def instantiate(scheme: Type, supply: FreshSupply) -> Type:
    """Replace every free variable of ``scheme`` by a fresh one."""
    return apply_subst({v: supply.fresh() for v in free_type_vars_ordered(scheme)}, scheme)


def desugar_bang(name: str, ty: Type) -> Fix:
    """The closed-context stream of a global ``name : ty``.

    ``fix xs. fold [!ty] (name (*) let h * t = unfold xs in h)``: the fixpoint
    variable is a stream of the whole result, whose head is the result itself.
    """
    return Fix("xs", Fold(bang_of(ty), TensorPair(
        GlobalRef(name), LetTensor("h", "t", Unfold(None, Var("xs")), Var("h")))))


class Inferencer:
    """One inference session over a fixed global environment."""

    def __init__(self, env: GlobalEnv, supply: Optional[FreshSupply] = None):
        self.env = env
        self.supply = supply if supply is not None else FreshSupply()
        # Composition of every unifier emitted so far, in emission order.
        # Annotations are read through it so scoped type variables stay in sync.
        self._seen: dict[str, Type] = {}

    # -- helpers -------------------------------------------------------------

    def _unify(self, fn: Callable, a: Type, b: Type, rule: str, e: Term) -> dict:
        try:
            s = fn(a, b)
        except UnifyError as err:
            raise UnificationFailure(err.message, e.span, rule, err) from err
        self._seen = compose_subst(s, self._seen)
        return s

    def _bind(self, ctx: Context, name: str, t: Type, rule: str, e: Term) -> Context:
        if ctx_lookup(ctx, name) is not None:
            raise ScopeEscape(f"binder {name} shadows a hypothesis in scope", e.span, rule)
        return ctx_extend(ctx, name, t)

    def _annotation(self, ann: Mu) -> Mu:
        return apply_subst(self._seen, ann)

    @staticmethod
    def _intersect(left: Context, right: Context, rule: str, e: Term) -> Context:
        keep = []
        for n, t in right:
            other = ctx_lookup(left, n)
            if other is None:
                continue
            if not alpha_eq(other, t):
                raise InvariantViolation(
                    f"hypothesis {n} refined to {pretty_type(other)} and {pretty_type(t)}",
                    e.span, rule)
            keep.append((n, t))
        return tuple(keep)

    @staticmethod
    def _node(rule, e, gamma, remaining, ty, children=(), discarded=()) -> Derivation:
        return Derivation(rule, e, gamma, remaining, ty, tuple(children), tuple(discarded))

    # -- the rules -----------------------------------------------------------

    def infer(self, gamma: Context, e: Term) -> InferenceResult:
        method = getattr(self, "_infer_" + type(e).__name__, None)
        if method is None:
            raise TypeError(f"not a term: {e!r}")
        return method(gamma, e)

    def _infer_Var(self, gamma, e: Var):
        t = ctx_lookup(gamma, e.name)
        if t is None:
            raise UnboundVariable(
                f"variable {e.name} is unbound or was already used", e.span, "Var")
        rem = ctx_remove(gamma, e.name)
        return InferenceResult(rem, t, {}, self._node("Var", e, gamma, rem, t))

    def _infer_GlobalRef(self, gamma, e: GlobalRef):
        d = self.env.get(e.name)
        if d is None:
            raise UnboundVariable(f"unknown global {e.name}", e.span, "Intro")
        t = instantiate(d.scheme, self.supply)
        return InferenceResult(gamma, t, {}, self._node("Intro", e, gamma, gamma, t))

    def _infer_Lam(self, gamma, e: Lam):
        sigma = self.supply.fresh()
        r = self.infer(self._bind(gamma, e.binder, sigma, "LolliI", e), e.body)
        t = lolli(apply_subst(r.subst, sigma), r.ty)
        dropped = (e.binder,) if ctx_lookup(r.remaining, e.binder) is not None else ()
        rem = ctx_remove(r.remaining, e.binder)
        return InferenceResult(rem, t, r.subst,
                               self._node("LolliI", e, gamma, rem, t, [r.trace], dropped))

    def _infer_App(self, gamma, e: App):
        r0 = self.infer(gamma, e.fun)
        r1 = self.infer(r0.remaining, e.arg)
        result = self.supply.fresh()
        s2 = self._unify(mgu, apply_subst(r1.subst, r0.ty), lolli(r1.ty, result), "LolliE", e)
        t = apply_subst(s2, result)
        rem = ctx_apply(s2, r1.remaining)
        return InferenceResult(rem, t, compose_all(s2, r1.subst, r0.subst),
                               self._node("LolliE", e, gamma, rem, t, [r0.trace, r1.trace]))

    def _infer_TensorPair(self, gamma, e: TensorPair):
        r0 = self.infer(gamma, e.left)
        r1 = self.infer(r0.remaining, e.right)
        t = tensor(apply_subst(r1.subst, r0.ty), r1.ty)
        return InferenceResult(r1.remaining, t, compose_all(r1.subst, r0.subst),
                               self._node("TensorI", e, gamma, r1.remaining, t,
                                          [r0.trace, r1.trace]))

    def _infer_LetTensor(self, gamma, e: LetTensor):
        if e.w0 == e.w1:
            raise ScopeEscape(f"pattern binds {e.w0} twice", e.span, "TensorE")
        r0 = self.infer(gamma, e.bound)
        a, b = self.supply.fresh(), self.supply.fresh()
        s1 = self._unify(mgu, r0.ty, tensor(a, b), "TensorE", e)
        ctx = ctx_apply(s1, r0.remaining)
        ctx = self._bind(ctx, e.w0, apply_subst(s1, a), "TensorE", e)
        ctx = self._bind(ctx, e.w1, apply_subst(s1, b), "TensorE", e)
        r1 = self.infer(ctx, e.body)
        dropped = tuple(w for w in (e.w0, e.w1) if ctx_lookup(r1.remaining, w) is not None)
        rem = ctx_remove(r1.remaining, e.w0, e.w1)
        return InferenceResult(rem, r1.ty, compose_all(r1.subst, s1, r0.subst),
                               self._node("TensorE", e, gamma, rem, r1.ty,
                                          [r0.trace, r1.trace], dropped))

    def _infer_WithPair(self, gamma, e: WithPair):
        r0 = self.infer(gamma, e.left)
        r1 = self.infer(ctx_apply(r0.subst, gamma), e.right)
        t = with_(apply_subst(r1.subst, r0.ty), r1.ty)
        rem = self._intersect(ctx_apply(r1.subst, r0.remaining), r1.remaining, "WithI", e)
        return InferenceResult(rem, t, compose_all(r1.subst, r0.subst),
                               self._node("WithI", e, gamma, rem, t, [r0.trace, r1.trace]))

    def _project(self, gamma, e, rule: str, left: bool):
        r = self.infer(gamma, e.e)
        a, b = self.supply.fresh(), self.supply.fresh()
        s1 = self._unify(mgu, r.ty, with_(a, b), rule, e)
        t = apply_subst(s1, a if left else b)
        rem = ctx_apply(s1, r.remaining)
        return InferenceResult(rem, t, compose_all(s1, r.subst),
                               self._node(rule, e, gamma, rem, t, [r.trace]))

    def _infer_Fst(self, gamma, e: Fst):
        return self._project(gamma, e, "WithEL", left=True)

    def _infer_Snd(self, gamma, e: Snd):
        return self._project(gamma, e, "WithER", left=False)

    def _infer_Unit(self, gamma, e: Unit):
        return InferenceResult(gamma, ONE, {}, self._node("OneI", e, gamma, gamma, ONE))

    def _inject(self, gamma, e, rule: str, left: bool):
        r = self.infer(gamma, e.e)
        other = self.supply.fresh()
        t = plus(r.ty, other) if left else plus(other, r.ty)
        return InferenceResult(r.remaining, t, r.subst,
                               self._node(rule, e, gamma, r.remaining, t, [r.trace]))

    def _infer_Inl(self, gamma, e: Inl):
        return self._inject(gamma, e, "PlusIL", left=True)

    def _infer_Inr(self, gamma, e: Inr):
        return self._inject(gamma, e, "PlusIR", left=False)

    def _infer_Case(self, gamma, e: Case):
        r = self.infer(gamma, e.scrutinee)
        a, b = self.supply.fresh(), self.supply.fresh()
        s1 = self._unify(mgu, r.ty, plus(a, b), "PlusE", e)
        delta = ctx_apply(s1, r.remaining)
        r0 = self.infer(self._bind(delta, e.w0, apply_subst(s1, a), "PlusE", e), e.branch0)
        ctx1 = ctx_apply(r0.subst, self._bind(delta, e.w1, apply_subst(s1, b), "PlusE", e))
        r1 = self.infer(ctx1, e.branch1)
        s4 = self._unify(mgu, apply_subst(r1.subst, r0.ty), r1.ty, "PlusE", e)
        t = apply_subst(s4, r1.ty)
        dropped = tuple(w for w, rr in ((e.w0, r0), (e.w1, r1))
                        if ctx_lookup(rr.remaining, w) is not None)
        left = ctx_apply(compose_subst(s4, r1.subst), ctx_remove(r0.remaining, e.w0))
        right = ctx_apply(s4, ctx_remove(r1.remaining, e.w1))
        rem = self._intersect(left, right, "PlusE", e)
        return InferenceResult(rem, t, compose_all(s4, r1.subst, r0.subst, s1, r.subst),
                               self._node("PlusE", e, gamma, rem, t,
                                          [r.trace, r0.trace, r1.trace], dropped))

    def _infer_Absurd(self, gamma, e: Absurd):
        r = self.infer(gamma, e.e)
        s1 = self._unify(mgu, r.ty, ZERO, "ZeroE", e)
        t = self.supply.fresh()
        rem = ctx_apply(s1, r.remaining)
        return InferenceResult(rem, t, compose_all(s1, r.subst),
                               self._node("ZeroE", e, gamma, rem, t, [r.trace]))

    def _infer_Fold(self, gamma, e: Fold):
        if not isinstance(e.annotation, Mu):
            raise TypeCheckError("fold annotation must be a recursive type", e.span, "MuI")
        r = self.infer(gamma, e.e)
        ann = self._annotation(e.annotation)
        s1 = self._unify(mgu_to, r.ty, unroll(ann), "MuI", e)
        t = apply_subst(s1, ann)
        rem = ctx_apply(s1, r.remaining)
        return InferenceResult(rem, t, compose_all(s1, r.subst),
                               self._node("MuI", e, gamma, rem, t, [r.trace]))

    def _infer_Unfold(self, gamma, e: Unfold):
        r = self.infer(gamma, e.e)
        if e.annotation is not None:
            if not isinstance(e.annotation, Mu):
                raise TypeCheckError("unfold annotation must be a recursive type", e.span, "MuEE")
            ann = self._annotation(e.annotation)
            s1 = self._unify(mgu_to, r.ty, ann, "MuEE", e)
            t = apply_subst(s1, unroll(ann))
            rem = ctx_apply(s1, r.remaining)
            return InferenceResult(rem, t, compose_all(s1, r.subst),
                                   self._node("MuEE", e, gamma, rem, t, [r.trace]))
        if isinstance(r.ty, Mu):
            t = unroll(r.ty)
            return InferenceResult(r.remaining, t, r.subst,
                                   self._node("MuEI", e, gamma, r.remaining, t, [r.trace]))
        if isinstance(r.ty, TVar):
            raise AnnotationRequired(
                f"cannot unfold a value of unknown type {r.ty.name}; write unfold [T] e",
                e.span, "MuEI")
        err = ShapeMismatch(f"can't unfold {pretty_type(r.ty)}: not a recursive type",
                            r.ty, r.ty)
        raise UnificationFailure(err.message, e.span, "MuEI", err)

    def _infer_Fix(self, gamma, e: Fix):
        # Only the fixpoint variable is visible in the body; every other
        # hypothesis could be duplicated by recursion.
        elem = self.supply.fresh()
        r = self.infer(((e.binder, bang_of(elem)),), e.body)
        s1 = self._unify(mgu, apply_subst(r.subst, elem), r.ty, "Fix", e)
        t = apply_subst(s1, r.ty)
        s = compose_all(s1, r.subst)
        rem = ctx_apply(s, gamma)
        dropped = (e.binder,) if ctx_lookup(r.remaining, e.binder) is not None else ()
        return InferenceResult(rem, t, s, self._node("Fix", e, gamma, rem, t, [r.trace], dropped))

    def _infer_BangGlobal(self, gamma, e: BangGlobal):
        d = self.env.get(e.name)
        if d is None:
            raise UnboundVariable(f"unknown global {e.name}", e.span, "BangI")
        inst = instantiate(d.scheme, self.supply)
        r = self.infer(gamma, desugar_bang(e.name, inst))
        return InferenceResult(r.remaining, r.ty, r.subst,
                               self._node("BangI", e, gamma, r.remaining, r.ty, [r.trace]))


def infer(env: GlobalEnv, gamma: Context, e: Term,
          supply: Optional[FreshSupply] = None) -> InferenceResult:
    """Infer ``e`` in the linear context ``gamma``; raises :class:`TypeCheckError`."""
    return Inferencer(env, supply).infer(tuple(gamma), e)


def infer_closed(env: GlobalEnv, e: Term) -> InferenceResult:
    return infer(env, EMPTY_CONTEXT, e, FreshSupply())


def check_global_def(env: GlobalEnv, name: str, declared: Type, body: Term) -> GlobalEnv:
    """Check ``name : declared = body`` in the empty context and add it to ``env``.

    The inferred type must be at least as general as ``declared``.
    """
    r = infer_closed(env, body)
    try:
        mgu_to(r.ty, declared)
    except UnifyError as err:
        raise UnificationFailure(
            f"{name} has type {pretty_type(r.ty)}, not {pretty_type(declared)}: {err.message}",
            body.span, r.trace.rule, err) from err
    return env.with_def(GlobalDef(name, declared, body, r))


def display_subst(r: InferenceResult) -> dict[str, Type]:
    """``r.subst`` followed by a renaming of leftover ``%n`` variables to letters.

    Variables of the result type come first, so the root of the trace reads
    like the normalised type.  Letters already used in annotations are skipped.
    """
    def types_of(node: Derivation):
        yield node.ty
        for _, t in node.gamma + node.remaining:
            yield t

    seen: list[str] = []
    user: set[str] = {v for t in types_in_term(r.trace.term) for v in all_type_vars(t)}
    for t in [r.ty, *(t for n in r.trace.walk() for t in types_of(n))]:
        t = apply_subst(r.subst, t)
        user |= {v for v in all_type_vars(t) if not v.startswith("%")}
        seen += [v for v in free_type_vars_ordered(t) if v.startswith("%") and v not in seen]
    renaming: dict[str, Type] = {}
    for v in seen:
        name = fresh_name(user)
        user.add(name)
        renaming[v] = TVar(name)
    return compose_subst(renaming, r.subst)


def unused_hypotheses(trace: Derivation) -> list[str]:
    return [w for node in trace.walk() for w in node.discarded]


# ---------------------------------------------------------------------------
# Independent validation of a finished derivation
# ---------------------------------------------------------------------------

def validate(trace: Derivation, subst: Substitution, env: GlobalEnv) -> list[str]:
    """Re-check every node of ``trace`` locally under the final substitution.

    This does not rerun inference: it checks that each recorded conclusion
    follows from its recorded premises by the named rule.  Returns the list
    of violations (empty when the derivation is valid).
    """
    problems: list[str] = []

    def T(t: Type) -> Type:
        return apply_subst(subst, t)

    def C(ctx: Context) -> Context:
        return ctx_apply(subst, ctx)

    def same_ctx(a: Context, b: Context) -> bool:
        return ctx_names(a) == ctx_names(b) and all(
            alpha_eq(x, y) for (_, x), (_, y) in zip(C(a), C(b)))

    def check(ok: bool, node: Derivation, what: str) -> None:
        if not ok:
            problems.append(f"{node.rule} at {pretty_term(node.term)}: {what}")

    def sub_ctx(small: Context, big: Context) -> bool:
        return all(ctx_lookup(big, n) is not None and alpha_eq(T(t), T(ctx_lookup(big, n)))
                   for n, t in small)

    def is_instance(scheme: Type, t: Type) -> bool:
        probe = instantiate(scheme, FreshSupply(10**9))
        try:
            s = mgu_to(probe, t)
        except UnifyError:
            return False
        return alpha_eq(apply_subst(s, probe), t)

    def go(n: Derivation) -> None:
        ch = n.children
        ty = T(n.ty)
        check(sub_ctx(n.remaining, n.gamma), n, "remaining context not within input")
        e = n.term
        if n.rule == "Var":
            t = ctx_lookup(n.gamma, e.name)
            check(t is not None and alpha_eq(T(t), ty), n, "variable type")
            check(ctx_names(n.remaining) == ctx_names(ctx_remove(n.gamma, e.name)), n, "Var context")
        elif n.rule == "Intro":
            check(e.name in env and is_instance(env[e.name].scheme, ty), n, "not an instance")
            check(same_ctx(n.gamma, n.remaining), n, "Intro consumes nothing")
        elif n.rule == "OneI":
            check(ty == ONE and same_ctx(n.gamma, n.remaining), n, "unit")
        elif n.rule == "LolliI":
            (c,) = ch
            w = ctx_lookup(c.gamma, e.binder)
            check(w is not None and alpha_eq(ty, lolli(T(w), T(c.ty))), n, "arrow type")
            check(ctx_names(c.gamma) == ctx_names(n.gamma) + [e.binder], n, "binder context")
            check(ctx_names(n.remaining) == ctx_names(ctx_remove(c.remaining, e.binder)), n, "Δ - w")
        elif n.rule == "LolliE":
            f, a = ch
            check(alpha_eq(T(f.ty), lolli(T(a.ty), ty)), n, "application type")
            check(ctx_names(a.gamma) == ctx_names(f.remaining), n, "threading")
            check(ctx_names(n.remaining) == ctx_names(a.remaining), n, "threading")
        elif n.rule == "TensorI":
            l, r = ch
            check(alpha_eq(ty, tensor(T(l.ty), T(r.ty))), n, "tensor type")
            check(ctx_names(r.gamma) == ctx_names(l.remaining), n, "threading")
            check(ctx_names(n.remaining) == ctx_names(r.remaining), n, "threading")
        elif n.rule == "TensorE":
            b, body = ch
            t0, t1 = ctx_lookup(body.gamma, e.w0), ctx_lookup(body.gamma, e.w1)
            check(t0 is not None and t1 is not None
                  and alpha_eq(T(b.ty), tensor(T(t0), T(t1))), n, "pattern type")
            check(ctx_names(body.gamma) == ctx_names(b.remaining) + [e.w0, e.w1], n, "threading")
            check(alpha_eq(T(body.ty), ty), n, "result type")
            check(ctx_names(n.remaining) == ctx_names(ctx_remove(body.remaining, e.w0, e.w1)),
                  n, "Θ - w0 - w1")
        elif n.rule == "WithI":
            l, r = ch
            check(alpha_eq(ty, with_(T(l.ty), T(r.ty))), n, "with type")
            check(ctx_names(l.gamma) == ctx_names(n.gamma) == ctx_names(r.gamma), n, "shared context")
            both = [x for x in ctx_names(r.remaining) if x in ctx_names(l.remaining)]
            check(ctx_names(n.remaining) == both, n, "Δ ∩ Θ")
        elif n.rule in ("WithEL", "WithER"):
            (c,) = ch
            ct = T(c.ty)
            check(isinstance(ct, Op) and ct.op is OpKind.WITH
                  and alpha_eq(ct.left if n.rule == "WithEL" else ct.right, ty), n, "projection")
        elif n.rule in ("PlusIL", "PlusIR"):
            (c,) = ch
            check(isinstance(ty, Op) and ty.op is OpKind.PLUS
                  and alpha_eq(ty.left if n.rule == "PlusIL" else ty.right, T(c.ty)), n, "injection")
        elif n.rule == "PlusE":
            s, b0, b1 = ch
            a0, a1 = ctx_lookup(b0.gamma, e.w0), ctx_lookup(b1.gamma, e.w1)
            check(a0 is not None and a1 is not None
                  and alpha_eq(T(s.ty), plus(T(a0), T(a1))), n, "scrutinee type")
            check(ctx_names(b0.gamma) == ctx_names(s.remaining) + [e.w0], n, "branch 0 context")
            check(ctx_names(b1.gamma) == ctx_names(s.remaining) + [e.w1], n, "branch 1 context")
            check(alpha_eq(T(b0.ty), ty) and alpha_eq(T(b1.ty), ty), n, "branch types")
            left = ctx_names(ctx_remove(b0.remaining, e.w0))
            both = [x for x in ctx_names(ctx_remove(b1.remaining, e.w1)) if x in left]
            check(ctx_names(n.remaining) == both, n, "(Θ - w0) ∩ (Ξ - w1)")
        elif n.rule == "ZeroE":
            (c,) = ch
            check(T(c.ty) == ZERO, n, "scrutinee must be 0")
        elif n.rule == "MuI":
            (c,) = ch
            check(isinstance(ty, Mu) and alpha_eq(T(c.ty), unroll(ty))
                  and alpha_eq(ty, T(e.annotation)), n, "fold")
        elif n.rule in ("MuEI", "MuEE"):
            (c,) = ch
            ct = T(c.ty)
            check(isinstance(ct, Mu) and alpha_eq(unroll(ct), ty), n, "unfold")
            if n.rule == "MuEE":
                check(alpha_eq(ct, T(e.annotation)), n, "annotation")
        elif n.rule == "Fix":
            (c,) = ch
            check(ctx_names(c.gamma) == [e.binder]
                  and alpha_eq(T(c.gamma[0][1]), bang_of(ty)), n, "fixpoint variable")
            check(alpha_eq(T(c.ty), ty), n, "body type")
            check(same_ctx(n.gamma, n.remaining), n, "Fix consumes nothing")
        elif n.rule == "BangI":
            (c,) = ch
            check(isinstance(ty, Mu) and e.name in env
                  and is_instance(env[e.name].scheme, T(ty.body.left)), n, "bang type")
            check(same_ctx(n.gamma, n.remaining), n, "!I consumes nothing")
        for c in ch:
            go(c)

    go(trace)
    return problems
