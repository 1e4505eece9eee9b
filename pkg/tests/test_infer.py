import pytest
from hypothesis import HealthCheck, given, settings

from afflang.errors import (
    AnnotationRequired,
    ScopeEscape,
    TypeCheckError,
    UnboundVariable,
    UnificationFailure,
)
from afflang.infer import (
    RULES,
    FreshSupply,
    check_global_def,
    infer,
    infer_closed,
    instantiate,
    unused_hypotheses,
    validate,
)
from afflang.parser import parse_term, parse_type
from afflang.program import load_source, prelude_env
from afflang.syntax import (
    ONE,
    ZERO,
    BangGlobal,
    GlobalRef,
    Lam,
    TVar,
    Var,
    alpha_eq,
    ctx_names,
    normalize_type,
    pretty_term,
    pretty_type,
    tensor,
)

from gen import GAMMA, terms

ENV = prelude_env()
EXTRA = load_source("""
def id : a -o a = \\x. x
def E : 1 = tt
def ones : !1 = !E
""", ENV)


def ty(text):
    return parse_type(text, ENV.synonyms)


def ctx(**hyps):
    return tuple((n, ty(t)) for n, t in hyps.items())


def run(text, gamma=(), env=EXTRA):
    term = parse_term(text, env.names(), env.synonyms)
    return infer(env, gamma, term, FreshSupply())


def shows(r):
    return pretty_type(normalize_type(r.ty), ENV.synonyms)


def fails(text, gamma=(), env=EXTRA):
    with pytest.raises(TypeCheckError) as info:
        run(text, gamma, env)
    return info.value


# -- Var and Intro ---------------------------------------------------------------

def test_var():
    r = run("w", ctx(w="1"))
    assert r.remaining == () and r.ty == ONE and r.subst == {}
    r = run("y", ctx(x="1", y="0"))
    assert r.remaining == ctx(x="1") and r.ty == ZERO
    assert isinstance(fails("w"), UnboundVariable)


def test_global_instantiates():
    r = run("id")
    assert pretty_type(r.ty) == "%0 -o %0"
    r = run("Zero", ctx(x="1"))
    assert r.ty == ty("Nat") and r.remaining == ctx(x="1")
    with pytest.raises(UnboundVariable):
        infer(EXTRA, (), GlobalRef("missing"))


# -- lambda and application ----------------------------------------------------

def test_lambda():
    assert pretty_type(run("\\w. w").ty) == "%0 -o %0"
    r = run("\\w. tt")
    assert pretty_type(r.ty) == "%0 -o 1"
    assert unused_hypotheses(r.trace) == ["w"]
    err = fails("\\w. w (*) w")
    assert isinstance(err, UnboundVariable) and err.rule == "Var"
    assert err.span == (10, 11)


def test_application():
    assert run("(\\w. w) tt").ty == ONE
    r = run("f x", ctx(f="1 -o 0", x="1"))
    assert r.ty == ZERO and r.remaining == ()
    err = fails("tt tt")
    assert isinstance(err, UnificationFailure) and err.rule == "LolliE"
    assert {"UnifyError", "ShapeMismatch"} <= err.classes()


def test_contraction_and_weakening():
    assert isinstance(fails("\\w. w (*) w"), UnboundVariable)
    assert isinstance(fails("\\w. w w"), UnboundVariable)
    assert shows(run("\\w. tt")) == "a -o 1"
    assert shows(run("\\x. \\y. x")) == "a -o b -o a"


# -- tensor ----------------------------------------------------------------------

def test_tensor():
    r = run("x (*) y", ctx(x="1", y="0"))
    assert r.ty == tensor(ONE, ZERO) and r.remaining == ()
    r = run("let a * b = p in a", ctx(p="1 * 0"))
    assert r.ty == ONE and r.remaining == ()
    assert unused_hypotheses(r.trace) == ["b"]
    err = fails("let a * b = tt in a")
    assert err.rule == "TensorE" and "ConstMismatch" not in err.classes()
    assert "ShapeMismatch" in err.classes()


# -- with --------------------------------------------------------------------------

def test_with_shares_context():
    r = run("x (&) x", ctx(x="1"))
    assert shows(r) == "1 & 1" and r.remaining == ()
    r = run("x (&) tt", ctx(x="1", y="0"))
    assert shows(r) == "1 & 1" and r.remaining == ctx(y="0")
    assert run("fst (tt (&) tt)").ty == ONE
    assert run("snd (tt (&) Zero)").ty == ty("Nat")


def test_with_projection_types():
    assert shows(run("\\p. fst p")) == "a & b -o a"
    assert shows(run("\\p. snd p")) == "a & b -o b"


# -- unit, plus, zero ------------------------------------------------------------

def test_unit():
    r = run("tt")
    assert r.ty == ONE and r.subst == {}
    r = run("tt", ctx(x="0"))
    assert r.remaining == ctx(x="0") and r.subst == {}


def test_case():
    assert run("case inl tt of inl a => a | inr b => tt").ty == ONE
    err = fails("case inl tt of inl a => a | inr b => tt (*) tt")
    assert err.rule == "PlusE"
    r = run("case inl tt of inl a => x | inr b => x", ctx(x="1"))
    assert r.ty == ONE and r.remaining == ()


def test_case_intersects_leftovers():
    r = run("case s of inl a => x | inr b => y", ctx(s="1 + 1", x="1", y="1"))
    assert r.ty == ONE and r.remaining == ()
    r = run("case s of inl a => x | inr b => x", ctx(s="1 + 1", x="1", y="0"))
    assert r.remaining == ctx(y="0")


def test_injections_leave_other_side_open():
    assert shows(run("inl tt")) == "1 + a"
    assert shows(run("inr tt")) == "a + 1"


def test_absurd():
    r = run("absurd x", ctx(x="0"))
    assert isinstance(r.ty, TVar)
    assert fails("absurd tt").rule == "ZeroE"
    assert isinstance(run("(\\w. absurd w) x", ctx(x="0")).ty, TVar)


# -- recursive types -------------------------------------------------------------

def test_fold():
    assert run("fold [Nat] (inl tt)").ty == ty("Nat")
    err = fails("fold [Nat] tt")
    assert err.rule == "MuI" and "ShapeMismatch" in err.classes()
    assert alpha_eq(run("fold [!1] (tt (*) ones)").ty, ty("!1"))


def test_unfold():
    r = run("unfold n", ctx(n="Nat"))
    assert r.ty == ty("1 + Nat") and r.trace.rule == "MuEI"
    err = fails("\\xs. unfold xs")
    assert isinstance(err, AnnotationRequired)
    r = run("\\xs. unfold [!t] xs")
    assert shows(r) == "!a -o a * !a" and r.trace.children[0].rule == "MuEE"


def test_unfold_of_a_non_recursive_type():
    err = fails("unfold tt")
    assert err.rule == "MuEI" and "ShapeMismatch" in err.classes()


# -- fix and ! -------------------------------------------------------------------

def test_fix_closed_stream():
    r = run("fix xs. fold [!1] (tt (*) let h * t = unfold xs in h)")
    assert alpha_eq(r.ty, ty("!1"))


def test_fix_rule_rejects_self_typed_stream():
    # The fixpoint variable ranges over copies of the result, so using it as
    # the tail of the stream would need !1 = 1.
    err = fails("fix xs. fold [!1] (tt (*) xs)")
    assert err.rule == "Fix" and "ShapeMismatch" in err.classes()


def test_fix_withholds_ambient_context():
    err = fails("fix p. y", ctx(y="1"))
    assert isinstance(err, UnboundVariable) and "y" in err.message
    r = run("fix p. tt", ctx(y="1"))
    assert r.remaining == ctx(y="1")


def test_fix_plus():
    assert pretty_type(ENV["Plus"].result.ty, ENV.synonyms) == "Nat -o Nat -o Nat"


def test_bang_intro():
    r = run("!E")
    assert alpha_eq(r.ty, ty("!1")) and r.trace.rule == "BangI"
    assert r.trace.children[0].rule == "Fix"
    assert shows(run("!id")) == "!(a -o a)"
    with pytest.raises(UnboundVariable):
        infer(EXTRA, (), BangGlobal("missing"))
    r = run("!E", ctx(x="0"))
    assert r.remaining == ctx(x="0")


# -- instantiate and global definitions ---------------------------------------------

def test_instantiate():
    assert pretty_type(instantiate(ty("a -o a"), FreshSupply())) == "%0 -o %0"
    assert instantiate(ty("Nat"), FreshSupply()) == ty("Nat")
    assert pretty_type(instantiate(ty("a -o mu x. a * x"), FreshSupply())) == "%0 -o !%0"


def test_check_global_def():
    env = check_global_def(ENV, "Zero2", ty("Nat"), parse_term("fold [Nat] (inl tt)", synonyms=ENV.synonyms))
    assert "Zero2" in env
    succ = parse_term("\\n. fold [Nat] (inr n)", synonyms=ENV.synonyms)
    assert "Succ2" in check_global_def(ENV, "Succ2", ty("Nat -o Nat"), succ)
    with pytest.raises(UnificationFailure) as info:
        check_global_def(ENV, "bad", ty("1 -o 0"), parse_term("\\x. x"))
    assert "UnifyError" in info.value.classes()
    with pytest.raises(UnificationFailure) as info:
        check_global_def(ENV, "notid", ty("a -o a"), parse_term("\\x. tt"))
    assert "DirectionError" in info.value.classes()


def test_declared_type_may_be_more_specific():
    env = check_global_def(ENV, "idNat", ty("Nat -o Nat"), parse_term("\\x. x"))
    assert env["idNat"].scheme == ty("Nat -o Nat")


def test_binder_shadowing_is_rejected_at_api_level():
    with pytest.raises(ScopeEscape):
        infer(ENV, ctx(x="1"), Lam("x", Var("x")))


# -- traces --------------------------------------------------------------------------

def test_trace_rule_names_are_known():
    for d in ENV.defs.values():
        assert d.result.trace.rules() <= set(RULES)


def test_trace_text_and_json():
    r = run("\\w. tt")
    text = r.trace.to_text(r.subst)
    assert text.splitlines()[0] == "LolliI: . \\ . |- \\w. tt : %0 -o 1"
    assert text.splitlines()[1] == "  OneI: w : %0 \\ w : %0 |- tt : 1"
    js = r.trace.to_json(r.subst)
    assert js["rule"] == "LolliI" and js["discarded"] == ["w"]
    assert js["children"][0]["rule"] == "OneI"


def test_validate_accepts_prelude():
    for d in ENV.defs.values():
        assert validate(d.result.trace, d.result.subst, ENV) == []


def test_validate_catches_a_wrong_type():
    r = run("x (*) y", ctx(x="1", y="0"))
    bad = r.trace.__class__(r.trace.rule, r.trace.term, r.trace.gamma, r.trace.remaining,
                            tensor(ZERO, ZERO), r.trace.children)
    assert validate(bad, r.subst, EXTRA)


def test_inference_is_deterministic():
    for name in ("Plus", "Dup!", "F"):
        d = ENV[name]
        r1, r2 = infer_closed(ENV, d.body), infer_closed(ENV, d.body)
        assert r1.ty == r2.ty
        assert r1.trace.to_text(r1.subst) == r2.trace.to_text(r2.subst)


# -- properties over random terms -------------------------------------------------

def _attempt(e):
    try:
        return infer(ENV, GAMMA, e, FreshSupply())
    except TypeCheckError:
        return None


@settings(max_examples=300, suppress_health_check=[HealthCheck.too_slow])
@given(terms())
def test_random_terms(e):
    r = _attempt(e)
    if r is None:
        return
    assert set(ctx_names(r.remaining)) <= set(ctx_names(GAMMA))
    assert validate(r.trace, r.subst, ENV) == []
    again = infer(ENV, GAMMA, e, FreshSupply())
    assert again.ty == r.ty
    assert again.trace.to_text(again.subst) == r.trace.to_text(r.subst)
    reparsed = parse_term(pretty_term(e), ENV.names(), ENV.synonyms)
    r3 = infer(ENV, GAMMA, reparsed, FreshSupply())
    assert alpha_eq(normalize_type(r3.ty), normalize_type(r.ty))
