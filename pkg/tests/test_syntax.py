from hypothesis import given, settings
from hypothesis import strategies as st

from afflang.parser import parse_type
from afflang.syntax import (
    ONE,
    ZERO,
    Mu,
    TVar,
    alpha_eq,
    apply_subst,
    bang_of,
    compose_all,
    compose_subst,
    ctx_apply,
    ctx_remove,
    fresh_name,
    free_type_vars,
    free_type_vars_ordered,
    is_bang,
    lolli,
    normalize_type,
    plus,
    pretty_type,
    tensor,
    unroll,
    with_,
)

from gen import POOL, substitutions, types

a, b, c, d = TVar("a"), TVar("b"), TVar("c"), TVar("d")


def test_free_type_vars():
    assert free_type_vars(a) == {"a"}
    assert free_type_vars(ONE) == set()
    assert free_type_vars(Mu("a", tensor(TVar("t"), a))) == {"t"}
    assert free_type_vars_ordered(lolli(b, tensor(a, b))) == ["b", "a"]


def test_apply_subst_examples():
    assert apply_subst({"a": ONE}, a) == ONE
    assert apply_subst({"a": ONE}, Mu("a", a)) == Mu("a", a)
    assert apply_subst({"a": ONE}, lolli(a, b)) == lolli(ONE, b)


def test_apply_subst_avoids_capture():
    t = Mu("a", tensor(b, a))
    out = apply_subst({"b": a}, t)
    assert isinstance(out, Mu) and out.binder != "a"
    assert alpha_eq(out, Mu("a2", tensor(a, TVar("a2"))))
    assert free_type_vars(out) == {"a"}


def test_compose_examples():
    assert compose_subst({}, {"a": ONE}) == {"a": ONE}
    assert compose_subst({"b": ZERO}, {"a": b}) == {"a": ZERO, "b": ZERO}
    assert compose_subst({"a": ONE}, {"a": ZERO}) == {"a": ZERO}
    s1, s2, s3 = {"a": b}, {"b": c}, {"c": ONE}
    assert apply_subst(compose_all(s3, s2, s1), a) == ONE
    assert apply_subst(compose_all(s1, s2, s3), a) == b


def test_alpha_eq_examples():
    assert alpha_eq(Mu("a", a), Mu("b", b))
    assert not alpha_eq(Mu("a", c), Mu("b", d))
    assert alpha_eq(a, a)
    assert not alpha_eq(Mu("a", tensor(a, b)), Mu("b", tensor(b, b)))
    assert not alpha_eq(Mu("a", Mu("b", a)), Mu("a", Mu("b", b)))


def test_bang_of_examples():
    assert bang_of(ONE) == Mu("a", tensor(ONE, a))
    bv = bang_of(a)
    assert bv.binder != "a" and bv == Mu("b", tensor(a, b))
    assert alpha_eq(bang_of(bang_of(ONE)), Mu("b", tensor(Mu("a", tensor(ONE, a)), b)))
    assert is_bang(bang_of(lolli(a, b)))
    assert not is_bang(Mu("a", tensor(a, a)))


def test_unroll():
    nat = Mu("n", plus(ONE, TVar("n")))
    assert unroll(nat) == plus(ONE, nat)


def test_fresh_name():
    assert fresh_name([]) == "a"
    assert fresh_name(["a", "b"]) == "c"
    assert fresh_name(["x"], base="x") == "x1"
    assert fresh_name(["x1", "x"], base="x1") == "x2"


def test_normalize_and_print():
    t = lolli(TVar("%3"), tensor(TVar("%1"), TVar("%3")))
    assert pretty_type(normalize_type(t)) == "a -o b * a"
    assert pretty_type(lolli(lolli(a, b), c)) == "(a -o b) -o c"
    assert pretty_type(tensor(plus(a, b), with_(c, d))) == "(a + b) * (c & d)"
    assert pretty_type(bang_of(tensor(a, b))) == "!(a * b)"


def test_context_helpers():
    ctx = (("x", a), ("y", b), ("z", c))
    assert ctx_remove(ctx, "y") == (("x", a), ("z", c))
    assert ctx_apply({"b": ONE}, ctx) == (("x", a), ("y", ONE), ("z", c))


@given(types())
def test_empty_substitution_is_identity(t):
    assert apply_subst({}, t) == t
    assert alpha_eq(t, apply_subst({}, t))


@settings(max_examples=300)
@given(substitutions(), substitutions(), types())
def test_composition_law(s1, s2, t):
    lhs = apply_subst(compose_subst(s1, s2), t)
    rhs = apply_subst(s1, apply_subst(s2, t))
    assert alpha_eq(lhs, rhs)


@given(st.dictionaries(st.sampled_from(POOL), st.sampled_from([ONE, ZERO]), max_size=4), types())
def test_ground_bindings_eliminated(s, t):
    assert not free_type_vars(apply_subst(s, t)) & set(s)


@given(types(), types(), types())
def test_alpha_eq_is_equivalence(t1, t2, t3):
    assert alpha_eq(t1, t1)
    assert alpha_eq(t1, t2) == alpha_eq(t2, t1)
    if alpha_eq(t1, t2) and alpha_eq(t2, t3):
        assert alpha_eq(t1, t3)


@given(types(), st.sampled_from(POOL), st.sampled_from(POOL))
def test_renaming_a_binder_preserves_alpha_class(t, old, new):
    t = Mu(old, t)
    if new in free_type_vars(t):
        return
    renamed = Mu(new, apply_subst({old: TVar(new)}, t.body))
    assert alpha_eq(t, renamed)


@given(types())
def test_print_parse_round_trip(t):
    assert alpha_eq(parse_type(pretty_type(t)), t)


@given(types())
def test_normalize_is_idempotent(t):
    n = normalize_type(t)
    assert normalize_type(n) == n
