"""
Unifying types
==============

Most general unifiers for the type language, including recursive types and
the directional variant used for annotations.
"""

from afflang import mgu, mgu_to, parse_type, pretty_type, apply_subst
from afflang.errors import UnifyError


def show(s):
    return "{" + ", ".join(f"{k} := {pretty_type(v)}" for k, v in sorted(s.items())) + "}"


# Two function types meet in the middle.
s = mgu(parse_type("a -o 1"), parse_type("0 -o b"))
print("a -o 1  ~  0 -o b     ", show(s))

# Recursive types unify structurally, up to the name of their binder.
s = mgu(parse_type("mu a. 1 * a"), parse_type("mu b. c * b"))
print("!1  ~  !c             ", show(s))

# Failures carry the offending subterms and a readable message.
for left, right in [("1", "0"), ("a", "a * 1"), ("mu a. a * b", "mu b. a * b")]:
    try:
        mgu(parse_type(left), parse_type(right))
    except UnifyError as err:
        print(f"{left}  ~  {right}".ljust(22), type(err).__name__ + ":", err.message)

# mgu_to refuses to instantiate the right-hand side: a declared type may be
# more specific than the inferred one, never more general.
print(show(mgu_to(parse_type("a -o a"), parse_type("1 -o 1"))))
try:
    mgu_to(parse_type("1 -o 1"), parse_type("a -o a"))
except UnifyError as err:
    print(type(err).__name__ + ":", err.message)

# Applying a unifier really does equate the two sides.
t1, t2 = parse_type("a * (b -o c)"), parse_type("(c -o 1) * d")
s = mgu(t1, t2)
print(pretty_type(apply_subst(s, t1)), "==", pretty_type(apply_subst(s, t2)))
