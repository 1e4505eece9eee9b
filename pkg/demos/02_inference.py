"""
Inference with an affine context
================================

Every variable may be used at most once.  Inference threads the linear
context through each term and reports which rule produced each judgment.
"""

from afflang import infer_closed, parse_term, prelude_env, pretty_type
from afflang.errors import TypeCheckError
from afflang.infer import display_subst, unused_hypotheses
from afflang.syntax import normalize_type

env = prelude_env()


def infer_text(text):
    r = infer_closed(env, parse_term(text, env.names(), env.synonyms, strict=True))
    return r, pretty_type(normalize_type(r.ty), env.synonyms)


# Weakening is fine: the argument is simply dropped.
r, ty = infer_text("\\w. tt")
print("\\w. tt :", ty, "   unused:", unused_hypotheses(r.trace))

# Contraction is not: the second use finds w already consumed.
for text in ["\\w. w (*) w", "\\w. w w"]:
    try:
        infer_text(text)
    except TypeCheckError as err:
        print(f"{text} rejected: {err}")

# The with-pair offers a choice, so both sides may use the same hypothesis.
print("\\x. x (&) x :", infer_text("\\x. x (&) x")[1])

# A derivation tree, with inference variables renamed for reading.
r, ty = infer_text("\\p. let a * b = p in b (*) a")
print(r.trace.to_text(display_subst(r), env.synonyms))

# The prelude's recursive definitions get their declared types.
for name in ["Plus", "Dup!", "F"]:
    print(f"{name} : {pretty_type(normalize_type(env[name].result.ty), env.synonyms)}")
