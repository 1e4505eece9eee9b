"""
Lazy streams as the ! modality
==============================

`!T` is the infinite stream `mu a. T * a`.  Call-by-need evaluation only
builds as much of a stream as is demanded, so stream-duplicating programs
such as `Dup!` terminate on finite prefixes.
"""

from afflang import Evaluator, infer_closed, parse_term, prelude_env, render_value

env = prelude_env()


def term(text):
    e = parse_term(text, env.names(), env.synonyms, strict=True)
    infer_closed(env, e)  # only well-typed programs are run
    return e


def numeral(k):
    return "Zero" if k == 0 else f"Succ ({numeral(k - 1)})"


ev = Evaluator(env)
print("Plus 3 4 =", ev.nat(term(f"Plus ({numeral(3)}) ({numeral(4)})")))

# !Zero is an infinite stream of zeros; ask for the first five.
print("!Zero:", [ev.decode_nat(v) for v in ev.take_bang(term("!Zero"), 5)])

# Dup! splits one stream into two.
pair = ev.whnf(term("Dup! !Zero"))
left = ev.stream_heads(pair.left.force(), 3)
right = ev.stream_heads(pair.right.force(), 3)
print("Dup! !Zero:", [ev.decode_nat(v) for v in left], [ev.decode_nat(v) for v in right])

# F turns a stream consumer into a stream transformer.
heads = ev.take_bang(term("F !Zero"), 2)
print("F !Zero:", [render_value(v) for v in heads])

# A with-pair is a choice: the branch not taken is never evaluated, even
# when evaluating it would never finish.
ev = Evaluator(env)
v = ev.whnf(term("Zero (&) fix p. let h * t = unfold [!Nat] p in h"))
print("chosen:", ev.decode_nat(v.left.force()), "  other branch forced:", v.right.forced)
