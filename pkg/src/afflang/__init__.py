"""An affine, lazy lambda calculus with Hindley-Milner style inference.

The usual entry points::

    from afflang import prelude_env, parse_term, infer_closed, eval_nat
"""

from .errors import AffError, EvalError, ParseError, TypeCheckError, UnifyError
from .evaluator import Evaluator, eval_nat, eval_whnf, render_value, take_bang
from .infer import FreshSupply, check_global_def, infer, infer_closed, instantiate
from .parser import parse_program, parse_term, parse_type
from .program import check_program, load_source, prelude_env
from .syntax import alpha_eq, apply_subst, bang_of, compose_subst, pretty_term, pretty_type
from .unify import mgu, mgu_to

__all__ = [
    "AffError", "EvalError", "ParseError", "TypeCheckError", "UnifyError",
    "Evaluator", "eval_nat", "eval_whnf", "render_value", "take_bang",
    "FreshSupply", "check_global_def", "infer", "infer_closed", "instantiate",
    "parse_program", "parse_term", "parse_type",
    "check_program", "load_source", "prelude_env",
    "alpha_eq", "apply_subst", "bang_of", "compose_subst", "pretty_term", "pretty_type",
    "mgu", "mgu_to",
]
