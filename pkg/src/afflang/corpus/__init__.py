"""Executable fixtures: the reference programs and their failing duals.

``manifest.json`` lists, for each positive fixture, the definition and its
expected principal type (and optionally an expression to evaluate), and for
each negative fixture the error class it must raise.  Every fixture file is
checked on top of the prelude.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Optional

from ..errors import AffError, TypeCheckError
from ..evaluator import Evaluator, render_value
from ..infer import infer_closed
from ..parser import parse_program, parse_term, parse_type
from ..program import check_program, prelude_env, read_resource
from ..syntax import GlobalEnv, Type, alpha_eq, normalize_type


@dataclass(frozen=True)
class Positive:
    file: str
    name: str
    type: str
    eval: Optional[dict] = None


@dataclass(frozen=True)
class Negative:
    file: str
    expect: str
    rule: Optional[str] = None


def manifest() -> dict:
    return json.loads(read_resource("corpus/manifest.json"))


def source(file: str) -> str:
    if file == "prelude.aff":
        return read_resource("prelude.aff")
    return read_resource(f"corpus/{file}")


def corpus_files() -> list[str]:
    root = resources.files("afflang").joinpath("corpus")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".aff"))


def positive_suite() -> list[Positive]:
    return [Positive(**entry) for entry in manifest()["positive"]]


def negative_suite() -> list[Negative]:
    return [Negative(**entry) for entry in manifest()["negative"]]


def load(file: str) -> GlobalEnv:
    """The prelude extended with ``file`` (which must check)."""
    env = prelude_env()
    if file == "prelude.aff":
        return env
    prog = parse_program(source(file), env.synonyms, env.names())
    return check_program(prog, env)[0]


def same_scheme(t1: Type, t2: Type) -> bool:
    """Alpha-equivalence up to renaming of free variables too."""
    return alpha_eq(normalize_type(t1), normalize_type(t2))


def check_positive(p: Positive, env: Optional[GlobalEnv] = None):
    """Return ``(inferred type, expected type)`` for a positive fixture."""
    env = env or load(p.file)
    inferred = env[p.name].result.ty
    return inferred, parse_type(p.type, env.synonyms)


def error_classes(err: AffError) -> set[str]:
    if isinstance(err, TypeCheckError):
        return err.classes()
    return {c.__name__ for c in type(err).__mro__ if issubclass(c, AffError)}


def run_negative(n: Negative) -> AffError:
    """Check a negative fixture and return the error it raised."""
    env = prelude_env()
    try:
        prog = parse_program(source(n.file), env.synonyms, env.names())
        check_program(prog, env)
    except AffError as err:
        return err
    raise AssertionError(f"{n.file} type checked but should fail with {n.expect}")


def evaluate(p: Positive, env: Optional[GlobalEnv] = None) -> Any:
    """Run a fixture's ``eval`` entry: an int, a list of stream heads, or a rendering."""
    env = env or load(p.file)
    job = p.eval
    term = parse_term(job["expr"], env.names(), env.synonyms, strict=True)
    infer_closed(env, term)
    ev = Evaluator(env)
    show = ev.decode_nat if job.get("nat") else render_value
    if job.get("take") is not None:
        return [show(v) for v in ev.take_bang(term, job["take"])]
    return show(ev.whnf(term))
