"""Checking whole programs and loading the prelude."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Union

from .errors import AffError
from .infer import InferenceResult, check_global_def
from .parser import DefDecl, SourceProgram, TypeDecl, parse_program
from .syntax import GlobalEnv


@dataclass
class DeclOutcome:
    decl: Union[DefDecl, TypeDecl]
    result: Optional[InferenceResult] = None
    error: Optional[AffError] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def read_resource(name: str) -> str:
    return resources.files("afflang").joinpath(name).read_text(encoding="utf-8")


def check_program(prog: SourceProgram, env: GlobalEnv,
                  keep_going: bool = False) -> tuple[GlobalEnv, list[DeclOutcome]]:
    """Check declarations in order, extending ``env``.

    With ``keep_going`` a failing definition is reported and skipped;
    otherwise the first error is raised.
    """
    outcomes = []
    for d in prog.decls:
        if isinstance(d, TypeDecl):
            env = env.with_synonym(d.name, d.type)
            outcomes.append(DeclOutcome(d))
            continue
        try:
            env = check_global_def(env, d.name, d.type, d.body)
        except AffError as err:
            if not keep_going:
                raise
            outcomes.append(DeclOutcome(d, error=err))
            continue
        outcomes.append(DeclOutcome(d, result=env[d.name].result))
    return env, outcomes


def load_source(text: str, env: Optional[GlobalEnv] = None) -> GlobalEnv:
    env = env if env is not None else GlobalEnv()
    prog = parse_program(text, env.synonyms, env.names())
    return check_program(prog, env)[0]


@functools.lru_cache(maxsize=None)
def prelude_env() -> GlobalEnv:
    """Nat, Bool, Zero, Succ, Plus, Dup!, F and friends, type checked."""
    return load_source(read_resource("prelude.aff"))
