"""Concrete syntax.

Types, lowest to highest precedence (all binary connectives associate to
the right)::

    T -o T      linear implication   (also ⊸)
    T + T       plus                 (also ⊕)
    T & T       with
    T * T       tensor               (also ⊗)
    !T          the stream synonym mu a. T * a
    1  0  a  Name  (T)  mu a. T

Terms::

    \\w. e   fix p. e   let w0 * w1 = e0 in e1
    case e of inl w0 => e0 | inr w1 => e1
    e0 (*) e1   e0 (&) e1          tensor / with pairs, non-associative
    f a b                          application, left-associative
    inl e  inr e  fst e  snd e  absurd e  fold [T] e  unfold e  unfold [T] e
    tt  x  Name  !Name  (e)

Programs are sequences of ``type Name = T`` and ``def name : T = e``.
Comments run from ``--`` to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

from .errors import DuplicateName, ParseError, UnknownName
from .syntax import (
    ONE,
    ZERO,
    Absurd,
    App,
    BangGlobal,
    Case,
    Fix,
    Fold,
    Fst,
    GlobalRef,
    Inl,
    Inr,
    Lam,
    LetTensor,
    Mu,
    Op,
    OpKind,
    Snd,
    Term,
    TensorPair,
    TVar,
    Type,
    Unfold,
    Unit,
    Var,
    WithPair,
    bang_of,
    fresh_name,
)

KEYWORDS = {
    "let", "in", "case", "of", "inl", "inr", "fst", "snd", "tt", "absurd",
    "fold", "unfold", "fix", "mu", "def", "type",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<sym>\(\*\)|\(&\)|-o|=>|[⊸⊗⊕λμ\\()\[\].*+&!|=:])
  | (?P<num>[01](?![0-9A-Za-z_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*!?)
""", re.VERBOSE)

_ALIASES = {"⊸": "-o", "⊗": "*", "⊕": "+", "λ": "\\", "μ": "mu"}


@dataclass(frozen=True)
class Token:
    kind: str  # "sym", "num", "ident", "kw", "eof"
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             (pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            tok = _ALIASES.get(m.group(), m.group())
            if kind == "ident" and tok in KEYWORDS or tok == "mu":
                kind = "kw"
            out.append(Token(kind, tok, m.start(), m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


@dataclass(frozen=True)
class TypeDecl:
    name: str
    type: Type
    span: tuple


@dataclass(frozen=True)
class DefDecl:
    name: str
    type: Type
    body: Term
    span: tuple


Decl = Union[TypeDecl, DefDecl]


@dataclass
class SourceProgram:
    decls: list[Decl] = field(default_factory=list)

    @property
    def synonyms(self) -> dict[str, Type]:
        return {d.name: d.type for d in self.decls if isinstance(d, TypeDecl)}

    @property
    def defs(self) -> list[DefDecl]:
        return [d for d in self.decls if isinstance(d, DefDecl)]


class _Parser:
    def __init__(self, text: str, synonyms: Optional[Mapping[str, Type]] = None,
                 globals: Optional[Iterable[str]] = None, strict: bool = False):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.synonyms = dict(synonyms or {})
        self.globals = set(globals or ())
        self.strict = strict
        self.avoid = {t.text for t in self.toks if t.kind == "ident"}
        self.scope: dict[str, str] = {}

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None, cls=ParseError) -> ParseError:
        tok = tok or self.tok
        found = repr(tok.text) if tok.text else "end of input"
        return cls(f"{msg} (found {found})",
                   (tok.start, max(tok.end, tok.start)))

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "ident"

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}")
        return self.advance()

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise self.error("unexpected input")

    # -- types ---------------------------------------------------------------

    _BINARY = [("-o", OpKind.LOLLI), ("+", OpKind.PLUS), ("&", OpKind.WITH), ("*", OpKind.TENSOR)]

    def type_(self, level: int = 0) -> Type:
        if level == len(self._BINARY):
            return self.type_prefix()
        left = self.type_(level + 1)
        sym, op = self._BINARY[level]
        if self.at(sym):
            self.advance()
            return Op(op, left, self.type_(level))
        return left

    def type_prefix(self) -> Type:
        if self.at("!"):
            self.advance()
            return bang_of(self.type_prefix())
        if self.at("mu"):
            self.advance()
            binder = self.ident("type variable")
            if not binder.text[0].islower():
                raise self.error("recursive type binder must be lowercase", binder)
            self.expect(".")
            return Mu(binder.text, self.type_())
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return ONE if tok.text == "1" else ZERO
        if self.at("("):
            self.advance()
            t = self.type_()
            self.expect(")")
            return t
        if tok.kind == "ident":
            self.advance()
            if tok.text[0].isupper():
                if tok.text not in self.synonyms:
                    raise self.error(f"unknown type {tok.text}", tok, UnknownName)
                return self.synonyms[tok.text]
            return TVar(tok.text)
        raise self.error("expected a type")

    # -- terms ---------------------------------------------------------------

    def _bind(self, name_tok: Token) -> tuple[str, Optional[str]]:
        """Bring a binder into scope, renaming it if it shadows; returns (internal, saved)."""
        name = name_tok.text
        internal = name
        if name in self.scope:
            internal = fresh_name(self.avoid, base=name)
        self.avoid.add(internal)
        saved = self.scope.get(name)
        self.scope[name] = internal
        return internal, saved

    def _unbind(self, name: str, saved: Optional[str]) -> None:
        if saved is None:
            del self.scope[name]
        else:
            self.scope[name] = saved

    def _span(self, start: Token) -> tuple:
        return (start.start, self.toks[self.i - 1].end)

    def term(self) -> Term:
        start = self.tok
        if self.at("\\"):
            self.advance()
            w = self.ident("binder")
            self.expect(".")
            internal, saved = self._bind(w)
            body = self.term()
            self._unbind(w.text, saved)
            return Lam(internal, body, span=self._span(start))
        if self.at("fix"):
            self.advance()
            p = self.ident("binder")
            self.expect(".")
            internal, saved = self._bind(p)
            body = self.term()
            self._unbind(p.text, saved)
            return Fix(internal, body, span=self._span(start))
        if self.at("let"):
            self.advance()
            w0 = self.ident("binder")
            self.expect("*")
            w1 = self.ident("binder")
            if w0.text == w1.text:
                raise self.error(f"{w0.text} bound twice in one pattern", w1, DuplicateName)
            self.expect("=")
            bound = self.term()
            self.expect("in")
            i0, s0 = self._bind(w0)
            i1, s1 = self._bind(w1)
            body = self.term()
            self._unbind(w1.text, s1)
            self._unbind(w0.text, s0)
            return LetTensor(i0, i1, bound, body, span=self._span(start))
        if self.at("case"):
            self.advance()
            scrutinee = self.term()
            self.expect("of")
            self.expect("inl")
            w0 = self.ident("binder")
            self.expect("=>")
            i0, s0 = self._bind(w0)
            b0 = self.term()
            self._unbind(w0.text, s0)
            self.expect("|")
            self.expect("inr")
            w1 = self.ident("binder")
            self.expect("=>")
            i1, s1 = self._bind(w1)
            b1 = self.term()
            self._unbind(w1.text, s1)
            return Case(scrutinee, i0, b0, i1, b1, span=self._span(start))
        return self.pair()

    def _starts_binding_form(self) -> bool:
        return any(self.at(k) for k in ("\\", "fix", "let", "case"))

    def pair(self) -> Term:
        start = self.tok
        left = self.app()
        for sym, cls in (("(*)", TensorPair), ("(&)", WithPair)):
            if self.at(sym):
                self.advance()
                right = self.term() if self._starts_binding_form() else self.app()
                if self.at("(*)") or self.at("(&)"):
                    raise self.error("pair constructors do not associate; add parentheses")
                return cls(left, right, span=self._span(start))
        return left

    def _starts_arg(self) -> bool:
        tok = self.tok
        if tok.kind == "ident":
            return True
        return any(self.at(k) for k in (
            "(", "tt", "!", "inl", "inr", "fst", "snd", "absurd", "fold", "unfold"))

    def app(self) -> Term:
        start = self.tok
        if not self._starts_arg():
            raise self.error("expected a term")
        e = self.arg()
        while self._starts_arg():
            e = App(e, self.arg(), span=self._span(start))
        return e

    _PREFIX = {"inl": Inl, "inr": Inr, "fst": Fst, "snd": Snd, "absurd": Absurd}

    def _mu_annotation(self, what: str) -> Mu:
        self.expect("[")
        tok = self.tok
        t = self.type_()
        self.expect("]")
        if not isinstance(t, Mu):
            raise self.error(f"{what} annotation must be a recursive type", tok)
        return t

    def arg(self) -> Term:
        start = self.tok
        for kw, cls in self._PREFIX.items():
            if self.at(kw):
                self.advance()
                if not self._starts_arg():
                    raise self.error(f"{kw} needs an argument")
                return cls(self.arg(), span=self._span(start))
        if self.at("fold"):
            self.advance()
            ann = self._mu_annotation("fold")
            if not self._starts_arg():
                raise self.error("fold needs an argument")
            return Fold(ann, self.arg(), span=self._span(start))
        if self.at("unfold"):
            self.advance()
            ann = self._mu_annotation("unfold") if self.at("[") else None
            if not self._starts_arg():
                raise self.error("unfold needs an argument")
            return Unfold(ann, self.arg(), span=self._span(start))
        return self.atom()

    def atom(self) -> Term:
        tok = self.tok
        if self.at("tt"):
            self.advance()
            return Unit(span=self._span(tok))
        if self.at("("):
            self.advance()
            e = self.term()
            self.expect(")")
            return e
        if self.at("!"):
            self.advance()
            name = self.ident("global name")
            if self.strict and name.text not in self.globals:
                raise self.error(f"unknown global {name.text}", name, UnknownName)
            return BangGlobal(name.text, span=self._span(tok))
        if tok.kind == "ident":
            self.advance()
            if tok.text in self.scope:
                return Var(self.scope[tok.text], span=self._span(tok))
            if tok.text in self.globals:
                return GlobalRef(tok.text, span=self._span(tok))
            if self.strict:
                raise self.error(f"unknown name {tok.text}", tok, UnknownName)
            return Var(tok.text, span=self._span(tok))
        raise self.error("expected a term")

    # -- programs ------------------------------------------------------------

    def program(self) -> SourceProgram:
        prog = SourceProgram()
        declared = set(self.globals) | set(self.synonyms)
        while self.tok.kind != "eof":
            start = self.tok
            if self.at("type"):
                self.advance()
                name = self.ident("type name")
                if not name.text[0].isupper():
                    raise self.error("type synonyms must be capitalised", name)
                if name.text in declared:
                    raise self.error(f"{name.text} is already declared", name, DuplicateName)
                self.expect("=")
                t = self.type_()
                declared.add(name.text)
                self.synonyms[name.text] = t
                prog.decls.append(TypeDecl(name.text, t, self._span(start)))
            elif self.at("def"):
                self.advance()
                name = self.ident("definition name")
                if name.text in declared:
                    raise self.error(f"{name.text} is already declared", name, DuplicateName)
                self.expect(":")
                t = self.type_()
                self.expect("=")
                body = self.term()
                declared.add(name.text)
                self.globals.add(name.text)
                prog.decls.append(DefDecl(name.text, t, body, self._span(start)))
            else:
                raise self.error("expected 'def' or 'type'")
        return prog


def parse_type(text: str, synonyms: Optional[Mapping[str, Type]] = None) -> Type:
    p = _Parser(text, synonyms)
    t = p.type_()
    p.done()
    return t


def parse_term(text: str, globals: Optional[Iterable[str]] = None,
               synonyms: Optional[Mapping[str, Type]] = None, strict: bool = False) -> Term:
    """Parse one term.

    Identifiers that are neither bound nor in ``globals`` become free
    variables, or raise :class:`UnknownName` when ``strict``.  Binders that
    shadow an enclosing binder are renamed apart.
    """
    p = _Parser(text, synonyms, globals, strict)
    e = p.term()
    p.done()
    return e


def parse_program(text: str, synonyms: Optional[Mapping[str, Type]] = None,
                  globals: Optional[Iterable[str]] = None) -> SourceProgram:
    """Parse declarations in order; ``synonyms``/``globals`` come from the prelude."""
    return _Parser(text, synonyms, globals, strict=True).program()
