"""The ``aff`` command: check files, infer and evaluate expressions, REPL.

Exit codes: 0 success, 1 parse/type/evaluation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, TextIO

from .errors import AffError, ParseError
from .evaluator import DEFAULT_FUEL, Evaluator, render_value
from .infer import display_subst, infer_closed, unused_hypotheses
from .parser import parse_program, parse_term
from .program import check_program, prelude_env
from .syntax import GlobalEnv, normalize_type, pretty_type

JSON_SCHEMA = 1


def _location(text: Optional[str], span) -> str:
    if not text or not span:
        return ""
    start = span[0]
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    return f"{line}:{col}: "


def diagnostic(err: AffError, text: Optional[str] = None, where: str = "") -> str:
    rule = getattr(err, "rule", None)
    rule_part = f" (rule {rule})" if rule else ""
    prefix = f"{where}:" if where else ""
    return f"{prefix}{_location(text, err.span)}error: {err.kind}{rule_part}: {err.message}"


def _error_json(err: AffError, text: Optional[str]) -> dict:
    return {"class": err.kind, "message": err.message, "rule": getattr(err, "rule", None),
            "span": list(err.span) if err.span else None,
            "location": _location(text, err.span).rstrip(": ") or None}


def _base_env(args) -> GlobalEnv:
    return GlobalEnv() if args.no_prelude else prelude_env()


def _show_type(t, env: GlobalEnv) -> str:
    return pretty_type(normalize_type(t), env.synonyms)


# -- commands ----------------------------------------------------------------

def cmd_check(args, out: TextIO, err: TextIO) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"aff: cannot read {args.file}: {exc.strerror}", file=err)
        return 2
    env = _base_env(args)
    report = {"schema": JSON_SCHEMA, "file": args.file, "ok": True, "declarations": []}
    try:
        prog = parse_program(text, env.synonyms, env.names())
    except ParseError as exc:
        report["ok"] = False
        report["error"] = _error_json(exc, text)
        if args.json:
            print(json.dumps(report, indent=2), file=out)
        else:
            print(diagnostic(exc, text, args.file), file=err)
        return 1

    env, outcomes = check_program(prog, env, keep_going=True)
    for o in outcomes:
        entry = {"name": o.decl.name, "ok": o.ok}
        if hasattr(o.decl, "body"):
            entry["kind"] = "def"
            entry["type"] = pretty_type(o.decl.type, env.synonyms)
        else:
            entry["kind"] = "type"
            entry["definition"] = pretty_type(o.decl.type)
        if o.error is not None:
            report["ok"] = False
            entry["error"] = _error_json(o.error, text)
            if not args.json:
                print(diagnostic(o.error, text, args.file) + f" in {o.decl.name}", file=err)
        elif o.result is not None:
            unused = unused_hypotheses(o.result.trace)
            entry["unused"] = unused
            if args.trace or args.json:
                entry["trace"] = o.result.trace.to_json(display_subst(o.result), env.synonyms)
            if not args.json:
                print(f"{o.decl.name} : {entry['type']}", file=out)
                if args.trace:
                    print(o.result.trace.to_text(display_subst(o.result), env.synonyms), file=out)
                if args.warn_unused and unused:
                    print(f"{args.file}: warning: {o.decl.name} discards unused "
                          f"{', '.join(unused)}", file=err)
        report["declarations"].append(entry)
    if args.json:
        print(json.dumps(report, indent=2), file=out)
    return 0 if report["ok"] else 1


def _parse_expr(text: str, env: GlobalEnv):
    return parse_term(text, env.names(), env.synonyms, strict=True)


def cmd_infer(args, out: TextIO, err: TextIO) -> int:
    env = _base_env(args)
    try:
        r = infer_closed(env, _parse_expr(args.expr, env))
    except AffError as exc:
        if args.json:
            print(json.dumps({"schema": JSON_SCHEMA, "ok": False,
                              "error": _error_json(exc, args.expr)}, indent=2), file=out)
        else:
            print(diagnostic(exc, args.expr), file=err)
        return 1
    shown = _show_type(r.ty, env)
    if args.json:
        print(json.dumps({"schema": JSON_SCHEMA, "ok": True, "type": shown,
                          "trace": r.trace.to_json(display_subst(r), env.synonyms)}, indent=2), file=out)
        return 0
    print(shown, file=out)
    if args.trace:
        print(r.trace.to_text(display_subst(r), env.synonyms), file=out)
    return 0


def evaluate_and_render(env: GlobalEnv, text: str, nat: bool = False,
                        take: Optional[int] = None, fuel: int = DEFAULT_FUEL) -> str:
    """Type check ``text``, then evaluate it; raises :class:`AffError`."""
    term = _parse_expr(text, env)
    infer_closed(env, term)
    ev = Evaluator(env, fuel)
    if take is not None:
        heads = ev.take_bang(term, take)
        shown = [ev.decode_nat(v) if nat else render_value(v) for v in heads]
        return "[" + ", ".join(str(x) for x in shown) + "]"
    if nat:
        return str(ev.nat(term))
    return render_value(ev.whnf(term))


def cmd_eval(args, out: TextIO, err: TextIO) -> int:
    env = _base_env(args)
    try:
        print(evaluate_and_render(env, args.expr, args.nat, args.take, args.fuel), file=out)
    except AffError as exc:
        print(diagnostic(exc, args.expr), file=err)
        return 1
    return 0


def repl(env: GlobalEnv, stdin: TextIO = sys.stdin, stdout: TextIO = sys.stdout,
         prompt: Optional[str] = None) -> int:
    """Line-oriented loop: ``:t e``, ``:def ...``, ``:trace on|off``, ``:q``, or an expression."""
    if prompt is None:
        prompt = "aff> " if stdin.isatty() else ""
    trace = False
    while True:
        if prompt:
            stdout.write(prompt)
            stdout.flush()
        line = stdin.readline()
        if not line:
            return 0
        line = line.strip()
        if not line:
            continue
        try:
            if line in (":q", ":quit"):
                return 0
            if line.startswith(":trace"):
                arg = line[len(":trace"):].strip()
                if arg not in ("on", "off"):
                    print("usage: :trace on|off", file=stdout)
                    continue
                trace = arg == "on"
            elif line.startswith(":t ") or line.startswith(":type "):
                r = infer_closed(env, _parse_expr(line.split(None, 1)[1], env))
                print(_show_type(r.ty, env), file=stdout)
                if trace:
                    print(r.trace.to_text(display_subst(r), env.synonyms), file=stdout)
            elif line.startswith(":def "):
                text = line[len(":def "):]
                if not text.lstrip().startswith(("def", "type")):
                    text = "def " + text
                prog = parse_program(text, env.synonyms, env.names())
                env, outcomes = check_program(prog, env)
                for o in outcomes:
                    if hasattr(o.decl, "body"):
                        print(f"{o.decl.name} : {pretty_type(o.decl.type, env.synonyms)}",
                              file=stdout)
            elif line.startswith(":"):
                print(f"unknown command {line.split()[0]}", file=stdout)
            else:
                print(evaluate_and_render(env, line), file=stdout)
        except AffError as exc:
            print(diagnostic(exc, line), file=stdout)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aff", description="Affine lazy language toolchain.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--no-prelude", action="store_true", help="do not load the prelude")

    p = sub.add_parser("check", help="type check a .aff file")
    p.add_argument("file")
    p.add_argument("--trace", action="store_true", help="print derivation trees")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--warn-unused", action="store_true", help="report discarded hypotheses")
    common(p)

    p = sub.add_parser("infer", help="infer the type of an expression")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    common(p)

    p = sub.add_parser("eval", help="type check and evaluate an expression")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--nat", action="store_true", help="decode the result as a Nat")
    p.add_argument("--take", type=int, metavar="N", help="take N elements of a ! stream")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, metavar="N",
                   help="evaluation step limit")
    common(p)

    p = sub.add_parser("repl", help="interactive session")
    common(p)
    return ap


def main(argv: Optional[list[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command == "check":
        return cmd_check(args, out, err)
    if args.command == "infer":
        return cmd_infer(args, out, err)
    if args.command == "eval":
        if args.take is not None and args.take < 0 or args.fuel <= 0:
            print("aff: --take and --fuel must be positive", file=err)
            return 2
        return cmd_eval(args, out, err)
    return repl(_base_env(args), sys.stdin, out)


if __name__ == "__main__":
    sys.exit(main())
