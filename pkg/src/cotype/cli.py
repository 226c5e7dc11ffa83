"""``cotype`` command line.

Exit codes: 0 positive verdict, 1 refuted, 2 unknown, 3 input error.
``--json`` switches to the machine-readable report documented in
docs/formats.md.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import arith
from .errors import CotypeError
from .evaluator import EvalConfig, as_source
from .program import Program, check_wellformed
from .syntax import SessionFile, parse_session, parse_term
from .terms import Unexplored, Node, prefix, render_prefix
from .typecheck import (
    Budget, Derivation, Derived, Evidence, Refuted, VerifiedToHeight, check_program_type,
    check_type, is_positive, typed_eq,
)

DEFAULT_FUEL = 10_000
DEFAULT_DEPTH = 32

EXIT_POSITIVE, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


@dataclass
class Report:
    command: list[str]
    verdict: str
    exit_code: int
    details: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)
    output: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        body = {
            "command": self.command,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "details": self.details,
            "budgets": self.budgets,
        }
        return json.dumps(body, sort_keys=True, ensure_ascii=False)

    def to_text(self) -> str:
        lines = list(self.output)
        lines.append(f"verdict: {self.verdict}")
        for k, v in self.details.items():
            if k in ("verdict", "prefix"):
                continue
            lines.append(f"{k}: {v if not isinstance(v, (dict, list)) else json.dumps(v, sort_keys=True)}")
        return "\n".join(lines)


# ------------------------------------------------------------ helpers

def _derivation_json(d):
    if isinstance(d, Evidence):
        return {"type": d.type, "address": list(d.address), "verdict": verdict_json(d.verdict)}
    return {
        "type": d.type, "address": list(d.address), "constructor": d.constructor.name,
        "rule": d.disjunct, "premises": [_derivation_json(p) for p in d.premises],
    }


def verdict_json(v) -> dict:
    if isinstance(v, Derived):
        return {"kind": "Derived", "derivation": _derivation_json(v.witness)}
    if isinstance(v, VerifiedToHeight):
        return {"kind": "VerifiedToHeight", "height": v.height, "path": list(v.path)}
    if isinstance(v, Refuted):
        out = {"kind": "Refuted", "height": v.height, "explanation": v.explanation}
        if v.conflict is not None:
            c = v.conflict
            out["conflict"] = {"address": list(c.address), "expected": c.expected, "found": c.found}
        return out
    return {"kind": "Unknown", "reason": v.reason}


def exit_code_of(v) -> int:
    if is_positive(v):
        return EXIT_POSITIVE
    if isinstance(v, Refuted):
        return EXIT_REFUTED
    return EXIT_UNKNOWN


def resolve_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    bundled = resources.files("cotype") / "fixtures" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise CotypeError(f"no such file: {name}")


def load_session(name: str) -> SessionFile:
    return parse_session(resolve_path(name).read_text(encoding="utf-8"))


def context_program(session: SessionFile, name: str | None) -> Program:
    """The program that EXPR arguments are evaluated against."""
    if name is not None:
        try:
            return session.programs[name]
        except KeyError:
            raise CotypeError(f"no program named {name!r}") from None
    eqs = [eq for p in session.programs.values() for eq in p.user_equations()]
    return check_wellformed(Program.build(session.vocabulary, eqs))


def term_source(session, program, text, cfg):
    term = parse_term(text, session.vocabulary, program)
    return as_source(program, {}, term, cfg)


def _system(session, name):
    try:
        return session.systems[name]
    except KeyError:
        raise CotypeError(f"no system named {name!r}") from None


def _has_unknown(p) -> bool:
    if isinstance(p, Unexplored):
        return p.reason != "depth"
    return isinstance(p, Node) and any(_has_unknown(k) for k in p.children)


# ----------------------------------------------------------- commands

def cmd_check(args) -> Report:
    s = load_session(args.file)
    details = {
        "systems": {n: str(ds.rank) for n, ds in s.systems.items()},
        "programs": {n: len(p.user_equations()) for n, p in s.programs.items()},
    }
    return Report([], "ok", EXIT_POSITIVE, details)


def cmd_rank(args) -> Report:
    ds = _system(load_session(args.file), args.system)
    details = {"types": {t: ds.rank_of_type(t) for b in ds.bundles for t in b.types}}
    return Report([], str(ds.rank), EXIT_POSITIVE, details)


def cmd_eval(args) -> Report:
    s = load_session(args.file)
    cfg = EvalConfig(fuel=args.fuel, max_depth=max(args.depth, 1))
    src = term_source(s, context_program(s, args.program), args.term, cfg)
    pre = prefix(src, args.depth)
    shown = render_prefix(pre)
    unknown = _has_unknown(pre)
    return Report([], "unknown" if unknown else "ok", EXIT_UNKNOWN if unknown else EXIT_POSITIVE,
                  {"prefix": shown}, {"fuel": args.fuel, "depth": args.depth}, [shown])


def _budget(args, height):
    return Budget(fuel=args.fuel, height=height)


def cmd_type(args) -> Report:
    s = load_session(args.file)
    ds = _system(s, args.system)
    cfg = EvalConfig(fuel=args.fuel, max_depth=args.height + 1)
    src = term_source(s, context_program(s, args.program), args.term, cfg)
    v = check_type(ds, args.type, src, _budget(args, args.height))
    return Report([], str(v), exit_code_of(v), {"result": verdict_json(v)},
                  {"fuel": args.fuel, "height": args.height})


def cmd_eq(args) -> Report:
    s = load_session(args.file)
    ds = _system(s, args.system)
    cfg = EvalConfig(fuel=args.fuel, max_depth=args.depth + 1)
    prog = context_program(s, args.program)
    a = term_source(s, prog, args.left, cfg)
    b = term_source(s, prog, args.right, cfg)
    v = typed_eq(ds, args.type, a, b, _budget(args, args.depth), cfg)
    return Report([], str(v), exit_code_of(v), {"result": verdict_json(v)},
                  {"fuel": args.fuel, "depth": args.depth})


def cmd_claim(args) -> Report:
    s = load_session(args.file)
    if args.system is not None:
        ds = _system(s, args.system)
    else:
        fits = [d for d in s.systems.values() if args.from_type in d.type_ids and args.to in d.type_ids]
        if len(fits) != 1:
            raise CotypeError("pass --system: the types do not pick out exactly one system")
        ds = fits[0]
    prog = s.programs.get(args.program)
    if prog is None:
        raise CotypeError(f"no program named {args.program!r}")
    cfg = EvalConfig(fuel=args.fuel, max_depth=args.height + 1)
    samples_ctx = context_program(s, None)
    texts = [ln.strip() for ln in resolve_path(args.samples).read_text(encoding="utf-8").splitlines()]
    texts = [t for t in texts if t and not t.startswith("#")]
    samples = [term_source(s, samples_ctx, t, cfg) for t in texts]
    reports = check_program_type(ds, prog, args.fn, args.from_type, args.to, samples,
                                 _budget(args, args.height), cfg)
    outs = [r.output_verdict for r in reports]
    if all(is_positive(v) for v in outs):
        verdict, code = "all samples typed", EXIT_POSITIVE
    elif any(isinstance(v, Refuted) for v in outs):
        verdict, code = "some sample refuted", EXIT_REFUTED
    else:
        verdict, code = "some sample unknown", EXIT_UNKNOWN
    details = {"samples": [{"term": t, "input": verdict_json(r.input_verdict),
                            "output": verdict_json(r.output_verdict)}
                           for t, r in zip(texts, reports)]}
    lines = [f"{t}: {r.output_verdict}" for t, r in zip(texts, reports)]
    return Report([], verdict, code, details, {"fuel": args.fuel, "height": args.height}, lines)


def cmd_repr(args) -> Report:
    s = load_session(args.file)
    cfg = EvalConfig(fuel=args.fuel, max_depth=max(args.depth, 1))
    src = term_source(s, context_program(s, args.program), args.term, cfg)
    table = arith.ConstructorCodeTable(s.vocabulary)
    points = arith.defined_points(arith.term_to_funcrepr(src, table), table, args.depth)
    text = arith.dump(points)
    if args.dump:
        Path(args.dump).write_text(text, encoding="utf-8")
    details = {"points": len(points), "codes": {c.name: table.code(c) for c in s.vocabulary}}
    return Report([], "ok", EXIT_POSITIVE, details, {"fuel": args.fuel, "depth": args.depth},
                  [] if args.dump else text.splitlines())


COMMANDS = {
    "check": cmd_check, "rank": cmd_rank, "eval": cmd_eval, "type": cmd_type,
    "eq": cmd_eq, "claim": cmd_claim, "repr": cmd_repr,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cotype", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="machine-readable report")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def command(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return p

    command("check", "validate systems and programs")
    p = command("rank", "Sigma/Pi rank of a data-system")
    p.add_argument("--system", required=True)

    p = command("eval", "print the prefix of a term's value")
    p.add_argument("--program")
    p.add_argument("--term", required=True)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)

    p = command("type", "check a term against a type")
    p.add_argument("--system", required=True)
    p.add_argument("--type", required=True)
    p.add_argument("--term", required=True)
    p.add_argument("--program")
    p.add_argument("--height", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)

    p = command("eq", "typed equality of two terms")
    p.add_argument("--system", required=True)
    p.add_argument("--type", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--program")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)

    p = command("claim", "sample a typing claim fn: FROM -> TO")
    p.add_argument("--program", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--from", dest="from_type", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--system")
    p.add_argument("--height", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)

    p = command("repr", "numeric representation of a term")
    p.add_argument("--term", required=True)
    p.add_argument("--program")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--dump")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    return ap


def run(argv: list[str]) -> Report:
    args = build_parser().parse_args(argv)
    try:
        for name in ("depth", "height", "fuel"):
            if getattr(args, name, 0) < 0 or (name == "fuel" and getattr(args, name, 1) < 1):
                raise CotypeError(f"--{name} out of range")
        report = COMMANDS[args.cmd](args)
    except (CotypeError, OSError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        report = Report([], "input error", EXIT_INPUT, {"error": str(msg)})
    report.command = list(argv)
    report.json = args.json
    return report


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        report = run(argv)
    except SystemExit as e:  # argparse usage errors
        return EXIT_INPUT if e.code else 0
    print(report.to_json() if report.json else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
