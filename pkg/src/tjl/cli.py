"""Command-line front end.

Exit codes: 0 affirmative verdict, 1 negative verdict, 2 input error.
Every command prints one JSON document with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys

from .decide import satisfiable, valid, witness_to_model
from .internalize import InternalizeError, MODES, internalize, mode_profile
from .models import (
    InterpretedSystem, ModelError, eval_formula, eval_is, model_from_json, model_to_json,
    validate_model,
)
from .profiles import get_profile
from .proof import check_derivation, derivation_from_json, parse_cs
from .syntax import NotInProfile, ParseError, parse_formula, print_formula, print_term, size


class InputError(Exception):
    def __init__(self, message, **extra):
        super().__init__(message)
        self.extra = extra


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {path}: {e.msg}", line=e.lineno, column=e.colno)


def _profile(args):
    try:
        return get_profile(args.logic, args.axioms)
    except ValueError as e:
        raise InputError(str(e))


def _cs(spec: str | None, default: str, profile=None):
    spec = spec or default
    if spec in ("total", "empty"):
        return parse_cs(spec)
    return parse_cs(_read_json(spec), profile)


def _formula(text: str, profile):
    return parse_formula(text, profile)


# ---------------------------------------------------------------- commands

def cmd_parse(args):
    prof = _profile(args)
    f = _formula(args.formula, prof)
    return 0, {"formula": print_formula(f), "size": size(f)}


def cmd_check(args):
    prof = _profile(args)
    path = args.proof or args.file
    if path is None:
        raise InputError("check needs a derivation file")
    d = derivation_from_json(_read_json(path), prof)
    res = check_derivation(d, prof, _cs(args.cs, "total", prof))
    return (0 if res.ok else 1), res.to_json()


def _decision_profile(args):
    prof = _profile(args)
    if not prof.is_base:
        raise InputError(f"decision is only available for the lpltl-p profile, not {prof.name}")
    return prof


def cmd_sat(args):
    prof = _decision_profile(args)
    f = _formula(args.formula, prof)
    cs = _cs(args.cs, "empty", prof)
    res = satisfiable(f, cs)
    out = {"sat": res.sat, "stats": res.stats}
    if res.sat:
        out["satPosition"] = res.witness.sat_position
        out["model"] = model_to_json(witness_to_model(res.witness, cs))
    return (0 if res.sat else 1), out


def cmd_valid(args):
    prof = _decision_profile(args)
    f = _formula(args.formula, prof)
    res = valid(f, _cs(args.cs, "empty", prof))
    out = {"valid": res.valid}
    if not res.valid:
        out["position"] = res.position
        out["model"] = model_to_json(res.model)
    return (0 if res.valid else 1), out


def _load_model(args):
    if args.model is None:
        raise InputError("--model is required")
    try:
        return model_from_json(_read_json(args.model))
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed model: missing or bad field {e}")


def cmd_eval(args):
    m = _load_model(args)
    if isinstance(m, InterpretedSystem):
        raise InputError("eval needs a single-run model; use eval-is")
    f = _formula(args.formula, m.profile)
    s = eval_formula(m, f)
    value = s.at(args.at)
    return (0 if value else 1), {"at": args.at, "value": value, "stream": s.to_json()}


def cmd_eval_is(args):
    m = _load_model(args)
    if not isinstance(m, InterpretedSystem):
        raise InputError("eval-is needs an interpreted system (a model with runs)")
    f = _formula(args.formula, m.profile)
    streams = eval_is(m, f)
    if not 0 <= args.run < len(streams):
        raise InputError(f"run {args.run} out of range")
    value = streams[args.run].at(args.at)
    out = {"at": args.at, "run": args.run, "value": value,
           "streams": {str(k): s.to_json() for k, s in streams.items()}}
    return (0 if value else 1), out


def cmd_internalize(args):
    path = args.proof or args.file
    if path is None:
        raise InputError("internalize needs a derivation file")
    prof = get_profile(args.logic, args.axioms) if args.logic else mode_profile(args.mode)
    d = derivation_from_json(_read_json(path), prof)
    try:
        t, out = internalize(d, args.agent, args.mode, prof)
    except InternalizeError as e:
        return 1, {"error": str(e)}
    return 0, {"term": print_term(t), "conclusion": print_formula(out.conclusion),
               "derivation": out.to_json()}


def cmd_validate_model(args):
    problems = validate_model(_load_model(args))
    return (0 if not problems else 1), {"valid": not problems, "problems": problems}


COMMANDS = {
    "parse": cmd_parse, "check": cmd_check, "sat": cmd_sat, "valid": cmd_valid,
    "eval": cmd_eval, "eval-is": cmd_eval_is, "internalize": cmd_internalize,
    "validate-model": cmd_validate_model,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tjl", description="Temporal justification logic toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, logic="lpltl-p"):
        p.add_argument("--logic", default=logic, help="named profile")
        p.add_argument("--axioms", default=None, help="extra axioms, e.g. +generalize,+jpr")
        p.add_argument("--json", action="store_true", help="pretty-print the output")

    for name in ("parse", "sat", "valid"):
        p = sub.add_parser(name)
        common(p)
        if name != "parse":
            p.add_argument("--cs", default=None, help="FILE, total or empty (default empty)")
        p.add_argument("formula")

    p = sub.add_parser("check")
    common(p)
    p.add_argument("--cs", default=None, help="FILE, total or empty (default total)")
    p.add_argument("--proof", default=None)
    p.add_argument("file", nargs="?")

    for name in ("eval", "eval-is"):
        p = sub.add_parser(name)
        p.add_argument("--model", default=None, help="model JSON file, - for stdin")
        p.add_argument("--at", type=int, default=0)
        if name == "eval-is":
            p.add_argument("--run", type=int, default=0)
        p.add_argument("--json", action="store_true")
        p.add_argument("formula")

    p = sub.add_parser("internalize")
    common(p, logic=None)
    p.add_argument("--agent", type=int, default=1)
    p.add_argument("--mode", default="lpltl-int", choices=MODES)
    p.add_argument("--proof", default=None)
    p.add_argument("file", nargs="?")

    p = sub.add_parser("validate-model")
    p.add_argument("--model", default=None)
    p.add_argument("--json", action="store_true")
    return ap


def run(argv=None) -> tuple[int, dict]:
    """Run one command; returns (exit code, JSON payload)."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return (2 if e.code else 0), {"error": "bad command line"}
    try:
        return COMMANDS[args.command](args)
    except ParseError as e:
        return 2, {"error": str(e), "position": e.position}
    except InputError as e:
        return 2, {"error": str(e), **e.extra}
    except (NotInProfile, ModelError, ValueError) as e:
        return 2, {"error": str(e)}


def dumps(payload: dict, pretty: bool = False) -> str:
    return json.dumps(payload, sort_keys=True, indent=1 if pretty else None)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, payload = run(argv)
    print(dumps(payload, "--json" in argv))
    return code


if __name__ == "__main__":
    sys.exit(main())
