"""Command-line front door; the only module performing I/O.

Exit codes: 0 success, 1 domain failure (untypable term, invalid
derivation, law failure, counterexample found), 2 usage or parse error.
Data goes to stdout, diagnostics to stderr, and identical argument vectors
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import arith, sexpr, testkit
from .indexed import InvalidDerivationError, validate
from .kernel import signature_to_json, term_to_json
from .lang_l import (
    LANG,
    parse_dec,
    parse_env,
    parse_exp,
    parse_pat,
    parse_typ,
    print_dec,
    print_exp,
    print_pat,
    print_typ,
    step_dec,
    step_exp,
    step_derivation_json,
    typecheck_dec,
    typecheck_exp,
    typing_derivation_json,
    untypable_reason,
)
from .lang_l.syntax import (
    Env,
    tenv_of_sexpr,
    typ_of_sexpr,
    _assoc,
)
from .mutual import biterm_to_json


def _emit(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _fail(msg: str, code: int) -> int:
    print(msg, file=sys.stderr)
    return code


def _parse_tenv(text: str) -> Env:
    expr = sexpr.read(text)
    if isinstance(expr, list) and (not expr or isinstance(expr[0], list)):
        return Env((k, typ_of_sexpr(v)) for k, v in _assoc(expr))
    return tenv_of_sexpr(expr)


def _default_fuel() -> int:
    return int(os.environ.get("ALACARTE_FUEL", "50"))


# ---------------------------------------------------------------------------
# arith commands


def _cmd_arith_eval(args) -> int:
    t = arith.parse_term(args.expr)
    print(arith.print_val(arith.eval_(t)))
    return 0


def _cmd_arith_derive(args) -> int:
    t = arith.parse_term(args.expr)
    builders = {
        "eval": arith.build_eval_derivation,
        "typof": arith.build_typof_derivation,
        "istrm": arith.build_istrm,
    }
    d = builders[args.relation](t)
    verdict = validate(d)
    if not verdict:
        return _fail(f"invalid derivation: {verdict.reason}", 1)
    print(_emit(arith.derivation_json(d)))
    return 0


def _cmd_arith_preserve(args) -> int:
    t = arith.parse_term(args.expr)
    evald = arith.build_eval_derivation(t)
    typd = arith.build_typof_derivation(t)
    out = arith.preservation(evald, typd)
    alt = arith.preservation_via_istrm(arith.build_istrm(t), typd)
    if out.root.conclusion != alt.root.conclusion:
        return _fail("preservation routes disagree", 1)
    verdict = validate(out)
    if not verdict:
        return _fail(f"invalid derivation: {verdict.reason}", 1)
    print(_emit(arith.derivation_json(out)))
    return 0


# ---------------------------------------------------------------------------
# lang commands

_PARSERS = {"exp": parse_exp, "dec": parse_dec, "typ": parse_typ, "pat": parse_pat}
_PRINTERS = {"exp": print_exp, "dec": print_dec, "typ": print_typ, "pat": print_pat}


def _cmd_lang_parse(args) -> int:
    term = _PARSERS[args.sort](args.expr)
    print(_PRINTERS[args.sort](term))
    return 0


def _cmd_lang_typecheck(args) -> int:
    gamma = _parse_tenv(args.env)
    term = _PARSERS[args.sort](args.expr)
    res = (typecheck_dec if args.sort == "dec" else typecheck_exp)(gamma, term)
    if res is None:
        return _fail(f"untypable: {untypable_reason(gamma, term)}", 1)
    t, deriv = res
    print(print_typ(t))
    if args.emit_derivation:
        print(_emit(typing_derivation_json(deriv)))
    return 0


def _cmd_lang_step(args) -> int:
    rho = parse_env(args.env)
    term = _PARSERS[args.sort](args.expr)
    stepper = step_dec if args.sort == "dec" else step_exp
    printer = _PRINTERS[args.sort]
    from .lang_l import is_value

    sub = stepper(rho, term)
    if sub is None:
        if args.sort == "exp" and is_value(term):
            print("value")
        elif args.sort == "dec" and term.root.ctor == "env":
            print("terminal")
        else:
            print("stuck")
        return 0
    succ, deriv = sub
    print(f"{deriv.root.rule} {printer(succ)}")
    if args.emit_derivation:
        print(_emit(step_derivation_json(deriv)))
    return 0


def _cmd_lang_trace(args) -> int:
    with open(args.env_file, encoding="utf-8") as fh:
        rho = parse_env(fh.read())
    term = _PARSERS[args.sort](args.expr)
    stepper = step_dec if args.sort == "dec" else step_exp
    printer = _PRINTERS[args.sort]
    from .lang_l import is_value

    print(printer(term))
    fuel = args.fuel
    for _ in range(fuel):
        sub = stepper(rho, term)
        if sub is None:
            break
        term, deriv = sub
        print(f"--{deriv.root.rule}--> {printer(term)}")
        if args.emit_derivations:
            print(_emit(step_derivation_json(deriv)))
    else:
        if stepper(rho, term) is not None:
            print("fuel exhausted")
            return 0
    if args.sort == "exp" and is_value(term):
        print("value")
    elif args.sort == "dec" and term.root.ctor == "env":
        print("terminal")
    else:
        print("stuck")
    return 0


# ---------------------------------------------------------------------------
# laws / fuzzing / dump


def _cmd_laws(args) -> int:
    report = testkit.law_suite(args.suite)
    print(_emit(report.to_json()))
    if not report.ok:
        for line in report.lines():
            print(line, file=sys.stderr)
        return 1
    return 0


def _cmd_fuzz(args) -> int:
    if args.replay:
        with open(args.replay, encoding="utf-8") as fh:
            case = json.load(fh)
        steps, cx = testkit.replay_case(case, fuel=args.fuel)
        if cx is None:
            print(f"replay ok: {steps} steps preserved typing")
            return 0
        print(_emit(cx))
        print("replay reproduced the counterexample", file=sys.stderr)
        return 1
    report = testkit.run_preservation_fuzz(args.seed, args.count, fuel=args.fuel)
    print(
        f"checked {report.configs} configurations, {report.steps_checked} steps, "
        f"{len(report.counterexamples)} counterexamples"
    )
    if report.counterexamples:
        for cx in report.counterexamples:
            print(_emit(cx))
        return 1
    return 0


def _cmd_dump(args) -> int:
    if args.signature:
        if args.signature == "arith":
            print(_emit(signature_to_json(arith.TRM)))
        else:
            from .mutual import bisignature_to_json

            print(_emit(bisignature_to_json(LANG)))
        return 0
    if args.expr is None:
        return _fail("dump needs an expression or --signature", 2)
    if args.sort == "arith":
        print(_emit(term_to_json(arith.parse_term(args.expr))))
    elif args.sort in ("exp", "dec"):
        print(_emit(biterm_to_json(_PARSERS[args.sort](args.expr))))
    else:
        return _fail(f"cannot dump sort {args.sort!r} as JSON", 2)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="alacarte")
    sub = top.add_subparsers(dest="command", required=True)

    p_arith = sub.add_parser("arith", help="the literals-and-addition language")
    arith_sub = p_arith.add_subparsers(dest="subcommand", required=True)
    p = arith_sub.add_parser("eval")
    p.add_argument("expr")
    p.set_defaults(run=_cmd_arith_eval)
    p = arith_sub.add_parser("derive")
    p.add_argument("expr")
    p.add_argument("--relation", choices=("eval", "typof", "istrm"), default="eval")
    p.set_defaults(run=_cmd_arith_derive)
    p = arith_sub.add_parser("preserve")
    p.add_argument("expr")
    p.set_defaults(run=_cmd_arith_preserve)

    p_lang = sub.add_parser("lang", help="the declarations/expressions language")
    lang_sub = p_lang.add_subparsers(dest="subcommand", required=True)
    for name in ("parse", "print"):
        p = lang_sub.add_parser(name)
        p.add_argument("expr")
        p.add_argument("--sort", choices=("exp", "dec", "typ", "pat"), default="exp")
        p.set_defaults(run=_cmd_lang_parse)
    p = lang_sub.add_parser("typecheck")
    p.add_argument("expr")
    p.add_argument("--env", default="()")
    p.add_argument("--sort", choices=("exp", "dec"), default="exp")
    p.add_argument("--emit-derivation", action="store_true")
    p.set_defaults(run=_cmd_lang_typecheck)
    p = lang_sub.add_parser("step")
    p.add_argument("expr")
    p.add_argument("--env", default="()")
    p.add_argument("--sort", choices=("exp", "dec"), default="exp")
    p.add_argument("--emit-derivation", action="store_true")
    p.set_defaults(run=_cmd_lang_step)
    p = lang_sub.add_parser("trace")
    p.add_argument("env_file")
    p.add_argument("expr")
    p.add_argument("--sort", choices=("exp", "dec"), default="exp")
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.add_argument("--emit-derivations", action="store_true")
    p.set_defaults(run=_cmd_lang_trace)

    p = sub.add_parser("laws", help="run a module's law suite")
    p.add_argument("--suite", choices=("kernel", "indexed", "mutual"), required=True)
    p.set_defaults(run=_cmd_laws)

    p = sub.add_parser("fuzz-preservation", help="subject-reduction fuzzing")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.add_argument("--replay", default=None)
    p.set_defaults(run=_cmd_fuzz)

    p = sub.add_parser("dump", help="canonical JSON for terms and signatures")
    p.add_argument("expr", nargs="?")
    p.add_argument("--sort", choices=("arith", "exp", "dec"), default="arith")
    p.add_argument("--signature", choices=("arith", "lang"), default=None)
    p.set_defaults(run=_cmd_dump)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fuel = getattr(args, "fuel", None)
    if fuel is not None and fuel < 0:
        return _fail("fuel must be non-negative", 2)
    try:
        return args.run(args)
    except sexpr.SexprError as exc:
        return _fail(f"parse error: {exc}", 2)
    except FileNotFoundError as exc:
        return _fail(str(exc), 2)
    except InvalidDerivationError as exc:
        return _fail(f"invalid derivation: {exc}", 1)


if __name__ == "__main__":
    sys.exit(main())
