"""Command line interface.

Commands: minimize, census, complement, member, reduce, random,
verify-certificate.  Exit codes: 0 success, 1 parse/internal error,
2 timeout (partial result printed).
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .automata import random_nba, reduce_nba
from .census import format_report, run_census
from .complement import DeterminizationLimitExceeded, complement_nba
from .formats import (
    ParseError,
    format_certificate,
    format_nba,
    parse_certificate,
    parse_nba,
)
from .minimize import (
    MinimizationConfig,
    MinimizationIncomplete,
    Trace,
    minimize,
    verify_certificate,
)
from .sat import SolverTimeout
from .words import format_word, parse_word
from . import automata as _automata


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write_output(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_from_args(args: argparse.Namespace) -> MinimizationConfig:
    return MinimizationConfig(
        solver=args.solver,
        timeout_secs=args.timeout_secs,
        seed_words=not args.no_seed_words,
        symmetry_breaking=not args.no_symmetry,
        extra_knowledge=not args.no_extra_constraints,
    )


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--solver",
        default="internal",
        help="internal or external:<path to DIMACS solver>",
    )
    parser.add_argument("--timeout-secs", type=float, default=600.0)
    parser.add_argument("--no-seed-words", action="store_true")
    parser.add_argument("--no-symmetry", action="store_true")
    parser.add_argument("--no-extra-constraints", action="store_true")


def _trace_lines(trace: Trace) -> str:
    lines = []
    for kind, payload in trace.events:
        if kind in ("good", "bad"):
            lines.append(f"{kind} {format_word(payload)}")
        elif kind in ("n", "unsat"):
            lines.append(f"{kind} {payload}")
        elif kind == "candidate":
            trans = ";".join(f"{i},{a},{j}" for i, a, j in payload.transitions)
            finals = ",".join(str(f) for f in sorted(payload.finals))
            lines.append(
                f"candidate states={payload.num_states} final={finals} trans={trans}"
            )
        elif kind == "solver":
            items = " ".join(f"{k}={v}" for k, v in payload.items())
            lines.append(f"solver {items}")
    return "\n".join(lines) + "\n"


def cmd_minimize(args: argparse.Namespace) -> int:
    automaton = parse_nba(_read_text(args.input))
    cfg = _config_from_args(args)
    try:
        result = minimize(automaton, cfg)
    except MinimizationIncomplete as exc:
        print(f"timeout: at least {exc.lower_bound} states required")
        if args.trace:
            with open(args.trace, "w") as fh:
                fh.write(_trace_lines(exc.trace))
        return 2
    text = format_nba(result.automaton)
    text += f"# minimal states: {result.automaton.num_states}\n"
    text += f"# iterations: {result.trace.iterations()}\n"
    _write_output(text, args.out)
    if args.certificate:
        with open(args.certificate, "w") as fh:
            fh.write(format_certificate(result.certificate))
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(_trace_lines(result.trace))
    return 0


def cmd_census(args: argparse.Namespace) -> int:
    def progress(done: int, total: int) -> None:
        print(f"census: {done}/{total} classes", file=sys.stderr)

    report = run_census(
        args.states,
        args.alphabet,
        jobs=args.jobs,
        checkpoint=args.resume,
        per_class_timeout=args.timeout_secs,
        progress=progress if args.verbose else None,
    )
    _write_output(format_report(report), args.out)
    return 0


def cmd_complement(args: argparse.Namespace) -> int:
    automaton = parse_nba(_read_text(args.input))
    _write_output(format_nba(complement_nba(automaton)), args.out)
    return 0


def cmd_member(args: argparse.Namespace) -> int:
    automaton = parse_nba(_read_text(args.input))
    word = parse_word(args.word)
    print("true" if _automata.member(automaton, word) else "false")
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    automaton = parse_nba(_read_text(args.input))
    _write_output(format_nba(reduce_nba(automaton)), args.out)
    return 0


def cmd_random(args: argparse.Namespace) -> int:
    automaton = random_nba(
        args.states,
        args.alphabet,
        p_final=args.p_final,
        p_trans=args.p_trans,
        seed=args.seed,
    )
    _write_output(format_nba(automaton), args.out)
    return 0


def cmd_verify_certificate(args: argparse.Namespace) -> int:
    automaton = parse_nba(_read_text(args.input))
    cert = parse_certificate(_read_text(args.certificate_file))
    print("true" if verify_certificate(automaton, cert) else "false")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="buchimin",
        description="Exact state minimization of nondeterministic Buchi automata",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minimize", help="minimize an automaton")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--certificate")
    p.add_argument("--trace")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("census", help="minimize every automaton of a given size")
    p.add_argument("states", type=int)
    p.add_argument("alphabet", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--resume", help="checkpoint file to write and resume from")
    p.add_argument("--out")
    p.add_argument("--timeout-secs", type=float, default=600.0)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("complement", help="complement an automaton")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_complement)

    p = sub.add_parser("member", help="membership of an ultimately periodic word")
    p.add_argument("input")
    p.add_argument("word", help='e.g. ":0" for 0^w or "0,1:1,0" for 01(10)^w')
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("reduce", help="heuristic size reduction")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("random", help="sample a random automaton")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-final", type=float, default=0.5)
    p.add_argument("--p-trans", type=float, default=0.15)
    p.add_argument("--out")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("verify-certificate", help="check a minimality certificate")
    p.add_argument("input")
    p.add_argument("certificate_file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify_certificate)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverTimeout, DeterminizationLimitExceeded) as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
