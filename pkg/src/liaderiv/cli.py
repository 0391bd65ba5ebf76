"""Command-line entry point.

    solver FILE [options]             decide an SMT-LIB script
    solver gen-frobenius A B          print a Frobenius benchmark
    solver corpus --seed S --count N --out DIR
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import automata as fa
from .config import SolverConfig
from .corpus import random_corpus
from .errors import NotCoprime, ResourceLimit, SolverError, Timeout
from .formula import to_text
from .frobenius import frobenius_text
from .smtlib import model_text, parse, script_text
from .solver import emit_stats, solve_formula


def solve_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="solver", description="Decide quantified LIA formulae with automata.")
    p.add_argument("file", help="SMT-LIB input ('-' for stdin)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--classic", action="store_true", help="bottom-up automata construction")
    mode.add_argument("--no-opt", action="store_true", help="derivatives without any simplification")
    p.add_argument("--no-rewrite", action="store_true")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--no-instantiate", action="store_true")
    p.add_argument("--range-bound", type=int, default=0, metavar="N")
    p.add_argument("--linearize-exact", action="store_true")
    p.add_argument("--timeout", type=float, default=60.0, metavar="S")
    p.add_argument("--max-states", type=int, default=1_000_000, metavar="K")
    p.add_argument("--stats", metavar="CSV", help="append a statistics row to this file")
    p.add_argument("--emit-dfa", metavar="DOT", help="write the automaton in DOT format")
    p.add_argument("--model", action="store_true", help="print a model after sat")
    return p


def config_from_args(args) -> SolverConfig:
    off = args.no_opt
    return SolverConfig(
        classic=args.classic,
        rewrite=not (off or args.no_rewrite),
        prune=not (off or args.no_prune),
        instantiate=not (off or args.no_instantiate),
        range_bound=args.range_bound,
        linearize_exact=args.linearize_exact,
        timeout=args.timeout if args.timeout > 0 else None,
        max_states=args.max_states,
    )


def _append_stats(path: str, run) -> None:
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        fh.write(emit_stats(run, header=new))


def run_solve(argv) -> int:
    args = solve_parser().parse_args(argv)
    config = config_from_args(args)
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text()
        script = parse(text)
        commands = script.commands or ["check-sat"]
        result = None
        for cmd in commands:
            if cmd == "check-sat":
                result = solve_formula(script.formula(), script.variables, config, name=args.file)
                print(result.verdict, flush=True)
                if args.model and result.sat:
                    print(_model_block(result.model, script.variables))
                if args.stats:
                    _append_stats(args.stats, result.stats)
                if args.emit_dfa:
                    Path(args.emit_dfa).write_text(fa.to_dot(result.automaton, _label))
            elif cmd == "get-model":
                if result is None or not result.sat:
                    print('(error "model is not available")')
                elif not args.model:
                    print(_model_block(result.model, script.variables))
            elif cmd == "exit":
                break
    except (Timeout, ResourceLimit) as exc:
        print("unknown")
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _label(payload) -> str:
    if payload is None:
        return "sink"
    if hasattr(payload, "kind"):
        return to_text(payload)
    return str(payload)


def _model_block(model: dict, variables) -> str:
    body = model_text(model, variables)
    return "(\n" + "\n".join("  " + line for line in body.splitlines()) + "\n)" if body else "()"


def run_gen_frobenius(argv) -> int:
    p = argparse.ArgumentParser(prog="solver gen-frobenius")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    args = p.parse_args(argv)
    try:
        sys.stdout.write(frobenius_text(args.a, args.b))
    except NotCoprime as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def run_corpus(argv) -> int:
    p = argparse.ArgumentParser(prog="solver corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--out", required=True)
    args = p.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"seed {args.seed}")
    width = len(str(max(args.count - 1, 0)))
    for i, f in enumerate(random_corpus(args.seed, args.count)):
        path = out / f"corpus_{args.seed}_{i:0{width}d}.smt2"
        path.write_text(f"; seed {args.seed} index {i}\n" + script_text(f, sorted(f.fv)))
    print(f"wrote {args.count} files to {out}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "gen-frobenius":
        return run_gen_frobenius(argv[1:])
    if argv and argv[0] == "corpus":
        return run_corpus(argv[1:])
    return run_solve(argv)


if __name__ == "__main__":
    sys.exit(main())
