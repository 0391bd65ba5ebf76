"""Solve every two-coin Frobenius instance in a range and print CSV.

    python scripts/run_frobenius.py --lo 2 --hi 11 [--no-opt] [--classic]
"""

from __future__ import annotations

import argparse
import csv
import sys

from liaderiv.config import SolverConfig
from liaderiv.errors import ResourceLimit, Timeout
from liaderiv.frobenius import coprime_pairs, frobenius_by_search, gen_frobenius
from liaderiv.solver import solve_formula


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lo", type=int, default=2)
    p.add_argument("--hi", type=int, default=11)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--classic", action="store_true")
    mode.add_argument("--no-opt", action="store_true")
    p.add_argument("--timeout", type=float, default=60.0)
    args = p.parse_args(argv)
    cfg = SolverConfig(classic=args.classic, timeout=args.timeout)
    if args.no_opt:
        cfg = cfg.without_optimizations()
    cols = ["a", "b", "expected", "verdict", "p", "match", "wall-ms", "states-created",
            "peak-live-states", "final-minimized-states"]
    w = csv.DictWriter(sys.stdout, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    failures = 0
    for a, b in coprime_pairs(args.lo, args.hi):
        want = frobenius_by_search(a, b)
        s = gen_frobenius(a, b)
        row = {"a": a, "b": b, "expected": want}
        try:
            r = solve_formula(s.formula(), s.variables, cfg, name=f"frobenius_{a}_{b}")
        except (Timeout, ResourceLimit) as exc:
            row.update(verdict="unknown", p="", match=False, **{"wall-ms": "", "states-created": "",
                       "peak-live-states": "", "final-minimized-states": str(exc)})
            failures += 1
        else:
            got = r.model["p"] if r.sat else ""
            st = r.stats.row()
            row.update(verdict=r.verdict, p=got, match=got == want,
                       **{k: st[k] for k in cols[6:]})
            failures += got != want
        w.writerow(row)
        sys.stdout.flush()
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
