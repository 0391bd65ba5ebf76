"""Top-level solving: formula in, verdict, model and statistics out."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import automata as fa
from .classical import ClassicalBuilder
from .config import SolverConfig
from .derivatives import Deadline, DerivativeEngine
from .formula import Formula
from .simplify import simplify_state


@dataclass
class RunStats:
    file: str = ""
    verdict: str = ""
    wall_ms: float = 0.0
    states_created: int = 0
    peak_live_states: int = 0
    final_minimized_states: int | None = None
    hits: dict = field(default_factory=dict)

    HIT_COLUMNS = ("rewrite", "prune", "monotone", "range", "linearize")

    def row(self) -> dict:
        out = {
            "file": self.file,
            "verdict": self.verdict,
            "wall-ms": f"{self.wall_ms:.1f}",
            "states-created": self.states_created,
            "peak-live-states": self.peak_live_states,
            "final-minimized-states": "" if self.final_minimized_states is None else self.final_minimized_states,
        }
        for k in self.HIT_COLUMNS:
            out[f"hits-{k}"] = self.hits.get(k, 0)
        return out


def emit_stats(run: RunStats, header: bool = True) -> str:
    """CSV text for one run (with a header line unless ``header`` is False)."""
    buf = io.StringIO()
    row = run.row()
    w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
    if header:
        w.writeheader()
    w.writerow(row)
    return buf.getvalue()


@dataclass
class Result:
    sat: bool
    model: dict[str, int] | None
    automaton: fa.Automaton
    stats: RunStats

    @property
    def verdict(self) -> str:
        return "sat" if self.sat else "unsat"


def build(f: Formula, tracked: Sequence[str], config: SolverConfig, stats: RunStats | None = None) -> fa.Automaton:
    """Automaton for ``f`` over ``tracked`` using the configured construction."""
    stats = stats if stats is not None else RunStats()
    deadline = Deadline(config.timeout)
    if config.classic:
        b = ClassicalBuilder(tracked, config.max_states, deadline)
        a = fa.extend(b.build(f), tuple(tracked))
        stats.states_created = b.stats.peak_states
        stats.peak_live_states = b.stats.peak_states
        return a
    hits = stats.hits

    def normalize(g: Formula) -> Formula:
        return simplify_state(g, config, hits)

    engine = DerivativeEngine(
        normalize if config.optimized else None,
        config.max_states,
        deadline,
        config.check_invariants,
    )
    a = engine.build(f, tracked)
    stats.states_created = engine.stats.states_created
    stats.peak_live_states = engine.stats.peak_live_states
    return a


def solve_formula(
    f: Formula,
    tracked: Sequence[str] | None = None,
    config: SolverConfig | None = None,
    name: str = "",
    minimize_final: bool = True,
) -> Result:
    config = config or SolverConfig()
    tracked = tuple(sorted(f.fv)) if tracked is None else tuple(tracked)
    stats = RunStats(file=name)
    t0 = time.perf_counter()
    a = build(f, tracked, config, stats)
    word = fa.shortest_accepting_word(a)
    sat = word is not None
    model = fa.word_to_values(tracked, word) if sat else None
    stats.verdict = "sat" if sat else "unsat"
    if minimize_final:
        stats.final_minimized_states = fa.complete_size(a)
    stats.wall_ms = (time.perf_counter() - t0) * 1000
    return Result(sat, model, a, stats)
