"""Solver configuration."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SolverConfig:
    classic: bool = False
    rewrite: bool = True
    prune: bool = True
    instantiate: bool = True
    range_bound: int = 0
    linearize_exact: bool = False
    timeout: float | None = 60.0
    max_states: int = 1_000_000
    check_invariants: bool = True

    @property
    def optimized(self) -> bool:
        return self.rewrite or self.prune or self.instantiate

    def without_optimizations(self) -> "SolverConfig":
        return replace(self, rewrite=False, prune=False, instantiate=False)

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


NO_OPT = SolverConfig(rewrite=False, prune=False, instantiate=False)
