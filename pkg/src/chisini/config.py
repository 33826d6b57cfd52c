from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs used by the level-set machinery and the solvers.

    ``tol_val`` is the tolerance for equality of function values and
    ``tol_dom`` the resolution of every bisection in the domain.  Strict
    inequalities ``F(x') < F(x)`` are realised as ``F(x') < F(x) - tol_probe``.
    """

    tol_val: float = 1e-9
    tol_dom: float = 1e-10
    max_bisect: int = 200
    oracle_grid: int = 201
    levelset_scan: int = 33
    rng_seed: int = 0
    tol_probe: float = 1e-12
    # a distance below this counts as zero (Omega membership, correction and certificate tests)
    tol_zero: float = 1e-9
    # value gaps above this are treated as discontinuities
    tol_jump: float = 1e-6
    tol_solve: float = 1e-6
    # fraction of the span excluded near open endpoints when sampling
    open_margin: float = 0.05

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("oracle_grid", "levelset_scan"):
                if value < 2:
                    raise ValueError(f"{f.name} must be >= 2, got {value}")
            elif f.name == "max_bisect":
                if value < 1:
                    raise ValueError("max_bisect must be positive")
            elif f.name == "rng_seed":
                continue
            elif f.name == "open_margin":
                if not 0 <= value < 0.5:
                    raise ValueError("open_margin must lie in [0, 0.5)")
            elif not value > 0:
                raise ValueError(f"{f.name} must be > 0, got {value}")

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)


DEFAULT_CONFIG = SolverConfig()
