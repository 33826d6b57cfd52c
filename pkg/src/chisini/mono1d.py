"""One-variable monotone analysis.

Level intervals ``[a, b]`` of ``f^{-1}{y}`` are found by bisection, batched
over many targets at once.  After bisection each endpoint is snapped to the
shortest decimal inside its final bracket, so a level ending at ``0.5`` is
reported as ``0.5`` and not ``0.50000000003``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .domain import Univariate
from .errors import NotInRange, NotMonotone, PreconditionFailed

POLICIES = ("leftmost", "rightmost", "midpoint")


def as_univariate(f, lo: float | None = None, hi: float | None = None, name: str = "f") -> Univariate:
    if isinstance(f, Univariate):
        return f
    if lo is None or hi is None:
        raise ValueError("bounds are required for a plain callable")
    return Univariate(f, float(lo), float(hi), name=name)


SNAP_DIGITS = 6


def snap(lo: np.ndarray, hi: np.ndarray, digits: int = 16, with_mask: bool = False):
    """Shortest decimal with at most ``digits`` places in each bracket ``[lo, hi]``.

    Brackets without such a decimal get their midpoint.
    """
    scalar = np.ndim(lo) == 0 and np.ndim(hi) == 0
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    mid = 0.5 * (lo + hi)
    out = mid.copy()
    todo = np.ones(mid.shape, dtype=bool)
    for d in range(digits + 1):
        c = np.round(mid, d)
        ok = todo & (c >= lo) & (c <= hi)
        out[ok] = c[ok]
        todo &= ~ok
        if not todo.any():
            break
    found = ~todo
    if scalar:
        out, found = float(out[0]), bool(found[0])
    if with_mask:
        return out, found
    return out


def bisect_boundary(pred: Callable[[np.ndarray], np.ndarray], lo, hi, cfg: SolverConfig = DEFAULT_CONFIG,
                    watch: Optional[Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]] = None):
    """Vectorised bisection for a predicate that switches from False to True.

    ``pred(lo)`` is assumed False and ``pred(hi)`` True.  Returns the final
    brackets ``(lo, hi)``.  ``watch(idx, mid, lo, hi)`` may flag entries whose
    midpoint reveals a monotonicity violation; these raise NotMonotone.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    active = hi - lo > cfg.tol_dom
    for _ in range(cfg.max_bisect):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        mid = 0.5 * (lo[idx] + hi[idx])
        stuck = (mid <= lo[idx]) | (mid >= hi[idx])
        if watch is not None:
            bad = watch(idx, mid, lo[idx], hi[idx])
            if np.any(bad):
                raise NotMonotone(f"monotonicity violated near t={mid[np.argmax(bad)]:.12g}")
        p = np.asarray(pred(idx, mid), dtype=bool)
        hi[idx[p & ~stuck]] = mid[p & ~stuck]
        lo[idx[~p & ~stuck]] = mid[~p & ~stuck]
        active[idx[stuck]] = False
        active &= hi - lo > cfg.tol_dom
    return lo, hi


def locate(pred, lo, hi, cfg: SolverConfig = DEFAULT_CONFIG, watch=None):
    """Boundary of a False-to-True predicate, as a point plus its final bracket.

    Bisection runs to ``tol_dom``; a bracket holding a short decimal (at most
    ``SNAP_DIGITS`` places) is snapped to it, any other bracket is refined
    down to floating-point resolution.
    """
    l, h = bisect_boundary(pred, lo, hi, cfg, watch)
    out, done = snap(l, h, SNAP_DIGITS, with_mask=True)
    rest = np.flatnonzero(~done)
    if rest.size:
        fine = cfg.with_(tol_dom=1e-300)
        sub_watch = None if watch is None else (lambda i, m, a, b: watch(rest[i], m, a, b))
        l2, h2 = bisect_boundary(lambda i, t: pred(rest[i], t), l[rest], h[rest], fine, sub_watch)
        l[rest], h[rest] = l2, h2
        out[rest] = 0.5 * (l2 + h2)
    return out, l, h


@dataclass(frozen=True)
class LevelInterval:
    y: float
    a: float
    b: float
    a_attained: bool
    b_attained: bool


@dataclass(frozen=True)
class LevelBounds:
    """Batched level intervals; arrays aligned with the targets."""

    y: np.ndarray
    a: np.ndarray
    b: np.ndarray
    a_attained: np.ndarray
    b_attained: np.ndarray

    def __len__(self) -> int:
        return len(self.y)

    def __getitem__(self, i) -> LevelInterval:
        return LevelInterval(float(self.y[i]), float(self.a[i]), float(self.b[i]),
                             bool(self.a_attained[i]), bool(self.b_attained[i]))


def level_bounds(f: Univariate, y, cfg: SolverConfig = DEFAULT_CONFIG, *, strict_tol: float | None = None) -> LevelBounds:
    """``a = inf{t : f(t) >= y - tol}`` and ``b = sup{t : f(t) <= y + tol}`` for every target.

    ``tol`` defaults to ``cfg.tol_probe``.  Attainment of an endpoint means
    ``|f(a) - y| <= tol_val``, or that f has no jump across the final bracket
    (its value gap there is at most ``tol_jump``).
    """
    tol = cfg.tol_probe if strict_tol is None else strict_tol
    Y = np.atleast_1d(np.asarray(y, dtype=float))
    lo, hi = f.lo, f.hi
    f_lo, f_hi = f(lo), f(hi)
    if f_lo > f_hi + cfg.tol_val:
        raise NotMonotone(f"{f.name}: f(lo)={f_lo:.12g} > f(hi)={f_hi:.12g}")
    out_of_range = (Y < f_lo - cfg.tol_val) | (Y > f_hi + cfg.tol_val)
    if out_of_range.any():
        bad = Y[out_of_range][0]
        raise NotInRange(f"y={bad:.12g} lies outside [{f_lo:.12g}, {f_hi:.12g}]")
    m = Y.size

    def watch(idx, mid, l, h):
        v = f(mid)
        return (v < f(l) - cfg.tol_val) | (v > f(h) + cfg.tol_val)

    # a: first t with f(t) >= y - tol
    a_lo = np.full(m, lo)
    a_hi = np.full(m, hi)
    at_lo = f_lo >= Y - tol
    need = ~at_lo
    a = np.full(m, lo)
    a_gap = np.zeros(m)
    if need.any():
        Yn = Y[need]
        a[need], l, h = locate(lambda i, t: f(t) >= Yn[i] - tol, a_lo[need], a_hi[need], cfg, watch)
        a_gap[need] = f(h) - f(l)
    # b: last t with f(t) <= y + tol
    b = np.full(m, hi)
    b_gap = np.zeros(m)
    at_hi = f_hi <= Y + tol
    need = ~at_hi
    if need.any():
        Yn = Y[need]
        b[need], l, h = locate(lambda i, t: f(t) > Yn[i] + tol, np.full(need.sum(), lo), np.full(need.sum(), hi),
                               cfg, watch)
        b_gap[need] = f(h) - f(l)
    b = np.maximum(a, b)
    a_att = (np.abs(f(a) - Y) <= cfg.tol_val) | (a_gap <= cfg.tol_jump)
    b_att = (np.abs(f(b) - Y) <= cfg.tol_val) | (b_gap <= cfg.tol_jump)
    return LevelBounds(Y, a, b, a_att, b_att)


def level_interval(f: Univariate, y: float, cfg: SolverConfig = DEFAULT_CONFIG) -> LevelInterval:
    """Level interval of a nondecreasing f at the value y."""
    return level_bounds(f, [y], cfg)[0]


@dataclass(frozen=True)
class QuasiInverse:
    """Right-inverse of a monotone f with a choice policy inside each level."""

    source: Univariate
    policy: str = "midpoint"
    cfg: SolverConfig = DEFAULT_CONFIG
    decreasing: bool = False

    @property
    def domain(self) -> tuple[float, float]:
        ends = sorted((self.source(self.source.lo), self.source(self.source.hi)))
        return ends[0], ends[1]

    def _increasing(self) -> Univariate:
        if not self.decreasing:
            return self.source
        s = self.source
        return Univariate(lambda t: -s(t), s.lo, s.hi, name=f"-{s.name}", claims_continuous=s.claims_continuous)

    def levels(self, y) -> LevelBounds:
        Y = np.asarray(y, dtype=float)
        return level_bounds(self._increasing(), -Y if self.decreasing else Y, self.cfg)

    def __call__(self, y):
        arr = np.asarray(y, dtype=float)
        lb = self.levels(np.atleast_1d(arr).ravel())
        if self.policy == "leftmost":
            g = lb.a
        elif self.policy == "rightmost":
            g = lb.b
        else:
            g = 0.5 * (lb.a + lb.b)
        if arr.ndim == 0:
            return float(g[0])
        return g.reshape(arr.shape)


def quasi_inverse(f: Univariate, policy: str = "midpoint", cfg: SolverConfig = DEFAULT_CONFIG) -> QuasiInverse:
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    t = np.linspace(f.lo, f.hi, 257)
    d = np.diff(f(t))
    if np.all(d >= -cfg.tol_val):
        return QuasiInverse(f, policy, cfg, decreasing=False)
    if np.all(d <= cfg.tol_val):
        return QuasiInverse(f, policy, cfg, decreasing=True)
    i = int(np.argmax(np.abs(np.minimum(d, 0))))
    raise NotMonotone(f"{f.name} is neither nondecreasing nor nonincreasing (near t={t[i]:.6g})")


@dataclass(frozen=True)
class IdempotencyReport:
    passed: bool
    max_residual: float
    counterexample: Optional[float]
    samples: int


def check_idempotency_equation(f: Univariate, samples=1001, tol: float = DEFAULT_CONFIG.tol_val) -> IdempotencyReport:
    """Test ``f(f(t)) = f(t)`` on an evenly spaced grid (or on given samples).

    Values of f that leave the interval of f count as failures.
    """
    if np.ndim(samples) == 0:
        t = np.linspace(f.lo, f.hi, int(samples))
    else:
        t = np.asarray(samples, dtype=float)
    ft = f(t)
    inside = (ft >= f.lo - tol) & (ft <= f.hi + tol)
    res = np.full(t.shape, np.inf)
    res[inside] = np.abs(f(np.clip(ft[inside], f.lo, f.hi)) - ft[inside])
    i = int(np.argmax(res))
    worst = float(res[i])
    passed = worst <= tol
    return IdempotencyReport(passed, worst, None if passed else float(t[i]), int(t.size))


def recognize_clamp(f: Univariate, cfg: SolverConfig = DEFAULT_CONFIG, samples: int = 1001):
    """Recover ``(a, b)`` with ``f(t) = Max(a, Min(t, b))``, or None.

    Raises PreconditionFailed when f is not nondecreasing.  Functions that
    are nondecreasing but fail ``f o f = f`` are not clamps and give None.
    """
    t = np.linspace(f.lo, f.hi, samples)
    if np.any(np.diff(f(t)) < -cfg.tol_val):
        raise PreconditionFailed(f"{f.name} is not nondecreasing")
    if not check_idempotency_equation(f, t, cfg.tol_val).passed:
        return None
    a, b = f(f.lo), f(f.hi)
    # the left plateau ends at a and the right plateau starts at b
    if a > f.lo + cfg.tol_dom:
        a_end = level_interval(f, a, cfg).b
        if abs(a_end - a) > 10 * cfg.tol_dom + cfg.tol_val:
            return None
        a = a_end
    if b < f.hi - cfg.tol_dom:
        b_start = level_interval(f, b, cfg).a
        if abs(b_start - b) > 10 * cfg.tol_dom + cfg.tol_val:
            return None
        b = b_start
    fresh = np.random.default_rng(cfg.rng_seed).uniform(f.lo, f.hi, samples)
    fresh = np.concatenate([fresh, [f.lo, f.hi]])
    resid = np.max(np.abs(f(fresh) - np.maximum(a, np.minimum(fresh, b))))
    if resid > cfg.tol_val:
        return None
    return float(a), float(b)


@dataclass(frozen=True)
class StrictnessVerdict:
    one_to_one: bool
    min_increment: float
    at: Optional[float]
    samples: int
    evidence: str = "sampled evidence"


def strictness_test(f: Univariate, samples: int = 1025, tol_strict: float = 0.0) -> StrictnessVerdict:
    """Sampled injectivity evidence for a nondecreasing f on an even grid."""
    t = np.linspace(f.lo, f.hi, samples)
    d = np.diff(f(t))
    i = int(np.argmin(d))
    ok = bool(np.all(d > tol_strict))
    return StrictnessVerdict(ok, float(d[i]), None if ok else float(t[i]), samples)
