"""Solvers for ``F = delta_F o G``.

* :func:`check_solvable` compares ``ran(F)`` with ``ran(delta_F)``.
* :func:`q_solution` builds ``g o F`` from a quasi-inverse g of the diagonal.
* :func:`metric_solution` builds the nondecreasing idempotent solution ``M_F``
  from level intervals and Chebyshev distances to the strict lower and upper
  sets, with the corrected interpolant on pathological level sets.
* :func:`idempotize`, :func:`conjugated_level_mean` and
  :func:`factorize_transformed_continuous` are built on top.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Optional

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .domain import (
    Box,
    FunctionHandle,
    FunctionMeta,
    Interval,
    Univariate,
    compose_inner,
    diagonal,
    sampled_monotonicity,
)
from .errors import GeneratorNotMonotone, NotIdempotizable, NotMonotone, NotSubinterval, Unsolvable
from .levelset import LevelDataBatch, corrected_distances, level_data_batch
from .mono1d import QuasiInverse, bisect_boundary, level_interval, quasi_inverse, snap, strictness_test

KINDS = ("metric", "quasi_inverse", "conjugated")


# ---------------------------------------------------------------------------
# solvability


@dataclass(frozen=True)
class RangeDescription:
    """Finite union of intervals; ``pieces`` holds ``(lo, hi, lo_closed, hi_closed)``."""

    pieces: tuple
    approximate: bool = True

    def contains(self, y: float, tol: float = 0.0) -> bool:
        for lo, hi, lc, hc in self.pieces:
            above = y >= lo - tol if lc else y > lo + tol
            below = y <= hi + tol if hc else y < hi - tol
            if above and below:
                return True
        return False

    def __str__(self) -> str:
        parts = []
        for lo, hi, lc, hc in self.pieces:
            if lo == hi and lc and hc:
                parts.append(f"{{{lo:.12g}}}")
            else:
                parts.append(f"{'[' if lc else '('}{lo:.12g}, {hi:.12g}{']' if hc else ')'}")
        return " U ".join(parts)


@dataclass(frozen=True)
class Jump:
    """A jump of the diagonal at ``t`` from ``left`` to ``right``; ``value`` is delta(t)."""

    t: float
    left: float
    right: float
    value: float

    @property
    def gap(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class SolvabilityReport:
    range_equal: bool
    ran_diag: RangeDescription
    ran_F: RangeDescription
    witness: Optional[tuple] = None
    witness_value: Optional[float] = None
    unique: Optional[bool] = None
    jumps: tuple = ()
    monotone: bool = True
    samples: int = 0
    evidence: str = "sampled evidence"

    def to_dict(self) -> dict:
        return {
            "range_equal": self.range_equal,
            "ran_diag": str(self.ran_diag),
            "ran_F": str(self.ran_F),
            "witness": list(self.witness) if self.witness is not None else None,
            "witness_value": self.witness_value,
            "unique": self.unique,
            "jumps": [[j.t, j.left, j.right] for j in self.jumps],
            "monotone": self.monotone,
            "samples": self.samples,
        }

    def to_text(self) -> str:
        lines = [
            f"range_equal={str(self.range_equal).lower()}",
            f"ran_diag={self.ran_diag}",
            f"ran_F={self.ran_F}",
            f"unique={str(self.unique).lower()} ({self.evidence})",
        ]
        for j in self.jumps:
            lines.append(f"diagonal_jump t={j.t:.12g} from={j.left:.12g} to={j.right:.12g}")
        if self.witness is not None:
            pt = ",".join(f"{v:.12g}" for v in self.witness)
            lines.append(f"witness x=({pt}) F={self.witness_value:.12g}")
        if not self.monotone:
            lines.append("warning: sampled monotonicity violation")
        return "\n".join(lines)


def find_jumps(f: Univariate, cfg: SolverConfig = DEFAULT_CONFIG, samples: int = 1025) -> tuple:
    """Jumps of a nondecreasing f larger than ``tol_jump``.

    Every grid cell with an increment above ``tol_jump`` is narrowed by
    repeatedly keeping the half with the larger increment; cells of a
    continuous f lose their increment on the way and are dropped.
    """
    t = np.linspace(f.lo, f.hi, samples)
    v = f(t)
    cand = np.flatnonzero(np.diff(v) > cfg.tol_jump)
    if cand.size == 0:
        return ()
    lo, hi = t[cand].copy(), t[cand + 1].copy()
    flo, fhi = v[cand].copy(), v[cand + 1].copy()
    active = np.ones(cand.size, dtype=bool)
    for _ in range(cfg.max_bisect):
        active &= (hi - lo > cfg.tol_dom) & (fhi - flo > cfg.tol_jump)
        if not active.any():
            break
        i = np.flatnonzero(active)
        mid = 0.5 * (lo[i] + hi[i])
        stuck = (mid <= lo[i]) | (mid >= hi[i])
        active[i[stuck]] = False
        i, mid = i[~stuck], mid[~stuck]
        fm = f(mid)
        left = (fm - flo[i]) >= (fhi[i] - fm)
        hi[i[left]], fhi[i[left]] = mid[left], fm[left]
        lo[i[~left]], flo[i[~left]] = mid[~left], fm[~left]
    keep = fhi - flo > cfg.tol_jump
    jumps = []
    for l, h, a, b in zip(lo[keep], hi[keep], flo[keep], fhi[keep]):
        ts = float(snap(np.array([l]), np.array([h]))[0])
        if jumps and abs(jumps[-1].t - ts) <= 10 * cfg.tol_dom:
            continue
        # one-sided limits by linear extrapolation from one more bracket width outside
        w = h - l
        if l - w >= f.lo:
            a = a + (a - f(l - w)) * (ts - l) / w
        if h + w <= f.hi:
            b = b - (f(h + w) - b) * (h - ts) / w
        jumps.append(Jump(ts, float(a), float(b), float(f(ts))))
    return tuple(jumps)


def _diag_range(f: Univariate, jumps, interval: Interval, tol: float) -> RangeDescription:
    start, end = f(f.lo), f(f.hi)
    pieces = []
    cur, cur_closed = start, interval.lo_closed
    for j in jumps:
        # a one-sided limit belongs to the range when delta takes it at t
        # or stays flat next to the jump
        eps = 1e-6 * (f.hi - f.lo)
        left_in = abs(j.value - j.left) <= tol or abs(f(max(f.lo, j.t - eps)) - j.left) <= tol
        right_in = abs(j.value - j.right) <= tol or abs(f(min(f.hi, j.t + eps)) - j.right) <= tol
        pieces.append((cur, j.left, cur_closed, left_in))
        if tol < abs(j.value - j.left) and tol < abs(j.value - j.right):
            pieces.append((j.value, j.value, True, True))
        cur, cur_closed = j.right, right_in
    pieces.append((cur, end, cur_closed or cur == end, interval.hi_closed))
    return RangeDescription(tuple(pieces))


def _in_gap(values: np.ndarray, jumps, cfg: SolverConfig) -> np.ndarray:
    hit = np.zeros(values.shape, dtype=bool)
    for j in jumps:
        inside = (values > j.left + cfg.tol_jump) & (values < j.right - cfg.tol_jump)
        hit |= inside & (np.abs(values - j.value) > cfg.tol_val)
    return hit


def _path_points(lo, hi, order, s):
    """Axis-first monotone path from lo*1 to hi*1 raising axes in ``order``."""
    n = len(order)
    P = np.full((len(s), n), lo, dtype=float)
    for k, axis in enumerate(order):
        P[:, axis] = lo + np.clip(s - k, 0.0, 1.0) * (hi - lo)
    return P


def _witness_search(F: FunctionHandle, jumps, cfg: SolverConfig):
    lo, hi = F.bounds()
    n = F.arity
    k = max(2, min(cfg.levelset_scan, int(2e5 ** (1.0 / n))))
    axis = np.linspace(lo, hi, k)
    grid = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    rng = np.random.default_rng(cfg.rng_seed)
    rand = F.box.random_points(rng, 4096, cfg.open_margin)
    X = np.vstack([grid, rand])
    V = F.evaluate(X)
    used = len(X)
    hit = _in_gap(V, jumps, cfg)
    if hit.any():
        i = int(np.flatnonzero(hit)[0])
        return X[i], float(V[i]), used
    orders = list(permutations(range(n))) if n <= 4 else [tuple(range(n)), tuple(reversed(range(n)))]
    for order in orders:
        for j in jumps:
            target = 0.5 * (j.left + j.right)

            def pred(i, s):
                return F.evaluate(_path_points(lo, hi, order, s)) >= target

            l, h = bisect_boundary(pred, [0.0], [float(n)], cfg)
            P = _path_points(lo, hi, order, np.array([l[0], h[0]]))
            PV = F.evaluate(P)
            used += 2
            hit = _in_gap(PV, jumps, cfg)
            if hit.any():
                i = int(np.flatnonzero(hit)[0])
                return P[i], float(PV[i]), used
    return None, None, used


_SOLVABLE_CACHE: dict = {}
_SOLVABLE_LOCK = threading.Lock()


def check_solvable(F: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG) -> SolvabilityReport:
    """Decide whether ``ran(F) = ran(delta_F)`` (sampled evidence) and whether delta_F is one-to-one.

    For nondecreasing F both ranges share their endpoints, so a mismatch can
    only come from a value of F inside a jump gap of the diagonal.
    """
    key = (id(F), cfg)
    with _SOLVABLE_LOCK:
        hit = _SOLVABLE_CACHE.get(key)
    if hit is not None and hit[0] is F:
        return hit[1]
    f = diagonal(F)
    monotone = True
    if F.meta.monotonicity == "unverified":
        viol, _, _ = sampled_monotonicity(F, 2000, cfg.rng_seed, cfg.open_margin)
        monotone = viol <= cfg.tol_val
    jumps = find_jumps(f, cfg)
    ran_diag = _diag_range(f, jumps, F.box.interval, cfg.tol_val)
    witness, wval, used = (None, None, 0)
    if jumps:
        witness, wval, used = _witness_search(F, jumps, cfg)
    range_equal = witness is None
    if range_equal:
        ran_F = ran_diag
    else:
        ran_F = RangeDescription(((f(f.lo), f(f.hi), F.box.interval.lo_closed, F.box.interval.hi_closed),))
    unique = strictness_test(f).one_to_one
    report = SolvabilityReport(
        range_equal=range_equal,
        ran_diag=ran_diag,
        ran_F=ran_F,
        witness=None if witness is None else tuple(float(v) for v in witness),
        witness_value=wval,
        unique=unique,
        jumps=jumps,
        monotone=monotone,
        samples=used + 1025,
    )
    with _SOLVABLE_LOCK:
        if len(_SOLVABLE_CACHE) > 64:
            _SOLVABLE_CACHE.clear()
        _SOLVABLE_CACHE[key] = (F, report)
    return report


def _require_solvable(F: FunctionHandle, cfg: SolverConfig) -> SolvabilityReport:
    report = check_solvable(F, cfg)
    if not report.monotone:
        raise NotMonotone(f"{F.name} failed the sampled monotonicity check")
    if not report.range_equal:
        raise Unsolvable(
            f"ran(F) differs from ran(delta_F): F takes the value {report.witness_value:.12g} "
            f"outside ran(delta_F) = {report.ran_diag}",
            report,
        )
    return report


# ---------------------------------------------------------------------------
# solutions


@dataclass(frozen=True)
class Correction:
    """Replacement data for one level set.

    ``conditions`` lists which of the two pathological configurations fired:
    "lower" (the infimum a* is not attained and some level point in Omega has
    zero distance to the strict lower set) and/or "upper" (dually for b*).
    """

    y: float
    a_star: float
    b_star: float
    conditions: tuple
    probes: tuple = field(default=())


def _level_key(y: float) -> float:
    return float(f"{y:.12g}")


class ChisiniSolution(FunctionHandle):
    """A solution G of ``F = delta_F o G`` evaluable as a function handle."""

    def __init__(self, source: FunctionHandle, kind: str, cfg: SolverConfig, evaluate: Callable,
                 report: Optional[SolvabilityReport] = None, *, box: Box | None = None, name: str | None = None,
                 policy: str | None = None, correct: bool = True):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        meta = FunctionMeta(
            declared_symmetries=source.meta.declared_symmetries,
            claims_continuous=False,
            claims_nondecreasing=True,
            monotonicity="declared",
            critical_points=source.meta.critical_points,
            description=f"{kind} solution for {source.name}",
        )
        super().__init__(box or source.box, meta, name or f"{kind}[{source.name}]")
        self.source = source
        self.kind = kind
        self.cfg = cfg
        self.report = report
        self.policy = policy
        self.correct = correct
        self.correction_cache: dict = {}
        self._cache_lock = threading.Lock()
        self._scan: Optional[LevelDataBatch] = None
        self._evaluate_impl = evaluate

    def _evaluate(self, X):
        return self._evaluate_impl(self, X)

    # -- correction bookkeeping -------------------------------------------

    def scan_data(self) -> LevelDataBatch:
        """Level data on the ``levelset_scan^n`` probe grid (computed once)."""
        if self._scan is None:
            F = self.source
            lo, hi = F.bounds()
            k = self.cfg.levelset_scan
            axis = np.linspace(lo, hi, k)
            P = np.stack(np.meshgrid(*([axis] * F.arity), indexing="ij"), axis=-1).reshape(-1, F.arity)
            self._scan = level_data_batch(F, P, self.cfg)
        return self._scan

    def correction(self, y: float) -> Optional[Correction]:
        key = _level_key(y)
        with self._cache_lock:
            if key in self.correction_cache:
                return self.correction_cache[key]
        value = detect_correction(self.source, y, self.scan_data(), self.cfg)
        with self._cache_lock:
            # first writer wins; a concurrent duplicate computes the same record
            return self.correction_cache.setdefault(key, value)

    def corrections(self) -> list:
        with self._cache_lock:
            return [c for c in self.correction_cache.values() if c is not None]

    def level_data(self, X) -> LevelDataBatch:
        return level_data_batch(self.source, X, self.cfg)


def _interpolate(a, b, d_lt, d_gt, X):
    """Interpolant between a and b with the limiting values for infinite distances."""
    fin_lt, fin_gt = np.isfinite(d_lt), np.isfinite(d_gt)
    out = np.empty(len(a))
    both = fin_lt & fin_gt
    with np.errstate(invalid="ignore", divide="ignore"):
        out[both] = (d_gt[both] * a[both] + d_lt[both] * b[both]) / (d_gt[both] + d_lt[both])
    m = fin_gt & ~fin_lt
    out[m] = b[m] - d_gt[m]
    m = fin_lt & ~fin_gt
    out[m] = a[m] + d_lt[m]
    m = ~fin_lt & ~fin_gt
    out[m] = 0.5 * X[m].min(axis=1) + 0.5 * X[m].max(axis=1)
    return out


def _metric_eval(sol: ChisiniSolution, X):
    ld = level_data_batch(sol.source, X, sol.cfg)
    M = np.where(ld.in_omega, _interpolate(ld.a, ld.b, ld.d_lt, ld.d_gt, ld.X), 0.5 * (ld.a + ld.b))
    if sol.correct:
        suspect = np.flatnonzero(~ld.a_attained | ~ld.b_attained)
        if suspect.size:
            keys = np.array([_level_key(v) for v in ld.y[suspect]])
            for key in np.unique(keys):
                corr = sol.correction(float(key))
                if corr is None:
                    continue
                idx = suspect[keys == key]
                dl, dg = corrected_distances(sol.source, ld.X[idx], corr.a_star, corr.b_star)
                # keep the limiting case chosen by the original distances
                dl = np.where(np.isfinite(ld.d_lt[idx]), dl, math.inf)
                dg = np.where(np.isfinite(ld.d_gt[idx]), dg, math.inf)
                a = np.full(idx.size, corr.a_star)
                b = np.full(idx.size, corr.b_star)
                M[idx] = _interpolate(a, b, dl, dg, ld.X[idx])
    return M


def _boundary_probes(F: FunctionHandle, y: float, cfg: SolverConfig) -> np.ndarray:
    """Points of the level set ``F = y`` found by bisecting along each axis from scan-grid lines."""
    lo, hi = F.bounds()
    n = F.arity
    k = cfg.levelset_scan
    axis = np.linspace(lo, hi, k)
    found = []
    for i in range(n):
        if n > 1:
            rest = np.stack(np.meshgrid(*([axis] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
        else:
            rest = np.zeros((1, 0))
        m = len(rest)

        def line(idx, s):
            P = np.empty((len(idx), n))
            P[:, [j for j in range(n) if j != i]] = rest[idx]
            P[:, i] = s
            return P

        all_idx = np.arange(m)
        v_lo = F.evaluate(line(all_idx, np.full(m, lo)))
        v_hi = F.evaluate(line(all_idx, np.full(m, hi)))
        tol = cfg.tol_probe
        # lower boundary of {F >= y} and upper boundary of {F <= y} on each line
        for want_lower in (True, False):
            if want_lower:
                ok = np.flatnonzero((v_lo < y - tol) & (v_hi >= y - tol))
                pred = lambda j, s, ok=ok: F.evaluate(line(ok[j], s)) >= y - tol
            else:
                ok = np.flatnonzero((v_lo <= y + tol) & (v_hi > y + tol))
                pred = lambda j, s, ok=ok: F.evaluate(line(ok[j], s)) > y + tol
            if ok.size == 0:
                continue
            l, h = bisect_boundary(pred, np.full(ok.size, lo), np.full(ok.size, hi), cfg)
            found.append(line(ok, h if want_lower else l))
    if not found:
        return np.zeros((0, n))
    return np.vstack(found)


def detect_correction(F: FunctionHandle, y: float, scan: Optional[LevelDataBatch] = None,
                      cfg: SolverConfig = DEFAULT_CONFIG) -> Optional[Correction]:
    """Check whether the level set ``F = y`` needs the corrected interpolant.

    Returns ``(a*, b*)`` packed in a :class:`Correction`, or None.  The
    existence part is a probe scan: the ``levelset_scan^n`` grid plus level
    points reached by bisecting along each axis.
    """
    li = level_interval(diagonal(F), y, cfg)
    lower, upper = not li.a_attained, not li.b_attained
    if not (lower or upper):
        return None
    pts = []
    if scan is not None:
        sel = np.abs(scan.y - y) <= cfg.tol_val
        pts.append(scan.X[sel])
    pts.append(_boundary_probes(F, y, cfg))
    P = np.vstack(pts)
    if len(P) == 0:
        return None
    ld = level_data_batch(F, P, cfg)
    on_level = (np.abs(ld.y - y) <= cfg.tol_val) & ld.in_omega
    fired = []
    if lower and np.any(on_level & (ld.d_lt <= cfg.tol_zero)):
        fired.append("lower")
    if upper and np.any(on_level & (ld.d_gt <= cfg.tol_zero)):
        fired.append("upper")
    if not fired:
        return None
    hits = on_level & (((ld.d_lt <= cfg.tol_zero) & lower) | ((ld.d_gt <= cfg.tol_zero) & upper))
    probes = tuple(tuple(float(v) for v in p) for p in ld.X[hits][:5])
    return Correction(float(y), li.a, li.b, tuple(fired), probes)


def metric_solution(F: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG, *, correct: bool = True) -> ChisiniSolution:
    """The metric-interpolation solution ``M_F``.

    ``correct=False`` disables the level-set correction; it exists only as a
    negative control and may violate the equation.
    """
    report = _require_solvable(F, cfg)
    return ChisiniSolution(F, "metric", cfg, _metric_eval, report, correct=correct,
                           name=f"M[{F.name}]" + ("" if correct else "(uncorrected)"))


def q_solution(F: FunctionHandle, policy: str = "midpoint", cfg: SolverConfig = DEFAULT_CONFIG) -> ChisiniSolution:
    """``g o F`` with g a quasi-inverse of the diagonal section."""
    report = _require_solvable(F, cfg)
    g = quasi_inverse(diagonal(F), policy, cfg)

    def evaluate(sol, X):
        return g(F.evaluate(X))

    return ChisiniSolution(F, "quasi_inverse", cfg, evaluate, report, policy=policy, name=f"Q[{policy}][{F.name}]")


def idempotize(F: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG) -> ChisiniSolution:
    """``delta_F^{-1} o F`` for a strictly increasing diagonal."""
    f = diagonal(F)
    verdict = strictness_test(f)
    if not verdict.one_to_one:
        raise NotIdempotizable(
            f"the diagonal of {F.name} is not strictly increasing (flat near t={verdict.at:.6g})"
        )
    g = quasi_inverse(f, "midpoint", cfg)

    def evaluate(sol, X):
        return g(F.evaluate(X))

    return ChisiniSolution(F, "quasi_inverse", cfg, evaluate, None, policy="midpoint", name=f"idem[{F.name}]")


def conjugated_level_mean(F: FunctionHandle, phi: Univariate, psi: Callable | None = None,
                          cfg: SolverConfig = DEFAULT_CONFIG, interval: Interval | None = None) -> ChisiniSolution:
    """``G' = psi o M_F o (phi, ..., phi)`` on ``J^n``; solves the equation for ``F o (phi, ..., phi)``.

    ``phi`` must be strictly monotone and continuous from J into the
    interval of F; ``psi`` is a quasi-inverse of phi (built if omitted).
    """
    t = np.linspace(phi.lo, phi.hi, 1025)
    v = phi(t)
    d = np.diff(v)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise GeneratorNotMonotone(f"{phi.name} is not strictly monotone on [{phi.lo:g}, {phi.hi:g}]")
    sign = 1.0 if d[0] > 0 else -1.0
    if not phi.claims_continuous and find_jumps(Univariate(lambda s: sign * phi(s), phi.lo, phi.hi), cfg):
        raise GeneratorNotMonotone(f"{phi.name} is not continuous")
    if not np.all(F.box.interval.contains(v, cfg.tol_dom)):
        raise NotSubinterval(f"the values of {phi.name} leave the interval {F.box.interval}")
    if psi is None:
        psi = quasi_inverse(phi, "midpoint", cfg)
    M = metric_solution(F, cfg)
    J = interval if interval is not None else Interval.closed(phi.lo, phi.hi)
    F_prime = compose_inner(F, phi, J)
    n = F.arity

    def evaluate(sol, X):
        inner = np.clip(phi(X.reshape(-1)).reshape(X.shape), *F.bounds())
        return np.asarray(psi(M.evaluate(inner)), dtype=float)

    sol = ChisiniSolution(F_prime, "conjugated", cfg, evaluate, M.report, box=Box(J, n),
                          name=f"conj[{F.name},{phi.name}]")
    sol.inner = M
    return sol


@dataclass(frozen=True)
class Factorization:
    """Outcome of the continuous factorization ``F = f o M``."""

    passed: bool
    solution: Optional[ChisiniSolution]
    f: Optional[Univariate]
    violated: tuple
    certificate: object

    def __bool__(self) -> bool:
        return self.passed


def factorize_transformed_continuous(F: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG) -> Factorization:
    """Return ``(M_F, delta_F)`` when the continuity certificate passes."""
    from .verify import continuity_certificate

    cert = continuity_certificate(F, cfg)
    if not cert.passed:
        return Factorization(False, None, None, cert.failed_conditions(), cert)
    return Factorization(True, metric_solution(F, cfg), diagonal(F), (), cert)
