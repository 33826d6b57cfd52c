"""Continuity certificate and the property suite.

Everything here is sampled evidence: a deterministic sample plan (grid,
seeded random points and the catalog's critical points) is run through the
level-set machinery and each verdict carries its residuals and witnesses.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .domain import (
    FunctionHandle,
    Interval,
    Permutation,
    diagonal,
    dualize,
    restrict,
    transform_values,
)
from .errors import Unsolvable
from .levelset import brute_force_distances_batch, level_data_batch
from .mono1d import level_bounds
from .solver import ChisiniSolution, check_solvable, metric_solution

# condition labels:
#   range   ran F equals the range of the diagonal section
#   12      off Omega the level interval [a, b] is a single point
#   13, 14  a zero lower (upper) distance only on levels whose a (b) is attained
#   15, 16  b from the left (a from the right) along each axis never undershoots a (overshoots b)
CONDITIONS = ("range", "12", "13", "14", "15", "16")
MAX_VIOLATIONS = 20


def _plain(v):
    """JSON-friendly copy: inf and nan become strings, arrays become lists."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    return v


def to_json_text(obj) -> str:
    """Structured text with a stable key order."""
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    elif isinstance(obj, (list, tuple)):
        obj = [o.to_dict() if hasattr(o, "to_dict") else o for o in obj]
    return json.dumps(_plain(obj), sort_keys=True, indent=2)


def _fmt_point(x) -> str:
    return "(" + ",".join(f"{float(v):.12g}" for v in x) + ")"


# ---------------------------------------------------------------------------
# continuity certificate


@dataclass(frozen=True)
class Violation:
    condition: str
    point: tuple
    values: dict

    def to_dict(self) -> dict:
        return {"condition": self.condition, "point": list(self.point), "values": self.values}


@dataclass(frozen=True)
class ContinuityCertificate:
    cond_range: bool
    cond_12: bool
    cond_13: bool
    cond_14: bool
    cond_15: bool
    cond_16: bool
    violations: tuple
    skipped: tuple
    sampled: dict

    @property
    def passed(self) -> bool:
        return all(getattr(self, f"cond_{c}") for c in CONDITIONS)

    def failed_conditions(self) -> tuple:
        return tuple(c for c in CONDITIONS if not getattr(self, f"cond_{c}"))

    def witness(self, condition: str) -> Optional[Violation]:
        for v in self.violations:
            if v.condition == condition:
                return v
        return None

    def to_dict(self) -> dict:
        return {
            "conditions": {c: getattr(self, f"cond_{c}") for c in CONDITIONS},
            "passed": self.passed,
            "skipped": list(self.skipped),
            "violations": [v.to_dict() for v in self.violations],
            "sampled": self.sampled,
        }

    def to_text(self) -> str:
        lines = []
        for c in CONDITIONS:
            state = "skipped" if c in self.skipped else ("pass" if getattr(self, f"cond_{c}") else "FAIL")
            lines.append(f"condition {c}: {state}")
        for v in self.violations:
            vals = " ".join(f"{k}={_plain(x) if not isinstance(x, float) else format(x, '.12g')}"
                            for k, x in sorted(v.values.items()) if k != "tail")
            lines.append(f"violation {v.condition} at x={_fmt_point(v.point)} {vals}")
        lines.append("sampled " + " ".join(f"{k}={self.sampled[k]}" for k in sorted(self.sampled)))
        lines.append(f"certificate={'pass' if self.passed else 'fail'}")
        return "\n".join(lines)


def certificate_sample_plan(F: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG, random_points: int = 256):
    """Critical points first, then the scan grid, then seeded random points."""
    lo, hi = F.box.sample_bounds(cfg.open_margin)
    n = F.arity
    parts = []
    crit = np.array(F.meta.critical_points, dtype=float).reshape(-1, n) if F.meta.critical_points else np.zeros((0, n))
    if len(crit):
        crit = crit[F.box.contains(crit)]
    parts.append(crit)
    k = max(2, min(cfg.levelset_scan, int(2e4 ** (1.0 / n))))
    axis = np.linspace(lo, hi, k)
    parts.append(np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n))
    rng = np.random.default_rng(cfg.rng_seed)
    parts.append(F.box.random_points(rng, random_points, cfg.open_margin))
    return np.vstack(parts), {"critical": len(crit), "grid": k ** n, "random": random_points}


def _one_sided_limits(F, X, ld, cfg, steps=20):
    """Estimate lim b(x - h e_i) and lim a(x + h e_i) as h -> 0+ for every point and axis."""
    lo, hi = F.bounds()
    m, n = X.shape
    h = (hi - lo) / 16.0 * 0.5 ** np.arange(steps)
    f = diagonal(F)
    out = []
    for side in (-1.0, 1.0):
        P = np.repeat(X[:, None, None, :], n, axis=1).repeat(steps, axis=2)  # (m, n, steps, n)
        for i in range(n):
            P[:, i, :, i] += side * h[None, :]
        valid = (P >= lo) & (P <= hi)
        valid = valid.all(axis=-1)
        flat = np.clip(P.reshape(-1, n), lo, hi)
        lb = level_bounds(f, F.evaluate(flat), cfg)
        vals = (lb.b if side < 0 else lb.a).reshape(m, n, steps)
        vals = np.where(valid, vals, np.nan)
        out.append(vals)
    return h, out[0], out[1]


def _limit_of(seq: np.ndarray):
    """Last finite value of a sequence and its last successive change."""
    finite = np.flatnonzero(np.isfinite(seq))
    if finite.size < 2:
        return None, None
    last, prev = seq[finite[-1]], seq[finite[-2]]
    return float(last), float(abs(last - prev))


def continuity_certificate(F: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG, random_points: int = 256) -> ContinuityCertificate:
    """Check the conditions characterising a continuous metric solution."""
    report = check_solvable(F, cfg)
    if not report.range_equal:
        raise Unsolvable(f"ran(F) differs from ran(delta_F) (F takes {report.witness_value:.12g})", report)
    X, plan = certificate_sample_plan(F, cfg, random_points)
    ld = level_data_batch(F, X, cfg)
    violations = []
    diag_continuous = len(report.jumps) == 0
    skipped = []
    if diag_continuous:
        skipped += ["13", "14"]
    if diag_continuous and F.meta.claims_continuous:
        skipped += ["15", "16"]

    off = ~ld.in_omega
    bad12 = np.flatnonzero(off & (ld.b - ld.a > cfg.tol_jump))
    for i in bad12[:MAX_VIOLATIONS]:
        violations.append(Violation("12", tuple(float(v) for v in X[i]), {"a": float(ld.a[i]), "b": float(ld.b[i]),
                                                        "d_lt": float(ld.d_lt[i]), "d_gt": float(ld.d_gt[i])}))
    n13 = n14 = 0
    bad13 = bad14 = np.zeros(0, dtype=int)
    if "13" not in skipped:
        z = ld.d_lt <= cfg.tol_zero
        n13 = int(z.sum())
        bad13 = np.flatnonzero(z & ~ld.a_attained)
        for i in bad13[:MAX_VIOLATIONS]:
            violations.append(Violation("13", tuple(float(v) for v in X[i]), {"y": float(ld.y[i]), "a": float(ld.a[i]), "d_lt": float(ld.d_lt[i])}))
        z = ld.d_gt <= cfg.tol_zero
        n14 = int(z.sum())
        bad14 = np.flatnonzero(z & ~ld.b_attained)
        for i in bad14[:MAX_VIOLATIONS]:
            violations.append(Violation("14", tuple(float(v) for v in X[i]), {"y": float(ld.y[i]), "b": float(ld.b[i]), "d_gt": float(ld.d_gt[i])}))
    fail15 = fail16 = False
    n_limits = 0
    if "15" not in skipped:
        h, left_b, right_a = _one_sided_limits(F, X, ld, cfg)
        for j in range(len(X)):
            for i in range(F.arity):
                for cond, seq in (("15", left_b[j, i]), ("16", right_a[j, i])):
                    lim, change = _limit_of(seq)
                    if lim is None:
                        continue
                    n_limits += 1
                    slack = max(cfg.tol_jump, 4.0 * change)
                    if cond == "15" and lim < ld.a[j] - slack:
                        fail15 = True
                        if sum(v.condition == "15" for v in violations) < MAX_VIOLATIONS:
                            violations.append(Violation("15", tuple(float(v) for v in X[j]), {
                                "axis": i + 1, "limit_b": lim, "a": float(ld.a[j]),
                                "tail": [float(v) for v in seq[np.isfinite(seq)][-4:]]}))
                    if cond == "16" and lim > ld.b[j] + slack:
                        fail16 = True
                        if sum(v.condition == "16" for v in violations) < MAX_VIOLATIONS:
                            violations.append(Violation("16", tuple(float(v) for v in X[j]), {
                                "axis": i + 1, "limit_a": lim, "b": float(ld.b[j]),
                                "tail": [float(v) for v in seq[np.isfinite(seq)][-4:]]}))
    sampled = dict(plan)
    sampled.update({"points": int(len(X)), "off_omega": int(off.sum()), "d_lt_zero": n13, "d_gt_zero": n14,
                    "one_sided_limits": n_limits, "seed": cfg.rng_seed})
    return ContinuityCertificate(
        cond_range=True,
        cond_12=bad12.size == 0,
        cond_13=bad13.size == 0,
        cond_14=bad14.size == 0,
        cond_15=not fail15,
        cond_16=not fail16,
        violations=tuple(violations),
        skipped=tuple(skipped),
        sampled=sampled,
    )


# ---------------------------------------------------------------------------
# property suite


@dataclass(frozen=True)
class PropertyReport:
    property_id: str
    passed: bool
    max_residual: float
    tolerance: float
    counterexample: Optional[tuple] = None
    samples_used: int = 0
    seed: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "property": self.property_id,
            "pass": self.passed,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "counterexample": None if self.counterexample is None else list(self.counterexample),
            "samples": self.samples_used,
            "seed": self.seed,
            "note": self.note,
        }

    def to_text(self) -> str:
        cx = "" if self.counterexample is None else f" at={_fmt_point(self.counterexample)}"
        note = f" note={self.note}" if self.note else ""
        return (f"{self.property_id}: {'pass' if self.passed else 'FAIL'} max_residual={self.max_residual:.6g} "
                f"tol={self.tolerance:.3g} samples={self.samples_used} seed={self.seed}{cx}{note}")


def _report(pid, residuals, points, tol, cfg, note="", pass_fraction=1.0) -> PropertyReport:
    residuals = np.asarray(residuals, dtype=float)
    if residuals.size == 0:
        return PropertyReport(pid, True, 0.0, tol, None, 0, cfg.rng_seed, note or "no applicable samples")
    i = int(np.argmax(residuals))
    worst = float(residuals[i])
    ok_frac = float(np.mean(residuals <= tol))
    passed = worst <= tol if pass_fraction >= 1.0 else ok_frac >= pass_fraction
    cx = None if worst <= tol else tuple(float(v) for v in np.atleast_1d(points[i]))
    return PropertyReport(pid, bool(passed), worst, tol, cx, int(residuals.size), cfg.rng_seed, note)


def _comparable_pairs(F, rng, m, margin):
    lo, hi = F.box.sample_bounds(margin)
    X = rng.uniform(lo, hi, size=(m, F.arity))
    Xp = X + rng.uniform(0, 1, size=X.shape) * (hi - X)
    k = m // 2
    axis = rng.integers(0, F.arity, size=k)
    Xp[:k] = X[:k]
    Xp[np.arange(k), axis] = rng.uniform(X[np.arange(k), axis], hi)
    return X, Xp


def _same_level_pairs(F, rng, m, cfg):
    """Pairs x <= x' with F(x) = F(x') found by sliding along one axis inside the level."""
    lo, hi = F.box.sample_bounds(cfg.open_margin)
    X = rng.uniform(lo, hi, size=(m, F.arity))
    y = F.evaluate(X)
    axis = rng.integers(0, F.arity, size=m)
    frac = rng.uniform(0.05, 0.95, size=m)
    room = hi - X[np.arange(m), axis]
    # largest step s in [0, room] with F(x + s e_i) <= y + tol, by bisection on a fixed grid of halvings
    l = np.zeros(m)
    h = room.copy()
    Xh = X.copy()
    Xh[np.arange(m), axis] += h
    stays = F.evaluate(Xh) <= y + cfg.tol_probe
    l[stays] = h[stays]
    for _ in range(60):
        mid = 0.5 * (l + h)
        Xm = X.copy()
        Xm[np.arange(m), axis] += mid
        ok = F.evaluate(Xm) <= y + cfg.tol_probe
        l = np.where(ok, mid, l)
        h = np.where(ok, h, mid)
    Xp = X.copy()
    Xp[np.arange(m), axis] += frac * l
    keep = (l > 1e-6) & (np.abs(F.evaluate(Xp) - y) <= cfg.tol_val)
    return X[keep], Xp[keep]


def nondecreasing_on_level_sets(F: FunctionHandle, solution: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG,
                                samples: int = 1000) -> PropertyReport:
    """Monotonicity of the solution on comparable pairs taken inside one level set of F."""
    rng = np.random.default_rng(cfg.rng_seed + 7)
    X, Xp = _same_level_pairs(F, rng, samples, cfg)
    if len(X) == 0:
        return _report("nondecreasing_on_level_sets", [], [], 10 * cfg.tol_dom, cfg)
    res = np.maximum(solution.evaluate(X) - solution.evaluate(Xp), 0.0)
    return _report("nondecreasing_on_level_sets", res, X, 10 * cfg.tol_dom, cfg, note=f"pairs={len(X)}")


def _jump_zone(values: np.ndarray, jumps, cfg: SolverConfig, span: float):
    """Points whose solution value sits on a jump of the diagonal, and the allowed residual there."""
    allow = np.zeros(values.shape)
    zone = np.zeros(values.shape, dtype=bool)
    for j in jumps:
        near = np.abs(values - j.t) <= 10 * cfg.tol_dom * max(1.0, span)
        zone |= near
        allow = np.where(near, np.maximum(allow, j.gap), allow)
    return zone, allow


def run_property_suite(F: FunctionHandle, solution: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG,
                       samples: int = 1000, include=None) -> list:
    """Run the solution and level-set invariants; one :class:`PropertyReport` each."""
    seed = cfg.rng_seed
    rng = np.random.default_rng(seed)
    tight = 10 * cfg.tol_dom
    reports = []
    kind = getattr(solution, "kind", "metric")
    lo, hi = F.box.sample_bounds(cfg.open_margin)
    n = F.arity
    f = diagonal(F)
    solv = check_solvable(F, cfg)

    def want(pid):
        return include is None or pid in include

    X = F.box.random_points(rng, samples, cfg.open_margin)
    crit = np.array(F.meta.critical_points, dtype=float).reshape(-1, n) if F.meta.critical_points else np.zeros((0, n))
    if len(crit):
        crit = crit[F.box.contains(crit)]
    Xs = np.vstack([X, crit])
    G = solution.evaluate(Xs)
    y = F.evaluate(Xs)

    if want("solves"):
        res = np.abs(f(np.clip(G, f.lo, f.hi)) - y)
        zone, allow = _jump_zone(G, solv.jumps, cfg, hi - lo)
        outside = res[~zone]
        inside_ok = bool(np.all(res[zone] <= allow[zone] + cfg.tol_solve))
        frac = float(np.mean(res <= cfg.tol_solve))
        worst_out = float(outside.max()) if outside.size else 0.0
        passed = worst_out <= cfg.tol_solve and inside_ok and frac >= 0.99
        i = int(np.argmax(np.where(zone, -1.0, res))) if outside.size else 0
        reports.append(PropertyReport("solves", passed, worst_out, cfg.tol_solve,
                                      None if worst_out <= cfg.tol_solve else tuple(Xs[i]), len(Xs), seed,
                                      f"jump_zone_points={int(zone.sum())}"))
    if want("nondecreasing"):
        A, B = _comparable_pairs(F, np.random.default_rng(seed + 1), samples, cfg.open_margin)
        res = np.maximum(solution.evaluate(A) - solution.evaluate(B), 0.0)
        reports.append(_report("nondecreasing", res, A, tight, cfg))
    if want("idempotent"):
        t = np.linspace(lo, hi, 101)
        T = np.repeat(t[:, None], n, axis=1)
        res = np.abs(solution.evaluate(T) - t)
        reports.append(_report("idempotent", res, T, tight, cfg))
    if want("internal"):
        res = np.maximum(np.maximum(Xs.min(axis=1) - G, G - Xs.max(axis=1)), 0.0)
        reports.append(_report("internal", res, Xs, tight, cfg))
    if want("range_idempotent"):
        Gc = np.clip(G, *solution.bounds())
        res = np.abs(solution.evaluate(np.repeat(Gc[:, None], n, axis=1)) - G)
        reports.append(_report("range_idempotent", res, Xs, tight, cfg))
    if want("symmetry"):
        syms = [s for s in F.meta.declared_symmetries if tuple(s) != tuple(range(n))]
        res, pts = [], []
        for s in sorted(syms)[:6]:
            sigma = Permutation(tuple(s))
            res.append(np.abs(solution.evaluate(sigma.apply(X)) - solution.evaluate(X)))
            pts.append(X)
        if res:
            reports.append(_report("symmetry", np.concatenate(res), np.vstack(pts), tight, cfg,
                                   note=f"symmetries={len(res)}"))
        else:
            reports.append(_report("symmetry", [], [], tight, cfg, note="no declared symmetries"))
    if want("nondecreasing_on_level_sets"):
        reports.append(nondecreasing_on_level_sets(F, solution, cfg, samples))

    if kind == "metric":
        if want("transform"):
            gF = transform_values(F, lambda v: v ** 3 + v, "cubic")
            Mg = metric_solution(gF, cfg)
            res = np.abs(Mg.evaluate(X) - solution.evaluate(X))
            reports.append(_report("transform", res, X, tight, cfg))
        iv = F.box.interval
        if want("duality"):
            if iv.is_compact and iv.is_bounded:
                c = iv.lo + iv.hi
                Md = metric_solution(dualize(F), cfg)
                res = np.abs(Md.evaluate(X) - (c - solution.evaluate(c - X)))
                reports.append(_report("duality", res, X, tight, cfg))
            else:
                reports.append(_report("duality", [], [], tight, cfg, note="interval not compact"))
        if want("restriction"):
            w = hi - lo
            J = Interval.closed(lo + 0.25 * w, hi - 0.25 * w)
            FJ = restrict(F, J)
            XJ = np.random.default_rng(seed + 2).uniform(J.lo, J.hi, size=(samples, n))
            fJ = diagonal(FJ)
            MJ = solution.evaluate(XJ)
            res = np.abs(fJ(np.clip(MJ, J.lo, J.hi)) - F.evaluate(XJ))
            reports.append(_report("restriction", res, XJ, cfg.tol_solve, cfg, note=f"J={J}"))

    reports.extend(levelset_properties(F, cfg, include=include))
    return reports


def levelset_properties(F: FunctionHandle, cfg: SolverConfig = DEFAULT_CONFIG, points: int = 200, include=None) -> list:
    """Probe-vs-oracle agreement, comparative statics, infinite-distance endpoints and level constancy."""
    seed = cfg.rng_seed
    reports = []
    lo, hi = F.bounds()

    def want(pid):
        return include is None or pid in include

    if want("probe_vs_oracle"):
        if float(cfg.oracle_grid) ** F.arity <= 1e7:
            P = F.box.random_points(np.random.default_rng(seed + 3), points, cfg.open_margin)
            ld = level_data_batch(F, P, cfg)
            o_lt, o_gt = brute_force_distances_batch(F, P, cfg)
            cell = (hi - lo) / (cfg.oracle_grid - 1)

            def gap(p, o):
                both_inf = np.isinf(p) & np.isinf(o)
                with np.errstate(invalid="ignore"):
                    d = np.where(both_inf, 0.0, np.abs(p - o))
                return np.where(np.isnan(d), np.inf, d)

            res = np.maximum(gap(ld.d_lt, o_lt), gap(ld.d_gt, o_gt))
            reports.append(_report("probe_vs_oracle", res, P, cell + cfg.tol_dom, cfg, note=f"grid={cfg.oracle_grid}"))
        else:
            reports.append(_report("probe_vs_oracle", [], [], 0.0, cfg, note="oracle grid too large"))
    A, B = _same_level_pairs(F, np.random.default_rng(seed + 4), 400, cfg)
    if want("comparative_statics"):
        if len(A):
            la, lb = level_data_batch(F, A, cfg), level_data_batch(F, B, cfg)
            with np.errstate(invalid="ignore"):
                r1 = np.where(np.isinf(la.d_gt) & np.isinf(lb.d_gt), 0.0, lb.d_gt - la.d_gt)
                r2 = np.where(np.isinf(la.d_lt) & np.isinf(lb.d_lt), 0.0, la.d_lt - lb.d_lt)
            res = np.nan_to_num(np.maximum(np.maximum(r1, r2), 0.0), nan=np.inf)
            reports.append(_report("comparative_statics", res, A, cfg.tol_dom, cfg, note=f"pairs={len(A)}"))
        else:
            reports.append(_report("comparative_statics", [], [], cfg.tol_dom, cfg))
    if want("infinite_distance_endpoints"):
        iv = F.box.interval
        if iv.is_compact and iv.is_bounded:
            P = F.box.random_points(np.random.default_rng(seed + 5), points, cfg.open_margin)
            ld = level_data_batch(F, P, cfg)
            res = np.concatenate([np.where(np.isinf(ld.d_lt), np.abs(ld.a - lo), 0.0),
                                  np.where(np.isinf(ld.d_gt), np.abs(ld.b - hi), 0.0)])
            reports.append(_report("infinite_distance_endpoints", res, np.vstack([P, P]), cfg.tol_dom, cfg))
        else:
            reports.append(_report("infinite_distance_endpoints", [], [], cfg.tol_dom, cfg, note="not certified on open boxes"))
    if want("level_constant_ab"):
        if len(A):
            la, lb = level_data_batch(F, A, cfg), level_data_batch(F, B, cfg)
            res = np.maximum(np.abs(la.a - lb.a), np.abs(la.b - lb.b))
            reports.append(_report("level_constant_ab", res, A, 10 * cfg.tol_dom, cfg, note=f"pairs={len(A)}"))
        else:
            reports.append(_report("level_constant_ab", [], [], 10 * cfg.tol_dom, cfg))
    return reports


# ---------------------------------------------------------------------------
# continuity coherence


def max_adjacent_jump(solution: FunctionHandle, k: int, margin: float = 0.05) -> float:
    """Largest difference of the solution between neighbouring nodes of a k^n grid."""
    lo, hi = solution.box.sample_bounds(margin)
    n = solution.arity
    axis = np.linspace(lo, hi, k)
    P = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    V = solution.evaluate(P).reshape((k,) * n)
    return float(max(np.max(np.abs(np.diff(V, axis=i))) for i in range(n)))


def modulus_of_continuity(solution: FunctionHandle, coarse: int = 33, fine: int = 65, margin: float = 0.05,
                          cfg: SolverConfig = DEFAULT_CONFIG) -> PropertyReport:
    """Adjacent-cell jumps at two resolutions; a continuous solution roughly halves them."""
    jc = max_adjacent_jump(solution, coarse, margin)
    jf = max_adjacent_jump(solution, fine, margin)
    ratio = jf / jc if jc > 0 else 0.0
    return PropertyReport("modulus_of_continuity", ratio <= 0.6, ratio, 0.6, None, coarse ** solution.arity
                          + fine ** solution.arity, cfg.rng_seed, f"coarse={jc:.6g} fine={jf:.6g}")


def jump_near(solution: FunctionHandle, x, axis: int, h: float = 1e-7) -> float:
    """``|G(x + h e_i) - G(x - h e_i)|`` clipped to the box (axis is 1-based)."""
    lo, hi = solution.bounds()
    x = np.asarray(x, dtype=float)
    e = np.zeros_like(x)
    e[axis - 1] = h
    P = np.clip(np.vstack([x - e, x + e]), lo, hi)
    v = solution.evaluate(P)
    return float(abs(v[1] - v[0]))
