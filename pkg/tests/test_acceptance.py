"""Acceptance criteria, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
"""
import sys

import mpmath
import numpy as np
import pytest

from chisini import (
    DEFAULT_CONFIG,
    Univariate,
    catalog,
    check_solvable,
    continuity_certificate,
    diagonal,
    idempotize,
    metric_solution,
    names,
    q_solution,
    recognize_clamp,
    run_property_suite,
)
from chisini.cli import main as cli_main
from chisini.verify import levelset_properties

CFG = DEFAULT_CONFIG

SOLVABLE_EXTRA = [
    ("archimedean", {"gen": "product"}),
    ("archimedean", {"gen": "hamacher"}),
    ("archimedean", {"gen": "lukasiewicz"}),
    ("archimedean", {"gen": "yager"}),
    ("remark44-example", {"dual": 1}),
]


@pytest.fixture
def report(capsys):
    def emit(criterion, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} {detail}")
        assert passed, detail
    return emit


def _grid(k, lo=0.0, hi=1.0):
    axis = np.linspace(lo, hi, k)
    return np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)


def _catalog_functions():
    out = [(nm, catalog(nm)) for nm in names()]
    out += [(nm + ":" + ",".join(f"{k}={v}" for k, v in p.items()), catalog(nm, p)) for nm, p in SOLVABLE_EXTRA]
    return out


def test_criterion_01_solvability_gate(report, capsys):
    code = cli_main(["check", "nilpotent-min"])
    out = capsys.readouterr().out
    rep = check_solvable(catalog("nilpotent-min"), CFG)
    y = rep.witness_value
    e = check_solvable(catalog("einstein-sum"), CFG).range_equal
    t = check_solvable(catalog("lukasiewicz"), CFG).range_equal
    ok = code == 2 and out.strip().splitlines()[-1].startswith("exit=2") and 0 < y <= 0.5 and e and t
    report(1, ok, f"nilpotent exit={code} witness y={y:.6g}; einstein range_equal={e}; lukasiewicz range_equal={t}")


def test_criterion_02_ordinal_sum_closed_form(report):
    F = catalog("ordinal-sum-example")
    M = metric_solution(F, CFG)
    u = (np.arange(21) + 0.5) / 21
    U, V = np.meshgrid(u, u, indexing="ij")
    U, V = U.ravel(), V.ravel()
    X = np.column_stack([0.25 + 0.5 * U * (1 - V), 0.25 + 0.5 * V * (1 - U)])
    a, b = 0.25, 0.5
    d_lt = X.min(axis=1) - 0.25
    d_gt = 0.5 - 0.5 * X.sum(axis=1)
    expected = (d_gt * a + d_lt * b) / (d_gt + d_lt)
    err = float(np.max(np.abs(M.evaluate(X) - expected)))
    report(2, len(X) == 441 and err <= 1e-6, f"441 triangle points max|dM|={err:.3g} (tol 1e-6)")


def test_criterion_03_restriction_formula(report):
    F = catalog("min-cap", {"c": 0.5})
    M = metric_solution(F, CFG)
    X = _grid(101)
    gap = np.abs(X[:, 0] - X[:, 1])
    expected = np.where(gap <= 0.5, 0.5 * X.sum(axis=1), X.max(axis=1) - 0.25)
    err = float(np.max(np.abs(M.evaluate(X) - expected)))
    spots = M.evaluate(np.array([[0.9, 0.1], [0.2, 0.4]]))
    ok = err <= 1e-6 and abs(spots[0] - 0.65) <= 1e-6 and abs(spots[1] - 0.30) <= 1e-6
    report(3, ok, f"101x101 max|dM|={err:.3g}; M(0.9,0.1)={spots[0]:.12g} M(0.2,0.4)={spots[1]:.12g}")


def test_criterion_04_lukasiewicz(report):
    F = catalog("lukasiewicz")
    X = _grid(101)
    err = float(np.max(np.abs(metric_solution(F, CFG).evaluate(X) - X.mean(axis=1))))
    Q = q_solution(F, "midpoint", CFG)
    residual = abs(float(Q.evaluate(np.array([[0.3, 0.3]]))[0]) - 0.3)
    ok = err <= 1e-6 and abs(residual - 0.05) <= 1e-12
    report(4, ok, f"101x101 max|M-mean|={err:.3g}; q-mid residual at t=0.3 is {residual:.12g}")


def test_criterion_05_correction(report):
    F = catalog("remark44-example")
    delta = diagonal(F)
    M = metric_solution(F, CFG)
    m = float(M.evaluate(np.array([[0.75, 0.5]]))[0])
    rng = np.random.default_rng(CFG.rng_seed)
    X = rng.random((1000, 2))
    X = X[np.max(np.abs(X - 0.5), axis=1) > 0]
    solve = float(np.max(np.abs(delta(M.evaluate(X)) - F.evaluate(X))))
    plain = metric_solution(F, CFG, correct=False)
    x = np.array([[0.75, 0.5]])
    control = float(abs(delta(plain.evaluate(x))[0] - F.evaluate(x)[0]))
    ok = abs(m - 0.75) <= 1e-9 and solve <= CFG.tol_solve and control == 1.0
    report(5, ok, f"M(3/4,1/2)={m:.12g}; solve residual on {len(X)} points={solve:.3g}; "
                  f"uncorrected residual={control:.12g}")


def test_criterion_06_certificates(report):
    o = continuity_certificate(catalog("ordinal-sum-example"), CFG)
    w = o.witness("12")
    r = continuity_certificate(catalog("remark44-example"), CFG)
    passing = {nm: continuity_certificate(catalog(nm), CFG).passed for nm in ("lukasiewicz", "einstein-sum", "constant")}
    on_segment = w is not None and 0.75 < w.point[0] <= 1.0 and w.point[1] == 0.25
    ok = (o.failed_conditions() == ("12",) and on_segment and r.failed_conditions() == ("13",)
          and all(passing.values()))
    report(6, ok, f"ordinal-sum fails {o.failed_conditions()} witness={w.point if w else None}; "
                  f"remark44 fails {r.failed_conditions()}; passing={passing}")


def test_criterion_07_property_suite(report):
    core = ["solves", "nondecreasing", "idempotent", "internal"]
    lines = []
    ok = True
    for label, F in _catalog_functions():
        if F.arity != 2 or not check_solvable(F, CFG).range_equal:
            continue
        reports = run_property_suite(F, metric_solution(F, CFG), CFG, samples=1000, include=core)
        bad = [r.property_id for r in reports if not r.passed]
        ok &= not bad and len(reports) == len(core)
        lines.append(f"{label}={'ok' if not bad else bad}")
    report(7, ok and len(lines) >= 10, f"{len(lines)} solvable functions: " + " ".join(lines))


def test_criterion_08_invariances(report):
    lines = []
    ok = True
    for nm in ("lukasiewicz", "ordinal-sum-example", "min-cap"):
        F = catalog(nm)
        reports = run_property_suite(F, metric_solution(F, CFG), CFG, samples=1000,
                                     include=["transform", "duality", "symmetry"])
        for r in reports:
            ok &= r.passed and r.max_residual <= 1e-8
            lines.append(f"{nm}/{r.property_id}={r.max_residual:.2g}")
    report(8, ok and len(lines) == 9, " ".join(lines))


def test_criterion_09_oracle_equivalence(report):
    lines = []
    ok = True
    for label, F in _catalog_functions():
        (r,) = levelset_properties(F, CFG, points=200, include=["probe_vs_oracle"])
        ok &= r.passed and r.samples_used == 200
        lines.append(f"{label}={r.max_residual:.3g}/{r.tolerance:.3g}")
    report(9, ok, " ".join(lines))


def _einstein_literal(x1, x2):
    x1, x2 = mpmath.mpf(x1), mpmath.mpf(x2)
    if x1 + x2 == 0:
        return mpmath.mpf(0)
    return (1 + x1 * x2 - mpmath.sqrt(1 - x1 ** 2) * mpmath.sqrt(1 - x2 ** 2)) / (x1 + x2)


def test_criterion_10_einstein_idempotization(report):
    G = idempotize(catalog("einstein-sum"), CFG)
    rng = np.random.default_rng(CFG.rng_seed)
    X = np.vstack([[0.0, 0.6], rng.uniform(-0.99, 0.99, (999, 2))])
    with mpmath.workdps(50):
        expected = np.array([float(_einstein_literal(*x)) for x in X])
    got = G.evaluate(X)
    err = float(np.max(np.abs(got - expected)))
    ok = err <= 1e-9 and abs(got[0] - 1 / 3) <= 1e-9
    report(10, ok, f"1000 points max|dM|={err:.3g} (tol 1e-9); M(0,0.6)={got[0]:.12g}")


def test_criterion_11_clamp_recognizer(report):
    clamp = Univariate(lambda t: np.maximum(0.2, np.minimum(t, 0.8)), 0.0, 1.0)
    square = Univariate(lambda t: t * t, 0.0, 1.0)
    found = recognize_clamp(clamp, CFG)
    rejected = recognize_clamp(square, CFG)
    ok = found is not None and abs(found[0] - 0.2) <= 1e-9 and abs(found[1] - 0.8) <= 1e-9 and rejected is None
    report(11, ok, f"clamp -> {found}; x^2 -> {rejected}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
