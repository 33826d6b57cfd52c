import json
import math

import numpy as np
import pytest

from chisini.catalog import catalog
from chisini.domain import dualize
from chisini.errors import Unsolvable
from chisini.solver import metric_solution, q_solution
from chisini.verify import (
    certificate_sample_plan,
    continuity_certificate,
    jump_near,
    levelset_properties,
    modulus_of_continuity,
    nondecreasing_on_level_sets,
    run_property_suite,
    to_json_text,
)


@pytest.mark.parametrize("name, params, failed", [
    ("ordinal-sum-example", None, ("12",)),
    ("remark44-example", None, ("13",)),
    ("remark44-example", {"dual": 1}, ("14",)),
    ("patched-min", None, ("15",)),
    ("lukasiewicz", None, ()),
    ("einstein-sum", None, ()),
    ("constant", None, ()),
    ("min-cap", None, ()),
])
def test_certificate_conditions(name, params, failed):
    cert = continuity_certificate(catalog(name, params))
    assert cert.failed_conditions() == failed
    assert cert.passed == (not failed)
    assert cert.to_text().endswith("certificate=" + ("fail" if failed else "pass"))


def test_certificate_witness_on_thin_segment():
    w = continuity_certificate(catalog("ordinal-sum-example")).witness("12")
    assert w.point == (0.9, 0.25)
    assert all(isinstance(v, float) for v in w.point)


def test_certificate_routing_skips():
    cert = continuity_certificate(catalog("lukasiewicz"))
    assert set(cert.skipped) >= {"13", "14", "15", "16"}
    assert continuity_certificate(catalog("remark44-example")).skipped == ()


def test_certificate_requires_solvable():
    with pytest.raises(Unsolvable):
        continuity_certificate(catalog("nilpotent-min"))


def test_sample_plan_starts_with_critical_points():
    F = catalog("ordinal-sum-example")
    P, counts = certificate_sample_plan(F)
    assert tuple(P[0]) == F.meta.critical_points[0]
    assert counts == {"critical": 9, "grid": 1089, "random": 256}
    assert len(P) == sum(counts.values())


def test_certificate_json_round_trip():
    d = json.loads(to_json_text(continuity_certificate(catalog("remark44-example")).to_dict()))
    assert d["conditions"]["13"] is False and d["conditions"]["12"] is True
    assert d["passed"] is False


def test_to_json_text_handles_infinity():
    assert json.loads(to_json_text({"d": math.inf, "v": np.float64(0.5)})) == {"d": "inf", "v": 0.5}


@pytest.mark.parametrize("name", ["ordinal-sum-example", "lukasiewicz", "remark44-example", "einstein-sum",
                                  "min-cap", "constant"])
def test_property_suite_passes_for_metric_solution(name):
    F = catalog(name)
    reports = run_property_suite(F, metric_solution(F))
    assert [r.property_id for r in reports if not r.passed] == []
    ids = {r.property_id for r in reports}
    assert {"solves", "nondecreasing", "idempotent", "internal", "range_idempotent", "symmetry",
            "probe_vs_oracle"} <= ids


def test_q_solution_fails_idempotency():
    F = catalog("lukasiewicz")
    reports = {r.property_id: r for r in run_property_suite(F, q_solution(F, "midpoint"))}
    assert not reports["idempotent"].passed
    assert reports["idempotent"].max_residual == pytest.approx(0.25)
    assert reports["solves"].passed and reports["range_idempotent"].passed
    assert "transform" not in reports


def test_include_filter_and_seed():
    F = catalog("ordinal-sum-example")
    M = metric_solution(F)
    a = run_property_suite(F, M, include=["nondecreasing"])
    b = run_property_suite(F, M, include=["nondecreasing"])
    assert len(a) == 1 and a[0].to_dict() == b[0].to_dict()


def test_levelset_properties():
    reports = levelset_properties(catalog("ordinal-sum-example"))
    assert all(r.passed for r in reports)
    assert {r.property_id for r in reports} == {"probe_vs_oracle", "comparative_statics",
                                                "infinite_distance_endpoints", "level_constant_ab"}


def test_nondecreasing_on_level_sets():
    F = catalog("ordinal-sum-example")
    assert nondecreasing_on_level_sets(F, metric_solution(F)).passed


def test_continuity_coherence():
    assert modulus_of_continuity(metric_solution(catalog("lukasiewicz"))).passed
    O = metric_solution(catalog("ordinal-sum-example"))
    # below the thin segment G tends to 1/4, above it to 1/2, on it sits the midpoint 3/8
    assert jump_near(O, (0.9, 0.25), axis=2) == pytest.approx(0.25, abs=1e-6)
    assert O([0.9, 0.25]) == pytest.approx(0.375)
    assert not modulus_of_continuity(O).passed


def test_duality_property_on_dual_function():
    D = dualize(catalog("lukasiewicz"))
    reports = run_property_suite(D, metric_solution(D), include=["duality", "solves"])
    assert all(r.passed for r in reports)
