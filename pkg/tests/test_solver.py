import numpy as np
import pytest

from chisini.catalog import catalog
from chisini.domain import Box, Function, Interval, Univariate, diagonal
from chisini.errors import GeneratorNotMonotone, NotIdempotizable, NotMonotone, NotSubinterval, Unsolvable
from chisini.solver import (
    ChisiniSolution,
    check_solvable,
    conjugated_level_mean,
    detect_correction,
    factorize_transformed_continuous,
    find_jumps,
    idempotize,
    metric_solution,
    q_solution,
)


def test_nilpotent_min_is_unsolvable():
    rep = check_solvable(catalog("nilpotent-min"))
    assert not rep.range_equal
    assert 0 < rep.witness_value <= 0.5
    assert str(rep.ran_diag) == "{0} U (0.5, 1]"
    assert len(rep.jumps) == 1 and rep.jumps[0].t == pytest.approx(0.5)
    assert rep.to_dict()["range_equal"] is False
    with pytest.raises(Unsolvable) as info:
        metric_solution(catalog("nilpotent-min"))
    assert info.value.report is not None


@pytest.mark.parametrize("name, unique", [("lukasiewicz", False), ("einstein-sum", True),
                                          ("ordinal-sum-example", False)])
def test_solvable_reports(name, unique):
    rep = check_solvable(catalog(name))
    assert rep.range_equal and rep.unique == unique
    assert "sampled evidence" in rep.to_text()


def test_remark44_range():
    assert str(check_solvable(catalog("remark44-example")).ran_diag) == "{0} U {1}"


def test_find_jumps_step():
    step = Univariate(lambda t: np.where(t > 0.5, 1.0, 0.0), 0.0, 1.0)
    (j,) = find_jumps(step)
    assert j.t == pytest.approx(0.5, abs=1e-9)
    assert (j.left, j.right) == pytest.approx((0.0, 1.0))
    assert j.gap == pytest.approx(1.0)
    assert find_jumps(Univariate(lambda t: t, 0.0, 1.0)) == ()


def test_not_monotone_is_rejected():
    F = Function(lambda X: np.sin(6 * X[:, 0]) + X[:, 1], Box(Interval.closed(0, 1), 2))
    with pytest.raises(NotMonotone):
        metric_solution(F)


def test_metric_solution_values():
    # T^L: level 0 has a = 0, b = 1/2 and d> = (1 - x1 - x2)/2 so U = b - d>
    M = metric_solution(catalog("lukasiewicz"))
    assert isinstance(M, ChisiniSolution) and M.arity == 2
    assert M([0.3, 0.4]) == pytest.approx(0.35, abs=1e-12)
    assert M([0.9, 0.9]) == pytest.approx(0.9, abs=1e-12)
    O = metric_solution(catalog("ordinal-sum-example"))
    assert O([0.3, 0.4]) == pytest.approx(0.3125, abs=1e-12)
    assert O([0.9, 0.25]) == pytest.approx(0.375)  # off Omega: midpoint of [1/4, 1/2]


def test_min_cap_restriction_branches():
    M = metric_solution(catalog("min-cap", {"c": 0.5}))
    assert M([0.9, 0.1]) == pytest.approx(0.65, abs=1e-12)
    assert M([0.2, 0.4]) == pytest.approx(0.3, abs=1e-12)
    assert M([1.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
    R = metric_solution(catalog("min-cap", {"c": 0.5}, Interval.real_line()))
    assert R([0.9, 0.1]) == pytest.approx(0.5, abs=1e-12)


def test_constant_gives_midrange():
    assert metric_solution(catalog("constant", {"c": 0.7}))([0.2, 0.8]) == 0.5


def test_unary_solution_is_identity():
    F = Function(lambda X: np.minimum(X[:, 0], 0.5), Box(Interval.closed(0, 1), 1))
    M = metric_solution(F)
    t = np.linspace(0, 1, 11)[:, None]
    assert np.allclose(diagonal(F)(M.evaluate(t)), F.evaluate(t), atol=1e-12)


def test_q_solution_policies():
    F = catalog("lukasiewicz")
    Q = q_solution(F, "midpoint")
    assert Q([0.3, 0.4]) == pytest.approx(0.25)
    assert Q([0.9, 0.9]) == pytest.approx(0.9)
    assert q_solution(F, "leftmost")([0.3, 0.4]) == 0.0
    assert q_solution(F, "rightmost")([0.3, 0.4]) == pytest.approx(0.5)


def test_remark44_correction():
    F = catalog("remark44-example")
    M = metric_solution(F)
    assert M([0.75, 0.5]) == pytest.approx(0.75, abs=1e-12)
    assert M([0.2, 0.7]) == pytest.approx(0.2, abs=1e-12)
    (c,) = M.corrections()
    assert c.y == 1.0 and c.conditions == ("lower",)
    assert (c.a_star, c.b_star) == pytest.approx((0.5, 1.0))
    assert metric_solution(F, correct=False)([0.75, 0.5]) == pytest.approx(0.5)
    assert detect_correction(F, 0.0) is None


def test_remark44_dual_correction():
    F = catalog("remark44-example", {"dual": 1})
    M = metric_solution(F)
    # dual of the primal value at (3/4, 1/2)
    assert M([0.25, 0.5]) == pytest.approx(0.25, abs=1e-12)
    (c,) = M.corrections()
    assert c.conditions == ("upper",)


def test_idempotize():
    G = idempotize(catalog("einstein-sum"))
    assert G([0.0, 0.6]) == pytest.approx(1 / 3, abs=1e-12)
    assert G([0.5, 0.5]) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(NotIdempotizable):
        idempotize(catalog("lukasiewicz"))


def test_conjugated_level_mean():
    S = catalog("sum", box=Interval.real_line())
    phi = Univariate(np.arctanh, *Interval.open(-1, 1).eval_bounds(), name="arctanh", claims_continuous=True)
    G = conjugated_level_mean(S, phi, np.tanh, interval=Interval.open(-1, 1))
    assert G([0.0, 0.6]) == pytest.approx(1 / 3, abs=1e-9)
    S2 = catalog("sum", box=Interval.closed(0, 2))
    # decreasing phi = 1 - x: the mean of phi-values is pulled back through phi
    H = conjugated_level_mean(S2, Univariate(lambda x: 1 - x, 0.0, 1.0, name="flip"))
    assert H([0.7, 0.9]) == pytest.approx(0.8, abs=1e-9)
    with pytest.raises(GeneratorNotMonotone):
        conjugated_level_mean(S2, Univariate(lambda x: np.sin(6 * x) + 1, 0.0, 1.0))
    with pytest.raises(NotSubinterval):
        conjugated_level_mean(catalog("min"), Univariate(lambda x: 3 * x, 0.0, 1.0))


def test_factorization():
    good = factorize_transformed_continuous(catalog("lukasiewicz"))
    assert good and good.solution([0.3, 0.4]) == pytest.approx(0.35)
    bad = factorize_transformed_continuous(catalog("ordinal-sum-example"))
    assert not bad and bad.violated == ("12",)
