import math

import numpy as np
import pytest

from chisini import catalog
from chisini.domain import (
    UNIT,
    Box,
    Function,
    Interval,
    MonotoneGridFunction,
    Permutation,
    Univariate,
    all_permutations,
    check_point,
    diagonal,
    dualize,
    format_grid_text,
    load_grid_file,
    parse_grid_text,
    permute_args,
    restrict,
    sampled_monotonicity,
    transform_values,
)
from chisini.errors import ArityMismatch, InvalidGrid, NotSubinterval, PointOutOfBox, UnboundedDomain


def test_interval_basics():
    assert UNIT.is_compact and UNIT.is_bounded
    r = Interval.real_line()
    assert not r.lo_closed and not r.hi_closed and not r.is_bounded
    o = Interval.open(-1, 1)
    assert not o.contains(1.0) and o.contains(0.999)
    assert list(UNIT.contains([0.0, 1.0, 1.5])) == [True, True, False]
    assert str(Interval(0, 1, True, False)) == "[0, 1)"


def test_interval_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        Interval(1, 0)
    with pytest.raises(ValueError):
        Interval(0, 0, True, False)
    with pytest.raises(ValueError):
        Interval(math.nan, 1)


def test_interval_subset():
    assert Interval.closed(0.25, 0.75).issubset(UNIT)
    assert not UNIT.issubset(Interval.open(0, 1))
    assert Interval.open(0, 1).issubset(UNIT)
    assert UNIT.issubset(Interval.real_line())


def test_eval_and_sample_bounds():
    lo, hi = Interval.open(-1, 1).eval_bounds()
    assert lo == pytest.approx(-1 + 2e-9) and hi == pytest.approx(1 - 2e-9)
    assert Interval.real_line().eval_bounds() == (-1e9, 1e9)
    assert Interval.open(-1, 1).sample_bounds(0.05) == pytest.approx((-0.9, 0.9))
    assert Interval.real_line().sample_bounds() == (-1.0, 1.0)
    assert Interval(0, math.inf, True, False).sample_bounds() == (0.0, 1.0)


def test_box_grid_and_random():
    box = Box(UNIT, 2)
    G = box.grid_points(3)
    assert G.shape == (9, 2)
    R = box.random_points(np.random.default_rng(0), 50)
    assert np.all(box.contains(R))


def test_permutation():
    s = Permutation((2, 0, 1))
    x = np.array([10.0, 20.0, 30.0])
    assert list(s.apply(x)) == [30.0, 10.0, 20.0]
    assert list(s.inverse().apply(s.apply(x))) == list(x)
    assert len(all_permutations(3)) == 6
    with pytest.raises(ValueError):
        Permutation((0, 0))


def test_univariate_coerces_bounds():
    f = Univariate(lambda t: t, 0, 1)
    assert isinstance(f.lo, float) and isinstance(f.hi, float)


def test_function_handle_shapes():
    F = catalog("min")
    assert F([0.2, 0.7]) == 0.2
    assert F.evaluate(np.array([[0.2, 0.7], [0.9, 0.4]])).shape == (2,)
    G = Function.from_scalar(lambda a, b: a * b, Box(UNIT, 2))
    assert G([0.5, 0.5]) == 0.25


def test_check_point_errors():
    F = catalog("min")
    with pytest.raises(PointOutOfBox):
        check_point(F, [1.5, 0.2])
    with pytest.raises(ArityMismatch):
        check_point(F, [0.5])
    assert check_point(F, [1 + 1e-12, 0.5])[0, 0] == 1.0


def test_diagonal_section():
    d = diagonal(catalog("lukasiewicz"))
    assert d(0.75) == pytest.approx(0.5)
    assert d(0.3) == 0.0


def test_dual_of_lukasiewicz_is_bounded_sum():
    D = dualize(catalog("lukasiewicz"))
    X = np.random.default_rng(1).random((200, 2))
    assert np.allclose(D.evaluate(X), np.minimum(1.0, X.sum(axis=1)))
    assert dualize(D) is not None
    with pytest.raises(UnboundedDomain):
        dualize(catalog("sum", box=Interval.real_line()))


def test_permute_restrict_transform():
    F = Function(lambda X: X[:, 0] + 2 * X[:, 1], Box(UNIT, 2))
    P = permute_args(F, Permutation((1, 0)))
    assert P([0.1, 0.2]) == pytest.approx(0.2 + 0.2)
    R = restrict(F, Interval.closed(0.25, 0.75))
    assert R.bounds() == (0.25, 0.75)
    with pytest.raises(NotSubinterval):
        restrict(F, Interval.closed(-1, 0.5))
    T = transform_values(F, lambda y: y ** 3 + y)
    assert T([0.5, 0.5]) == pytest.approx(1.5 ** 3 + 1.5)


def test_sampled_monotonicity_detects_decrease():
    viol, _, _ = sampled_monotonicity(catalog("min"), pairs=500)
    assert viol <= 0
    bad = Function(lambda X: -X[:, 0], Box(UNIT, 2))
    viol, x, xp = sampled_monotonicity(bad, pairs=500)
    assert viol > 0 and np.all(x <= xp)


GRID_TEXT = """# 2 x 3 grid
2 2 3
0 1
0 0.5 1
0 0.25 0.5
0.5 0.75 1
"""


def test_grid_parse_and_interpolate(tmp_path):
    G = parse_grid_text(GRID_TEXT)
    assert G.arity == 2
    assert G([0.5, 0.25]) == pytest.approx(0.375)
    assert G([1.0, 1.0]) == 1.0
    p = tmp_path / "g.txt"
    p.write_text(format_grid_text(G))
    H = load_grid_file(p)
    assert np.array_equal(H.values, G.values)
    assert H.name == "g"


@pytest.mark.parametrize("text", [
    "",
    "2 2 2\n0 1\n0 1\n0 1 1",
    "2 2 2\n0 1\n0 1\n1 0 1 1",
    "2 2 2\n0 1\n0 2\n0 0 0 0",
    "1 2\n0 x\n0 1",
])
def test_grid_rejects_invalid(text):
    with pytest.raises(InvalidGrid):
        parse_grid_text(text)


def test_grid_requires_shape_match():
    with pytest.raises(InvalidGrid):
        MonotoneGridFunction([[0, 1], [0, 1]], np.zeros((2, 3)))
