"""Built-in functions: t-norms, means and the worked examples.

Functions are addressed by name plus a parameter map, e.g.
``catalog("min-cap", {"c": 0.5})``.  :func:`from_spec` parses the textual
form ``name:key=val,key=val`` used on the command line, and ``@path`` for
monotone grid files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import (
    UNIT,
    Box,
    Function,
    FunctionHandle,
    FunctionMeta,
    Interval,
    all_permutations,
    dualize,
    load_grid_file,
)
from .errors import InvalidParams, UnknownFunction


@dataclass(frozen=True)
class Entry:
    builder: Callable
    params: dict  # name -> default
    summary: str


_REGISTRY: dict[str, Entry] = {}


def _register(name, summary, **params):
    def deco(builder):
        _REGISTRY[name] = Entry(builder, params, summary)
        return builder

    return deco


def names() -> list[str]:
    return sorted(_REGISTRY)


def describe(name: str) -> str:
    return _REGISTRY[name].summary


def _sym(n):
    return all_permutations(n)


def _arity(p, fixed=None):
    n = int(p.get("n", 2))
    if n != p.get("n", 2) or n < 1:
        raise InvalidParams(f"n must be a positive integer, got {p.get('n')}")
    if fixed is not None and n != fixed:
        raise InvalidParams(f"this family is defined for n={fixed} only")
    return n


def _diag(F_of_columns, n):
    """Analytic diagonal built from the same expression as F.

    Feeding the same array in every column reproduces F(t, ..., t) bit for bit.
    """

    def diag(t):
        t = np.asarray(t, dtype=float)
        return F_of_columns([t] * n)

    return diag


def _make(name, cols_func, n, box_interval, *, continuous, diag_continuous=None, critical=(),
          closed_form_mean=None, description="", extras=None, symmetric=True):
    def evaluate(X):
        return cols_func([X[:, i] for i in range(n)])

    meta = FunctionMeta(
        declared_symmetries=_sym(n) if symmetric else frozenset(),
        claims_continuous=continuous,
        claims_nondecreasing=True,
        analytic_diagonal=_diag(cols_func, n),
        diagonal_continuous=diag_continuous,
        monotonicity="declared",
        critical_points=tuple(tuple(float(v) for v in p) for p in critical),
        closed_form_mean=closed_form_mean,
        description=description,
        extras=extras or {},
    )
    return Function(evaluate, Box(box_interval, n), meta, name=name)


def _sum(cols):
    total = cols[0]
    for c in cols[1:]:
        total = total + c
    return total


def _min(cols):
    out = cols[0]
    for c in cols[1:]:
        out = np.minimum(out, c)
    return out


def _max(cols):
    out = cols[0]
    for c in cols[1:]:
        out = np.maximum(out, c)
    return out


# ---------------------------------------------------------------------------
# t-norms and worked examples


@_register("nilpotent-min", "nilpotent minimum t-norm: 0 if x1+x2<=1 else Min (not solvable)")
def _nilpotent_min(p, box):
    _arity(p, fixed=2)

    def f(cols):
        return np.where(cols[0] + cols[1] <= 1.0, 0.0, np.minimum(cols[0], cols[1]))

    return _make("nilpotent-min", f, 2, box or UNIT, continuous=False, diag_continuous=False,
                 critical=[(0.5, 0.5), (1.0, 0.25), (0.4, 0.7)],
                 description="nilpotent minimum")


@_register("lukasiewicz", "Lukasiewicz t-norm Max(0, sum(x) - (n-1))", n=2)
def _lukasiewicz(p, box):
    n = _arity(p)

    def f(cols):
        return np.maximum(0.0, _sum(cols) - (n - 1))

    return _make("lukasiewicz", f, n, box or UNIT, continuous=True,
                 critical=[(0.5,) * n, (1.0,) + (0.0,) * (n - 1)],
                 description="Lukasiewicz t-norm")


@_register("ordinal-sum-example", "ordinal sum Min(x1, x2, 1/4 + Max(0, x1+x2-1))")
def _ordinal_sum(p, box):
    _arity(p, fixed=2)

    def f(cols):
        x1, x2 = cols
        return np.minimum(np.minimum(x1, x2), 0.25 + np.maximum(0.0, x1 + x2 - 1.0))

    seg = [(0.9, 0.25), (0.8, 0.25), (1.0, 0.25), (0.75, 0.25)]
    crit = seg + [(b, a) for a, b in seg] + [(0.3, 0.4)]
    return _make("ordinal-sum-example", f, 2, box or UNIT, continuous=True, critical=crit,
                 description="ordinal sum of the Lukasiewicz t-norm")


def _einstein_mean(X):
    x1, x2 = X[:, 0], X[:, 1]
    # (1 + x1x2 - sqrt(1-x1^2)sqrt(1-x2^2)) / (x1 + x2) multiplied through by the
    # conjugate; identical algebraically and free of the 0/0 at x1 = -x2
    return (x1 + x2) / (1.0 + x1 * x2 + np.sqrt((1.0 - x1 * x1) * (1.0 - x2 * x2)))


@_register("einstein-sum", "Einstein sum (x1+x2)/(1+x1x2) on (-1,1)")
def _einstein(p, box):
    _arity(p, fixed=2)

    def f(cols):
        x1, x2 = cols
        return (x1 + x2) / (1.0 + x1 * x2)

    return _make("einstein-sum", f, 2, box or Interval.open(-1.0, 1.0), continuous=True,
                 critical=[(0.0, 0.6), (0.5, 0.5), (-0.5, 0.5)], closed_form_mean=_einstein_mean,
                 description="Einstein sum", extras={"generator": np.arctanh, "generator_inverse": np.tanh})


@_register("min-cap", "Min(sum(x), c)", c=0.5, n=2)
def _min_cap(p, box):
    n = _arity(p)
    c = float(p.get("c", 0.5))

    def f(cols):
        return np.minimum(_sum(cols), c)

    return _make("min-cap", f, n, box or UNIT, continuous=True,
                 critical=[(0.9, 0.1) + (0.0,) * (n - 2), (0.2, 0.4) + (0.0,) * (n - 2)],
                 description=f"Min(sum, {c:g})")


@_register("constant", "constant function c", c=0.0, n=2)
def _constant(p, box):
    n = _arity(p)
    c = float(p.get("c", 0.0))

    def f(cols):
        return np.zeros_like(cols[0]) + c

    return _make("constant", f, n, box or UNIT, continuous=True, description=f"constant {c:g}")


@_register("min", "Min(x)", n=2)
def _min_f(p, box):
    n = _arity(p)
    return _make("min", _min, n, box or UNIT, continuous=True, description="minimum")


@_register("max", "Max(x)", n=2)
def _max_f(p, box):
    n = _arity(p)
    return _make("max", _max, n, box or UNIT, continuous=True, description="maximum")


@_register("arithmetic-mean", "arithmetic mean", n=2)
def _mean(p, box):
    n = _arity(p)

    def f(cols):
        return _sum(cols) / n

    return _make("arithmetic-mean", f, n, box or UNIT, continuous=True, description="arithmetic mean",
                 closed_form_mean=lambda X: X.mean(axis=1))


@_register("sum", "sum(x)", n=2)
def _sum_f(p, box):
    n = _arity(p)
    return _make("sum", _sum, n, box or UNIT, continuous=True, description="sum",
                 closed_form_mean=lambda X: X.mean(axis=1))


@_register("remark44-example", "1 on [1/2,1]^2 minus (1/2,1/2), 0 elsewhere (needs the correction)", dual=0)
def _remark44(p, box):
    _arity(p, fixed=2)

    def f(cols):
        x1, x2 = cols
        upper = (x1 >= 0.5) & (x2 >= 0.5) & ~((x1 == 0.5) & (x2 == 0.5))
        return np.where(upper, 1.0, 0.0)

    crit = [(0.75, 0.5), (0.5, 0.75), (0.5, 0.5), (1.0, 0.5), (0.5, 1.0), (0.6, 0.5)]
    F = _make("remark44-example", f, 2, box or UNIT, continuous=False, diag_continuous=False, critical=crit,
              description="step function needing the level-set correction")
    if int(p.get("dual", 0)):
        return dualize(F)
    return F


@_register("patched-min", "Max on [1/2,1]^2, Min elsewhere (idempotent, discontinuous)")
def _patched_min(p, box):
    _arity(p, fixed=2)

    def f(cols):
        x1, x2 = cols
        inside = (x1 >= 0.5) & (x2 >= 0.5)
        return np.where(inside, np.maximum(x1, x2), np.minimum(x1, x2))

    crit = [(0.75, 0.5), (0.5, 0.75), (1.0, 0.5), (0.5, 1.0)]
    return _make("patched-min", f, 2, box or UNIT, continuous=False, diag_continuous=True, critical=crit,
                 description="idempotent step-patched minimum")


# ---------------------------------------------------------------------------
# continuous Archimedean t-norms T(x) = phi^-1(Min(phi(0), phi(x1) + phi(x2)))


def _generators(gen: str, p: dict):
    if gen == "product":
        return (lambda t: -np.log(t)), (lambda s: np.exp(-s)), "strict"
    if gen == "hamacher":
        return (lambda t: (1.0 - t) / t), (lambda s: 1.0 / (1.0 + s)), "strict"
    if gen == "lukasiewicz":
        return (lambda t: 1.0 - t), (lambda s: 1.0 - s), "nilpotent"
    if gen == "yager":
        q = float(p.get("p", 2.0))
        if not q > 0:
            raise InvalidParams(f"yager generator (1-t)^p is decreasing only for p > 0, got p={q}")
        return (lambda t: (1.0 - t) ** q), (lambda s: 1.0 - s ** (1.0 / q)), "nilpotent"
    raise InvalidParams(f"unknown generator {gen!r}; choose product, hamacher, lukasiewicz or yager")


@_register("archimedean", "continuous Archimedean t-norm from a generator (product|hamacher|lukasiewicz|yager)",
           gen="product", kind="", p=2.0)
def _archimedean(p, box):
    _arity(p, fixed=2)
    gen = str(p.get("gen", "product"))
    phi, phi_inv, kind = _generators(gen, p)
    requested = str(p.get("kind", "") or kind)
    if requested != kind:
        raise InvalidParams(f"generator {gen!r} yields a {kind} t-norm, not {requested}")
    with np.errstate(divide="ignore"):
        phi0 = float(phi(np.array([0.0]))[0])
    # sampled check that the generator really decreases
    ts = np.linspace(0.01, 0.99, 99)
    with np.errstate(divide="ignore", invalid="ignore"):
        if not np.all(np.diff(phi(ts)) < 0):
            raise InvalidParams("generator must be strictly decreasing")

    def f(cols):
        x1, x2 = cols
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.minimum(phi0, phi(x1) + phi(x2))
            return phi_inv(s)

    def qa_mean(X):
        with np.errstate(divide="ignore", invalid="ignore"):
            return phi_inv(0.5 * phi(X[:, 0]) + 0.5 * phi(X[:, 1]))

    return _make(f"archimedean[{gen}]", f, 2, box or UNIT, continuous=True,
                 closed_form_mean=qa_mean if kind == "strict" else None,
                 description=f"{kind} Archimedean t-norm, {gen} generator",
                 extras={"generator": phi, "generator_inverse": phi_inv, "kind": kind,
                         "quasi_arithmetic_mean": qa_mean})


# ---------------------------------------------------------------------------


def catalog(name: str, params: dict | None = None, box: Interval | None = None) -> FunctionHandle:
    """Build a catalog function.  ``box`` overrides the family's default interval."""
    entry = _REGISTRY.get(name)
    if entry is None:
        raise UnknownFunction(f"unknown function {name!r}; known: {', '.join(names())}")
    params = dict(params or {})
    unknown = set(params) - set(entry.params)
    if unknown:
        raise InvalidParams(f"{name} does not take parameter(s) {sorted(unknown)}")
    return entry.builder(params, box)


def _coerce(value: str):
    try:
        f = float(value)
    except ValueError:
        return value
    if math.isfinite(f) and f == int(f) and "." not in value and "e" not in value.lower():
        return int(f)
    return f


def parse_spec(spec: str) -> tuple[str, dict]:
    """Split ``name:key=val,key=val`` into the name and a parameter map."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq or not key:
                raise InvalidParams(f"malformed parameter {item!r} in {spec!r}")
            params[key.strip()] = _coerce(value.strip())
    return name.strip(), params


def from_spec(spec: str, box: Interval | None = None) -> FunctionHandle:
    if spec.startswith("@"):
        from .domain import restrict

        F = load_grid_file(spec[1:])
        return restrict(F, box) if box is not None else F
    name, params = parse_spec(spec)
    return catalog(name, params, box)
