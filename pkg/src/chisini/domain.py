"""Domain geometry, the n-ary function model and structural transforms.

Every n-ary function is a :class:`FunctionHandle` on a box ``I^n``.  Handles
evaluate batches: ``F(X)`` with ``X`` of shape ``(m, n)`` returns an array of
shape ``(m,)``; a single point of shape ``(n,)`` returns a float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import permutations
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import (
    ArityMismatch,
    InvalidGrid,
    NotSubinterval,
    PointOutOfBox,
    UnboundedDomain,
)

INSET = 1e-9
UNBOUNDED_CAP = 1e9

ArrayFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        if math.isinf(lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("a degenerate interval must be closed")

    @classmethod
    def closed(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-math.inf, math.inf, False, False)

    @property
    def is_compact(self) -> bool:
        return self.lo_closed and self.hi_closed

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, t, tol: float = 0.0):
        t = np.asarray(t, dtype=float)
        above = t >= self.lo - tol if self.lo_closed else t > self.lo - tol
        below = t <= self.hi + tol if self.hi_closed else t < self.hi + tol
        return above & below

    def issubset(self, other: "Interval") -> bool:
        if self.lo < other.lo or self.hi > other.hi:
            return False
        if self.lo == other.lo and self.lo_closed and not other.lo_closed:
            return False
        if self.hi == other.hi and self.hi_closed and not other.hi_closed:
            return False
        return True

    def eval_bounds(self, inset: float = INSET, cap: float = UNBOUNDED_CAP) -> tuple[float, float]:
        """Compact interval on which numerical work is done.

        Infinite endpoints are capped at ``+-cap``; open finite endpoints are
        moved inwards by ``inset`` times the span (or times ``max(1, |e|)``
        when the other end is infinite).
        """
        lo = self.lo if math.isfinite(self.lo) else -cap
        hi = self.hi if math.isfinite(self.hi) else cap
        if self.is_bounded:
            w_lo = w_hi = self.hi - self.lo
        else:
            w_lo, w_hi = max(1.0, abs(lo)), max(1.0, abs(hi))
        if not self.lo_closed and math.isfinite(self.lo):
            lo = lo + inset * w_lo
        if not self.hi_closed and math.isfinite(self.hi):
            hi = hi - inset * w_hi
        return lo, hi

    def sample_bounds(self, margin: float = 0.05) -> tuple[float, float]:
        """Window used for random sampling and certificates.

        Compact intervals are used as is.  Open finite ends are pulled in by
        ``margin`` times the span; infinite ends are replaced by a unit
        window next to the finite end (or ``[-1, 1]``).
        """
        lo, hi = self.lo, self.hi
        if not math.isfinite(lo) and not math.isfinite(hi):
            return -1.0, 1.0
        if not math.isfinite(lo):
            lo = hi - 1.0
        if not math.isfinite(hi):
            hi = lo + 1.0
        span = hi - lo
        if not self.lo_closed and math.isfinite(self.lo):
            lo += margin * span
        if not self.hi_closed and math.isfinite(self.hi):
            hi -= margin * span
        return lo, hi

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


UNIT = Interval.closed(0.0, 1.0)


@dataclass(frozen=True)
class Box:
    """The cube ``I^n``."""

    interval: Interval
    arity: int

    def __post_init__(self):
        if int(self.arity) != self.arity or self.arity < 1:
            raise ValueError("arity must be a positive integer")

    def bounds(self) -> tuple[float, float]:
        return self.interval.eval_bounds()

    @property
    def span(self) -> float:
        lo, hi = self.bounds()
        return hi - lo

    def contains(self, X, tol: float = 0.0):
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.arity:
            return np.zeros(X.shape[:-1], dtype=bool)
        return np.all(self.interval.contains(X, tol), axis=-1)

    def sample_bounds(self, margin: float = 0.05) -> tuple[float, float]:
        return self.interval.sample_bounds(margin)

    def random_points(self, rng: np.random.Generator, m: int, margin: float = 0.05) -> np.ndarray:
        lo, hi = self.sample_bounds(margin)
        return rng.uniform(lo, hi, size=(m, self.arity))

    def grid_points(self, k: int, margin: float = 0.05) -> np.ndarray:
        lo, hi = self.sample_bounds(margin)
        axis = np.linspace(lo, hi, k)
        mesh = np.meshgrid(*([axis] * self.arity), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class Permutation:
    """A permutation of the argument positions, stored 0-based.

    ``apply(x)`` returns ``[x]_sigma = (x[mapping[0]], ..., x[mapping[n-1]])``.
    """

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError(f"not a permutation: {self.mapping}")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        m = list(range(n))
        m[i], m[j] = m[j], m[i]
        return cls(tuple(m))

    def __len__(self) -> int:
        return len(self.mapping)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X)[..., list(self.mapping)]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for k, j in enumerate(self.mapping):
            inv[j] = k
        return Permutation(tuple(inv))


def all_permutations(n: int) -> frozenset:
    return frozenset(permutations(range(n)))


@dataclass(frozen=True)
class FunctionMeta:
    declared_symmetries: frozenset = frozenset()
    claims_continuous: bool = False
    claims_nondecreasing: bool = True
    analytic_diagonal: Optional[ArrayFunc] = None
    diagonal_continuous: Optional[bool] = None
    # "declared" (catalog), "verified" (checked at load) or "unverified"
    monotonicity: str = "declared"
    critical_points: tuple = ()
    closed_form_mean: Optional[ArrayFunc] = None
    description: str = ""
    extras: dict = field(default_factory=dict, hash=False, compare=False)


@dataclass(frozen=True)
class Univariate:
    """A vectorised one-variable function on the compact interval [lo, hi]."""

    func: ArrayFunc
    lo: float
    hi: float
    name: str = "f"
    claims_continuous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.asarray(self.func(np.atleast_1d(arr)), dtype=float)
        if arr.ndim == 0:
            return float(out.reshape(-1)[0])
        return out.reshape(arr.shape)


class FunctionHandle:
    """An evaluable n-ary function on a box.  Immutable after construction."""

    def __init__(self, box: Box, meta: FunctionMeta | None = None, name: str = "F"):
        self._box = box
        self._meta = meta if meta is not None else FunctionMeta()
        self._name = name

    @property
    def box(self) -> Box:
        return self._box

    @property
    def meta(self) -> FunctionMeta:
        return self._meta

    @property
    def name(self) -> str:
        return self._name

    @property
    def arity(self) -> int:
        return self._box.arity

    def bounds(self) -> tuple[float, float]:
        return self._box.bounds()

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, X) -> np.ndarray:
        """Evaluate on a batch of shape ``(m, n)``."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.arity:
            raise ArityMismatch(f"{self.name} expects points of length {self.arity}, got shape {X.shape}")
        return np.asarray(self._evaluate(X), dtype=float).reshape(X.shape[0])

    def __call__(self, x):
        X = np.asarray(x, dtype=float)
        if X.ndim == 1:
            return float(self.evaluate(X[None, :])[0])
        return self.evaluate(X)

    def with_meta(self, **changes) -> "FunctionHandle":
        return _Derived(self._box, replace(self._meta, **changes), self.name, self._evaluate)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} on {self.box.interval}^{self.arity}>"


class Function(FunctionHandle):
    """Handle backed by a vectorised callable ``func(X) -> values``.

    Callables supplied without a monotonicity claim from the catalog are
    flagged ``monotonicity="unverified"``.
    """

    def __init__(self, func: ArrayFunc, box: Box, meta: FunctionMeta | None = None, name: str = "F"):
        if meta is None:
            meta = FunctionMeta(monotonicity="unverified")
        super().__init__(box, meta, name)
        self._func = func

    @classmethod
    def from_scalar(cls, func: Callable[..., float], box: Box, **meta) -> "Function":
        """Wrap a scalar function ``func(x1, ..., xn)``."""

        def batched(X):
            return np.array([func(*row) for row in X], dtype=float)

        meta.setdefault("monotonicity", "unverified")
        return cls(batched, box, FunctionMeta(**meta), name=getattr(func, "__name__", "F"))

    def _evaluate(self, X):
        return self._func(X)


class _Derived(FunctionHandle):
    def __init__(self, box, meta, name, evaluate):
        super().__init__(box, meta, name)
        self._inner = evaluate

    def _evaluate(self, X):
        return self._inner(X)


class MonotoneGridFunction(FunctionHandle):
    """Multilinear interpolation of axiswise nondecreasing data on a knot grid.

    All axes must share the same first and last knot, which define the box.
    """

    def __init__(self, axis_knots: Sequence[Sequence[float]], values, name: str = "grid", tol: float = 1e-12):
        knots = [np.asarray(k, dtype=float) for k in axis_knots]
        values = np.asarray(values, dtype=float)
        n = len(knots)
        if n < 1:
            raise InvalidGrid("at least one axis is required")
        if values.shape != tuple(len(k) for k in knots):
            raise InvalidGrid(f"values have shape {values.shape}, knots imply {tuple(len(k) for k in knots)}")
        for i, k in enumerate(knots):
            if len(k) < 2 or np.any(np.diff(k) <= 0):
                raise InvalidGrid(f"knots of axis {i} must be strictly increasing with at least 2 entries")
        lo, hi = knots[0][0], knots[0][-1]
        for i, k in enumerate(knots):
            if k[0] != lo or k[-1] != hi:
                raise InvalidGrid(f"axis {i} spans [{k[0]}, {k[-1]}], expected the common [{lo}, {hi}]")
        if not np.all(np.isfinite(values)):
            raise InvalidGrid("grid values must be finite")
        for i in range(n):
            steps = np.diff(values, axis=i)
            if steps.size and steps.min() < -tol:
                where = np.unravel_index(np.argmin(steps), steps.shape)
                raise InvalidGrid(f"values decrease along axis {i} at index {tuple(int(w) for w in where)}")
        meta = FunctionMeta(claims_continuous=True, monotonicity="verified", description="multilinear grid data")
        super().__init__(Box(Interval.closed(lo, hi), n), meta, name)
        self.axis_knots = tuple(knots)
        self.values = values
        self._interp = RegularGridInterpolator(tuple(knots), values, method="linear")

    def _evaluate(self, X):
        lo, hi = self.bounds()
        return self._interp(np.clip(X, lo, hi))


# ---------------------------------------------------------------------------
# structural transforms


def diagonal(F: FunctionHandle) -> Univariate:
    """The diagonal section ``t -> F(t, ..., t)`` on the evaluation interval."""
    lo, hi = F.bounds()
    n = F.arity
    if F.meta.analytic_diagonal is not None:
        func = F.meta.analytic_diagonal
    else:
        def func(t):
            t = np.asarray(t, dtype=float)
            return F.evaluate(np.repeat(t[:, None], n, axis=1))
    cont = F.meta.diagonal_continuous
    if cont is None:
        cont = F.meta.claims_continuous
    return Univariate(func, lo, hi, name=f"delta[{F.name}]", claims_continuous=bool(cont))


class DualFunction(FunctionHandle):
    """``F^d = psi o F o (psi, ..., psi)`` with ``psi(x) = a + b - x``."""

    def __init__(self, primal: FunctionHandle):
        iv = primal.box.interval
        self.primal = primal
        self._c = iv.lo + iv.hi
        c = self._c
        pm = primal.meta
        diag = None
        if pm.analytic_diagonal is not None:
            pd = pm.analytic_diagonal

            def diag(t):
                return c - pd(c - np.asarray(t, dtype=float))

        crit = tuple(tuple(c - v for v in p) for p in pm.critical_points)
        meta = replace(pm, analytic_diagonal=diag, critical_points=crit, closed_form_mean=None,
                       description=f"dual of {primal.name}", extras={})
        super().__init__(primal.box, meta, f"dual[{primal.name}]")

    def _evaluate(self, X):
        return self._c - self.primal.evaluate(self._c - X)


def dualize(F: FunctionHandle) -> FunctionHandle:
    if not F.box.interval.is_compact or not F.box.interval.is_bounded:
        raise UnboundedDomain(f"dualization needs a compact interval, got {F.box.interval}")
    if isinstance(F, DualFunction):
        return F.primal
    return DualFunction(F)


def _conjugate_symmetries(symmetries, sigma: Permutation) -> frozenset:
    s = sigma.mapping
    sinv = sigma.inverse().mapping
    out = set()
    for tau in symmetries:
        out.add(tuple(s[tau[sinv[j]]] for j in range(len(s))))
    return frozenset(out)


def permute_args(F: FunctionHandle, sigma: Permutation) -> FunctionHandle:
    """``x -> F([x]_sigma)``."""
    if len(sigma) != F.arity:
        raise ArityMismatch(f"permutation of length {len(sigma)} for arity {F.arity}")
    idx = list(sigma.mapping)
    inv = sigma.inverse().mapping
    crit = tuple(tuple(p[inv[j]] for j in range(F.arity)) for p in F.meta.critical_points)
    meta = replace(F.meta, declared_symmetries=_conjugate_symmetries(F.meta.declared_symmetries, sigma),
                   critical_points=crit, closed_form_mean=None)
    return _Derived(F.box, meta, f"{F.name}o{sigma.mapping}", lambda X: F.evaluate(X[:, idx]))


def restrict(F: FunctionHandle, J: Interval) -> FunctionHandle:
    """Same evaluation on the smaller box ``J^n``."""
    if not J.issubset(F.box.interval):
        raise NotSubinterval(f"{J} is not contained in {F.box.interval}")
    box = Box(J, F.arity)
    crit = tuple(p for p in F.meta.critical_points if bool(box.contains(np.asarray(p, dtype=float))))
    meta = replace(F.meta, critical_points=crit)
    return _Derived(box, meta, f"{F.name}|{J}", F.evaluate)


def transform_values(F: FunctionHandle, g: ArrayFunc, name: str = "g") -> FunctionHandle:
    """``g o F`` for a strictly increasing outer function ``g``."""
    diag = None
    if F.meta.analytic_diagonal is not None:
        fd = F.meta.analytic_diagonal

        def diag(t):
            return g(fd(t))

    meta = replace(F.meta, analytic_diagonal=diag, closed_form_mean=None, extras={})
    return _Derived(F.box, meta, f"{name}o{F.name}", lambda X: g(F.evaluate(X)))


def compose_inner(F: FunctionHandle, phi: Univariate, interval: Interval | None = None) -> FunctionHandle:
    """``F' = F o (phi, ..., phi)`` on ``J^n`` where ``J`` is phi's interval."""
    J = interval if interval is not None else Interval.closed(phi.lo, phi.hi)
    n = F.arity

    def evaluate(X):
        return F.evaluate(phi(X.reshape(-1)).reshape(X.shape))

    meta = FunctionMeta(
        declared_symmetries=F.meta.declared_symmetries,
        claims_continuous=F.meta.claims_continuous and phi.claims_continuous,
        claims_nondecreasing=False,
        monotonicity="unverified",
        description=f"{F.name} composed with {phi.name}",
    )
    return _Derived(Box(J, n), meta, f"{F.name}o{phi.name}", evaluate)


def check_point(F: FunctionHandle, x, tol: float = 1e-10) -> np.ndarray:
    X = np.atleast_2d(np.asarray(x, dtype=float))
    if X.shape[1] != F.arity:
        raise ArityMismatch(f"points of length {X.shape[1]} for arity {F.arity}")
    inside = F.box.contains(X, tol)
    if not np.all(inside):
        bad = X[~inside][0]
        raise PointOutOfBox(f"point ({','.join(f'{v:.12g}' for v in bad)}) lies outside {F.box.interval}^{F.arity}")
    lo, hi = F.bounds()
    return np.clip(X, lo, hi)


def sampled_monotonicity(F: FunctionHandle, pairs: int = 10_000, seed: int = 0, margin: float = 0.05):
    """Largest ``F(x) - F(x')`` over random comparable pairs ``x <= x'``.

    Returns ``(violation, x, x')``; a nondecreasing F gives ``violation <= 0``
    up to rounding.
    """
    rng = np.random.default_rng(seed)
    lo, hi = F.box.sample_bounds(margin)
    X = rng.uniform(lo, hi, size=(pairs, F.arity))
    Xp = X + rng.uniform(0, 1, size=X.shape) * (hi - X)
    # a quarter of the pairs share all but one coordinate
    k = pairs // 4
    axis = rng.integers(0, F.arity, size=k)
    Xp[:k] = X[:k]
    Xp[np.arange(k), axis] = rng.uniform(X[np.arange(k), axis], hi)
    diff = F.evaluate(X) - F.evaluate(Xp)
    i = int(np.argmax(diff))
    return float(diff[i]), X[i], Xp[i]


# ---------------------------------------------------------------------------
# grid file format


def parse_grid_text(text: str, name: str = "grid") -> MonotoneGridFunction:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidGrid("empty grid file")
    try:
        head = [int(tok) for tok in lines[0].split()]
    except ValueError as exc:
        raise InvalidGrid(f"bad header line: {lines[0]!r}") from exc
    n, counts = head[0], head[1:]
    if n < 1 or len(counts) != n or any(k < 2 for k in counts):
        raise InvalidGrid(f"header must read 'n k1 ... kn' with every k >= 2, got {lines[0]!r}")
    if len(lines) < n + 1:
        raise InvalidGrid("missing knot lines")
    try:
        knots = [[float(tok) for tok in lines[1 + i].split()] for i in range(n)]
        values = [float(tok) for ln in lines[1 + n:] for tok in ln.split()]
    except ValueError as exc:
        raise InvalidGrid(f"non-numeric entry: {exc}") from exc
    for i, (k, c) in enumerate(zip(knots, counts)):
        if len(k) != c:
            raise InvalidGrid(f"axis {i}: header announces {c} knots, found {len(k)}")
    expected = int(np.prod(counts))
    if len(values) != expected:
        raise InvalidGrid(f"expected {expected} values, found {len(values)}")
    return MonotoneGridFunction(knots, np.array(values).reshape(counts), name=name)


def load_grid_file(path) -> MonotoneGridFunction:
    path = Path(path)
    return parse_grid_text(path.read_text(), name=path.stem)


def format_grid_text(F: MonotoneGridFunction) -> str:
    out = [" ".join([str(F.arity)] + [str(len(k)) for k in F.axis_knots])]
    out += [" ".join(repr(float(v)) for v in k) for k in F.axis_knots]
    flat = F.values.reshape(-1)
    last = len(F.axis_knots[-1])
    out += [" ".join(repr(float(v)) for v in flat[i:i + last]) for i in range(0, flat.size, last)]
    return "\n".join(out) + "\n"
