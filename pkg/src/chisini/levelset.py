"""Per-point level-set metrics of a nondecreasing F.

For a point x with y = F(x) this computes the level interval ``[a, b]`` of the
diagonal section at y and the Chebyshev distances from x to the strict
lower set ``{F < y}`` and strict upper set ``{F > y}``.

For nondecreasing F a Chebyshev-nearest point of an upper set can be taken on
the ray ``x + h*1`` (clamped to the box), and dually for lower sets, so each
distance reduces to a one-dimensional bisection in h.  The brute-force grid
oracle in this module exists to validate that reduction.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .domain import FunctionHandle, check_point, diagonal
from .errors import GridTooLarge
from .mono1d import level_bounds, locate

__all__ = [
    "SolverConfig",
    "LevelData",
    "LevelDataBatch",
    "level_data",
    "level_data_batch",
    "probe_distances",
    "brute_force_distances",
    "brute_force_distances_batch",
    "corrected_distances",
]


@dataclass(frozen=True)
class LevelData:
    x: tuple
    y: float
    a: float
    b: float
    d_lt: float
    d_gt: float
    in_omega: bool
    a_attained: bool
    b_attained: bool


@dataclass(frozen=True)
class LevelDataBatch:
    X: np.ndarray
    y: np.ndarray
    a: np.ndarray
    b: np.ndarray
    d_lt: np.ndarray
    d_gt: np.ndarray
    in_omega: np.ndarray
    a_attained: np.ndarray
    b_attained: np.ndarray

    def __len__(self) -> int:
        return len(self.y)

    def __getitem__(self, i) -> LevelData:
        return LevelData(tuple(float(v) for v in self.X[i]), float(self.y[i]), float(self.a[i]), float(self.b[i]),
                         float(self.d_lt[i]), float(self.d_gt[i]), bool(self.in_omega[i]),
                         bool(self.a_attained[i]), bool(self.b_attained[i]))


def probe_distances(F: FunctionHandle, X: np.ndarray, y: np.ndarray, cfg: SolverConfig = DEFAULT_CONFIG):
    """Clamped diagonal probe for ``d_lt`` and ``d_gt`` (``inf`` when the set is empty)."""
    lo, hi = F.bounds()
    span = hi - lo
    m = len(y)
    tol = cfg.tol_probe
    out = []
    for sign in (-1.0, 1.0):
        def moved(idx, h):
            return np.clip(X[idx] + sign * h[:, None], lo, hi)

        def fires(idx, h):
            v = F.evaluate(moved(idx, h))
            return v < y[idx] - tol if sign < 0 else v > y[idx] + tol

        idx = np.arange(m)
        d = np.full(m, math.inf)
        reach = fires(idx, np.full(m, span))
        at_zero = fires(idx, np.zeros(m))
        d[at_zero] = 0.0
        need = np.flatnonzero(reach & ~at_zero)
        if need.size:
            d[need], _, _ = locate(lambda i, t: fires(need[i], t), np.zeros(need.size), np.full(need.size, span), cfg)
        out.append(d)
    return out[0], out[1]


def level_data_batch(F: FunctionHandle, X, cfg: SolverConfig = DEFAULT_CONFIG) -> LevelDataBatch:
    X = check_point(F, X, cfg.tol_dom)
    y = F.evaluate(X)
    lb = level_bounds(diagonal(F), y, cfg)
    d_lt, d_gt = probe_distances(F, X, y, cfg)
    in_omega = (d_lt + d_gt) > cfg.tol_zero
    return LevelDataBatch(X, y, lb.a, lb.b, d_lt, d_gt, in_omega, lb.a_attained, lb.b_attained)


def level_data(F: FunctionHandle, x, cfg: SolverConfig = DEFAULT_CONFIG) -> LevelData:
    return level_data_batch(F, np.asarray(x, dtype=float)[None, :], cfg)[0]


_GRID_CACHE: dict = {}
_GRID_LOCK = threading.Lock()


def _oracle_grid(F: FunctionHandle, k: int):
    key = (id(F), k)
    with _GRID_LOCK:
        hit = _GRID_CACHE.get(key)
    if hit is not None and hit[0] is F:
        return hit[1], hit[2]
    lo, hi = F.bounds()
    axis = np.linspace(lo, hi, k)
    P = np.stack(np.meshgrid(*([axis] * F.arity), indexing="ij"), axis=-1).reshape(-1, F.arity)
    V = F.evaluate(P)
    with _GRID_LOCK:
        if len(_GRID_CACHE) > 16:
            _GRID_CACHE.clear()
        _GRID_CACHE[key] = (F, P, V)
    return P, V


def brute_force_distances_batch(F: FunctionHandle, X, cfg: SolverConfig = DEFAULT_CONFIG):
    """Chebyshev distances from each x to the grid points of the strict lower/upper sets."""
    k = cfg.oracle_grid
    if float(k) ** F.arity > 1e7:
        raise GridTooLarge(f"{k}^{F.arity} grid points exceed the 1e7 limit")
    X = check_point(F, X, cfg.tol_dom)
    P, V = _oracle_grid(F, k)
    y = F.evaluate(X)
    d_lt = np.full(len(X), math.inf)
    d_gt = np.full(len(X), math.inf)
    for j, x in enumerate(X):
        dist = np.max(np.abs(P - x), axis=1)
        below = V < y[j] - cfg.tol_probe
        above = V > y[j] + cfg.tol_probe
        if below.any():
            d_lt[j] = dist[below].min()
        if above.any():
            d_gt[j] = dist[above].min()
    return d_lt, d_gt


def brute_force_distances(F: FunctionHandle, x, cfg: SolverConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    d_lt, d_gt = brute_force_distances_batch(F, np.asarray(x, dtype=float)[None, :], cfg)
    return float(d_lt[0]), float(d_gt[0])


def corrected_distances(F: FunctionHandle, x, a_star: float, b_star: float):
    """Distances to the boxes ``[inf I, a*]^n`` and ``[b*, sup I]^n``: ``Max(x) - a*`` and ``b* - Min(x)``."""
    if a_star > b_star:
        raise ValueError(f"a*={a_star} exceeds b*={b_star}")
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    d_lt = X.max(axis=1) - a_star
    d_gt = b_star - X.min(axis=1)
    if single:
        return float(d_lt[0]), float(d_gt[0])
    return d_lt, d_gt
