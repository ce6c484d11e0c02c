"""Finite metric spaces, lp norms and membership in the Lipschitz ball.

Index 0 is always the base point. A point of the ball is stored as an
``(n + 1, dim)`` array whose row ``i`` is the image of node ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np


class LipextError(ValueError):
    """Base class for every error raised by this package."""


class DimensionMismatch(LipextError):
    pass


class MetricError(LipextError):
    """The distance matrix violates a metric axiom."""

    def __init__(self, message: str, indices: Tuple[int, ...] = ()):
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)

    @property
    def kind(self) -> str:
        return type(self).__name__


class NotSquare(MetricError):
    pass


class NotSymmetric(MetricError):
    pass


class NegativeOrZeroOffDiagonal(MetricError):
    pass


class NonzeroDiagonal(MetricError):
    pass


class TriangleViolation(MetricError):
    pass


@dataclass(frozen=True)
class NormSpec:
    """The target space: ``R^dim`` with the lp norm, ``1 < p < inf``."""

    dim: int
    p: float = 2.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise LipextError(f"dim must be a positive integer, got {self.dim!r}")
        p = float(self.p)
        if not (p > 1.0 and math.isfinite(p)):
            raise LipextError(
                f"p must satisfy 1 < p < inf (strictly convex norm), got {self.p!r}"
            )
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class ToleranceConfig:
    tol_feas: float = 1e-9
    tol_tight: float = 1e-9
    tol_weight: float = 1e-12

    def __post_init__(self):
        for name in ("tol_feas", "tol_tight", "tol_weight"):
            value = getattr(self, name)
            if not value >= 0:
                raise LipextError(f"{name} must be nonnegative, got {value!r}")


DEFAULT_TOL = ToleranceConfig()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Nodes ``0..n`` with a validated distance matrix.

    Build instances through :func:`validate_metric` or :func:`metric_closure`;
    the constructor itself does not check the axioms.
    """

    dist: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dist", _frozen(self.dist))

    @property
    def n(self) -> int:
        return self.dist.shape[0] - 1

    @property
    def n_nodes(self) -> int:
        return self.dist.shape[0]


@dataclass(frozen=True, eq=False)
class LipschitzPoint:
    """A tuple ``(y_0, ..., y_n)`` of vectors with ``y_0 = 0``.

    Membership in the unit ball is *not* an invariant; see :func:`is_member`.
    """

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 1:
            raise DimensionMismatch(
                f"point must be an (n+1, dim) array with n >= 1, got shape {values.shape}"
            )
        if np.any(values[0] != 0.0):
            raise LipextError("the base point must map to the zero vector")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, n: int, dim: int) -> "LipschitzPoint":
        return cls(np.zeros((n + 1, dim)))

    @property
    def n(self) -> int:
        return self.values.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def lp_norms(x: np.ndarray, p: float) -> np.ndarray:
    """lp norm along the last axis, scaled by the largest entry.

    Every norm in the package goes through here so that the same pair
    always gets the same floating point value.
    """
    a = np.abs(x)
    peak = a.max(axis=-1, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    out = np.sum((a / safe) ** p, axis=-1) ** (1.0 / p) * safe[..., 0]
    return out


def norm_eval(norm: NormSpec, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (norm.dim,):
        raise DimensionMismatch(f"expected a vector of length {norm.dim}, got shape {x.shape}")
    return float(lp_norms(x, norm.p))


def _row_norms(norm: NormSpec, rows: np.ndarray) -> np.ndarray:
    return lp_norms(rows, norm.p)


def pairwise_norms(y: LipschitzPoint, norm: NormSpec) -> np.ndarray:
    """Matrix of ``||y_i - y_j||`` over all node pairs."""
    v = y.values
    return _row_norms(norm, v[:, None, :] - v[None, :, :])


def check_dims(y: LipschitzPoint, X: FiniteMetricSpace, norm: NormSpec) -> None:
    if y.n != X.n:
        raise DimensionMismatch(f"point has {y.n + 1} nodes, space has {X.n + 1}")
    if y.dim != norm.dim:
        raise DimensionMismatch(f"point has dimension {y.dim}, norm expects {norm.dim}")


def validate_metric(raw) -> FiniteMetricSpace:
    """Check the metric axioms exactly and wrap ``raw`` as a space.

    Checks run in the order: shape, diagonal, symmetry, positivity,
    triangle inequality. The first violation found is raised, with the
    offending indices in ``err.indices``. A triangle violation
    ``TriangleViolation(i, j, k)`` means ``d[i][j] > d[i][k] + d[k][j]``.
    """
    d = np.asarray(raw, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
        raise NotSquare(f"distance matrix must be square with side >= 2, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise MetricError("distance matrix has non-finite entries")
    m = d.shape[0]
    for i in range(m):
        if d[i, i] != 0.0:
            raise NonzeroDiagonal(f"dist[{i}][{i}] = {d[i, i]!r} is not zero", (i,))
    for i in range(m):
        for j in range(i + 1, m):
            if d[i, j] != d[j, i]:
                raise NotSymmetric(f"dist[{i}][{j}] != dist[{j}][{i}]", (i, j))
    for i in range(m):
        for j in range(i + 1, m):
            if not d[i, j] > 0.0:
                raise NegativeOrZeroOffDiagonal(
                    f"dist[{i}][{j}] = {d[i, j]!r} must be positive", (i, j)
                )
    # vectorised screen, then locate the first offending triple
    via = d[:, :, None] + d[None, :, :]  # via[i, k, j] = d[i,k] + d[k,j]
    bad = d[:, None, :] > via
    if bad.any():
        for i in range(m):
            for j in range(i + 1, m):
                for k in range(m):
                    if d[i, j] > d[i, k] + d[k, j]:
                        raise TriangleViolation(
                            f"dist[{i}][{j}] > dist[{i}][{k}] + dist[{k}][{j}]", (i, j, k)
                        )
    return FiniteMetricSpace(d)


def metric_closure(raw) -> FiniteMetricSpace:
    """Shortest-path repair of a symmetric positive dissimilarity matrix."""
    d = np.array(raw, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
        raise NotSquare(f"matrix must be square with side >= 2, got shape {d.shape}")
    if not np.array_equal(d, d.T):
        raise LipextError("metric_closure requires a symmetric matrix")
    if np.any(np.diag(d) != 0.0):
        raise LipextError("metric_closure requires a zero diagonal")
    off = ~np.eye(d.shape[0], dtype=bool)
    if not np.all(d[off] > 0.0) or not np.all(np.isfinite(d)):
        raise LipextError("metric_closure requires finite, strictly positive off-diagonal entries")

    # Floyd-Warshall sweeps, repeated until no entry moves so that the exact
    # triangle check also holds under floating point rounding.
    while True:
        changed = False
        for k in range(d.shape[0]):
            via = d[:, k, None] + d[None, k, :]
            mask = via < d
            if mask.any():
                d[mask] = via[mask]
                changed = True
        if not changed:
            break
    return validate_metric(d)


def lipschitz_constant(y: LipschitzPoint, X: FiniteMetricSpace, norm: NormSpec) -> float:
    check_dims(y, X, norm)
    ratio, _ = _worst_ratio(y, X, norm)
    return ratio


def _worst_ratio(y, X, norm) -> Tuple[float, Tuple[int, int]]:
    norms = pairwise_norms(y, norm)
    iu = np.triu_indices(X.n_nodes, k=1)
    ratios = norms[iu] / X.dist[iu]
    idx = int(np.argmax(ratios))
    return float(ratios[idx]), (int(iu[0][idx]), int(iu[1][idx]))


def worst_pair(y: LipschitzPoint, X: FiniteMetricSpace, norm: NormSpec) -> Tuple[int, int]:
    """The pair attaining the Lipschitz constant (lexicographically first on ties)."""
    check_dims(y, X, norm)
    return _worst_ratio(y, X, norm)[1]


def membership_violations(
    y: LipschitzPoint,
    X: FiniteMetricSpace,
    norm: NormSpec,
    L: float = 1.0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> np.ndarray:
    """Boolean matrix marking the pairs that break the (tolerant) L-bound."""
    check_dims(y, X, norm)
    bound = L * X.dist
    return pairwise_norms(y, norm) > bound + tol.tol_feas * np.maximum(1.0, bound)


def is_member(
    y: LipschitzPoint,
    X: FiniteMetricSpace,
    norm: NormSpec,
    L: float = 1.0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    if not L > 0:
        raise LipextError(f"L must be positive, got {L!r}")
    return not membership_violations(y, X, norm, L, tol).any()


def rescale_into_ball(y: LipschitzPoint, X: FiniteMetricSpace, norm: NormSpec) -> LipschitzPoint:
    lip = lipschitz_constant(y, X, norm)
    if lip <= 1.0:
        return y
    return LipschitzPoint(y.values / lip)


def cross_pairs(S, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index arrays ``(i, j)`` of all pairs with ``i`` in ``S`` and ``j`` outside."""
    inside = np.zeros(n_nodes, dtype=bool)
    inside[list(S)] = True
    ii, jj = np.nonzero(inside[:, None] & ~inside[None, :])
    return ii, jj
