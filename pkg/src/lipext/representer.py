"""Convex decomposition of ball members into at most ``n + 1`` extreme points.

Everything happens along one fixed unit direction ``v``: a candidate is
``y + t*v`` where node ``i`` is displaced by ``t[i] * v`` and ``t[0] = 0``.
The set of feasible ``t`` is a compact convex polytope-like body in
``R^n``; splitting it along cut indicators and then pruning with an affine
dependence gives the short convex combination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .extremality import (
    Extreme,
    ExtremalityCertificate,
    certify_extremality,
    cut_oracle_bruteforce,
    require_member,
)
from .metric import (
    DEFAULT_TOL,
    FiniteMetricSpace,
    LipextError,
    LipschitzPoint,
    NormSpec,
    ToleranceConfig,
    check_dims,
    cross_pairs,
    is_member,
    lp_norms,
    norm_eval,
)

BISECTION_TOL = 1e-12
MERGE_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
NULLSPACE_RTOL = 1e-10
ORACLE_MAX_N = 10


class NotASlackCut(LipextError):
    pass


class IterationOverflow(LipextError):
    pass


class ReductionFailure(LipextError):
    pass


@dataclass(frozen=True, eq=False)
class Direction:
    """A unit vector (in the chosen lp norm) along which nodes are displaced."""

    v: np.ndarray
    norm: NormSpec

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        if v.shape != (self.norm.dim,):
            raise LipextError(f"direction must have length {self.norm.dim}, got shape {v.shape}")
        if abs(norm_eval(self.norm, v) - 1.0) > 1e-12:
            raise LipextError("direction must have unit norm (within 1e-12)")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @classmethod
    def basis(cls, norm: NormSpec, index: int = 0) -> "Direction":
        if not 0 <= index < norm.dim:
            raise LipextError(f"basis index {index} out of range for dim {norm.dim}")
        v = np.zeros(norm.dim)
        v[index] = 1.0
        return cls(v, norm)

    @classmethod
    def normalized(cls, vec, norm: NormSpec) -> "Direction":
        vec = np.asarray(vec, dtype=float)
        length = norm_eval(norm, vec)
        if length == 0.0:
            raise LipextError("cannot normalise the zero vector")
        return cls(vec / length, norm)


def _as_direction(v, norm: NormSpec) -> Direction:
    if v is None:
        return Direction.basis(norm)
    if isinstance(v, Direction):
        return v
    return Direction(v, norm)


def displace(y: LipschitzPoint, t, v: Direction) -> LipschitzPoint:
    """The point ``y + t*v`` (node ``i`` moved by ``t[i] * v``)."""
    t = np.asarray(t, dtype=float)
    return LipschitzPoint(y.values + t[:, None] * v.v[None, :])


def in_feasible_set(y, t, v, X, norm, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Membership predicate for displacement vectors ``t``."""
    t = np.asarray(t, dtype=float)
    if t.shape != (X.n_nodes,) or t[0] != 0.0:
        return False
    return is_member(displace(y, t, _as_direction(v, norm)), X, norm, 1.0, tol)


@dataclass(frozen=True, eq=False)
class Atom:
    t: np.ndarray
    point: LipschitzPoint
    certificate: Optional[ExtremalityCertificate] = None


@dataclass(eq=False)
class Decomposition:
    base: LipschitzPoint
    direction: Direction
    weights: np.ndarray
    atoms: List[Atom]

    @property
    def k(self) -> int:
        return len(self.atoms)

    def reconstruct(self) -> np.ndarray:
        stacked = np.stack([a.point.values for a in self.atoms])
        return np.tensordot(self.weights, stacked, axes=1)

    def reconstruction_error(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.base.values)))


# ---------------------------------------------------------------- line search

def pair_interval_closed_form(a, v, d) -> Tuple[np.ndarray, np.ndarray]:
    """Roots of ``||a + s v||_2 = d`` for a batch of pairs (Euclidean only).

    ``a`` has shape ``(m, dim)``, ``d`` shape ``(m,)``; requires ``||a|| < d``.
    Returns ``(lower, upper)`` with ``lower < 0 < upper``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    v = np.asarray(v, dtype=float)
    b = a @ v
    c = np.einsum("ij,ij->i", a, a) - d * d  # negative
    root = np.sqrt(b * b - c)
    # s^2 + 2 b s + c = 0, solved without cancellation
    q = -(b + np.where(b >= 0, root, -root))
    r1 = q
    r2 = c / q
    return np.minimum(r1, r2), np.maximum(r1, r2)


def pair_interval_bisection(a, v, d, norm: NormSpec, atol: float = BISECTION_TOL):
    """Roots of ``||a + s v|| = d`` by bisection, for any lp norm.

    ``s -> ||a + s v|| - d`` is convex and negative at 0. Each root is
    bracketed by ``|s| <= ||a|| + d``; the returned endpoints sit on the
    feasible side of the root, within ``atol`` of it.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    v = np.asarray(v, dtype=float)
    m = len(d)
    # rows 0..m-1 search s > 0, rows m..2m-1 search s < 0 (as -s along -v)
    a2 = np.concatenate([a, a])
    d2 = np.concatenate([d, d])
    step = np.concatenate([np.tile(v, (m, 1)), np.tile(-v, (m, 1))])
    p = norm.p

    def inside(s):
        x = a2 + s[:, None] * step
        return lp_norms(x, p) <= d2

    reach = lp_norms(a, p) + d
    lo = np.zeros(2 * m)
    hi = np.concatenate([reach, reach])
    while True:
        grow = inside(hi)
        if not grow.any():
            break
        hi = np.where(grow, 2 * hi, hi)
    for _ in range(200):
        if (hi - lo).max() <= atol:
            break
        mid = 0.5 * (lo + hi)
        ok = inside(mid)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return -lo[m:], lo[:m]


def feasible_interval(
    y: LipschitzPoint,
    S,
    X: FiniteMetricSpace,
    norm: NormSpec,
    v=None,
    tol: ToleranceConfig = DEFAULT_TOL,
    method: str = "auto",
) -> Tuple[float, float]:
    """Largest ``[t_min, t_max]`` such that shifting the nodes of ``S`` by
    ``s*v`` keeps ``y`` in the unit ball for every ``s`` in the interval.

    ``method`` is ``"closed"`` (p = 2 only), ``"bisection"`` or ``"auto"``.
    """
    lo, hi, _, _ = _interval_with_witness(y, S, X, norm, v, tol, method)
    return lo, hi


def _interval_with_witness(y, S, X, norm, v, tol, method):
    v = _as_direction(v, norm)
    require_member(y, X, norm, tol)
    S = sorted(set(int(i) for i in S))
    if not S or 0 in S:
        raise NotASlackCut("S must be a nonempty subset of 1..n")
    ii, jj = cross_pairs(S, X.n_nodes)
    a = y.values[ii] - y.values[jj]
    d = X.dist[ii, jj]
    norms = lp_norms(a, norm.p)
    tight = d - norms <= tol.tol_tight * np.maximum(1.0, d)
    if tight.any():
        k = int(np.flatnonzero(tight)[0])
        raise NotASlackCut(f"cross pair ({ii[k]}, {jj[k]}) is already tight")
    if method == "auto":
        method = "closed" if norm.p == 2.0 else "bisection"
    if method == "closed":
        if norm.p != 2.0:
            raise LipextError("closed-form line search requires p = 2")
        lower, upper = pair_interval_closed_form(a, v.v, d)
    elif method == "bisection":
        lower, upper = pair_interval_bisection(a, v.v, d, norm)
    else:
        raise LipextError(f"unknown line-search method {method!r}")
    # argmin/argmax return the first (lexicographically smallest) binding pair
    kl = int(np.argmax(lower))
    ku = int(np.argmin(upper))
    return (
        float(lower[kl]),
        float(upper[ku]),
        (int(ii[kl]), int(jj[kl])),
        (int(ii[ku]), int(jj[ku])),
    )


# ------------------------------------------------------------ extreme points

def push_to_extreme(
    y: LipschitzPoint,
    X: FiniteMetricSpace,
    norm: NormSpec,
    v=None,
    tol: ToleranceConfig = DEFAULT_TOL,
    trace: Optional[list] = None,
) -> Atom:
    """Move cut blocks along ``+v`` until the point becomes extreme.

    Each step shifts the current slack cut by the largest feasible amount,
    which makes at least one crossing pair tight, so the set of nodes cut
    off from the base point shrinks. At most ``n`` steps are needed. If
    ``trace`` is a list, the size of every cut met is appended to it.
    """
    v = _as_direction(v, norm)
    check_dims(y, X, norm)
    t = np.zeros(X.n_nodes)
    for step in range(X.n + 1):
        point = displace(y, t, v)
        cert = certify_extremality(point, X, norm, tol)
        if isinstance(cert, Extreme):
            t.setflags(write=False)
            return Atom(t, point, cert)
        if trace is not None:
            trace.append(len(cert.cut.S))
        if step == X.n:
            break
        _, hi = feasible_interval(point, cert.cut.S, X, norm, v, tol)
        t[list(cert.cut.S)] += hi
    raise IterationOverflow(f"no extreme point after {X.n} steps; tolerances are inconsistent")


# -------------------------------------------------------------- reduction

def _dependence(T: np.ndarray) -> np.ndarray:
    A = np.vstack([T[:, 1:].T, np.ones(T.shape[0])])
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    mu = Vt[-1]
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    if np.linalg.norm(A @ mu) > NULLSPACE_RTOL * scale:
        raise ReductionFailure("no affine dependence among the displacement vectors")
    # fix the sign: largest-magnitude entry positive (first one on ties)
    if mu[int(np.argmax(np.abs(mu)))] < 0:
        mu = -mu
    return mu


def caratheodory_reduce(
    ts: Sequence,
    weights: Sequence[float],
    tol_weight: float = DEFAULT_TOL.tol_weight,
) -> Tuple[List[np.ndarray], np.ndarray]:
    """Shrink a convex combination of displacement vectors to ``n + 1`` terms.

    Total weight and barycentre are preserved (up to rounding and the
    weights dropped below ``tol_weight``). Returns the surviving vectors and
    their weights, in input order.
    """
    T = np.array([np.asarray(t, dtype=float) for t in ts])
    w = np.array(weights, dtype=float)
    if T.ndim != 2 or len(w) != len(T):
        raise LipextError("ts and weights must have matching lengths")
    n = T.shape[1] - 1
    if len(w) < n + 2:
        raise LipextError(f"need at least n + 2 = {n + 2} vectors, got {len(w)}")
    if np.any(w <= 0):
        raise LipextError("weights must be positive")
    if np.any(T[:, 0] != 0.0):
        raise LipextError("every displacement vector must have t[0] = 0")
    index, w = _reduce(T, w, tol_weight)
    return [T[i] for i in index], w


def _reduce(T: np.ndarray, w: np.ndarray, tol_weight: float):
    n = T.shape[1] - 1
    index = np.arange(len(w))
    while len(w) > n + 1:
        mu = _dependence(T[index])
        pos = mu > 0
        ratios = np.full(len(w), np.inf)
        ratios[pos] = w[pos] / mu[pos]
        drop = int(np.argmin(ratios))
        w = w - ratios[drop] * mu
        w[drop] = 0.0
        keep = w > tol_weight
        index, w = index[keep], w[keep]
    return index, w


# ----------------------------------------------------------- decomposition

def decompose(
    y: LipschitzPoint,
    X: FiniteMetricSpace,
    norm: NormSpec,
    v=None,
    tol: ToleranceConfig = DEFAULT_TOL,
    on_visit: Optional[Callable[[np.ndarray], None]] = None,
) -> Decomposition:
    """Convex combination of at most ``n + 1`` extreme points equal to ``y``.

    Depth-first binary splitting: a non-extreme candidate ``y + t*v`` with
    slack cut ``S`` and feasible interval ``(a, b)`` is replaced by the two
    endpoints ``t + b*1_S`` and ``t + a*1_S`` with weights ``-a/(b-a)`` and
    ``b/(b-a)``. The positive child is expanded first. Leaves with equal
    ``t`` are merged, and the leaf list is pruned by an affine dependence
    whenever it grows past ``n + 1``. ``on_visit`` sees every ``t`` examined.
    """
    v = _as_direction(v, norm)
    require_member(y, X, norm, tol)
    n = X.n
    stack: List[Tuple[np.ndarray, float, int]] = [(np.zeros(n + 1), 1.0, 0)]
    leaves: List[Atom] = []
    leaves_w: List[float] = []

    while stack:
        t, lam, depth = stack.pop()
        if on_visit is not None:
            on_visit(t)
        point = displace(y, t, v)
        cert = certify_extremality(point, X, norm, tol)
        if isinstance(cert, Extreme):
            for idx, other in enumerate(leaves):
                if np.max(np.abs(other.t - t)) <= MERGE_TOL:
                    leaves_w[idx] += lam
                    break
            else:
                t.setflags(write=False)
                leaves.append(Atom(t, point, cert))
                leaves_w.append(lam)
            if len(leaves) > n + 1:
                T = np.stack([atom.t for atom in leaves])
                index, kept_w = _reduce(T, np.array(leaves_w), tol.tol_weight)
                leaves = [leaves[i] for i in index]
                leaves_w = list(kept_w)
            continue
        if depth >= n:
            raise IterationOverflow("split recursion deeper than n; tolerances are inconsistent")
        S = list(cert.cut.S)
        a, b = feasible_interval(point, S, X, norm, v, tol)
        pos = t.copy()
        pos[S] += b
        neg = t.copy()
        neg[S] += a
        stack.append((neg, lam * b / (b - a), depth + 1))
        stack.append((pos, lam * (-a) / (b - a), depth + 1))

    weights = np.array(leaves_w)
    weights = weights / weights.sum()
    dec = Decomposition(y, v, weights, leaves)
    if dec.k > n + 1:
        raise ReductionFailure(f"{dec.k} atoms exceed the bound n + 1 = {n + 1}")
    return dec


# ---------------------------------------------------------------- checking

@dataclass
class VerificationReport:
    checks: Dict[str, bool] = field(default_factory=dict)
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": dict(self.checks), "details": dict(self.details)}


def verify_decomposition(
    y: LipschitzPoint,
    dec: Decomposition,
    X: FiniteMetricSpace,
    norm: NormSpec,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> VerificationReport:
    """Check every claim of a decomposition from scratch; never raises on bad input."""
    report = VerificationReport()
    checks, details = report.checks, report.details
    n = X.n
    k = len(dec.atoms)
    w = np.asarray(dec.weights, dtype=float)
    details["k"] = k

    values = [np.asarray(getattr(a.point, "values", a.point), dtype=float) for a in dec.atoms]
    checks["shape"] = (
        y.n == n
        and y.dim == norm.dim
        and len(w) == k
        and k >= 1
        and all(vals.shape == y.values.shape for vals in values)
        and all(np.shape(a.t) == (n + 1,) for a in dec.atoms)
    )
    if not checks["shape"]:
        return report

    checks["count"] = k <= n + 1
    checks["weights_nonnegative"] = bool(np.all(w >= 0))
    deviation = float(abs(w.sum() - 1.0))
    details["weight_sum_deviation"] = deviation
    checks["weight_sum"] = deviation <= max(tol.tol_weight * k, 1e-15)

    recon = np.tensordot(w, np.stack(values), axes=1)
    err = float(np.max(np.abs(recon - y.values)))
    details["reconstruction_error"] = err
    checks["reconstruction"] = err <= RECONSTRUCTION_TOL

    v = np.asarray(getattr(dec.direction, "v", dec.direction), dtype=float)
    checks["direction_unit"] = v.shape == (norm.dim,) and abs(norm_eval(norm, v) - 1.0) <= 1e-12
    if not checks["direction_unit"]:
        return report
    consistent, bounded, extreme, oracle = [], [], [], []
    bound = 2.0 * X.dist[:, 0] + tol.tol_feas
    for atom, vals in zip(dec.atoms, values):
        t = np.asarray(atom.t, dtype=float)
        expected = y.values + t[:, None] * v[None, :]
        scale = max(1.0, float(np.max(np.abs(expected))))
        consistent.append(bool(t[0] == 0.0 and np.max(np.abs(vals - expected)) <= 1e-12 * scale))
        bounded.append(bool(np.all(np.abs(t) <= bound)))
        try:
            point = LipschitzPoint(vals)
            cert = certify_extremality(point, X, norm, tol)
            extreme.append(isinstance(cert, Extreme))
            if n <= ORACLE_MAX_N:
                oracle.append(cut_oracle_bruteforce(point, X, norm, tol) is None)
        except LipextError:
            extreme.append(False)
            if n <= ORACLE_MAX_N:
                oracle.append(False)
    details["atom_consistent"] = consistent
    details["atom_t_bounded"] = bounded
    details["atom_extreme"] = extreme
    checks["atom_consistency"] = all(consistent)
    checks["t_bound"] = all(bounded)
    checks["atoms_extreme"] = all(extreme)
    if n <= ORACLE_MAX_N:
        details["atom_oracle_agrees"] = oracle
        checks["oracle"] = all(oracle)
    return report
