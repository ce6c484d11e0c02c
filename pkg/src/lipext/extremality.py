"""Extreme-point certificates for the Lipschitz unit ball.

A member ``y`` is extreme exactly when every node is joined to the base
point by a chain of *tight* pairs (``||y_i - y_j|| = d(i, j)``). If the
chain property fails, the nodes that cannot reach the base point form a
slack cut ``S``: every pair crossing the cut has strictly positive slack,
and moving all of ``S`` by ``+eps*v`` or ``-eps*v`` stays inside the ball.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple, Union

import numpy as np

from .metric import (
    DEFAULT_TOL,
    FiniteMetricSpace,
    LipextError,
    LipschitzPoint,
    NormSpec,
    ToleranceConfig,
    check_dims,
    cross_pairs,
    lp_norms,
    membership_violations,
    norm_eval,
    pairwise_norms,
)

MAX_ORACLE_N = 20


class NotAMember(LipextError):
    def __init__(self, message: str, pair: Tuple[int, int]):
        super().__init__(message)
        self.pair = pair


class InvalidCut(LipextError):
    pass


class EmptyCut(InvalidCut):
    pass


class BasepointInCut(InvalidCut):
    pass


class TooLarge(LipextError):
    pass


@dataclass(frozen=True)
class TightGraph:
    n_nodes: int
    edges: FrozenSet[Tuple[int, int]]

    def neighbors(self, i: int):
        out = [b if a == i else a for a, b in self.edges if i in (a, b)]
        return sorted(out)


@dataclass(frozen=True)
class SlackCut:
    S: Tuple[int, ...]
    epsilon: float

    def __post_init__(self):
        S = tuple(sorted(int(i) for i in self.S))
        if not S:
            raise EmptyCut("a slack cut must be nonempty")
        if 0 in S:
            raise BasepointInCut("the base point cannot belong to a slack cut")
        object.__setattr__(self, "S", S)


@dataclass(frozen=True)
class Extreme:
    """Certificate of extremality: a BFS tree of tight pairs rooted at node 0."""

    parent: Dict[int, int] = field(default_factory=dict)

    is_extreme = True

    def path_to_base(self, i: int):
        path = [i]
        while path[-1] != 0:
            path.append(self.parent[path[-1]])
            if len(path) > len(self.parent) + 1:
                raise LipextError("parent map contains a cycle")
        return path


@dataclass(frozen=True)
class NotExtreme:
    cut: SlackCut

    is_extreme = False


ExtremalityCertificate = Union[Extreme, NotExtreme]


def _is_tight(norms: np.ndarray, dist: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    # One-sided: a member never exceeds d by more than tol_feas, and a pair
    # counts as tight once its slack is within tol_tight * max(1, d).
    return dist - norms <= tol.tol_tight * np.maximum(1.0, dist)


def require_member(y, X, norm, tol: ToleranceConfig = DEFAULT_TOL) -> None:
    check_dims(y, X, norm)
    bad = membership_violations(y, X, norm, 1.0, tol)
    if bad.any():
        excess = np.where(bad, pairwise_norms(y, norm) - X.dist, -np.inf)
        i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
        i, j = sorted((int(i), int(j)))
        raise NotAMember(
            f"point is outside the unit ball: ||y_{i} - y_{j}|| exceeds dist[{i}][{j}]",
            (i, j),
        )


def build_tight_graph(
    y: LipschitzPoint,
    X: FiniteMetricSpace,
    norm: NormSpec,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TightGraph:
    require_member(y, X, norm, tol)
    tight = _is_tight(pairwise_norms(y, norm), X.dist, tol)
    ii, jj = np.nonzero(np.triu(tight, k=1))
    return TightGraph(X.n_nodes, frozenset(zip(ii.tolist(), jj.tolist())))


def min_cut_slack(y: LipschitzPoint, S, X: FiniteMetricSpace, norm: NormSpec) -> float:
    """Smallest ``d(i, j) - ||y_i - y_j||`` over pairs crossing the cut."""
    return _cut_slack_with_pair(y, S, X, norm)[0]


def _cut_slack_with_pair(y, S, X, norm) -> Tuple[float, Tuple[int, int]]:
    S = sorted(set(int(i) for i in S))
    if not S:
        raise EmptyCut("S must be nonempty")
    if 0 in S:
        raise BasepointInCut("S must not contain the base point")
    if S[0] < 0 or S[-1] > X.n:
        raise InvalidCut(f"S contains indices outside 1..{X.n}")
    check_dims(y, X, norm)
    ii, jj = cross_pairs(S, X.n_nodes)
    diff = y.values[ii] - y.values[jj]
    slack = X.dist[ii, jj] - lp_norms(diff, norm.p)
    # nonzero() yields row-major order, so argmin picks the smallest (i, j) on ties
    k = int(np.argmin(slack))
    return float(slack[k]), (int(ii[k]), int(jj[k]))


def certify_extremality(
    y: LipschitzPoint,
    X: FiniteMetricSpace,
    norm: NormSpec,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ExtremalityCertificate:
    """BFS over tight pairs from node 0, neighbours in ascending order.

    Returns :class:`Extreme` with the BFS parent map if every node is
    reached, otherwise :class:`NotExtreme` whose cut is the full set of
    unreached nodes.
    """
    require_member(y, X, norm, tol)
    tight = _is_tight(pairwise_norms(y, norm), X.dist, tol)
    np.fill_diagonal(tight, False)
    parent: Dict[int, int] = {}
    seen = np.zeros(X.n_nodes, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(tight[i]):
            if not seen[j]:
                seen[j] = True
                parent[int(j)] = i
                queue.append(int(j))
    if seen.all():
        return Extreme(dict(sorted(parent.items())))
    S = tuple(np.flatnonzero(~seen).tolist())
    return NotExtreme(SlackCut(S, min_cut_slack(y, S, X, norm)))


def cut_oracle_bruteforce(
    y: LipschitzPoint,
    X: FiniteMetricSpace,
    norm: NormSpec,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> Optional[SlackCut]:
    """Exhaustive search for a slack cut, subsets in ascending bitmask order.

    Bit ``b`` of the mask selects node ``b + 1``. A subset qualifies when no
    crossing pair passes the tightness test used by the tight graph.
    Exponential in ``n``; refuses ``n > 20``.
    """
    n = X.n
    if n > MAX_ORACLE_N:
        raise TooLarge(f"brute-force oracle is limited to n <= {MAX_ORACLE_N}, got n = {n}")
    require_member(y, X, norm, tol)
    m = n + 1
    norms = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            norms[i, j] = norm_eval(norm, y.values[i] - y.values[j])
    slack = X.dist - norms
    strict = slack > tol.tol_tight * np.maximum(1.0, X.dist)
    for mask in range(1, 1 << n):
        inside = [False] + [bool(mask >> b & 1) for b in range(n)]
        S = [i for i in range(m) if inside[i]]
        out = [j for j in range(m) if not inside[j]]
        if all(strict[i, j] for i in S for j in out):
            eps = min(slack[i, j] for i in S for j in out)
            return SlackCut(tuple(S), float(eps))
    return None


def split_nonextreme(
    y: LipschitzPoint,
    cut: SlackCut,
    X: FiniteMetricSpace,
    norm: NormSpec,
    v=None,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> Tuple[LipschitzPoint, LipschitzPoint]:
    """Write a non-extreme member as the midpoint of two distinct members.

    The nodes of ``cut.S`` are shifted by ``+eps*v`` and ``-eps*v``
    respectively, ``eps = cut.epsilon``. ``v`` defaults to the first
    standard basis vector and must have unit norm.
    """
    require_member(y, X, norm, tol)
    if v is None:
        v = np.zeros(norm.dim)
        v[0] = 1.0
    v = np.asarray(v, dtype=float)
    if abs(norm_eval(norm, v) - 1.0) > 1e-12:
        raise LipextError("direction v must have unit norm")
    slack = min_cut_slack(y, cut.S, X, norm)
    if slack <= tol.tol_tight:
        raise InvalidCut(f"S = {list(cut.S)} is not a slack cut (min slack {slack!r})")
    if cut.epsilon > slack or cut.epsilon <= 0:
        raise InvalidCut(f"epsilon {cut.epsilon!r} must lie in (0, {slack!r}]")
    shift = np.zeros_like(y.values)
    shift[list(cut.S)] = cut.epsilon * v
    return LipschitzPoint(y.values + shift), LipschitzPoint(y.values - shift)
