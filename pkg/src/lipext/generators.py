"""Seeded random instances.

All randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence(seed, spawn_key=(stream,))``, with a fixed stream number per
generator below. Keep these constants stable: fixtures depend on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import (
    FiniteMetricSpace,
    LipextError,
    LipschitzPoint,
    NormSpec,
    metric_closure,
    rescale_into_ball,
)
from .representer import Atom, Direction, push_to_extreme

STREAM_EUCLIDEAN = 1
STREAM_RANDOM_METRIC = 2
STREAM_MEMBER = 3
STREAM_DIRECTION = 4

# probability that gen_member skips the shrink step and stays on the boundary
BOUNDARY_PROB = 0.25


@dataclass(frozen=True)
class GenConfig:
    seed: int
    n: int
    dim: int = 2
    p: float = 2.0
    embed_dim: int = 2
    scale: float = 1.0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise LipextError("seed must be an unsigned 64-bit integer")
        for name in ("n", "dim", "embed_dim"):
            if int(getattr(self, name)) < 1:
                raise LipextError(f"{name} must be a positive integer")
        if not self.scale > 0:
            raise LipextError("scale must be positive")
        NormSpec(self.dim, self.p)  # rejects p outside (1, inf)

    @property
    def norm(self) -> NormSpec:
        return NormSpec(self.dim, self.p)


def rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(stream,))))


def gen_euclidean_space(cfg: GenConfig) -> FiniteMetricSpace:
    rng = rng_for(cfg.seed, STREAM_EUCLIDEAN)
    pts = rng.uniform(0.0, cfg.scale, size=(cfg.n + 1, cfg.embed_dim))
    while True:
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        np.fill_diagonal(dist, 1.0)
        clash = np.argwhere(dist == 0.0)
        if clash.size == 0:
            break
        i = int(clash[0].max())
        pts[i] = rng.uniform(0.0, cfg.scale, size=cfg.embed_dim)
    np.fill_diagonal(dist, 0.0)
    dist = 0.5 * (dist + dist.T)
    # repairs last-bit triangle violations from rounding; a no-op otherwise
    return metric_closure(dist)


def gen_random_metric(cfg: GenConfig) -> FiniteMetricSpace:
    rng = rng_for(cfg.seed, STREAM_RANDOM_METRIC)
    m = cfg.n + 1
    raw = np.zeros((m, m))
    iu = np.triu_indices(m, k=1)
    # uniform on (0, scale]
    raw[iu] = cfg.scale * (1.0 - rng.random(len(iu[0])))
    raw = raw + raw.T
    return metric_closure(raw)


def gen_member(cfg: GenConfig, X: FiniteMetricSpace) -> LipschitzPoint:
    """Random element of the unit ball.

    Raw coordinates are uniform in ``[-scale, scale]``; the point is scaled
    into the ball and then, with probability ``1 - BOUNDARY_PROB``, shrunk by a
    uniform factor in ``[0, 1]``.
    """
    if X.n != cfg.n:
        raise LipextError(f"config has n = {cfg.n}, space has n = {X.n}")
    rng = rng_for(cfg.seed, STREAM_MEMBER)
    values = rng.uniform(-cfg.scale, cfg.scale, size=(cfg.n + 1, cfg.dim))
    values[0] = 0.0
    y = rescale_into_ball(LipschitzPoint(values), X, cfg.norm)
    keep_boundary = rng.random() < BOUNDARY_PROB
    shrink = rng.random()
    if keep_boundary:
        return y
    return LipschitzPoint(y.values * shrink)


def random_direction(cfg: GenConfig) -> Direction:
    rng = rng_for(cfg.seed, STREAM_DIRECTION)
    while True:
        g = rng.standard_normal(cfg.dim)
        if np.any(g != 0.0):
            return Direction.normalized(g, cfg.norm)


def gen_extreme(cfg: GenConfig, X: FiniteMetricSpace) -> Atom:
    y = gen_member(cfg, X)
    return push_to_extreme(y, X, cfg.norm, random_direction(cfg))
