"""
Moving a block of nodes along a direction
=========================================

Shifting the nodes of a slack cut S by s*v keeps the point inside the
ball for s in an interval. For the Euclidean norm the ends are roots of a
quadratic; for other lp norms they are found by bisection.
"""

import numpy as np

from lipext import Direction, GenConfig, NormSpec, certify_extremality, feasible_interval
from lipext import gen_euclidean_space, gen_member, push_to_extreme
from lipext.representer import pair_interval_bisection, pair_interval_closed_form

# %%
# One pair: a = y_i - y_j = (0.5, 0), distance 1, direction e1.
a, v, d = np.array([[0.5, 0.0]]), np.array([1.0, 0.0]), np.array([1.0])
print("closed form:", pair_interval_closed_form(a, v, d))
print("bisection  :", pair_interval_bisection(a, v, d, NormSpec(2, 2)))
print("bisection l3:", pair_interval_bisection(a, v, d, NormSpec(2, 3)))

# %%
# On a random instance, the interval of the maximal slack cut.
cfg = GenConfig(seed=5, n=5, dim=2, p=2.0)
X = gen_euclidean_space(cfg)
y = gen_member(cfg, X)
cert = certify_extremality(y, X, cfg.norm)
print(cert)
if not cert.is_extreme:
    print("feasible shifts:", feasible_interval(y, cert.cut.S, X, cfg.norm))

# %%
# Repeating the largest forward shift reaches an extreme point in at most
# n steps; the trace lists the cut sizes met on the way.
trace = []
atom = push_to_extreme(y, X, cfg.norm, Direction.basis(cfg.norm), trace=trace)
print("cut sizes:", trace, "final t:", np.round(atom.t, 4))
print(atom.certificate)
