"""
Extreme points of the Lipschitz unit ball
=========================================

Three nodes at mutual distance 1, values in the Euclidean plane. A point
of the ball is extreme when every node is tied to the base node 0 by a
chain of pairs whose distance bound is attained.
"""

import numpy as np

from lipext import (
    NormSpec,
    LipschitzPoint,
    build_tight_graph,
    certify_extremality,
    cut_oracle_bruteforce,
    split_nonextreme,
    validate_metric,
)

X = validate_metric([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
norm = NormSpec(dim=2, p=2)

# %%
# Node 1 sits on the unit circle, node 2 at the origin. Both pairs (0, 1)
# and (1, 2) are tight, so node 2 reaches node 0 through node 1.
y = LipschitzPoint([[0, 0], [1, 0], [0, 0]])
print(build_tight_graph(y, X, norm))
print(certify_extremality(y, X, norm))
print("exhaustive search finds a slack cut:", cut_oracle_bruteforce(y, X, norm))

# %%
# Move node 2 halfway towards node 1. Now nothing ties it down: the cut
# {2} has slack 0.5 on both of its crossing pairs.
y = LipschitzPoint([[0, 0], [1, 0], [0.5, 0]])
cert = certify_extremality(y, X, norm)
print(cert)

# %%
# The slack lets node 2 move by +-0.5 in any unit direction, which writes
# y as the midpoint of two other members of the ball.
y1, y2 = split_nonextreme(y, cert.cut, X, norm, v=[0, 1])
print(y1.values[2], y2.values[2])
print("midpoint recovers y:", np.allclose((y1.values + y2.values) / 2, y.values))
