"""
Decomposing a member into at most n + 1 extreme points
======================================================

A random member of the ball over eight nodes with values in R^4 and the
l3 norm. Carathéodory alone would allow up to n*dim + 1 = 33 terms; the
decomposition here never needs more than n + 1 = 9.
"""

import numpy as np

from lipext import (
    GenConfig,
    LipschitzPoint,
    NormSpec,
    decompose,
    gen_member,
    gen_random_metric,
    verify_decomposition,
)

cfg = GenConfig(seed=2024, n=8, dim=4, p=3.0)
X = gen_random_metric(cfg)
y = gen_member(cfg, X)

visited = []
dec = decompose(y, X, cfg.norm, on_visit=visited.append)
print(f"k = {dec.k} atoms (bound n + 1 = {X.n + 1}), {len(visited)} candidates examined")
for w, atom in zip(dec.weights, dec.atoms):
    print(f"  weight {w:.4f}   t = {np.round(atom.t, 3)}")
print("reconstruction error:", dec.reconstruction_error())

report = verify_decomposition(y, dec, X, cfg.norm)
print("independent verification:", report.passed, report.checks)

# %%
# The atom count does not grow with the target dimension. Embed one
# scalar pattern in R^d for several d and decompose each copy.
small = GenConfig(seed=7, n=4, dim=1)
space = gen_random_metric(small)
base = gen_member(small, space).values[:, 0]
for d in (1, 2, 8, 32):
    values = np.zeros((5, d))
    values[:, 0] = base
    print(f"dim {d:2d}: k = {decompose(LipschitzPoint(values), space, NormSpec(d, 2)).k}")
