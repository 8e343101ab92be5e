"""Maximal operators on a grid.

Builds the four centered maximal functions of an indicator, checks the
fast kernels against the per-cell loops, and watches the (q - 1)-scaled
L^q ratio of the Hardy-Littlewood operator as q approaches 1.
"""

import math

import numpy as np

from maxharm import (
    Grid,
    MaximalConfig,
    Mode,
    ScalarField,
    Topology,
    lq_norm,
    max_hl,
    max_interp,
    max_sharp,
    max_spherical,
)
from maxharm.lab.corpus import gen_corpus

# 1D: the indicator of [-1, 1] on a circle of length 8; Mf(x) = 1/(1+|x|) for |x| >= 1
n = 512
g1 = Grid((8 * n,), 1.0 / n, Topology.TORUS)
(x,) = g1.mesh()
f1 = ScalarField(g1, ((x <= 1) | (x >= 7)).astype(float))
M1 = max_hl(f1).values
for pt in (1.5, 2.0, 3.0):
    print(f"Mf({pt}) = {M1[int(pt * n)]:.5f}   closed form {1 / (1 + pt):.5f}")

# 2D: one square, all four operators
g = Grid.unit_torus(64)
X, Y = g.mesh()
f = ScalarField(g, ((abs(X - 0.5) < 0.1) & (abs(Y - 0.5) < 0.1)).astype(float))
cfg = MaximalConfig.for_domain(f.domain)
print("ladder radii (cells):", cfg.stencils.radii_cells)
for op in (max_hl, max_sharp, max_spherical):
    print(f"{op.__name__:>14s}: max {op(f, cfg).values.max():.4f}   L^2 norm {lq_norm(op(f, cfg), 2):.4f}")
for s in (1.0, 2.0, 4.0, math.inf):
    print(f"  max_interp s={s:<4}: L^2 norm {lq_norm(max_interp(f, cfg.with_s(s)), 2):.4f}")

# the oracle mode adds the same numbers in the same order
small = ScalarField(Grid.unit_torus(16), np.random.default_rng(0).standard_normal((16, 16)))
c16 = MaximalConfig.for_domain(small.domain)
same = np.array_equal(max_hl(small, c16).values, max_hl(small, c16.with_mode(Mode.BRUTE)).values)
print("fast == brute force on a random 16^2 field:", same)

# (q - 1) ||Mf||_q / ||f||_q stays in a bounded window as q -> 1
print("\n   q     (q-1)||Mf||_q/||f||_q")
T = Grid.unit_torus(128)
ind = gen_corpus("indicator", T, 2024, 1, max_side=0.1)[0]
Mind = max_hl(ind)
for q in (1.0625, 1.125, 1.25, 1.5, 2, 4):
    print(f"{q:7.4f}   {(q - 1) * lq_norm(Mind, q) / lq_norm(ind, q):.4f}")
