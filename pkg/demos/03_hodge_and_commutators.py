"""Fourier multipliers on the torus.

Splits a random vector field into gradient and divergence-free parts, then
measures the three commutators of the second-order Riesz transform.
"""

import numpy as np

from maxharm import Grid, ScalarField, VectorField, commutator_crw, commutator_power, commutator_rw, hodge_decompose
from maxharm.lab.corpus import gen_corpus
from maxharm.spectral import power_field, rw_field

T = Grid.unit_torus(64)
F = VectorField(T, np.random.default_rng(1).standard_normal((64, 64, 2)))
grad, h, phi = hodge_decompose(F)
f2 = np.sum(F.values**2)
print(f"<grad phi, h> / ||F||^2       = {np.sum(grad.values * h.values) / f2:.2e}")
print(f"||grad phi||^2 + ||h||^2 - ||F||^2 = {(np.sum(grad.values**2) + np.sum(h.values**2) - f2) / f2:.2e}")

x, y = T.mesh()
d = np.hypot(np.minimum(x, 1 - x), np.minimum(y, 1 - y))
lam = ScalarField(T, np.log(np.maximum(d, T.h)))
print("\n inst   CRW ratio   RW ratio")
for i, f in enumerate(gen_corpus("trig", T, 11, 4)):
    print(f"{i:5d}   {commutator_crw(lam, f).ratio:9.4f}   {commutator_rw(f).ratio:8.4f}")

f = gen_corpus("trig", T, 11, 1)[0]
print("\n  eps    power ratio")
for eps in (0.2, 0.1, 0.05, 0.025):
    print(f"{eps:6.3f}  {commutator_power(f, eps=eps).ratio:.4f}")

g = ScalarField(T, 2 + np.cos(2 * np.pi * x) * np.sin(2 * np.pi * y))
eps = 0.01
rel = np.linalg.norm(power_field(g, eps) / eps - rw_field(g)) / np.linalg.norm(rw_field(g))
print(f"\npower commutator / eps vs RW commutator at eps = {eps}: relative gap {rel:.2%}")
