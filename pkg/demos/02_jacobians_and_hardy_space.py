"""Jacobians of smooth maps and their Hardy-space size.

Generates orientation-preserving maps, then evaluates the isoperimetric
ratio, the H^1 bound and the L log L chain for each.
"""

import numpy as np

from maxharm import (
    Grid,
    MappingField,
    check_dual_log,
    check_hardy_bound,
    check_isoperimetric,
    check_llogl,
    cofactor,
    differential,
    h1_norm,
    jacobian_det,
)
from maxharm.lab.corpus import gen_corpus

box = Grid.unit_box(64)
center = (32, 32)

A = np.array([[2.0, 0.0], [0.0, 0.5]])
lin = MappingField.linear_map(box, A)
print("Df of x -> Ax at a cell:\n", differential(lin).values[10, 10])
print("its cofactor:\n", cofactor(differential(lin)).values[10, 10])
iso = check_isoperimetric(lin, center, 0.2)
print(f"isoperimetric: lhs {iso.lhs:.4f}, rhs {iso.rhs:.4f}, ratio {iso.ratio:.4f}")

print("\n inst   min J   ||J||_H1   hardy ratio   llogl ratios      dual-log ratios")
for i, f in enumerate(gen_corpus("diffeo", box, 7, 5)):
    J = jacobian_det(f)
    hardy = check_hardy_bound(f)
    ll = check_llogl(f, center, 0.15)
    dl = check_dual_log(f, center, 0.15)
    print(f"{i:5d}  {J.values.min():6.3f}   {h1_norm(J):8.4f}   {hardy.ratio:10.4f}   "
          f"{ll.ratios[0]:.3f} {ll.ratios[1]:.3f}      {dl.ratios[0]:.3f} {dl.ratios[1]:.3f}")

# an orientation-reversing map is refused
try:
    check_llogl(MappingField.linear_map(box, np.diag([1.0, -1.0])), center, 0.15)
except Exception as exc:
    print(f"\nreflection: {type(exc).__name__}: {exc}")
