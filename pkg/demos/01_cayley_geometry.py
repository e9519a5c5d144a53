"""Tour of the chart geometry: Cayley transform, group laws, Jacobians.

Run:  python demos/01_cayley_geometry.py
"""
import numpy as np

import crflow
from crflow.geometry import (CRAutomorphism, HeisenbergPoint,
                             cayley_forward_xy, cayley_inverse_xy,
                             unitary_from_north)

rng = np.random.default_rng(0)

print("== Cayley transform round trips ==")
z = rng.normal(size=(5, 1)) + 1j * rng.normal(size=(5, 1))
tau = rng.normal(size=5)
x = cayley_inverse_xy(z, tau)
z2, tau2 = cayley_forward_xy(x)
print("max |z - z''| =", np.abs(z2 - z).max())
print("points stay on the sphere:", np.abs(np.sum(np.abs(x) ** 2, 1) - 1).max())

print("\n== Heisenberg translation is twisted ==")
h = HeisenbergPoint(np.array([1.0 + 0j]), 0.0)
q = HeisenbergPoint(np.array([1j]), 0.0)
print("T_(i,0) (1,0) =", crflow.translate(h, q), " (tau picks up 2 Im(i))")

print("\n== automorphisms preserve the total measure ==")
basis = crflow.build_basis(1, 8)
phi = CRAutomorphism(unitary_from_north(np.array([0.6, 0.8j])),
                     HeisenbergPoint(np.array([0.2 + 0.1j]), 0.1), 1.4)
jac = phi.jacobian_xy(basis.nodes)
print("int |det dphi| dV =", basis.weights @ jac, " vs vol =", basis.vol)
print("jacobian positive:", jac.min() > 0)

print("\n== composition is multiplicative in the Jacobian ==")
phi2 = CRAutomorphism(phi.U, HeisenbergPoint(np.array([0.0 - 0.3j]), -0.2), 0.7)
comp = phi2.compose(phi)
x = basis.nodes[:100]
gap = np.abs(comp.jacobian_xy(x) - phi2.jacobian_xy(phi.apply_xy(x))
             * phi.jacobian_xy(x)).max()
print("chain-rule gap:", gap)
