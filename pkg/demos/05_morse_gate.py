"""Critical-point extraction and the existence-hypothesis gate.

Run:  python demos/05_morse_gate.py
"""
import numpy as np

import crflow
from crflow.critical_points import find_critical_points
from crflow.morse import theorem_gate
from crflow.presets import f_dipole, f_two_peak

basis = crflow.build_basis(1, 8)

for label, f in (("dipole", f_dipole(basis, amplitude=0.25)),
                 ("two-peak", f_two_peak(basis))):
    data, warnings = find_critical_points(f)
    print(f"== {label}: {len(data.critical_points)} critical points ==")
    for p in sorted(data.critical_points, key=lambda p: -p.f_value):
        print(f"  index {p.index}  sub-Laplacian sign {p.laplacian_sign:+d}  "
              f"f = {p.f_value:.4f}")
    for w in warnings:
        print("  warning:", w)
    for line in theorem_gate(data).lines():
        print(" ", line)
    print()

print("a hand-written count vector can be fed to the gate directly:")
from crflow.morse import degree_sum_from_counts, solve_k
for m in ([1, 0, 0, 0], [2, 0, 0, 0], [2, 1, 0, 0]):
    print(f"  m={m}: k={solve_k(m, 1)}  degree sum={degree_sum_from_counts(m, 1)}")
