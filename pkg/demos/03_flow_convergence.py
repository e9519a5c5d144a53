"""Prescribing a constant curvature: the flow relaxes to a round solution.

Run:  python demos/03_flow_convergence.py
"""
import numpy as np

import crflow
from crflow.flow import FlowConfig, run
from crflow.presets import f_constant, u0_from_spec

basis = crflow.build_basis(1, 8)
f = f_constant(basis)
u0 = u0_from_spec(basis, {"type": "random", "amplitude": 0.08}, seed=3)

res = run(u0, f, FlowConfig(dt_init=0.1, t_max=40.0, record_every=20,
                            compute_shadow=True))
print("termination:", res.status.value, "-", res.message)
print(f"{'t':>8} {'E_f':>14} {'F2':>12} {'max u':>8} {'eps':>8}")
for rec in res.records:
    eps = f"{rec.eps:.4f}" if rec.eps is not None else "-"
    print(f"{rec.t:8.2f} {rec.diagnostics.E_f:14.9f} "
          f"{rec.diagnostics.F2:12.3e} {rec.diagnostics.max_u:8.4f} {eps:>8}")
d = res.final_state.diagnostics
print("\nKazdan-Warner residual at the solution:", d.kw_residual)
print("the energy never increased:",
      all(a.diagnostics.E_f >= b.diagnostics.E_f - 1e-10
          for a, b in zip(res.records, res.records[1:])))
