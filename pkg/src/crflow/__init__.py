"""crflow: a numerical laboratory for the prescribed Webster scalar curvature
flow on the CR sphere S^{2n+1}.

Layers:
  geometry        Cayley chart, Heisenberg group, conformal automorphisms
  spectral        bigraded-harmonic basis, quadrature, sub-Laplacian
  conformal       pullback factors and bubble fields
  flow            curvature operator, energies, RK4 flow with diagnostics
  normalization   center-of-mass automorphisms and the shadow of a state
  constants       the six bubble-expansion constants by chart quadrature
  morse           exact hypothesis gate (counts, k-system, degree, ratio test)
  cli             `crflow run | constants | morse | bubble | selftest`
"""

from .conformal import bubble, pullback_factor
from .constants import ConstantEstimate, all_constants, constant, monte_carlo_constant
from .errors import (BudgetExceeded, ConfigError, CRFlowError,
                     DegenerateDenominator, IndexOutOfRange, NoConvergence,
                     NonConvergentQuadrature, NonPositiveFactor,
                     NonPositiveMin, NonPositiveScale, PoleSingularity,
                     PositivityLoss, StepRejected, TruncationLoss)
from .flow import (DiagnosticsRecord, FlowConfig, FlowState, RunResult,
                   Termination, alpha, base_curvature, beta_threshold,
                   center_of_mass, diagnostics, energy, energy_f, flow_rhs,
                   mass_concentration, run, step, volume_renormalize,
                   webster_curvature)
from .geometry import (CRAutomorphism, HeisenbergPoint, SpherePoint, apply,
                       cayley_forward, cayley_inverse, delta_qr, dilate,
                       jacobian_factor, translate, unitary_from_north,
                       volume_density)
from .hquad import heisenberg_integral, sphere_volume
from .morse import (CriticalPoint, GateReport, MorseData, counts, degree_sum,
                    sbc_check, solve_k, theorem_gate)
from .normalization import (CenteringResult, find_centering,
                            ideal_bubble_shadow, shadow, shadow_deficit_ratio)
from .spectral import (Basis, Field, analyze, build_basis, horizontal_grad_sq,
                       inner, integrate, sub_laplacian, synthesize)

__version__ = "0.1.0"
