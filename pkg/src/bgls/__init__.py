"""Poincare-type inequalities in bilateral grand Lebesgue spaces, numerically.

Radial extremal functions on the unit ball and its exterior, weighted L_p
norms by radial quadrature, an incomplete-Gamma oracle for the singular cores,
and the sup/inf machinery of the grand spaces.
"""
__version__ = "0.1.0"

from .errors import BglsError, DivergenceError, InvariantError, ValidationError
from .gamma_oracle import core_integral, func_core_norm, grad_core_norm, log_gamma, upper_incomplete_gamma
from .poincare import (
    ScanCase,
    ScanResult,
    Theorem1Report,
    critical_exponent,
    poincare_ratio,
    sharpness_scan,
    theorem1_verify,
)
from .psi import (
    GridSpec,
    PsiFunction,
    bgls_norm,
    constant_psi,
    make_power_psi,
    make_tail_psi,
    solve_h,
    transform_alpha_d,
)
from .quadrature import QuadratureConfig, lp_norm_on_subset, lp_norm_weighted, sphere_surface
from .radial import (
    DomainSpec,
    PoincareParams,
    RadialProfile,
    center,
    delta_of_r,
    hermite_bridge,
    make_u_delta,
    make_v_delta,
)
from .weighted import (
    WeightSpec,
    log_weight_exponent,
    log_weight_ratio,
    nu_transform,
    pq_exponent,
    weighted_average_and_norm,
)
