"""Coulomb gas on a sphere with two macroscopic external charges.

Equilibrium droplets (conformal-map description in the pre-critical phase),
closed-form electrostatic energies with brute-force quadrature oracles, the
Jacobi-ensemble duality (Wachter density, constrained log-gas, rate
function, soft-edge scaling, Painleve II gap) and a Metropolis sampler for
direct verification.
"""

from .geometry import (
    ChargeConfig,
    Phase,
    PhaseTag,
    SphericalPoint,
    cap_overlap,
    classify_phase,
    critical_w,
    project_to_plane,
    project_to_sphere,
    w_to_ws,
    ws_to_w,
)
from .conformal import (
    BoundaryCurve,
    ConformalMap,
    PlanarMap,
    SymmetricEllipse,
    build_map,
    droplet_boundary,
    ellipse_build,
    planar_map,
    quartic_root_census,
    rotate_to_southpole,
    scaling_limit_check,
    solve_alpha,
)
from .energy import EnergyBreakdown, energy_constant, k_post, k_pre
from .jue import (
    ConstrainedJUE,
    SoftEdgeScale,
    WachterSpec,
    constrained_density,
    energy_identity_check,
    jue_gap_quadrature,
    rate_function_S,
    s_difference,
    soft_edge_scale,
    wachter,
)
from .painleve import airy_fredholm_gap, hastings_mcleod, painleve_gap
from .sampler import BACKEND, GasState, MetropolisSampler, metropolis_sample
from .duality import DualityReport, duality_check_smallN, gap_rewrite_check

__version__ = "0.1.0"
