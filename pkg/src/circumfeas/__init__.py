"""Circumcentered-reflection solvers for two-set convex feasibility problems."""
from .crm import (
    Case,
    CrmStep,
    IterationTrace,
    Termination,
    crm_operator,
    in_kernel_ct,
    run_crm,
    run_crm_product_space,
    run_dr,
    run_map,
)
from .errors import *  # noqa: F401,F403
from .geometry import DEFAULT_TOL, Tolerance, circumcenter, solve_gram
from .scenarios import Scenario, load_scenario, make_wedge_direct_sum
from .sets import (
    ConeV,
    HalfSpace,
    LinearSubspace,
    Polyhedron,
    Ray,
    distance,
    in_polar_cone,
    local_cone_radius,
    membership,
    project,
    reflect,
)
from .sphere import (
    build_spherical_polytope,
    geodesic_distance,
    in_zone,
    run_srm,
    sphere_center,
    spherical_project,
    spherical_reflect,
    srm_operator,
    zone_radius,
)

__version__ = "0.1.0"
