"""Iterated heat potentials, transparent boundary conditions, and Green-function solvers."""

from .geometry import Disk, Interval, Rectangle
from .greens import (
    GreenEvalParams,
    green_normal_derivative,
    interval_green,
    poisson_boundary_term,
    rectangle_green,
    solve_m1,
)
from .kernel import KernelOrder, adjoint_power, iterated_kernel, kernel_gradient, kernel_normal_derivative
from .oracle import cascade_volume_potential, crank_nicolson_m1, fd_heat_operator_residual
from .potentials import (
    double_layer,
    potential_trace,
    potential_trace_normal_derivative,
    single_layer,
    volume_potential,
)
from .quadrature import make_boundary_rule, make_graded_time_rule, make_time_rule, make_volume_rule
from .scenario import Scenario, bundled_scenarios, load_scenario, parse_scenario
from .sources import BoundaryData, SourceField, gaussian_bump_source, ramp_boundary, zero_boundary, zero_source
from .transparent_bc import (
    CauchyTraces,
    ResidualReport,
    bc_residual,
    bc_residual_inhomogeneous,
    extract_traces,
    interior_identity_residual,
    verify_theorem1,
)
from .util import ConfigError, NumericalError

__version__ = "0.1.0"
