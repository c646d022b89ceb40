"""dgflow: nodal DG solver for entropy-dissipating equations

    d rho/dt = div( f(rho) grad( H'(rho) + V(x) + W*rho ) )

on periodic 1D intervals and 2D Cartesian boxes, with Gauss-Lobatto
collocation, a positivity-preserving scaling limiter, SSP-RK stepping, and
FFT-accelerated nonlocal convolution.
"""

from .convolution import (ConvolutionPlan, KernelMoments, ToleranceError,
                          UnsupportedMeshError, convolve_direct, convolve_fft,
                          convolve_quadrature, kernel_moments, kernel_moments_2d,
                          make_plan)
from .diagnostics import (DiagnosticsRecord, InsufficientDataError, decay_rate_fit,
                          discrete_dissipation, discrete_entropy, error_norms,
                          quad_inner, quad_integral, total_mass)
from .field import NodalField, evaluate, interpolate, node_coordinates
from .limiter import (LimiterReport, WeakPositivityViolated, apply_positivity_limiter,
                      cell_averages, max_stable_dt)
from .mesh import (Mesh1D, Mesh2D, physical_nodes, uniform_mesh_1d, uniform_mesh_2d)
from .model import (EntropyParts, InteractionKernel, Linear, MirrorF, ModelSpec,
                    ValidationReport, validate_model)
from .quadrature import (ConfigurationError, OperatorSet, QuadRule,
                         gauss_lobatto_rule, lagrange_operators)
from .spatial import (InterfaceState, SpatialAux, compute_rhs, compute_velocity,
                      compute_xi, interface_flux_fu)
from .timestep import (RunResult, Schedule, SolverAbort, SolverState, StepControls,
                       advance, euler_stage, rk_order_for_degree, run,
                       ssp_stage_combine)

__version__ = "0.1.0"

from .config import ScenarioConfig, config_for, config_from_file, parse_config_text, resolve_config
from .runner import (ConvergenceRow, RunArtifacts, SteadyReport, build_instance,
                     convergence_study, format_table, read_state, run_scenario,
                     simulate, steady_state_check, write_study)
from .scenarios import REGISTRY, Scenario, ScenarioInstance, get_scenario, scenario_defaults
