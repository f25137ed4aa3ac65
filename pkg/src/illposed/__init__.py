"""Spectral toolkit for non-continuous-dependence experiments.

Littlewood-Paley style dyadic decomposition and Besov norms, explicit
lacunary initial data in one and two dimensions, exact and pseudo-spectral
transport/ideal-flow solvers, and the gap experiments demonstrating a
solution-map discontinuity under vanishing data perturbations.
"""

from .config import ScenarioConfig, load_scenario
from .data1d import (DataSpec1D, TimeSequence, build_perturbation_1d,
                     build_u0_1d, gamma_factor, time_sequence)
from .data2d import (DataSpec2D, build_appendix_u0, build_perturbation_2d,
                     build_u0_2d)
from .errors import (CFLViolation, ConfigError, DegenerateFit, IllposedError,
                     NewtonDivergence, NonDivergenceFree, ShockTooClose,
                     UnresolvedShell)
from .euler_types import LerayProjector, VectorField, leray_project
from .euler2d import (EulerState, ap4_pair, euler_cascade, kinetic_energy,
                      solve_euler)
from .experiments import (GapReport, GapRow, fit_order, run_burgers_gap,
                          run_euler_gap, run_lemma_suite,
                          run_time_discontinuity)
from .grid import Field, UniformPeriodicGrid, field_to_csv, read_field, write_field
from .profiles import ProfileSet, build_profiles
from .spectral import (BesovIndex, CutoffProfile, DyadicDecomposition,
                       besov_norm, commutator, decompose, dyadic_block,
                       lp_norm, make_cutoff_pair)
from .transport1d import (FlowMap1D, RHSHook, ap4_closed_form, cascade_errors,
                          identity_hook, solve_burgers, solve_frozen_transport,
                          verify_cosine_lower_bound, zero_hook)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
