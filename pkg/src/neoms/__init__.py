"""Bistability of a driven cavity with two charged, coupled mirrors.

Steady-state photon numbers come from a cubic in closed form, branches are
classified by the linearized spectrum, folds and their detuning threshold in
closed form, and an independent mean-field integrator cross-checks all of it
in the time domain.
"""

from .bifurcation import (BistabilityCurve, BistabilityWindow, BranchSolution,
                          CurvePoint, FamilyMember, FamilyResult,
                          HysteresisTrace, auto_power_grid,
                          bistability_window, family_sweep,
                          hysteresis_from_curve, lower_branch_spread,
                          mirror_displacements, power_sweep, solve_point)
from .config import RunConfig, load_config, parse_config_text
from .dynamics import (ORIGIN, MeanFieldState, RampSchedule, Trajectory,
                       hysteresis_loop, integrate, quasi_static_hysteresis,
                       relax_to_steady, time_derivative)
from .errors import (ConfigError, ConsistencyError, ConvergenceError,
                     EigenvalueError, NeomsError, NoBistabilityError,
                     NumericalError, ParameterError, ResidualError,
                     SingularDenominatorError, StiffnessError)
from .model import (CODATA, CoulombSpec, DerivedParams, DriveSpec,
                    LinewidthConvention, PhysicalConstants, SystemParams,
                    amplitude_decay, canonical_phase, derive, drive_amplitude,
                    eps_for_power, power_for_eps_sq, validate)
from .presets import PRESETS, Preset, get_preset
from .stability import (Classification, Method, StabilityReport, classify,
                        jacobian, routh_hurwitz_stable)
from .steady_state import (CriticalPoints, CubicCoefficients, PhotonRoots,
                           SteadyStateFields, Susceptibilities,
                           ThresholdDetuning, critical_points,
                           cubic_coefficients, drive_offset,
                           fold_powers_eps_sq, solve_photon_roots,
                           steady_fields, susceptibilities,
                           threshold_detuning)

__version__ = "0.1.0"
