"""Hopf bifurcation analysis of a host-parasitoid biological control model.

The model tracks host pupae and adults ``(P, M)`` and parasitoid larvae
and adults ``(L, G)``; the interaction coefficients ``(k1, k2)`` are the
control parameters. The package computes equilibria and their stability,
the Hopf curve where the coexistence equilibrium loses stability, the
first Lyapunov coefficient along it, and the unstable cycle nearby.
"""

__version__ = "0.1.0"

from .config import RunConfig, parse_config
from .continuation import (CurvePoint, TangencyResult, delta_of, diagonal_roots, find_tangency,
                           gradient_delta, hopf_point_q, snap_to_sigma, solve_sigma_k2, trace_sigma)
from .dynamics import (PeriodicOrbit, Trajectory, find_periodic_orbit, floquet_multipliers,
                       integrate, solve_ode)
from .exceptions import (AccuracyError, BifurcationError, ConfigError, ConsistencyError,
                         ConvergenceError, DegeneracyError, DomainError, IntegrationError,
                         InvalidInputError, NotOnSigmaError, OrbitNotFoundError, SingularityError)
from .hopf import HopfReport, classify_hopf, lyapunov_l1, omega0_at
from .model import (EquilibriumSet, ModelParams, bilinear_B, equilibria, is_admissible, jacobian,
                    k1_max, reproduction_numbers, table_params, vector_field)
from .settings import DEFAULT_TOLERANCES, ToleranceSettings
from .spectra import Spectrum, char_poly, eigenpair_at, eigenvalues
from .stability import Classification, Kind, a_coefficients, classify, classify_all, delta_at_A4
