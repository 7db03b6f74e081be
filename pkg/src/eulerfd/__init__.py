"""Finite-difference WENO solver for the compressible Euler equations.

Single-step time integration built from time-averaged fluxes whose temporal
Taylor terms are assembled with difference-based (Jacobian-free) tensor
contractions, plus conventional SSP Runge-Kutta baselines and a benchmark
harness.
"""

from .euler import (EigenSystem, GasModel, analytic_flux,
                    analytic_jacobian_apply, conserved_from_primitive,
                    eigensystem, max_wave_speed, primitive_from_conserved)
from .contractions import (EPS_OP_DEFAULT, CountingFlux, EpsilonPolicy,
                           contract2, contract2_nonrecursive, contract3,
                           contract3_nonrecursive, d_u, epsilon_for)
from .mesh import (BoundarySpec, DirichletProfile, FieldBlock, GridSpec,
                   Outflow, Periodic, Reflect, SplitFace, central_diff,
                   central_diff_mixed, create_grid, fill_guards)

__version__ = "0.1.0"
