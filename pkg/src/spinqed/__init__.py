"""Semiclassical ground states of N spin-1/2 particles coupled to a quantized
magnetic field: perturbative expansion, closed-form quadratures and a
brute-force diagonalization oracle."""
from .closed_form import (B_classical, C_constant, F_interaction, QuadratureSpec, A_classical,
                          lambda2_closed)
from .errors import (ConfigurationError, InvalidDomainError, NumericError, PreconditionError,
                     ResourceError, SpinQEDError)
from .fock_space import enumerate_basis, segal_field
from .hamiltonian import assemble, build_model, hamiltonian_at
from .momentum_grid import ChiProfile, MomentumGrid, ModeSet, SpinConfig, build_grid, mode_set
from .oracle import convergence_study, ground_state
from .perturbation import expand, second_order, solve_shifted

__version__ = "0.1.0"
