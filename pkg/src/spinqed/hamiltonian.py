"""K1, K_{3/2}, H(h) and field observables on (truncated Fock) x (C^2)^N.

Product index is ``occupation_index * 2**N + spin_index`` and the spin factor is
written in the adapted a_E frame, where K1 is diagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, InvalidDomainError, ResourceError
from .fock_space import DEFAULT_BUDGET, dgamma_diagonal, enumerate_basis, segal_field
from .momentum_grid import build_grid, mode_set
from .spin_algebra import pauli, spin_basis


@dataclass(eq=False)
class ModelOperators:
    modes: object
    cfg: object
    basis: object
    spin: object
    k1_diag: np.ndarray
    k32: sp.csr_matrix
    shift_diag: np.ndarray  # K1 - lambda1 = dGamma(M) + 2|beta||E|, exact

    @property
    def spin_dim(self):
        return 2 ** self.cfg.N

    @property
    def dim(self):
        return self.basis.dim * self.spin_dim

    @property
    def k1(self):
        return sp.diags(self.k1_diag, format="csr")

    @property
    def lambda1(self):
        return -self.cfg.N * self.cfg.beta_norm

    def u0(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def to_computational(self, vec):
        """Re-express a product-space vector with the spin factor in the sigma_3 basis."""
        v = np.asarray(vec).reshape(self.basis.dim, self.spin_dim)
        return (v @ self.spin.unitary.T).reshape(-1)

    def operator_to_computational(self, op):
        U = sp.kron(sp.identity(self.basis.dim), sp.csr_matrix(self.spin.unitary), format="csr")
        return (U @ op @ U.conj().T).tocsr()

    def magnetic(self, x, m, h):
        return magnetic_field_op(self.modes, self.basis, x, m, h, self.spin_dim)

    def electric(self, x, m, h):
        return electric_field_op(self.modes, self.basis, x, m, h, self.spin_dim)


def assemble(modes, cfg, basis, budget=DEFAULT_BUDGET):
    cfg.require_field()
    if modes.count != basis.K:
        raise ConfigurationError(f"basis has {basis.K} modes, mode set has {modes.count}")
    if modes.spin_couplings.shape[0] != cfg.N:
        raise ConfigurationError("mode set was built for a different number of spins")
    spin_dim = 2 ** cfg.N
    dim = basis.dim * spin_dim
    if dim > budget:
        raise ResourceError(f"product dimension {dim} exceeds budget {budget}", dimension=dim)
    spin = spin_basis(cfg)
    U = spin.unitary
    dgamma = dgamma_diagonal(basis, modes.frequencies)
    k1_diag = np.add.outer(dgamma, spin.zeeman_levels).reshape(-1)
    shift = np.add.outer(dgamma, 2.0 * cfg.beta_norm * spin.excitation_counts).reshape(-1)
    k32 = sp.csr_matrix((dim, dim), dtype=complex)
    for lam in range(cfg.N):
        for m in range(3):
            S = U.conj().T @ pauli(m + 1, lam + 1, cfg.N) @ U
            S[np.abs(S) < 1e-15] = 0.0
            phi = segal_field(basis, modes.spin_couplings[lam, m])
            k32 = k32 + sp.kron(phi, sp.csr_matrix(S), format="csr")
    k32.sum_duplicates()
    k32.sort_indices()
    return ModelOperators(modes, cfg, basis, spin, k1_diag, k32, shift)


def build_model(chi, cfg, n_max, radial_order=2, angular_order=6, r_max=3.0, compress=True,
                budget=DEFAULT_BUDGET):
    """Grid, modes, Fock basis and operators in one call."""
    grid = build_grid(chi, radial_order, angular_order, r_max)
    modes = mode_set(grid, chi, cfg, compress=compress)
    basis = enumerate_basis(modes.count, n_max, budget)
    return assemble(modes, cfg, basis, budget)


def hamiltonian_at(ops, h):
    """H(h) = h K1 + h^(3/2) K_{3/2}."""
    if not h > 0:
        raise InvalidDomainError(f"semiclassical parameter must be positive, got {h}")
    return (h * ops.k1 + h ** 1.5 * ops.k32).tocsr()


def _field_op(amps, basis, m, h, spin_dim):
    if not h > 0:
        raise InvalidDomainError(f"semiclassical parameter must be positive, got {h}")
    if not 1 <= m <= 3:
        raise ConfigurationError(f"field component m={m} outside 1..3")
    phi = math.sqrt(h) * segal_field(basis, amps[m - 1])
    if spin_dim == 1:
        return phi
    return sp.kron(phi, sp.identity(spin_dim), format="csr")


def magnetic_field_op(modes, basis, x, m, h, spin_dim=1):
    """B_m(x) = sqrt(h) Phi_S(a_m(x) + i b_m(x)), tensored with the spin identity."""
    return _field_op(modes.magnetic(x), basis, m, h, spin_dim)


def electric_field_op(modes, basis, x, m, h, spin_dim=1):
    return _field_op(modes.electric(x), basis, m, h, spin_dim)
