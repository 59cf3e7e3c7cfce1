import math

import numpy as np
import pytest
import scipy.sparse as sp

from conftest import single_mode_model
from spinqed.errors import ConfigurationError, InvalidDomainError, ResourceError
from spinqed.fock_space import enumerate_basis
from spinqed.hamiltonian import assemble, build_model, hamiltonian_at
from spinqed.momentum_grid import ModeSet, SpinConfig
from spinqed.spin_algebra import SIGMA, t0_operator
from spinqed.oracle import ground_state


def test_vacuum_energy(small_model):
    u0 = small_model.u0()
    assert np.vdot(u0, small_model.k1 @ u0).real == pytest.approx(-small_model.cfg.N * small_model.cfg.beta_norm)
    H = hamiltonian_at(small_model, 0.3)
    assert np.vdot(u0, H @ u0).real == pytest.approx(small_model.lambda1 * 0.3, abs=1e-15)


def test_k32_has_no_diagonal_sector_blocks(small_model):
    ops = small_model
    sectors = np.repeat(ops.basis.photon_numbers, ops.spin_dim)
    rng = np.random.default_rng(1)
    for m in range(ops.basis.n_max + 1):
        v = np.where(sectors == m, rng.standard_normal(ops.dim), 0)
        assert abs(np.vdot(v, ops.k32 @ v)) < 1e-13


def test_hermitian(small_model):
    K = small_model.k32
    assert abs(K - K.conj().T).max() < 1e-15


def test_hand_assembled_single_mode():
    c = np.array([0.3, -0.2 + 0.1j, 0.4j])
    ops = single_mode_model(couplings=c, n_max=2)
    adag = np.diag(np.sqrt([1.0, 2.0]), -1)
    U = ops.spin.unitary  # columns a_empty, a_{1}
    assert np.allclose(np.abs(U), [[0, 1], [1, 0]])
    K = sum(np.kron((cm * adag + np.conj(cm) * adag.T) / math.sqrt(2), U.conj().T @ SIGMA[m] @ U)
            for m, cm in enumerate(c))
    assert np.abs(ops.k32.toarray() - K).max() < 1e-15
    # K1 = dGamma + T0 in the a_E frame
    assert np.allclose(ops.k1_diag, [-1, 1, 0.5, 2.5, 2.0, 4.0])


def test_hamiltonian_scaling(small_model):
    ops = small_model
    H1 = hamiltonian_at(ops, 1.0)
    assert abs(H1 - ops.k1 - ops.k32).max() < 1e-15
    h = 0.07
    lhs = hamiltonian_at(ops, 4 * h) - 4 * h * ops.k1
    rhs = 8 * (hamiltonian_at(ops, h) - h * ops.k1)
    assert abs(lhs - rhs).max() < 1e-15


def test_nonpositive_h(small_model):
    with pytest.raises(InvalidDomainError):
        hamiltonian_at(small_model, 0.0)


def test_computational_frame(small_model):
    ops = small_model
    T0 = sp.kron(sp.identity(ops.basis.dim), sp.csr_matrix(t0_operator(ops.cfg)))
    v = ops.to_computational(ops.u0())
    assert np.vdot(v, T0 @ v).real == pytest.approx(ops.lambda1)
    back = ops.operator_to_computational(ops.k1)
    dgam = ops.k1_diag - np.tile(ops.spin.zeeman_levels, ops.basis.dim)
    assert abs(back - sp.diags(dgam) - T0).max() < 1e-13


def test_compression_preserves_ground_energy(bump, two_spins):
    full = build_model(bump, two_spins, n_max=2, compress=False)
    comp = build_model(bump, two_spins, n_max=2)
    assert comp.modes.count < full.modes.count
    for h in (0.5, 0.1):
        e_full = ground_state(hamiltonian_at(full, h)).energy
        e_comp = ground_state(hamiltonian_at(comp, h)).energy
        assert e_comp == pytest.approx(e_full, abs=1e-12)


def test_field_operators(small_model):
    ops = small_model
    x = np.array([0.3, 0.1, -0.2])
    u0 = ops.u0()
    for m in (1, 2, 3):
        B, E = ops.magnetic(x, m, 0.2), ops.electric(x, m, 0.2)
        assert abs(np.vdot(u0, B @ u0)) == 0 and abs(np.vdot(u0, E @ u0)) == 0
        assert abs(E - E.conj().T).max() < 1e-12
        assert abs(ops.magnetic(x, m, 0.8) - 2 * B).max() < 1e-15
    with pytest.raises(ConfigurationError):
        ops.magnetic(x, 4, 0.2)


def test_assemble_checks():
    cfg = SpinConfig((0, 0, 1), [(0, 0, 0)])
    modes = ModeSet(np.array([1.0, 2.0]), np.zeros((1, 3, 2), dtype=complex))
    with pytest.raises(ConfigurationError):
        assemble(modes, cfg, enumerate_basis(3, 2))
    with pytest.raises(ResourceError):
        assemble(modes, cfg, enumerate_basis(2, 2), budget=5)
