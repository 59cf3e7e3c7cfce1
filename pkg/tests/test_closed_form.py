import math

import numpy as np
import pytest
from scipy import integrate
from scipy.spatial.transform import Rotation

from spinqed import closed_form as cf
from spinqed.errors import InvalidDomainError
from spinqed.momentum_grid import TWO_PI_CUBED, ChiProfile, SpinConfig

Z = np.array([0.0, 0.0, 1.0])
GRID = cf.QuadratureSpec(method="grid-sum", radial_order=64, angular_order=38)


def quad(f, lo, hi):
    return integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-13, limit=400)[0]


def test_F_at_origin(bump):
    ref = (8 * math.pi / 3) * quad(lambda r: bump(r) ** 2 * r * r, 1, 3) / TWO_PI_CUBED
    assert cf.F_interaction(np.zeros(3), bump, Z) == pytest.approx(ref, rel=1e-10)
    assert cf.F_interaction(np.zeros(3), bump, Z, GRID) == pytest.approx(ref, rel=1e-8)


def test_F_bessel_matches_grid_sum(bump):
    n = np.array([0.3, 0.4, np.sqrt(0.75)])
    x = np.array([0.25, -0.15, 0.2])
    assert cf.F_interaction(x, bump, n) == pytest.approx(cf.F_interaction(x, bump, n, GRID), rel=1e-6)


def test_F_symmetries(bump):
    x = np.array([0.4, -0.2, 0.3])
    assert abs(cf.F_interaction(x, bump, Z) - cf.F_interaction(-x, bump, Z)) < 1e-12
    R = Rotation.from_rotvec(Z * math.pi / 2).as_matrix()
    assert cf.F_interaction(R @ x, bump, Z) == pytest.approx(cf.F_interaction(x, bump, Z), rel=1e-10)
    with pytest.raises(InvalidDomainError):
        cf.F_interaction(x, bump, 2 * Z)


def test_F_decays(bump):
    f0 = cf.F_interaction(np.zeros(3), bump, Z)
    assert abs(cf.F_interaction(np.array([50.0, 0, 0]), bump, Z)) < 1e-3 * f0


def test_C_constant(bump):
    ref = 0.5 * (16 * math.pi / 3) * quad(lambda r: bump(r) ** 2 * r ** 3 / (r + 2), 1, 3) / TWO_PI_CUBED
    assert cf.C_constant(bump, 1.0) == pytest.approx(ref, rel=1e-10)
    assert cf.C_constant(bump, 1.0, GRID) == pytest.approx(ref, rel=1e-8)
    assert cf.C_constant(bump, 2.0) < cf.C_constant(bump, 1.0)
    assert cf.C_constant(bump.scaled(0.0), 1.0) == 0.0
    with pytest.raises(InvalidDomainError):
        cf.C_constant(bump, 0.0)


def test_lambda2_single_and_far_pair(bump):
    one = SpinConfig((0, 0, 1), [(0, 0, 0)])
    lam = cf.lambda2_closed(one, bump)
    assert lam == pytest.approx(-cf.C_constant(bump, 1.0) - cf.F_interaction(np.zeros(3), bump, Z) / 2, rel=1e-14)
    far = SpinConfig((0, 0, 1), [(0, 0, 0), (1e3, 0, 0)])
    assert cf.lambda2_closed(far, bump) == pytest.approx(2 * lam, rel=1e-4)


def test_rho_and_current(bump, two_spins):
    ref = 4 * math.pi * quad(lambda r: bump(r) ** 2 * r * r, 1, 3) / TWO_PI_CUBED
    assert cf.rho_profile(np.zeros(3), bump) == pytest.approx(ref, rel=1e-10)
    assert abs(cf.rho_profile(np.array([1.0, 0, 0]), bump) - cf.rho_profile(np.array([0, 1.0, 0]), bump)) < 1e-10
    x = np.array([0.3, 0.2, -0.1])
    d = 1e-4
    fd = np.array([(cf.rho_profile(x + d * e, bump) - cf.rho_profile(x - d * e, bump)) / (2 * d) for e in np.eye(3)])
    assert np.allclose(cf.grad_rho(x, bump), fd, rtol=1e-6, atol=1e-12)
    j = cf.current_density(x, two_spins, bump, 0.5)
    assert abs(j @ two_spins.n_beta) < 1e-15


def test_B_on_spin_is_F0(bump):
    cfg = SpinConfig((0, 0, 2), [(0.1, 0.2, 0.3)])
    B = cf.B_classical(np.array([0.1, 0.2, 0.3]), cfg, bump, 0.7)
    assert B @ cfg.n_beta == pytest.approx(0.7 * cf.F_interaction(np.zeros(3), bump, Z), rel=1e-12)


def test_B_bessel_matches_grid_sum(bump, two_spins):
    x = np.array([0.3, -0.2, 0.25])
    assert np.allclose(cf.B_classical(x, two_spins, bump, 1.0), cf.B_classical(x, two_spins, bump, 1.0, GRID),
                       rtol=1e-6, atol=1e-10)


def _curl(fn, x, d):
    J = np.column_stack([(fn(x + d * e) - fn(x - d * e)) / (2 * d) for e in np.eye(3)])
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def test_curl_of_A_is_B_second_order(bump, two_spins):
    x = np.array([0.35, 0.1, -0.25])
    q = cf.QuadratureSpec(rtol=1e-13, atol=1e-16)
    A = lambda y: cf.A_classical(y, two_spins, bump, 1.0, q)
    B = cf.B_classical(x, two_spins, bump, 1.0, q)
    e1 = np.linalg.norm(_curl(A, x, 1e-2) - B)
    e2 = np.linalg.norm(_curl(A, x, 5e-3) - B)
    assert e2 / np.linalg.norm(B) < 1e-4
    assert 3.5 < e1 / e2 < 4.5


def test_div_B_vanishes(bump, two_spins):
    rng = np.random.default_rng(3)
    d = 1e-3
    for x in rng.uniform(-1, 1, (3, 3)):
        div = sum((cf.B_classical(x + d * e, two_spins, bump, 1.0)[i] - cf.B_classical(x - d * e, two_spins, bump, 1.0)[i])
                  / (2 * d) for i, e in enumerate(np.eye(3)))
        assert abs(div) < 1e-6


def test_laplacian_of_A_is_current(bump, two_spins):
    # the potential solves Delta A = j (with j = h n ^ grad Phi)
    x = np.array([0.2, -0.3, 0.15])
    q = cf.QuadratureSpec(rtol=1e-13, atol=1e-16)
    A = lambda y: cf.A_classical(y, two_spins, bump, 1.0, q)
    d = 2e-2
    lap = sum(A(x + d * e) - 2 * A(x) + A(x - d * e) for e in np.eye(3)) / d ** 2
    j = cf.current_density(x, two_spins, bump, 1.0, q)
    assert np.linalg.norm(lap - j) < 5e-3 * np.linalg.norm(j)


def test_E_classical_zero():
    for x in ([0, 0, 0], [1, 2, 3], [-0.5, 0.1, 9]):
        assert np.array_equal(cf.E_classical(np.array(x)), np.zeros(3))


def test_field_map_shape(bump, two_spins):
    pts = np.random.default_rng(0).uniform(-1, 1, (4, 3))
    out = cf.field_map(pts, two_spins, bump, 0.5)
    assert len(out) == 4 and out[0].provenance == "classical" and len(out[0].value) == 3


def test_quadrature_spec_validation():
    with pytest.raises(InvalidDomainError):
        cf.QuadratureSpec(method="monte-carlo")
    with pytest.raises(InvalidDomainError):
        cf.QuadratureSpec(rtol=0)


def test_small_argument_kernels():
    s = np.array([1e-5, 5e-4, 2e-3, 0.5])
    from scipy.special import spherical_jn
    j0, j1s, j2, j1 = cf.bessel_kernels(s)
    assert np.allclose(j0, spherical_jn(0, s), rtol=1e-13, atol=1e-16)
    assert np.allclose(j1s, spherical_jn(1, s) / s, rtol=1e-10)
    assert np.allclose(j2, spherical_jn(2, s), rtol=1e-8, atol=1e-20)
