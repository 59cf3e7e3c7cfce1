import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from spinqed.errors import ConfigurationError, InvalidDomainError
from spinqed.momentum_grid import (ANGULAR_ORDERS, TWO_PI_CUBED, ChiProfile, SpinConfig, angular_design,
                                   build_grid, coupling_amplitudes, electric_amplitudes, mode_set,
                                   polarization_pair)

vec3 = st.tuples(*[st.floats(-5, 5, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3)


@pytest.mark.parametrize("order,degree", list(zip(ANGULAR_ORDERS, (3, 5, 7, 9))))
def test_design_is_exact_to_its_degree(order, degree):
    pts, w = angular_design(order)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
    assert w.sum() == pytest.approx(4 * math.pi, rel=1e-14)
    # sphere moments of x^a y^b z^c with a+b+c even
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            for c in range(degree + 1 - a - b):
                if a % 2 or b % 2 or c % 2:
                    exact = 0.0
                else:
                    g = math.gamma
                    exact = 2 * g((a + 1) / 2) * g((b + 1) / 2) * g((c + 1) / 2) / g((a + b + c + 3) / 2)
                got = np.dot(w, pts[:, 0] ** a * pts[:, 1] ** b * pts[:, 2] ** c)
                assert got == pytest.approx(exact, abs=1e-13)


def test_unsupported_angular_order():
    with pytest.raises(ConfigurationError):
        angular_design(7)


def test_grid_respects_infrared_radius():
    chi = ChiProfile.bump(infrared_radius=1.0)
    g = build_grid(chi, 4, 14, 5.0)
    assert np.all(g.norms >= 1.0) and np.all(g.norms <= 5.0)


def test_grid_errors(bump):
    with pytest.raises(InvalidDomainError):
        build_grid(bump, 4, 6, 1.0)
    with pytest.raises(ConfigurationError):
        build_grid(bump, 1, 6, 3.0)


def test_polarizations_are_transverse(bump):
    g = build_grid(bump, 4, 38, 3.0)
    k = g.nodes / g.norms[:, None]
    for s in range(2):
        assert np.abs(np.einsum("ij,ij->i", g.polarizations[:, s], k)).max() < 1e-12


def test_radial_integral_of_chi_squared(bump):
    g = build_grid(bump, 48, 6, 3.0)
    ref = 4 * math.pi * integrate.quad(lambda r: bump(r) ** 2 * r * r, 1.0, 3.0, epsabs=0, epsrel=1e-13)[0]
    assert g.integrate(lambda k: bump(np.linalg.norm(k, axis=1)) ** 2) == pytest.approx(ref, rel=1e-8)


def test_pole_rule():
    e1, e2 = polarization_pair((0, 0, 2))
    assert e1[2] == 0 and e2[2] == 0
    assert abs(np.cross(e1, e2) @ (0, 0, 1)) == pytest.approx(1.0)
    e1, e2 = polarization_pair((1, 0, 0))
    assert abs(e1 @ (1, 0, 0)) < 1e-14 and abs(e2 @ (1, 0, 0)) < 1e-14


@given(vec3)
def test_polarization_pair_is_right_handed(k):
    e1, e2 = polarization_pair(k)
    khat = np.asarray(k) / np.linalg.norm(k)
    assert np.allclose([e1 @ e1, e2 @ e2, e1 @ e2], [1, 1, 0], atol=1e-12)
    assert min(np.linalg.norm(np.cross(e1, e2) - khat), np.linalg.norm(np.cross(e1, e2) + khat)) < 1e-12


def test_polarization_at_origin_rejected():
    with pytest.raises(InvalidDomainError):
        polarization_pair((0, 0, 0))


def test_amplitudes_at_origin_are_imaginary(bump):
    g = build_grid(bump, 4, 14, 3.0)
    assert np.abs(coupling_amplitudes(g, bump, np.zeros(3)).real).max() == 0.0


def test_amplitude_sum_rule(bump):
    # sum_modes |amp_3|^2 = (2pi)^-3 int chi^2 |k| (1 - k3^2/|k|^2) dk = (2pi)^-3 (8pi/3) int chi^2 r^3 dr
    g = build_grid(bump, 32, 38, 3.0)
    amps = coupling_amplitudes(g, bump, np.array([0.3, -0.1, 0.5]))
    ref = (8 * math.pi / 3) * integrate.quad(lambda r: bump(r) ** 2 * r ** 3, 1, 3, epsrel=1e-12)[0] / TWO_PI_CUBED
    assert np.sum(np.abs(amps[2]) ** 2) == pytest.approx(ref, rel=1e-2)


@settings(max_examples=20, deadline=None)
@given(vec3, vec3)
def test_translation_covariance(x, y):
    chi = ChiProfile.bump()
    g = build_grid(chi, 3, 6, 3.0)
    ax = coupling_amplitudes(g, chi, np.asarray(x))
    ay = coupling_amplitudes(g, chi, np.asarray(y))
    # sin + i cos = i e^{-i k.x}, so amplitudes pick up the phase e^{-i k.(x-y)}
    phase = np.repeat(np.exp(-1j * (g.nodes @ (np.asarray(x) - np.asarray(y)))), 2)
    assert np.abs(ax - ay * phase).max() < 1e-12


def test_electric_amplitudes_are_transverse(bump):
    g = build_grid(bump, 3, 14, 3.0)
    amps = electric_amplitudes(g, bump, np.array([0.2, 0.1, 0.0])).T.reshape(-1, 2, 3)
    k = g.nodes
    assert np.abs(np.einsum("nsm,nm->ns", amps, k)).max() < 1e-12


def test_chi_profiles():
    b = ChiProfile.bump()
    assert b(0.5) == 0 and b(2.0) == pytest.approx(math.exp(-1))
    assert b.vanishes_near_zero
    pg = ChiProfile.polygauss()
    assert pg.zero_at_origin and not pg.vanishes_near_zero
    assert pg(1.0) == pytest.approx(math.exp(-0.5))
    with pytest.raises(ConfigurationError):
        ChiProfile("tophat")


def test_spin_config_requires_field():
    cfg = SpinConfig((0, 0, 0), [(0, 0, 0)])
    with pytest.raises(InvalidDomainError):
        cfg.require_field()


def test_compression_keeps_coupling_geometry(bump, two_spins):
    g = build_grid(bump, 3, 14, 3.0)
    full = mode_set(g, bump, two_spins)
    comp = mode_set(g, bump, two_spins, compress=True)
    assert comp.count <= 3 * two_spins.N * 3 < full.count
    # Gram matrix of coupling vectors is preserved
    A = full.spin_couplings.reshape(-1, full.count)
    B = comp.spin_couplings.reshape(-1, comp.count)
    assert np.abs(A.conj() @ A.T - B.conj() @ B.T).max() < 1e-13
    x = np.array([0.4, 0.2, -0.3])
    fa, fb = full.magnetic(x), comp.magnetic(x)
    assert np.abs(fa.conj() @ A.T - fb.conj() @ B.T).max() < 1e-13
