"""Quadrature evaluation of the interaction function F, the constant C, lambda_2
and the classical fields of the aligned spins.

Momentum integrals are reduced to one radial integral with spherical Bessel
kernels:

    int dOmega e^{i s k.y}           = 4 pi j0(s)
    int dOmega e^{i s k.y} k_a       = 4 pi i j1(s) y_a
    int dOmega e^{i s k.y} k_a k_b   = 4 pi (delta_ab j1(s)/s - y_a y_b j2(s))

with unit vectors k, y and s = |k||y|.  The ``grid-sum`` method evaluates the
same integrals as plain sums over a MomentumGrid and serves as a 3D fallback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import spherical_jn

from .errors import InvalidDomainError, QuadratureError
from .momentum_grid import TWO_PI_CUBED, angular_design, build_grid

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = "bessel"  # "bessel" (adaptive radial) or "grid-sum"
    rtol: float = 1e-10
    atol: float = 1e-14
    max_evals: int = 2000
    radial_order: int = 96
    angular_order: int = 38

    def __post_init__(self):
        if self.method not in ("bessel", "grid-sum"):
            raise InvalidDomainError(f"unknown quadrature method {self.method!r}")
        if not (self.rtol > 0 and self.atol >= 0):
            raise InvalidDomainError("quadrature tolerances must be positive")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class FieldSample:
    x: tuple
    value: tuple
    h: float
    provenance: str  # "classical" or "quantum-expectation"


def bessel_kernels(s):
    """j0(s), j1(s)/s, j2(s), j1(s) with small-s series."""
    s = np.asarray(s, dtype=float)
    small = s < 1e-3
    ss = np.where(small, 1.0, s)
    j0 = spherical_jn(0, ss)
    j1 = spherical_jn(1, ss)
    j2 = spherical_jn(2, ss)
    s2 = s * s
    j0 = np.where(small, 1 - s2 / 6 + s2 * s2 / 120, j0)
    j1s = np.where(small, 1 / 3 - s2 / 30 + s2 * s2 / 840, j1 / ss)
    j2 = np.where(small, s2 / 15 - s2 * s2 / 210, j2)
    j1 = np.where(small, s / 3 - s * s2 / 30, j1)
    return j0, j1s, j2, j1


def radial_integral(fn, chi, q=DEFAULT_QUAD):
    """int_0^inf chi(r)^2 fn(r) dr over the support of chi."""
    lo, hi = chi.radial_support()
    if hi <= lo or chi.amplitude == 0:
        return 0.0
    val, err, *rest = integrate.quad(lambda r: float(chi(r)) ** 2 * fn(r), lo, hi,
                                     epsabs=q.atol, epsrel=q.rtol, limit=q.max_evals, full_output=1)
    if err > max(q.atol, q.rtol * abs(val)) * 10:
        raise QuadratureError(f"radial quadrature reached error {err:.3e} for value {val:.6e}", val, err)
    return val


def _grid(chi, q):
    lo, hi = chi.radial_support()
    return build_grid(chi, q.radial_order, q.angular_order, hi)


def _unit(v):
    n = np.linalg.norm(v)
    return (v / n if n > 0 else np.zeros(3)), n


def F_interaction(x, chi, n_beta, q=DEFAULT_QUAD):
    """(2pi)^-3 int chi(|k|)^2 cos(k.x) (1 - (k.n)^2/|k|^2) dk."""
    n = np.asarray(n_beta, dtype=float)
    if abs(np.linalg.norm(n) - 1) > 1e-12:
        raise InvalidDomainError("n_beta must be a unit vector")
    x = np.asarray(x, dtype=float)
    if q.method == "grid-sum":
        g = _grid(chi, q)
        k = g.nodes
        kn = g.norms
        return g.integrate(lambda k: chi(kn) ** 2 * np.cos(k @ x) * (1 - (k @ n) ** 2 / kn ** 2)) / TWO_PI_CUBED
    xh, d = _unit(x)
    c2 = float(xh @ n) ** 2

    def kern(r):
        j0, j1s, j2, _ = bessel_kernels(r * d)
        return r * r * (j0 - j1s + c2 * j2)

    return FOUR_PI * radial_integral(kern, chi, q) / TWO_PI_CUBED


def C_constant(chi, beta_norm, q=DEFAULT_QUAD):
    """(1/2)(2pi)^-3 int chi^2 |k|/(|k| + 2|beta|) (|k|^2 + k_3^2)/|k|^2 dk.

    The angular factor (1 + cos^2) is a degree-2 polynomial, integrated exactly
    by the spherical design.
    """
    if not beta_norm > 0:
        raise InvalidDomainError("|beta| must be positive")
    dirs, w = angular_design(q.angular_order)
    ang = float(np.dot(w, 1 + dirs[:, 2] ** 2))
    if q.method == "grid-sum":
        g = _grid(chi, q)
        kn = g.norms
        val = g.integrate(lambda k: chi(kn) ** 2 * kn / (kn + 2 * beta_norm) * (1 + k[:, 2] ** 2 / kn ** 2))
        return 0.5 * val / TWO_PI_CUBED
    rad = radial_integral(lambda r: r ** 3 / (r + 2 * beta_norm), chi, q)
    return 0.5 * ang * rad / TWO_PI_CUBED


def lambda2_closed(cfg, chi, q=DEFAULT_QUAD):
    """lambda_2 = -N C - (1/2) sum_{l,m} F(x_l - x_m)."""
    cfg.require_field()
    n = cfg.n_beta
    xs = cfg.xs
    total = 0.0
    for a in range(cfg.N):
        for b in range(cfg.N):
            total += F_interaction(xs[a] - xs[b], chi, n, q)
    return -cfg.N * C_constant(chi, cfg.beta_norm, q) - 0.5 * total


def rho_profile(x, chi, q=DEFAULT_QUAD):
    """(2pi)^-3 int chi^2 cos(k.x) dk."""
    d = float(np.linalg.norm(x))
    return FOUR_PI * radial_integral(lambda r: r * r * bessel_kernels(r * d)[0], chi, q) / TWO_PI_CUBED


def grad_rho(x, chi, q=DEFAULT_QUAD):
    """Analytic gradient -(2pi)^-3 int chi^2 sin(k.x) k dk."""
    xh, d = _unit(np.asarray(x, dtype=float))
    if d == 0:
        return np.zeros(3)
    rad = radial_integral(lambda r: r ** 3 * bessel_kernels(r * d)[3], chi, q)
    return -FOUR_PI * rad / TWO_PI_CUBED * xh


def Phi_potential(x, cfg, chi, q=DEFAULT_QUAD):
    x = np.asarray(x, dtype=float)
    return sum(rho_profile(x - y, chi, q) for y in cfg.xs)


def current_density(x, cfg, chi, h, q=DEFAULT_QUAD):
    """j = h n_beta ^ grad Phi."""
    x = np.asarray(x, dtype=float)
    grad = sum(grad_rho(x - y, chi, q) for y in cfg.xs)
    return h * np.cross(cfg.n_beta, grad)


def A_classical(x, cfg, chi, h, q=DEFAULT_QUAD):
    """h (2pi)^-3 sum_l int chi^2 sin(k.(x-x_l)) (n_beta ^ k)/|k|^2 dk.

    This is the potential whose Laplacian is j and whose curl is B_classical.
    """
    x = np.asarray(x, dtype=float)
    n = cfg.n_beta
    out = np.zeros(3)
    for y in cfg.xs:
        yh, d = _unit(x - y)
        if d == 0:
            continue
        rad = radial_integral(lambda r: r * bessel_kernels(r * d)[3], chi, q)
        out += FOUR_PI * rad / TWO_PI_CUBED * np.cross(n, yh)
    return h * out


def B_classical(x, cfg, chi, h, q=DEFAULT_QUAD):
    """h (2pi)^-3 sum_l int chi^2 cos(k.(x-x_l)) (k^e_m).(k^n_beta)/|k|^2 dk, m = 1..3."""
    x = np.asarray(x, dtype=float)
    n = cfg.n_beta
    if q.method == "grid-sum":
        return B_classical_grid(_grid(chi, q), chi, cfg, x, h)
    out = np.zeros(3)
    for y in cfg.xs:
        yh, d = _unit(x - y)
        ia = radial_integral(lambda r: r * r * np.subtract(*bessel_kernels(r * d)[:2]), chi, q)
        ib = radial_integral(lambda r: r * r * bessel_kernels(r * d)[2], chi, q) if d > 0 else 0.0
        out += FOUR_PI / TWO_PI_CUBED * (ia * n + ib * float(yh @ n) * yh)
    return h * out


def B_classical_grid(grid, chi, cfg, x, h):
    """Grid sum of the B_classical integrand: the field of the discretized model."""
    x = np.asarray(x, dtype=float)
    n = cfg.n_beta
    k = grid.nodes
    kn2 = grid.norms ** 2
    wc = grid.weights * chi(grid.norms) ** 2
    cos_sum = sum(np.cos(k @ (x - y)) for y in cfg.xs)
    # (k^e_m).(k^n) = |k|^2 n_m - k_m (k.n)
    geo = n[None, :] - k * (k @ n)[:, None] / kn2[:, None]
    return h * (wc * cos_sum) @ geo / TWO_PI_CUBED


def E_classical(x):
    return np.zeros(3)


def field_map(points, cfg, chi, h, q=DEFAULT_QUAD):
    return [FieldSample(tuple(float(c) for c in p), tuple(float(b) for b in B_classical(p, cfg, chi, h, q)),
                        h, "classical") for p in np.asarray(points, dtype=float)]
