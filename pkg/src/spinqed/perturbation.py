"""Recursive construction of the expansion coefficients lambda_j and vectors u_j.

Hierarchy (n >= 1, lambda_1 = -N|beta|, u_0 = vacuum x a_empty):

    (K1 - lambda_1) u_n + K_{3/2} u_{n-1} - sum_{j=2}^{floor(n/2)+1} lambda_j u_{n-2j+2} = 0

Even n fixes lambda_{n/2+1} = -<f_n, u_0>; every u_n comes from the shifted
inverse of K1 - lambda_1 on the complement of u_0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, SingularResolventError
from .hamiltonian import hamiltonian_at


def _inner(a, b):
    """<a, b>, linear in a."""
    return np.vdot(b, a)


def solve_shifted(ops, f):
    """u with (dGamma(M) + T0 - lambda_1) u = f - Pi f and Pi u = 0.

    Pi is the orthogonal projection on u_0 (index 0).  Division is entrywise in
    the (occupation x a_E) basis.
    """
    f = np.asarray(f, dtype=complex)
    g = f.copy()
    g[0] = 0.0
    d = ops.shift_diag
    bad = (d == 0) & (g != 0)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        occ_i, e = divmod(i, ops.spin_dim)
        occ = ops.basis.occupation(occ_i)
        subset = tuple(l + 1 for l in range(ops.cfg.N) if (e >> l) & 1)
        raise SingularResolventError(
            f"zero denominator at occupation {occ}, subset {subset}", occ, subset)
    u = np.zeros_like(g)
    ok = d != 0
    u[ok] = g[ok] / d[ok]
    return u


@dataclass
class ExpansionResult:
    p: int
    lambdas: list  # lambda_1 .. lambda_{p+1}
    vectors: list  # u_0 .. u_{2p+1}
    residuals: list  # relative residual of hierarchy relation n = 0 .. 2p+1
    forcing: list = field(default_factory=list, repr=False)  # f_n, n = 1 .. 2p+1
    lambda_imag: float = 0.0

    @property
    def parities(self):
        return ["even" if j % 2 == 0 else "odd" for j in range(len(self.vectors))]

    def energy_series(self, h, order=None):
        order = len(self.lambdas) if order is None else order
        return sum(lam * h ** (j + 1) for j, lam in enumerate(self.lambdas[:order]))

    def state_series(self, h, order=None):
        order = len(self.vectors) - 1 if order is None else order
        return sum(u * h ** (j / 2) for j, u in enumerate(self.vectors[:order + 1]))

    def summary(self):
        return {
            "p": self.p,
            "lambdas": [float(x) for x in self.lambdas],
            "residuals": [float(x) for x in self.residuals],
            "parities": self.parities,
            "vector_norms": [float(np.linalg.norm(u)) for u in self.vectors],
            "lambda_imag_max": float(self.lambda_imag),
        }


def _check_expandable(ops, p, n_needed):
    ops.cfg.require_field()
    if ops.basis.n_max < n_needed:
        raise PreconditionError(
            f"order p={p} needs photon cutoff n_max >= {n_needed}, got {ops.basis.n_max}")
    if not ops.modes.infrared_safe:
        raise PreconditionError("mode frequencies must be strictly positive")
    chi = ops.modes.chi
    if chi is not None and not chi.vanishes_near_zero and p > 1:
        raise PreconditionError(
            "chi does not vanish near k = 0: expansion is only available up to p = 1")


def _relation(ops, n, vectors, lambdas):
    """Terms of hierarchy relation n; returns (residual vector, scale)."""
    terms = [ops.shift_diag * vectors[n]]
    if n >= 1:
        terms.append(ops.k32 @ vectors[n - 1])
    for j in range(2, n // 2 + 2):
        if j - 1 < len(lambdas):
            terms.append(-lambdas[j - 1] * vectors[n - 2 * j + 2])
    scale = max(np.linalg.norm(t) for t in terms)
    return sum(terms), scale


def expand(ops, p):
    """lambda_1..lambda_{p+1} and u_0..u_{2p+1} for the discrete model."""
    if p < 0:
        raise PreconditionError("order p must be >= 0")
    _check_expandable(ops, p, 2 * p + 2)
    u = [ops.u0()]
    lambdas = [ops.lambda1]
    forcing = []
    imag = 0.0
    for n in range(1, 2 * p + 2):
        f = -(ops.k32 @ u[n - 1])
        top = n // 2 if n % 2 == 0 else n // 2 + 1
        for j in range(2, top + 1):
            f = f + lambdas[j - 1] * u[n - 2 * j + 2]
        if n % 2 == 0:
            lam = -_inner(f, u[0])
            imag = max(imag, abs(lam.imag))
            lambdas.append(float(lam.real))
        forcing.append(f)
        u.append(solve_shifted(ops, f))
    residuals = []
    for n in range(len(u)):
        r, scale = _relation(ops, n, u, lambdas)
        residuals.append(float(np.linalg.norm(r) / scale) if scale > 0 else 0.0)
    return ExpansionResult(p, lambdas, u, residuals, forcing, imag)


def second_order(ops):
    """lambda_2 two ways: -<f_2, u_0> with f_2 = -K u_1, and <u_1, K u_0>.

    Only u_1 is needed, so a photon cutoff of 1 suffices.
    """
    _check_expandable(ops, 0, 1)
    u0 = ops.u0()
    u1 = solve_shifted(ops, -(ops.k32 @ u0))
    f2 = -(ops.k32 @ u1)
    via_forcing = -_inner(f2, u0)
    via_overlap = _inner(u1, ops.k32 @ u0)
    return complex(via_forcing), complex(via_overlap), u1


def residual(ops, result, h):
    """|| (H(h) - sum lambda_j h^j) sum u_j h^(j/2) ||."""
    U = result.state_series(h)
    H = hamiltonian_at(ops, h)
    return float(np.linalg.norm(H @ U - result.energy_series(h) * U))
