"""Spin space (C^2)^N: Pauli operators, the Zeeman operator T0 and the a_E basis.

Site 1 is the leftmost Kronecker factor.  Subsets E of {1..N} are encoded as
bitmasks with bit (l-1) set when l is in E.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ConfigurationError

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli(m, lam, N):
    """sigma_m acting on site ``lam`` of N spins (1-based indices)."""
    if not 1 <= m <= 3:
        raise ConfigurationError(f"Pauli index m={m} outside 1..3")
    if not 1 <= lam <= N:
        raise ConfigurationError(f"site index {lam} outside 1..{N}")
    factors = [np.eye(2, dtype=complex)] * N
    factors[lam - 1] = SIGMA[m - 1]
    return reduce(np.kron, factors)


def field_dot_sigma(beta):
    return sum(b * s for b, s in zip(beta, SIGMA))


def t0_operator(cfg):
    """T0 = sum_l sum_m beta_m sigma_m^[l]."""
    N = cfg.N
    out = np.zeros((2 ** N, 2 ** N), dtype=complex)
    for lam in range(1, N + 1):
        for m in range(1, 4):
            if cfg.beta[m - 1] != 0:
                out += cfg.beta[m - 1] * pauli(m, lam, N)
    return out


def _fix_phase(v):
    j = np.flatnonzero(np.abs(v) > 1e-14)[0]
    return v * (abs(v[j]) / v[j])


def popcount(e):
    return bin(e).count("1")


@dataclass(frozen=True, eq=False)
class SpinBasis:
    N: int
    beta_norm: float
    b0: np.ndarray
    b1: np.ndarray
    unitary: np.ndarray  # column e is a_E for bitmask e

    def a(self, subset):
        """a_E for an iterable of 1-based sites or a bitmask."""
        if not isinstance(subset, (int, np.integer)):
            subset = sum(1 << (lam - 1) for lam in subset)
        return self.unitary[:, subset]

    @property
    def zeeman_levels(self):
        """(2|E| - N)|beta| for every bitmask E."""
        sizes = np.array([popcount(e) for e in range(2 ** self.N)])
        return (2 * sizes - self.N) * self.beta_norm

    @property
    def excitation_counts(self):
        return np.array([popcount(e) for e in range(2 ** self.N)])


def spin_basis(cfg):
    cfg.require_field()
    _, vecs = np.linalg.eigh(field_dot_sigma(cfg.n_beta))
    b0 = _fix_phase(vecs[:, 0])
    b1 = _fix_phase(vecs[:, 1])
    N = cfg.N
    cols = []
    for e in range(2 ** N):
        factors = [b1 if (e >> lam) & 1 else b0 for lam in range(N)]
        cols.append(reduce(np.kron, factors))
    return SpinBasis(N, cfg.beta_norm, b0, b1, np.array(cols).T)
