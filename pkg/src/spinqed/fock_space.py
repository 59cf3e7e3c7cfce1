"""Truncated bosonic Fock space over K discrete modes.

States are stored as sorted multisets of occupied mode indices, e.g. ``(0, 0, 3)``
is n_0 = 2, n_3 = 1.  Sectors are ordered by photon number and each sector is
enumerated by ``combinations_with_replacement``, which reproduces descending
lexicographic order of the occupation vectors.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, ResourceError

DEFAULT_BUDGET = 2_000_000
SQRT_HALF = 1.0 / math.sqrt(2.0)


def basis_dimension(K, n_max):
    return math.comb(K + n_max, n_max)


@dataclass(eq=False)
class OccupationBasis:
    K: int
    n_max: int
    states: list
    index: dict
    sector_offsets: np.ndarray  # sector m occupies [offsets[m], offsets[m+1])
    _transitions: tuple | None = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.states)

    @property
    def photon_numbers(self):
        return np.repeat(np.arange(self.n_max + 1), np.diff(self.sector_offsets))

    def occupation(self, i):
        n = np.zeros(self.K, dtype=int)
        for mode in self.states[i]:
            n[mode] += 1
        return tuple(int(v) for v in n)

    def index_of(self, occupation):
        ms = tuple(mode for mode, c in enumerate(occupation) for _ in range(c))
        return self.index[ms]

    def transitions(self):
        """Creation matrix elements: arrays (src, dst, mode, sqrt(n_mode + 1))."""
        if self._transitions is None:
            src, dst, mode, fac = [], [], [], []
            stop = self.sector_offsets[self.n_max]
            for i in range(stop):
                ms = self.states[i]
                for k in range(self.K):
                    new = list(ms)
                    bisect.insort(new, k)
                    src.append(i)
                    dst.append(self.index[tuple(new)])
                    mode.append(k)
                    fac.append(math.sqrt(new.count(k)))
            self._transitions = (np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                                 np.array(mode, dtype=np.int64), np.array(fac))
        return self._transitions


def enumerate_basis(K, n_max, budget=DEFAULT_BUDGET):
    if K < 1 or n_max < 0:
        raise ConfigurationError("need K >= 1 modes and n_max >= 0")
    dim = basis_dimension(K, n_max)
    if dim > budget:
        raise ResourceError(f"Fock dimension {dim} exceeds budget {budget}", dimension=dim)
    states, offsets = [], [0]
    for m in range(n_max + 1):
        states.extend(combinations_with_replacement(range(K), m))
        offsets.append(len(states))
    index = {s: i for i, s in enumerate(states)}
    return OccupationBasis(K, n_max, states, index, np.array(offsets))


def number_operator(basis):
    return sp.diags(basis.photon_numbers.astype(float), format="csr")


def dgamma_diagonal(basis, frequencies):
    frequencies = np.asarray(frequencies, dtype=float)
    if len(frequencies) != basis.K:
        raise ConfigurationError(f"{len(frequencies)} frequencies for {basis.K} modes")
    return np.array([frequencies[list(s)].sum() if s else 0.0 for s in basis.states])


def dGamma_M(basis, frequencies):
    """Free photon energy sum_i n_i |k_i| as a diagonal operator."""
    return sp.diags(dgamma_diagonal(basis, frequencies), format="csr")


def segal_field(basis, f):
    """Phi_S(f) = (a(f) + a^dagger(f))/sqrt(2), a^dagger linear in f.

    Creation out of the top sector is dropped.
    """
    f = np.asarray(f, dtype=complex)
    if len(f) != basis.K:
        raise ConfigurationError(f"mode vector of length {len(f)} for {basis.K} modes")
    src, dst, mode, fac = basis.transitions()
    up = sp.coo_matrix((f[mode] * fac * SQRT_HALF, (dst, src)), shape=(basis.dim, basis.dim)).tocsr()
    return (up + up.conj().T).tocsr()


def sector_mask(basis, parity, spin_dim=1):
    want = 0 if parity == "even" else 1
    if parity not in ("even", "odd"):
        raise ConfigurationError(f"parity must be 'even' or 'odd', got {parity!r}")
    return np.repeat(basis.photon_numbers % 2 == want, spin_dim)


def sector_project(state, basis, parity, spin_dim=1):
    """Zero the coefficients in photon sectors of the other parity."""
    out = np.array(state, dtype=complex, copy=True)
    out[~sector_mask(basis, parity, spin_dim)] = 0.0
    return out


def photon_number_expectation(state, basis, spin_dim=1):
    n = np.repeat(basis.photon_numbers, spin_dim)
    return float(np.real(np.vdot(state, n * state)))
