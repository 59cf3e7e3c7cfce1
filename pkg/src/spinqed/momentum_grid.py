"""Discretized transverse photon modes and their coupling amplitudes.

A mode is a pair (node i, polarization s) with index ``2*i + s``.  Quadrature
weights are folded into amplitudes as ``sqrt(w_i)`` so that Euclidean norms in
mode space approximate L2 norms in momentum space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvalidDomainError

TWO_PI_CUBED = (2.0 * math.pi) ** 3
CHI_KINDS = ("annular-bump", "polynomial-gaussian")


@dataclass(frozen=True)
class ChiProfile:
    """Radial ultraviolet/infrared cutoff r -> chi(r).

    ``annular-bump``: ``amplitude * exp(-1/(1-t^2))`` with ``t = (r-center)/width``
    on ``|t| < 1``.  ``polynomial-gaussian``: ``amplitude * r**power *
    exp(-r^2/(2 scale^2))``.  Both are forced to zero on ``r <= infrared_radius``.
    """

    kind: str = "annular-bump"
    infrared_radius: float = 1.0
    center: float = 2.0
    width: float = 1.0
    power: int = 1
    scale: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in CHI_KINDS:
            raise ConfigurationError(f"unknown chi kind {self.kind!r}; expected one of {CHI_KINDS}")
        if not self.infrared_radius >= 0:
            raise InvalidDomainError("infrared_radius must be >= 0")
        if self.kind == "annular-bump" and not self.width > 0:
            raise InvalidDomainError("bump width must be > 0")
        if self.kind == "polynomial-gaussian":
            if not self.scale > 0:
                raise InvalidDomainError("gaussian scale must be > 0")
            if int(self.power) != self.power or self.power < 0:
                raise InvalidDomainError("power must be a non-negative integer")
        if not math.isfinite(self.amplitude):
            raise InvalidDomainError("amplitude must be finite")

    @classmethod
    def bump(cls, center=2.0, width=1.0, infrared_radius=1.0, amplitude=1.0):
        return cls("annular-bump", infrared_radius, center=center, width=width, amplitude=amplitude)

    @classmethod
    def polygauss(cls, power=1, scale=1.0, infrared_radius=0.0, amplitude=1.0):
        return cls("polynomial-gaussian", infrared_radius, power=power, scale=scale, amplitude=amplitude)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "annular-bump":
            t = (r - self.center) / self.width
            inside = np.abs(t) < 1.0
            safe = np.where(inside, 1.0 - t * t, 1.0)
            val = np.where(inside, np.exp(-1.0 / safe), 0.0)
        else:
            val = r ** self.power * np.exp(-0.5 * (r / self.scale) ** 2)
        val = np.where(r <= self.infrared_radius, 0.0, val)
        return self.amplitude * val

    def radial_support(self):
        """Finite interval outside which chi^2 is zero or below 1e-40 of its scale."""
        lo = self.infrared_radius
        if self.kind == "annular-bump":
            return max(lo, self.center - self.width, 0.0), self.center + self.width
        return lo, self.scale * (14.0 + 2.0 * self.power)

    @property
    def vanishes_near_zero(self):
        if self.infrared_radius > 0:
            return True
        return self.kind == "annular-bump" and self.center - self.width > 0

    @property
    def zero_at_origin(self):
        return float(self(0.0)) == 0.0

    def scaled(self, c):
        return ChiProfile(self.kind, self.infrared_radius, self.center, self.width,
                          self.power, self.scale, self.amplitude * c)


@dataclass(frozen=True)
class SpinConfig:
    beta: tuple
    positions: tuple

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float).reshape(3)
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        if len(pos) < 1:
            raise ConfigurationError("at least one spin is required")
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(pos))):
            raise InvalidDomainError("beta and positions must be finite")
        object.__setattr__(self, "beta", tuple(float(b) for b in beta))
        object.__setattr__(self, "positions", tuple(tuple(float(c) for c in p) for p in pos))

    @property
    def N(self):
        return len(self.positions)

    @property
    def beta_vec(self):
        return np.array(self.beta)

    @property
    def beta_norm(self):
        return float(np.linalg.norm(self.beta))

    @property
    def n_beta(self):
        self.require_field()
        return self.beta_vec / self.beta_norm

    @property
    def xs(self):
        return np.array(self.positions)

    def require_field(self):
        if self.beta_norm == 0:
            raise InvalidDomainError("constant field beta must be nonzero")


# Lebedev designs, weights normalized to 1; exact for polynomials up to degree 3, 5, 7, 9.
def _perms(v):
    out = set()
    a, b, c = v
    for p in {(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)}:
        for sx in (1, -1):
            for sy in (1, -1):
                for sz in (1, -1):
                    out.add((sx * p[0], sy * p[1], sz * p[2]))
    return sorted(out, reverse=True)


_A1 = _perms((1.0, 0.0, 0.0))
_A2 = _perms((1 / math.sqrt(2), 1 / math.sqrt(2), 0.0))
_A3 = _perms((1 / math.sqrt(3), 1 / math.sqrt(3), 1 / math.sqrt(3)))
_P38, _Q38 = 0.4597008433809831, 0.8880738339771153
_C1 = _perms((_P38, _Q38, 0.0))

_LEBEDEV = {
    6: [(_A1, 1 / 6)],
    14: [(_A1, 1 / 15), (_A3, 3 / 40)],
    26: [(_A1, 1 / 21), (_A2, 4 / 105), (_A3, 9 / 280)],
    38: [(_A1, 1 / 105), (_A3, 9 / 280), (_C1, 1 / 35)],
}
ANGULAR_ORDERS = tuple(sorted(_LEBEDEV))


def angular_design(order):
    """Unit vectors and weights (summing to 4*pi) of the tabulated spherical design."""
    if order not in _LEBEDEV:
        raise ConfigurationError(f"angular_order {order} not in supported set {ANGULAR_ORDERS}")
    pts, wts = [], []
    for group, w in _LEBEDEV[order]:
        pts.extend(group)
        wts.extend([w] * len(group))
    return np.array(pts), 4.0 * math.pi * np.array(wts)


def polarization_pair(k):
    """Orthonormal transverse pair (e1, e2) for momentum k.

    e1 = k^z/|k^z|, e2 = k^e1/|k| so that e1^e2 = k/|k|; along the z axis the
    pair is (x, y).
    """
    k = np.asarray(k, dtype=float)
    nk = np.linalg.norm(k)
    if nk == 0:
        raise InvalidDomainError("polarization undefined at k = 0")
    kz = np.cross(k, (0.0, 0.0, 1.0))
    nkz = np.linalg.norm(kz)
    if nkz / nk < 1e-13:
        return np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    e1 = kz / nkz
    e2 = np.cross(k, e1) / nk
    return e1, e2


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MomentumGrid:
    nodes: np.ndarray
    weights: np.ndarray
    polarizations: np.ndarray  # (n, 2, 3)
    shell: np.ndarray  # radial index of each node
    infrared_radius: float = 0.0

    @property
    def node_count(self):
        return len(self.nodes)

    @property
    def mode_count(self):
        return 2 * len(self.nodes)

    @property
    def norms(self):
        return np.linalg.norm(self.nodes, axis=1)

    @property
    def frequencies(self):
        return np.repeat(self.norms, 2)

    @property
    def mode_shell(self):
        return np.repeat(self.shell, 2)

    def integrate(self, f):
        """Sum of w_i f(k_i) for a vectorized integrand f((n,3)) -> (n,)."""
        return float(np.dot(self.weights, f(self.nodes)))

    def csv_rows(self):
        header = ["k1", "k2", "k3", "w", "e1x", "e1y", "e1z", "e2x", "e2y", "e2z"]
        rows = [list(k) + [w] + list(p[0]) + list(p[1])
                for k, w, p in zip(self.nodes, self.weights, self.polarizations)]
        return header, rows


def build_grid(chi, radial_order, angular_order, r_max):
    """Gauss-Legendre radial nodes on [rho, r_max] times a spherical design."""
    rho = float(chi.infrared_radius)
    if radial_order < 2:
        raise ConfigurationError("radial_order must be >= 2")
    if not r_max > rho:
        raise InvalidDomainError(f"r_max={r_max} must exceed infrared radius {rho}")
    dirs, ang_w = angular_design(angular_order)
    x, w = np.polynomial.legendre.leggauss(int(radial_order))
    half = 0.5 * (r_max - rho)
    r = rho + half * (x + 1.0)
    wr = half * w * r * r
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    weights = (wr[:, None] * ang_w[None, :]).reshape(-1)
    shell = np.repeat(np.arange(len(r)), len(dirs))
    pols = np.array([polarization_pair(k) for k in nodes])
    return MomentumGrid(_frozen(nodes), _frozen(weights), _frozen(pols), _frozen(shell), rho)


def _prefactor(grid, chi):
    kn = grid.norms
    return np.sqrt(grid.weights) * chi(kn) * np.sqrt(kn) / TWO_PI_CUBED ** 0.5


def coupling_amplitudes(grid, chi, x):
    """Mode coefficients of a_m(x) + i b_m(x), shape (3, K).

    Entry [m, 2i+s] is sqrt(w_i) chi(|k|)|k|^(1/2)(2pi)^(-3/2)
    (sin(k.x) + i cos(k.x)) eps_s . (k ^ e_m)/|k|.
    """
    x = np.asarray(x, dtype=float)
    k = grid.nodes
    kn = grid.norms
    phase = np.sin(k @ x) + 1j * np.cos(k @ x)
    pre = _prefactor(grid, chi) * phase
    # eps . (k ^ e_m) = e_m . (eps ^ k)
    geo = np.cross(grid.polarizations, k[:, None, :]) / kn[:, None, None]  # (n, 2, 3)
    amp = pre[:, None, None] * geo
    return amp.reshape(-1, 3).T.copy()


def electric_amplitudes(grid, chi, x):
    """Mode coefficients of the electric field mode function, shape (3, K).

    Coulomb-gauge convention -chi|k|^(1/2)(2pi)^(-3/2)(sin(k.x) + i cos(k.x))
    pi_k(e_m), i.e. the time derivative of the same free field whose curl
    gives the magnetic amplitudes.
    """
    x = np.asarray(x, dtype=float)
    k = grid.nodes
    phase = np.sin(k @ x) + 1j * np.cos(k @ x)
    pre = -_prefactor(grid, chi) * phase
    amp = pre[:, None, None] * grid.polarizations  # eps . pi_k(e_m) = eps_m
    return amp.reshape(-1, 3).T.copy()


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Photon modes actually used to build the Fock space.

    ``frequencies[j]`` is the energy of mode j and ``spin_couplings[l, m]`` the
    coefficients of a_m(x_l) + i b_m(x_l).  When built from a grid, ``projector``
    Q maps full-grid coefficients f to mode coefficients ``conj(Q) @ f``
    (identity when no compression was applied).
    """

    frequencies: np.ndarray
    spin_couplings: np.ndarray  # (N, 3, K)
    grid: MomentumGrid | None = None
    chi: ChiProfile | None = None
    projector: np.ndarray | None = field(default=None, repr=False)

    @property
    def count(self):
        return len(self.frequencies)

    @property
    def infrared_safe(self):
        return bool(np.all(self.frequencies > 0))

    def _reduce(self, amps):
        if self.projector is None:
            return amps
        return amps @ self.projector.conj().T

    def _need_grid(self):
        if self.grid is None:
            raise ConfigurationError("field evaluation at arbitrary x needs a grid-backed ModeSet")

    def magnetic(self, x):
        self._need_grid()
        return self._reduce(coupling_amplitudes(self.grid, self.chi, x))

    def electric(self, x):
        self._need_grid()
        return self._reduce(electric_amplitudes(self.grid, self.chi, x))


def mode_set(grid, chi, cfg, compress=False, rank_tol=1e-12):
    """Modes of ``grid`` as seen by the spins of ``cfg``.

    With ``compress`` each frequency shell is rotated onto the span of the
    spin coupling vectors restricted to it and the remaining modes (which never
    leave the vacuum) are dropped.  The rotation commutes with dGamma(M), so
    energies, eigenvectors and field expectations are unchanged.
    """
    full = np.array([coupling_amplitudes(grid, chi, x) for x in cfg.xs])  # (N, 3, K)
    if not compress:
        return ModeSet(grid.frequencies, full, grid, chi, None)
    freq = grid.frequencies
    shells = grid.mode_shell
    rows, new_freq = [], []
    K = grid.mode_count
    for s in np.unique(shells):
        idx = np.flatnonzero(shells == s)
        block = full[:, :, idx].reshape(-1, len(idx))
        _, sv, vh = np.linalg.svd(block, full_matrices=False)
        if sv.size == 0 or sv[0] == 0:
            continue
        r = int(np.sum(sv > rank_tol * sv[0]))
        q = np.zeros((r, K), dtype=complex)
        q[:, idx] = vh[:r]
        rows.append(q)
        new_freq.extend([freq[idx[0]]] * r)
    if rows:
        Q = np.vstack(rows)
    else:
        # fully decoupled: keep one softest mode so the Fock space is nonempty
        Q = np.zeros((1, K), dtype=complex)
        Q[0, int(np.argmin(freq))] = 1.0
        new_freq = [float(freq.min())]
    Q = _frozen(Q)
    couplings = full @ Q.conj().T
    return ModeSet(_frozen(np.array(new_freq, dtype=float)), couplings, grid, chi, Q)
