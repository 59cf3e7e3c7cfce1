"""Brute-force ground states of the truncated H(h) and convergence-rate studies."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .closed_form import B_classical_grid
from .errors import EigensolverError, HermiticityError, PreconditionError
from .hamiltonian import hamiltonian_at

DENSE_BELOW = 2000


class DegeneracyWarning(UserWarning):
    """Lowest two eigenvalues closer than the gap tolerance."""


@dataclass
class GroundStateResult:
    energy: float
    state: np.ndarray
    gap: float
    residual: float
    method: str
    h: float | None = None
    photon_number: float | None = None


def ground_state(H, tol=0.0, seed=0, gap_tol=1e-8, number_diag=None, h=None):
    """Lowest eigenpair of a Hermitian operator, phase-fixed so state[0] >= 0.

    Dense diagonalization below ``DENSE_BELOW``, otherwise Lanczos (ARPACK)
    started from a seeded random vector.  ``gap_tol`` is relative to |E|.
    """
    dim = H.shape[0]
    if dim < DENSE_BELOW:
        w, v = la.eigh(H.toarray() if sp.issparse(H) else np.asarray(H), subset_by_index=[0, min(1, dim - 1)])
        method = "dense"
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        try:
            w, v = eigsh(H, k=2, which="SA", v0=v0, tol=tol, maxiter=20 * dim)
        except ArpackNoConvergence as exc:
            raise EigensolverError(f"Lanczos did not converge: {exc}") from exc
        order = np.argsort(w)
        w, v = w[order], v[:, order]
        method = "lanczos"
    E = float(w[0])
    phi = v[:, 0].astype(complex)
    c = phi[0]
    if abs(c) > 0:
        phi = phi * (np.conj(c) / abs(c))
    phi = phi / np.linalg.norm(phi)
    residual = float(np.linalg.norm(H @ phi - E * phi))
    scale = float(abs(H).sum(axis=1).max()) if sp.issparse(H) else float(np.abs(H).sum(axis=1).max())
    if residual > max(tol, 1e-9) * max(scale, 1.0):
        raise EigensolverError(f"eigenpair residual {residual:.3e} too large", residual)
    gap = float(w[1] - w[0]) if len(w) > 1 else math.inf
    if gap < gap_tol * abs(E):
        warnings.warn(f"possible degeneracy: gap {gap:.3e} at E = {E:.6e}", DegeneracyWarning)
    nbar = None if number_diag is None else float(np.real(np.vdot(phi, number_diag * phi)))
    return GroundStateResult(E, phi, gap, residual, method, h, nbar)


def expectation(op, state, imag_tol=1e-11):
    """Real part of <op state, state>; raises if the imaginary part exceeds imag_tol."""
    val = np.vdot(state, op @ state)
    if abs(val.imag) > imag_tol:
        raise HermiticityError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def h_safe(ops):
    """Largest h with 4 h^(1/2)/|beta| 2^(1+N/2) sum_{l,m} |A_m(x_l)| <= 1."""
    N = ops.cfg.N
    S = float(np.linalg.norm(ops.modes.spin_couplings, axis=2).sum())
    if S == 0:
        return math.inf
    return (ops.cfg.beta_norm / (4.0 * 2.0 ** (1 + N / 2) * S)) ** 2


def fit_slope(hs, values):
    return float(np.polyfit(np.log(hs), np.log(values), 1)[0])


@dataclass
class SlopeReport:
    h_list: list
    energies: list
    energy_slopes: dict  # truncation order p -> slope or None
    field_slopes: dict  # observable label -> slope or None
    overlap_ratios: list  # ||phi_h - u0|| / h^(1/2)
    photon_numbers: list
    h_safe: float
    table: list = field(default_factory=list)
    flagged: list = field(default_factory=list)

    @property
    def overlap_variation(self):
        r = np.array(self.overlap_ratios)
        if r.min() == 0:
            return 1.0 if r.max() == 0 else math.inf
        return float(r.max() / r.min())

    def to_dict(self):
        return {
            "h_list": self.h_list,
            "energies": self.energies,
            "energy_slopes": {str(k): v for k, v in self.energy_slopes.items()},
            "field_slopes": self.field_slopes,
            "overlap_ratios": self.overlap_ratios,
            "overlap_variation": self.overlap_variation,
            "photon_numbers": self.photon_numbers,
            "h_safe": self.h_safe,
            "flagged": self.flagged,
        }


def _observable_label(kind, x, m):
    return f"{kind}{m}@({x[0]:g},{x[1]:g},{x[2]:g})"


def _slope_or_flag(hs, diffs, floors, label, flagged):
    keep = [i for i, (d, f) in enumerate(zip(diffs, floors)) if d > f]
    for i in range(len(hs)):
        if i not in keep:
            flagged.append(f"{label}: h={hs[i]:g} at noise floor ({diffs[i]:.2e})")
    if len(keep) < 2:
        return None
    return fit_slope([hs[i] for i in keep], [diffs[i] for i in keep])


def convergence_study(ops, result, h_list, observables=(), seed=0, tol=0.0):
    """Energy, overlap and field convergence rates of the truncated model.

    ``observables`` holds (kind, x, m) with kind "B" or "E"; B is compared with
    the grid-sum classical field of the same discretization, E with zero.
    """
    hs = [float(h) for h in h_list]
    if len(hs) < 4 or any(h <= 0 for h in hs) or any(a <= b for a, b in zip(hs, hs[1:])):
        raise PreconditionError("h_list needs >= 4 positive, strictly decreasing values")
    hsafe = h_safe(ops)
    flagged = [f"h={h:g} exceeds h_safe={hsafe:.3g}" for h in hs if h > hsafe]
    u0 = ops.u0()
    number_diag = np.repeat(ops.basis.photon_numbers, ops.spin_dim).astype(float)
    energies, overlaps, nbars, table = [], [], [], []
    obs_vals = {(_observable_label(k, x, m)): [] for k, x, m in observables}
    obs_ref = {key: [] for key in obs_vals}
    for h in hs:
        H = hamiltonian_at(ops, h)
        gs = ground_state(H, tol=tol, seed=seed, number_diag=number_diag, h=h)
        energies.append(gs.energy)
        overlaps.append(float(np.linalg.norm(gs.state - u0)))
        nbars.append(gs.photon_number)
        row = {"h": h, "E_h": gs.energy, "gap": gs.gap, "overlap": overlaps[-1], "N": gs.photon_number}
        for kind, x, m in observables:
            key = _observable_label(kind, x, m)
            op = ops.magnetic(x, m, h) if kind == "B" else ops.electric(x, m, h)
            val = expectation(op, gs.state)
            ref = float(B_classical_grid(ops.modes.grid, ops.modes.chi, ops.cfg, x, h)[m - 1]) if kind == "B" else 0.0
            obs_vals[key].append(val)
            obs_ref[key].append(ref)
            row[key] = val
            row[key + ":class"] = ref
        table.append(row)
    eps = np.finfo(float).eps
    energy_floor = [1e3 * eps * max(abs(E), h) for E, h in zip(energies, hs)]
    energy_slopes = {}
    for p in range(1, len(result.lambdas) + 1):
        diffs = [abs(E - result.energy_series(h, p)) for E, h in zip(energies, hs)]
        energy_slopes[p] = _slope_or_flag(hs, diffs, energy_floor, f"energy p={p}", flagged)
    field_slopes = {}
    for key in obs_vals:
        diffs = [abs(v - r) for v, r in zip(obs_vals[key], obs_ref[key])]
        floors = [1e3 * eps * max(abs(r), h) for r, h in zip(obs_ref[key], hs)]
        field_slopes[key] = _slope_or_flag(hs, diffs, floors, key, flagged)
    ratios = [o / math.sqrt(h) for o, h in zip(overlaps, hs)]
    return SlopeReport(hs, energies, energy_slopes, field_slopes, ratios, nbars, hsafe, table, flagged)
