"""Run configuration: a TOML file parsed into nested pydantic models.

Unknown keys are rejected at every level.  Cross-field constraints are
checked by :func:`validate_run` before any computation starts.

Schema (all tables optional; ``spinqed expand --dump-config`` prints the defaults)::

    seed = 0
    output_dir = "spinqed-out"

    [chi]          kind, infrared_radius, center, width, power, scale, amplitude
    [grid]         radial_order, angular_order, r_max, compress
    [spins]        beta = [bx, by, bz], positions = [[x, y, z], ...]
    [truncation]   n_max, dimension_budget
    [expansion]    p
    [oracle]       h_list, tol, observables = [{kind = "B", x = [..], m = 3}, ...]
    [fieldmap]     h, x = [lo, hi, count], y = [...], z = [...]
    [tolerances]   method, rtol, atol, max_evals, radial_order, angular_order
    [compare]      criteria = [1, ..., 12]
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Literal, Tuple

import numpy as np
import tomli
import tomli_w
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .closed_form import QuadratureSpec
from .errors import ConfigurationError, PreconditionError, ResourceError
from .fock_space import DEFAULT_BUDGET, basis_dimension
from .momentum_grid import ANGULAR_ORDERS, CHI_KINDS, ChiProfile, SpinConfig

Vec3 = Tuple[float, float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ChiSection(_Strict):
    kind: Literal["annular-bump", "polynomial-gaussian"] = "annular-bump"
    infrared_radius: float = Field(1.0, ge=0.0)
    center: float = 2.0
    width: float = Field(1.0, gt=0.0)
    power: int = Field(1, ge=1)
    scale: float = Field(1.0, gt=0.0)
    amplitude: float = 1.0

    def profile(self):
        return ChiProfile(**self.model_dump())


class GridSection(_Strict):
    radial_order: int = Field(2, ge=2)
    angular_order: int = 6
    r_max: float = Field(3.0, gt=0.0)
    compress: bool = True

    @field_validator("angular_order")
    @classmethod
    def _known_design(cls, v):
        if v not in ANGULAR_ORDERS:
            raise ValueError(f"angular_order must be one of {ANGULAR_ORDERS}")
        return v


class SpinSection(_Strict):
    beta: Vec3 = (0.0, 0.0, 1.0)
    positions: List[Vec3] = [(0.0, 0.0, 0.0)]

    def spin_config(self):
        return SpinConfig(self.beta, self.positions)


class TruncationSection(_Strict):
    n_max: int = Field(4, ge=0)
    dimension_budget: int = Field(DEFAULT_BUDGET, ge=1)


class ExpansionSection(_Strict):
    p: int = Field(1, ge=0)


class Observable(_Strict):
    kind: Literal["B", "E"] = "B"
    x: Vec3
    m: int = Field(3, ge=1, le=3)


class OracleSection(_Strict):
    h_list: List[float] = [0.2, 0.1, 0.05, 0.025]
    tol: float = Field(0.0, ge=0.0)
    observables: List[Observable] = []


class FieldMapSection(_Strict):
    h: float = Field(1.0, gt=0.0)
    x: Vec3 = (-1.0, 1.0, 5)
    y: Vec3 = (-1.0, 1.0, 5)
    z: Vec3 = (0.0, 0.0, 1)

    def points(self):
        axes = []
        for lo, hi, n in (self.x, self.y, self.z):
            if n < 1 or n != int(n):
                raise ConfigurationError("fieldmap axis count must be a positive integer")
            axes.append(np.linspace(lo, hi, int(n)))
        X, Y, Z = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])


class ToleranceSection(_Strict):
    method: Literal["bessel", "grid-sum"] = "bessel"
    rtol: float = Field(1e-10, gt=0.0)
    atol: float = Field(1e-14, ge=0.0)
    max_evals: int = Field(2000, ge=1)
    radial_order: int = Field(96, ge=2)
    angular_order: int = 38

    def quadrature(self):
        return QuadratureSpec(**self.model_dump())


class CompareSection(_Strict):
    criteria: List[int] = list(range(1, 13))

    @field_validator("criteria")
    @classmethod
    def _known(cls, v):
        if not v or any(c < 1 or c > 12 for c in v):
            raise ValueError("criteria must be a non-empty subset of 1..12")
        return v


class RunConfig(_Strict):
    seed: int = 0
    output_dir: str = "spinqed-out"
    chi: ChiSection = ChiSection()
    grid: GridSection = GridSection()
    spins: SpinSection = SpinSection()
    truncation: TruncationSection = TruncationSection()
    expansion: ExpansionSection = ExpansionSection()
    oracle: OracleSection = OracleSection()
    fieldmap: FieldMapSection = FieldMapSection()
    tolerances: ToleranceSection = ToleranceSection()
    compare: CompareSection = CompareSection()


def parse_config(text):
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigurationError(f"config is not valid TOML: {exc}") from exc
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid config:\n{exc}") from exc


def load_config(path):
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def dump_config(cfg):
    return tomli_w.dumps(cfg.model_dump(mode="json"))


def validate_run(cfg, command="expand"):
    """Cross-field checks; raise before anything expensive is built."""
    chi = cfg.chi.profile()
    spins = cfg.spins.spin_config()
    spins.require_field()
    if cfg.grid.r_max <= chi.infrared_radius:
        raise ConfigurationError(f"r_max={cfg.grid.r_max} must exceed infrared_radius={chi.infrared_radius}")
    if cfg.tolerances.angular_order not in ANGULAR_ORDERS:
        raise ConfigurationError(f"tolerances.angular_order must be one of {ANGULAR_ORDERS}")
    p, n_max = cfg.expansion.p, cfg.truncation.n_max
    if command in ("expand", "oracle"):
        if n_max < 2 * p + 2:
            raise PreconditionError(f"order p={p} needs n_max >= 2p+2 = {2 * p + 2}, got n_max={n_max}")
        if p > 1 and not chi.vanishes_near_zero:
            raise PreconditionError(f"order p={p} needs chi vanishing near k = 0 (infrared_radius > 0)")
        # upper bound on K: 2 modes per node, before compression
        per_shell = 2 * cfg.grid.angular_order
        if cfg.grid.compress:
            per_shell = min(per_shell, 3 * spins.N)
        K = cfg.grid.radial_order * per_shell
        dim = basis_dimension(K, n_max) * 2 ** spins.N
        if dim > cfg.truncation.dimension_budget:
            raise ResourceError(f"estimated dimension {dim} exceeds budget {cfg.truncation.dimension_budget}",
                                dimension=dim)
    if command == "oracle":
        hs = cfg.oracle.h_list
        if len(hs) < 4 or any(h <= 0 for h in hs) or any(a <= b for a, b in zip(hs, hs[1:])):
            raise PreconditionError("oracle.h_list needs >= 4 positive, strictly decreasing values")
    return chi, spins


__all__ = ["RunConfig", "parse_config", "load_config", "dump_config", "validate_run", "CHI_KINDS"]
