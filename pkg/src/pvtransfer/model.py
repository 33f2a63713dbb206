"""Core domain types, conic conversions, and the bundled reference dataset.

All internal quantities are strictly SI (m, s, kg, rad). Kilometers and
degrees appear only at I/O boundaries (dataset file, CLI configs).
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources

_DATASET_RESOURCE = "paper_dataset.json"
_DATASET_SHA256 = "6e8ff5d3c438697bf7c58340a3c64bf13b4d472536a98e6711bb78129997f07e"


class DatasetError(RuntimeError):
    """Bundled reference data file is missing or corrupt."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Central-field gravitational parameter and sea-level gravity."""
    gamma: float   # gravitational parameter, m^3/s^2
    g0: float      # sea-level gravitational acceleration, m/s^2

    def __post_init__(self) -> None:
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.g0 <= 0.0:
            raise ValueError(f"g0 must be positive, got {self.g0}")


@dataclass(frozen=True)
class Vehicle:
    """Engine and mass properties of the spacecraft."""
    p_max: float   # maximum thrust, N
    isp: float     # specific impulse, s
    m0: float      # initial mass, kg

    def __post_init__(self) -> None:
        if self.p_max <= 0.0:
            raise ValueError(f"p_max must be positive, got {self.p_max}")
        if self.isp <= 0.0:
            raise ValueError(f"isp must be positive, got {self.isp}")
        if self.m0 <= 0.0:
            raise ValueError(f"m0 must be positive, got {self.m0}")


@dataclass(frozen=True)
class OrbitalState:
    """Trajectory point in the rotating orbital frame."""
    t: float        # time, s
    r: float        # radius, m
    v_r: float      # radial velocity, m/s
    v_theta: float  # transversal velocity, m/s
    theta: float    # accumulated angular flight distance, rad (not wrapped)
    chi: float      # plane-change angle, rad
    dv: float       # accumulated characteristic velocity, m/s

    def __post_init__(self) -> None:
        if self.r <= 0.0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.v_theta <= 0.0:
            raise ValueError(f"v_theta must be positive, got {self.v_theta}")
        if self.dv < 0.0:
            raise ValueError(f"dv must be non-negative, got {self.dv}")


@dataclass(frozen=True)
class AdjointState:
    """Reduced costate: in-plane primer components and the dv costate."""
    lam: float     # radial primer component
    mu: float      # transversal primer component
    psi_dv: float  # costate of accumulated dv (equals -1 at departure)


@dataclass(frozen=True)
class AdjointConstants:
    """First-integral constants fixed or solved for per problem kind."""
    e_const: float = 0.0  # out-of-plane primer constant, m/s
    a_const: float = 0.0  # transfer-angle constant, m/s
    c_const: float = 0.0  # transfer-time (Hamiltonian) constant, m/s^2


@dataclass(frozen=True)
class ConicElements:
    """Conic orbit point: semi-latus rectum, eccentricity, true anomaly."""
    l: float  # semi-latus rectum, m
    e: float  # eccentricity
    f: float  # true anomaly, rad

    def __post_init__(self) -> None:
        if self.l <= 0.0:
            raise ValueError(f"semi-latus rectum must be positive, got {self.l}")
        if self.e < 0.0:
            raise ValueError(f"eccentricity must be non-negative, got {self.e}")


def elements_to_state(el: ConicElements, k: PhysicalConstants) -> tuple[float, float, float]:
    """Conic elements to (r, v_r, v_theta) at the given true anomaly.

    Raises ValueError for points beyond the hyperbolic asymptote
    (1 + e*cos f <= 0).
    """
    denom = 1.0 + el.e * math.cos(el.f)
    if denom <= 0.0:
        raise ValueError(
            f"no conic point at f={el.f} rad for e={el.e}: 1 + e*cos f = {denom} <= 0"
        )
    s = math.sqrt(k.gamma / el.l)
    r = el.l / denom
    v_r = s * el.e * math.sin(el.f)
    v_theta = s * denom
    return r, v_r, v_theta


def state_to_elements(r: float, v_r: float, v_theta: float,
                      k: PhysicalConstants) -> ConicElements:
    """Inverse of elements_to_state. Requires r > 0 and v_theta > 0."""
    if r <= 0.0:
        raise ValueError(f"r must be positive, got {r}")
    if v_theta <= 0.0:
        raise ValueError(f"v_theta must be positive, got {v_theta}")
    h = r * v_theta
    l = h * h / k.gamma
    e_cos_f = l / r - 1.0
    e_sin_f = v_r * math.sqrt(l / k.gamma)
    e = math.hypot(e_cos_f, e_sin_f)
    f = math.atan2(e_sin_f, e_cos_f) if e > 0.0 else 0.0
    return ConicElements(l=l, e=e, f=f)


# --- Bundled reference dataset ---

@dataclass(frozen=True)
class TransferRow:
    """One converged (or generating) transfer solution row."""
    i_f_deg: float
    dv1: float          # first-burn dv, m/s
    dv2: float          # second-burn dv, m/s
    dv_total: float     # m/s
    lam0: float
    mu0: float
    e_const: float      # m/s
    a_const: float | None = None    # m/s
    c_const: float | None = None    # m/s^2
    theta_f_deg: float | None = None
    t_f_s: float | None = None
    dtheta_deg: float | None = None
    dt_s: float | None = None
    suspect: bool = False


@dataclass(frozen=True)
class BoundaryOrbit:
    """Orbit point given both as state components and as conic elements."""
    r: float         # m
    v_r: float       # m/s
    v_theta: float   # m/s
    elements: ConicElements


@dataclass(frozen=True)
class PaperDataset:
    constants: PhysicalConstants
    vehicle: Vehicle
    initial: BoundaryOrbit
    final: BoundaryOrbit
    table5: dict[int, TransferRow]
    table6: dict[int, TransferRow]
    table7: dict[int, TransferRow]
    table8: dict[int, TransferRow]

    @property
    def inclinations_deg(self) -> tuple[int, ...]:
        return tuple(sorted(self.table5))


def _orbit(d: dict, r_key: str, vr_key: str, vth_key: str) -> BoundaryOrbit:
    return BoundaryOrbit(
        r=d[r_key] * 1e3,
        v_r=d[vr_key],
        v_theta=d[vth_key],
        elements=ConicElements(l=d["l_km"] * 1e3, e=d["e"],
                               f=math.radians(d["f_deg"])),
    )


def _rows(raw: list[dict], **extra_keys: str) -> dict[int, TransferRow]:
    out: dict[int, TransferRow] = {}
    for row in raw:
        kwargs = {
            "i_f_deg": row["i_f_deg"],
            "dv1": row["dv1_ms"],
            "dv2": row["dv2_ms"],
            "dv_total": row["dv_total_ms"],
            "lam0": row["lam0"],
            "mu0": row["mu0"],
            "e_const": row["e_ms"],
            "suspect": row.get("suspect", False),
        }
        for field_name, json_key in extra_keys.items():
            kwargs[field_name] = row[json_key]
        out[int(row["i_f_deg"])] = TransferRow(**kwargs)
    return out


def load_paper_dataset() -> PaperDataset:
    """Load the bundled reference dataset, verifying its checksum."""
    try:
        blob = resources.files("pvtransfer.data").joinpath(_DATASET_RESOURCE).read_bytes()
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise DatasetError(f"bundled dataset {_DATASET_RESOURCE} is missing") from exc
    digest = hashlib.sha256(blob).hexdigest()
    if digest != _DATASET_SHA256:
        raise DatasetError(
            f"bundled dataset checksum mismatch: expected {_DATASET_SHA256}, got {digest}"
        )
    raw = json.loads(blob)
    k = PhysicalConstants(gamma=raw["constants"]["gamma_m3s2"],
                          g0=raw["constants"]["g0_ms2"])
    veh = Vehicle(p_max=raw["vehicle"]["p_max_kgf"] * k.g0,
                  isp=raw["vehicle"]["isp_s"],
                  m0=raw["vehicle"]["m0_kg"])
    return PaperDataset(
        constants=k,
        vehicle=veh,
        initial=_orbit(raw["initial"], "r_km", "vr_ms", "vtheta_ms"),
        final=_orbit(raw["final"], "r_km", "vfr_ms", "vftheta_ms"),
        table5=_rows(raw["table5"], theta_f_deg="theta_f_deg", t_f_s="t_f_s"),
        table6=_rows(raw["table6"], theta_f_deg="theta_f_deg", t_f_s="t_f_s"),
        table7=_rows(raw["table7"], a_const="a_ms", dtheta_deg="dtheta_deg"),
        table8=_rows(raw["table8"], c_const="c_ms2", dt_s="dt_s"),
    )


def raw_dataset_json() -> dict:
    """Raw dataset contents, for the CLI dump command."""
    blob = resources.files("pvtransfer.data").joinpath(_DATASET_RESOURCE).read_bytes()
    return json.loads(blob)
