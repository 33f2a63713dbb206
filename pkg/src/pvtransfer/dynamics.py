"""Rotating-frame dynamics of the reduced state/costate system.

Thrust-acceleration law, primer magnitude, bang-bang switching function,
and the right-hand sides of the coupled ten-variable system. The engine
flag is an explicit input everywhere: it changes only at located switching
events, never inside a right-hand-side evaluation.

The normal primer component nu is algebraic everywhere: nu = E / v_theta.
The primer magnitude p_hat is an integrated state whose rate applies the
chain rule with d(nu)/dt = (v_r / r) nu, so the switching function
kappa = psi_dv + p_hat carries the accumulated first-integral history
while the thrust direction follows the instantaneous (lam, mu, nu).
On coast arcs the two descriptions coincide exactly; in the coplanar case
(E = 0) p_hat reduces to sqrt(lam^2 + mu^2) identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    AdjointConstants,
    AdjointState,
    OrbitalState,
    PhysicalConstants,
    Vehicle,
)

# Layout of the flat state tuple used on the integration hot path.
R, VR, VTH, TH, CHI, DV, LAM, MU, PHAT, PSI = range(10)

State10 = tuple[float, float, float, float, float,
                float, float, float, float, float]


class DynamicsError(ValueError):
    """State outside the domain of the equations of motion."""


@dataclass(frozen=True)
class ControlDirection:
    """Unit thrust direction in the rotating frame."""
    s0: float  # radial
    t0: float  # transversal
    w0: float  # normal


@dataclass(frozen=True)
class ReducedDerivative:
    """Time derivatives of the ten reduced variables, SI per second."""
    d_r: float
    d_v_r: float
    d_v_theta: float
    d_theta: float
    d_chi: float
    d_dv: float
    d_lam: float
    d_mu: float
    d_p_hat: float
    d_psi_dv: float


class VrGuard:
    """Zero-order hold for the 1/v_r factor in the radial costate rate.

    Along exact optimal arcs the bracketed numerator vanishes together
    with v_r, but the quotient is ill-conditioned numerically. Below
    |v_r| < eps the most recent well-conditioned value is reused and an
    activation counter is incremented.
    """
    __slots__ = ("eps", "last_dlam", "activations")

    def __init__(self, eps: float = 1e-3):
        self.eps = eps
        self.last_dlam: float | None = None
        self.activations = 0


def thrust_accel(dv: float, vehicle: Vehicle, k: PhysicalConstants,
                 engine_on: bool) -> float:
    """Thrust acceleration (m/s^2) at accumulated characteristic velocity dv."""
    if not engine_on:
        return 0.0
    return (vehicle.p_max / vehicle.m0) * math.exp(dv / (k.g0 * vehicle.isp))


def normal_primer(e_const: float, v_theta: float) -> float:
    """Normal primer component nu = E / v_theta (valid at every point)."""
    if v_theta <= 0.0:
        raise DynamicsError(f"v_theta must be positive, got {v_theta}")
    return e_const / v_theta


def initial_nu(e_const: float, v_theta0: float) -> float:
    """Normal primer component at the departure point, nu_0 = E / v_theta_0."""
    return normal_primer(e_const, v_theta0)


def initial_p_hat(adj: AdjointState, e_const: float, v_theta0: float) -> float:
    """Primer magnitude at the departure point, sqrt(lam^2 + mu^2 + nu_0^2)."""
    nu0 = normal_primer(e_const, v_theta0)
    return math.sqrt(adj.lam * adj.lam + adj.mu * adj.mu + nu0 * nu0)


def primer_and_kappa(adj: AdjointState, e_const: float,
                     v_theta: float) -> tuple[float, float, float]:
    """Pointwise primer magnitude and switching function.

    Returns (nu, p_hat, kappa) with nu = e_const / v_theta and
    p_hat = sqrt(lam^2 + mu^2 + nu^2). Along an integrated trajectory the
    switching function uses the propagated p_hat state instead, which
    coincides with this value at the departure point and on coast arcs.
    """
    nu = normal_primer(e_const, v_theta)
    p_hat = math.sqrt(adj.lam * adj.lam + adj.mu * adj.mu + nu * nu)
    return nu, p_hat, adj.psi_dv + p_hat


def control_direction(lam: float, mu: float, nu: float,
                      p_hat: float) -> ControlDirection:
    """Unit thrust direction (lam, mu, nu)/p_hat; undefined at p_hat = 0."""
    if p_hat <= 0.0:
        raise DynamicsError("thrust direction undefined at zero primer magnitude")
    return ControlDirection(s0=lam / p_hat, t0=mu / p_hat, w0=nu / p_hat)


def rhs10(y: State10, consts: AdjointConstants, vehicle: Vehicle,
          k: PhysicalConstants, engine_on: bool, guard: VrGuard,
          dlam_scale: float = 1.0) -> State10:
    """Flat-tuple right-hand side of the reduced ten-variable system.

    dlam_scale is a fault-injection hook for the verification CLI; it must
    be 1.0 in normal operation.
    """
    r = y[R]
    v_r = y[VR]
    v_th = y[VTH]
    if r <= 0.0:
        raise DynamicsError(f"r must be positive, got {r}")
    if v_th <= 0.0:
        raise DynamicsError(f"v_theta must be positive, got {v_th}")
    lam = y[LAM]
    mu = y[MU]
    p_hat = y[PHAT]

    nu = consts.e_const / v_th
    p_dir = math.sqrt(lam * lam + mu * mu + nu * nu)
    kappa = y[PSI] + p_hat
    grav = (v_th * v_th - k.gamma / r) / r

    if engine_on:
        if p_dir <= 0.0:
            raise DynamicsError("thrust direction undefined at zero primer magnitude")
        a = (vehicle.p_max / vehicle.m0) * math.exp(y[DV] / (k.g0 * vehicle.isp))
        scale = a / p_dir
        a_s = scale * lam
        a_t = scale * mu
        a_w = scale * nu
    else:
        a = a_s = a_t = a_w = 0.0

    num = grav * lam + (v_th / r) * consts.a_const + consts.c_const + a * kappa
    if abs(v_r) >= guard.eps:
        d_lam = num / v_r
        guard.last_dlam = d_lam
    else:
        guard.activations += 1
        if num == 0.0:
            d_lam = 0.0
        elif guard.last_dlam is not None:
            d_lam = guard.last_dlam
        else:
            d_lam = 0.0
    if dlam_scale != 1.0:
        d_lam *= dlam_scale

    d_mu = (v_r * mu - 2.0 * v_th * lam - consts.a_const) / r
    if p_hat <= 0.0:
        raise DynamicsError("primer magnitude state must stay positive")
    d_p_hat = (lam * d_lam + mu * d_mu + nu * (v_r / r) * nu) / p_hat

    return (
        v_r,
        grav + a_s,
        -v_r * v_th / r + a_t,
        v_th / r,
        a_w / v_th,
        a,
        d_lam,
        d_mu,
        d_p_hat,
        -a * kappa / (k.g0 * vehicle.isp),
    )


def reduced_rhs(st: OrbitalState, adj: AdjointState, p_hat: float,
                consts: AdjointConstants, vehicle: Vehicle,
                k: PhysicalConstants, engine_on: bool,
                guard: VrGuard | None = None) -> ReducedDerivative:
    """Structured right-hand side of the reduced system at one point."""
    if guard is None:
        guard = VrGuard()
    d = rhs10(
        (st.r, st.v_r, st.v_theta, st.theta, st.chi, st.dv,
         adj.lam, adj.mu, p_hat, adj.psi_dv),
        consts, vehicle, k, engine_on, guard,
    )
    return ReducedDerivative(*d)


def hamiltonian_residual_reduced(st: OrbitalState, adj: AdjointState,
                                 p_hat: float, consts: AdjointConstants,
                                 vehicle: Vehicle, k: PhysicalConstants,
                                 engine_on: bool, dlam_dt: float,
                                 dmu_dt: float) -> float:
    """Scaled first-integral residual of the reduced system.

    Zero by construction when the derivatives come from reduced_rhs off the
    v_r guard path; used as an integration-consistency monitor.
    """
    a = thrust_accel(st.dv, vehicle, k, engine_on)
    kappa = adj.psi_dv + p_hat
    gamma_r2 = k.gamma / (st.r * st.r)
    omega = st.v_theta / st.r
    lhs = (-gamma_r2 * adj.lam
           - st.v_r * (dlam_dt - omega * adj.mu)
           - st.v_theta * (dmu_dt + omega * adj.lam)
           + a * kappa + consts.c_const)
    return lhs / gamma_r2
