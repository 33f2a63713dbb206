"""Full-order inertial-frame cross-validation of the reduced formulation.

Propagates the original sixth-order primer system together with the
Cartesian equations of motion and checks the conserved quantities the
reduction relies on: the Pines vector integral, its scalar projection,
and the Hamiltonian first integral.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import ReducedDerivative, VrGuard, reduced_rhs
from .integrator import (
    IntegrationOptions,
    PropagationResult,
    StopCondition,
    locate_event,
    propagate,
    rk4_step,
)
from .model import (
    AdjointConstants,
    AdjointState,
    OrbitalState,
    PhysicalConstants,
    Vehicle,
)

Full14 = tuple[float, ...]


class OracleError(ValueError):
    """Invalid input to an oracle operation."""


@dataclass(frozen=True)
class InertialPoint:
    """Full-order oracle state at one time."""
    t: float
    r_vec: np.ndarray      # m
    v_vec: np.ndarray      # m/s
    p_vec: np.ndarray      # primer vector (dimensionless)
    pdot_vec: np.ndarray   # primer rate, 1/s
    dv: float              # m/s
    psi_dv: float


@dataclass(frozen=True)
class PinesIntegral:
    """Conserved vector of the coupled state/adjoint system, m/s."""
    z_vec: np.ndarray


@dataclass(frozen=True)
class DivergenceReport:
    """Max-norm discrepancies between reduced and full propagations."""
    max_position_m: float
    max_velocity_ms: float
    max_primer_mag_diff: float
    max_kappa_diff: float
    dv_final_diff_ms: float
    z_drift_rel: float
    z_transverse_rel: float          # reported, never asserted
    hp_rz_rel: float
    hamiltonian_scaled_max: float
    switch_times_reduced_s: tuple[float, ...]
    switch_times_full_s: tuple[float, ...]
    max_switch_time_diff_s: float

    def to_json(self) -> str:
        d = asdict(self)
        d["switch_times_reduced_s"] = list(self.switch_times_reduced_s)
        d["switch_times_full_s"] = list(self.switch_times_full_s)
        return json.dumps(d, indent=2)


def embed_to_inertial(st: OrbitalState, adj: AdjointState, nu: float,
                      rhs_derivs: ReducedDerivative) -> InertialPoint:
    """Map a reduced sample to the inertial frame.

    Only defined while the orbit plane coincides with the initial plane
    (chi = 0); the plane is placed in x-y with the departure radius along
    +x, so the rotating basis sits at angle theta about +z.
    """
    if st.chi != 0.0:
        raise OracleError(
            f"embedding undefined for chi={st.chi} != 0 (plane has rotated)"
        )
    ct, stheta = math.cos(st.theta), math.sin(st.theta)
    r_hat = np.array([ct, stheta, 0.0])
    t_hat = np.array([-stheta, ct, 0.0])
    h_hat = np.array([0.0, 0.0, 1.0])

    omega = st.v_theta / st.r
    dnu = (st.v_r / st.r) * nu

    r_vec = st.r * r_hat
    v_vec = st.v_r * r_hat + st.v_theta * t_hat
    p_vec = adj.lam * r_hat + adj.mu * t_hat + nu * h_hat
    pdot_vec = ((rhs_derivs.d_lam - omega * adj.mu) * r_hat
                + (rhs_derivs.d_mu + omega * adj.lam) * t_hat
                + dnu * h_hat)
    return InertialPoint(t=st.t, r_vec=r_vec, v_vec=v_vec, p_vec=p_vec,
                         pdot_vec=pdot_vec, dv=st.dv, psi_dv=adj.psi_dv)


def full_rhs(pt: InertialPoint, vehicle: Vehicle, k: PhysicalConstants,
             engine_on: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray,
                                       np.ndarray, float, float]:
    """Derivatives (dr, dv, dp, dpdot, d(dv), dpsi) of the full system."""
    d = _full_rhs14(_pack(pt), vehicle, k, engine_on)
    return (np.array(d[0:3]), np.array(d[3:6]), np.array(d[6:9]),
            np.array(d[9:12]), d[12], d[13])


def pines_z(pt: InertialPoint) -> PinesIntegral:
    """The conserved vector dp/dt x r - p x v."""
    return PinesIntegral(z_vec=np.cross(pt.pdot_vec, pt.r_vec)
                         - np.cross(pt.p_vec, pt.v_vec))


def hamiltonian_full(pt: InertialPoint, vehicle: Vehicle,
                     k: PhysicalConstants, engine_on: bool, c_const: float) -> float:
    """First-integral residual of the full system, scaled by gamma/r^2."""
    rn = float(np.linalg.norm(pt.r_vec))
    if rn <= 0.0:
        raise OracleError("r must be nonzero")
    pm = float(np.linalg.norm(pt.p_vec))
    kappa = pt.psi_dv + pm
    a = 0.0
    if engine_on:
        a = (vehicle.p_max / vehicle.m0) * math.exp(pt.dv / (k.g0 * vehicle.isp))
    lhs = (-(k.gamma / rn ** 3) * float(pt.r_vec @ pt.p_vec)
           - float(pt.v_vec @ pt.pdot_vec) + a * kappa + c_const)
    return lhs / (k.gamma / rn ** 2)


# --- internal flat-tuple propagation of the full system ---

def _pack(pt: InertialPoint) -> Full14:
    return (*pt.r_vec, *pt.v_vec, *pt.p_vec, *pt.pdot_vec, pt.dv, pt.psi_dv)


def _unpack(t: float, y: Full14) -> InertialPoint:
    return InertialPoint(t=t, r_vec=np.array(y[0:3]), v_vec=np.array(y[3:6]),
                         p_vec=np.array(y[6:9]), pdot_vec=np.array(y[9:12]),
                         dv=y[12], psi_dv=y[13])


def _full_rhs14(y: Full14, vehicle: Vehicle, k: PhysicalConstants,
                engine_on: bool) -> Full14:
    rx, ry, rz, vx, vy, vz, px, py, pz, qx, qy, qz, dv, psi = y
    rn2 = rx * rx + ry * ry + rz * rz
    rn = math.sqrt(rn2)
    if rn <= 0.0:
        raise OracleError("r must be nonzero")
    gr3 = k.gamma / (rn2 * rn)

    pm = math.sqrt(px * px + py * py + pz * pz)
    kappa = psi + pm
    if engine_on:
        if pm <= 0.0:
            raise OracleError("thrust direction undefined at zero primer magnitude")
        a = (vehicle.p_max / vehicle.m0) * math.exp(dv / (k.g0 * vehicle.isp))
        ap = a / pm
        ax, ay, az = ap * px, ap * py, ap * pz
        dpsi = -a * kappa / (k.g0 * vehicle.isp)
    else:
        a = ax = ay = az = 0.0
        dpsi = 0.0

    rp = rx * px + ry * py + rz * pz
    c1 = 3.0 * k.gamma * rp / (rn2 * rn2 * rn)
    return (
        vx, vy, vz,
        -gr3 * rx + ax, -gr3 * ry + ay, -gr3 * rz + az,
        qx, qy, qz,
        c1 * rx - gr3 * px, c1 * ry - gr3 * py, c1 * rz - gr3 * pz,
        a, dpsi,
    )


def _kappa14(y: Full14) -> float:
    return y[13] + math.sqrt(y[6] ** 2 + y[7] ** 2 + y[8] ** 2)


def _propagate_full_slaved(y0: Full14, segments: list[tuple[float, float, bool]],
                           vehicle: Vehicle, k: PhysicalConstants,
                           step_s: float) -> tuple[list[float], list[Full14]]:
    """Propagate the full system over pre-located arc segments.

    segments: (t_start, t_end, engine_on) tiles; the step grid restarts at
    each boundary, mirroring the reduced integrator.
    """
    times = [segments[0][0]]
    states = [y0]
    y = y0
    for t_start, t_end, on in segments:
        rhs = lambda yy, on=on: _full_rhs14(yy, vehicle, k, on)
        t = t_start
        while t < t_end - 1e-12:
            h = min(step_s, t_end - t)
            y = rk4_step(rhs, y, h)
            t = min(t + h, t_end)
            times.append(t)
            states.append(y)
    return times, states


def _locate_full_switch_times(y0: Full14, t_f: float, vehicle: Vehicle,
                              k: PhysicalConstants, step_s: float,
                              event_tol_s: float,
                              max_switches: int = 10) -> list[float]:
    """Independently locate switching-function zeros on the full system."""
    t = 0.0
    y = y0
    engine_on = _kappa14(y) >= 0.0
    kappa_prev = _kappa14(y)
    switch_times: list[float] = []
    while t < t_f - 1e-9 and len(switch_times) <= max_switches:
        on = engine_on
        rhs = lambda yy, on=on: _full_rhs14(yy, vehicle, k, on)
        h = min(step_s, t_f - t)
        y_new = rk4_step(rhs, y, h)
        kappa_new = _kappa14(y_new)
        kp = kappa_prev
        if abs(kp) < 1e-13:
            kp = 1e-13 if engine_on else -1e-13
        wrong_side = (kappa_new < 0.0) if engine_on else (kappa_new >= 0.0)
        if wrong_side and kp * kappa_new < 0.0:
            s_star = locate_event(lambda s: _kappa14(rk4_step(rhs, y, s)),
                                  0.0, h, event_tol_s)
            y = rk4_step(rhs, y, s_star)
            t += s_star
            switch_times.append(t)
            engine_on = not engine_on
            kappa_prev = _kappa14(y)
            continue
        y = y_new
        t += h
        kappa_prev = kappa_new
    return switch_times


def _reduced_inertial_state(s) -> tuple[np.ndarray, np.ndarray]:
    st = s.state
    ct, sth = math.cos(st.theta), math.sin(st.theta)
    r_hat = np.array([ct, sth, 0.0])
    t_hat = np.array([-sth, ct, 0.0])
    return st.r * r_hat, st.v_r * r_hat + st.v_theta * t_hat


def compare_reduced_vs_full(init_state: OrbitalState, init_adjoint: AdjointState,
                            consts: AdjointConstants, vehicle: Vehicle,
                            k: PhysicalConstants, stop: StopCondition,
                            opts: IntegrationOptions | None = None,
                            independent_events: bool = True) -> DivergenceReport:
    """Propagate both formulations from the same embedded start and report
    their maximum divergence together with full-system invariant drifts.

    State-by-state comparison requires a coplanar setup (E = 0); the
    embedding at later times is undefined once the plane rotates.
    """
    if consts.e_const != 0.0:
        raise OracleError(
            "reduced-vs-full state comparison requires a coplanar setup (E = 0)"
        )
    if opts is None:
        opts = IntegrationOptions()
    opts = IntegrationOptions(**{**asdict(opts), "record": True})

    red = propagate(init_state, init_adjoint, consts, vehicle, k, stop, opts)
    samples = red.samples
    first = samples[0]

    guard = VrGuard(opts.vr_eps_ms)
    derivs0 = reduced_rhs(first.state, first.adjoint, first.p_hat, consts,
                          vehicle, k, first.engine_on, guard)
    pt0 = embed_to_inertial(first.state, first.adjoint, first.nu, derivs0)
    y0 = _pack(pt0)

    segments = [(a.t_start, a.t_end, a.kind == "burn")
                for a in red.schedule.arcs if a.t_end > a.t_start]
    times, states = _propagate_full_slaved(y0, segments, vehicle, k, opts.step_s)

    # The slaved grid reproduces the reduced grid (same arc tiling and step).
    if len(times) != len(samples):
        raise OracleError(
            f"grid mismatch: {len(times)} full vs {len(samples)} reduced samples"
        )

    z0 = np.cross(np.array(y0[9:12]), np.array(y0[0:3])) \
        - np.cross(np.array(y0[6:9]), np.array(y0[3:6]))
    z_scale = max(float(np.max(np.abs(z0))), 1.0)

    max_pos = max_vel = max_pmag = max_kap = 0.0
    z_drift = z_trans = hp_rz = ham_max = 0.0
    for s, t_full, y in zip(samples, times, states):
        r_red, v_red = _reduced_inertial_state(s)
        r_full = np.array(y[0:3])
        v_full = np.array(y[3:6])
        p_full = np.array(y[6:9])
        q_full = np.array(y[9:12])

        max_pos = max(max_pos, float(np.linalg.norm(r_red - r_full)))
        max_vel = max(max_vel, float(np.linalg.norm(v_red - v_full)))
        pm_full = float(np.linalg.norm(p_full))
        max_pmag = max(max_pmag, abs(s.p_hat - pm_full))
        max_kap = max(max_kap, abs(s.kappa - (y[13] + pm_full)))

        z = np.cross(q_full, r_full) - np.cross(p_full, v_full)
        z_drift = max(z_drift, float(np.max(np.abs(z - z0))) / z_scale)
        z_trans = max(z_trans, abs(float(z[1])) / z_scale)

        h_vec = np.cross(r_full, v_full)
        denom = max(float(np.linalg.norm(h_vec)) * max(pm_full, 1e-12), 1.0)
        hp_rz = max(hp_rz, abs(float(h_vec @ p_full) - float(r_full @ z0)) / denom)

        on = s.engine_on
        pt = _unpack(t_full, y)
        ham_max = max(ham_max, abs(hamiltonian_full(pt, vehicle, k, on,
                                                    consts.c_const)))

    switch_red = tuple(a.t_end for a in red.schedule.arcs[:-1])
    if independent_events:
        switch_full = tuple(_locate_full_switch_times(
            y0, samples[-1].t, vehicle, k, opts.step_s, opts.event_tol_s))
    else:
        switch_full = switch_red
    if len(switch_full) == len(switch_red):
        max_sw = max((abs(a - b) for a, b in zip(switch_red, switch_full)),
                     default=0.0)
    else:
        max_sw = math.inf

    return DivergenceReport(
        max_position_m=max_pos,
        max_velocity_ms=max_vel,
        max_primer_mag_diff=max_pmag,
        max_kappa_diff=max_kap,
        dv_final_diff_ms=abs(samples[-1].state.dv - states[-1][12]),
        z_drift_rel=z_drift,
        z_transverse_rel=z_trans,
        hp_rz_rel=hp_rz,
        hamiltonian_scaled_max=ham_max,
        switch_times_reduced_s=switch_red,
        switch_times_full_s=switch_full,
        max_switch_time_diff_s=max_sw,
    )


def full_conservation_along(init_state: OrbitalState, init_adjoint: AdjointState,
                            consts: AdjointConstants, vehicle: Vehicle,
                            k: PhysicalConstants, stop: StopCondition,
                            opts: IntegrationOptions | None = None) -> "ConservationReport":
    """Invariant drifts of the full system slaved to the reduced burn schedule.

    Works for noncoplanar setups too: only the frame-invariant conserved
    quantities of the full system are measured, never the reduced state.
    """
    if opts is None:
        opts = IntegrationOptions()
    opts = IntegrationOptions(**{**asdict(opts), "record": True})
    red = propagate(init_state, init_adjoint, consts, vehicle, k, stop, opts)
    first = red.samples[0]
    guard = VrGuard(opts.vr_eps_ms)
    derivs0 = reduced_rhs(first.state, first.adjoint, first.p_hat, consts,
                          vehicle, k, first.engine_on, guard)
    pt0 = embed_to_inertial(first.state, first.adjoint, first.nu, derivs0)
    y0 = _pack(pt0)
    segments = [(a.t_start, a.t_end, a.kind == "burn")
                for a in red.schedule.arcs if a.t_end > a.t_start]
    times, states = _propagate_full_slaved(y0, segments, vehicle, k, opts.step_s)

    def flag_at(t: float) -> bool:
        for a in red.schedule.arcs:
            if t <= a.t_end:
                return a.kind == "burn"
        return red.schedule.arcs[-1].kind == "burn"

    z0 = pines_z(pt0).z_vec
    z_scale = max(float(np.max(np.abs(z0))), 1.0)
    z_drift = hp_rz = ham_max = 0.0
    for t, y in zip(times, states):
        pt = _unpack(t, y)
        z = pines_z(pt).z_vec
        z_drift = max(z_drift, float(np.max(np.abs(z - z0))) / z_scale)
        h_vec = np.cross(pt.r_vec, pt.v_vec)
        pm = float(np.linalg.norm(pt.p_vec))
        denom = max(float(np.linalg.norm(h_vec)) * max(pm, 1e-12), 1.0)
        hp_rz = max(hp_rz, abs(float(h_vec @ pt.p_vec) - float(pt.r_vec @ z0)) / denom)
        ham_max = max(ham_max, abs(hamiltonian_full(pt, vehicle, k, flag_at(t),
                                                    consts.c_const)))
    return ConservationReport(z_drift_rel=z_drift, hp_rz_rel=hp_rz,
                              hamiltonian_scaled_max=ham_max)


@dataclass(frozen=True)
class ConservationReport:
    """Invariant drifts along one full-system propagation."""
    z_drift_rel: float
    hp_rz_rel: float
    hamiltonian_scaled_max: float


def full_system_conservation(pt0: InertialPoint, duration_s: float,
                             vehicle: Vehicle, k: PhysicalConstants,
                             engine_on: bool, c_const: float,
                             step_s: float = 1.0) -> ConservationReport:
    """Propagate the full system at a fixed engine flag and measure drifts."""
    y0 = _pack(pt0)
    times, states = _propagate_full_slaved(
        y0, [(pt0.t, pt0.t + duration_s, engine_on)], vehicle, k, step_s)
    z0 = pines_z(pt0).z_vec
    z_scale = max(float(np.max(np.abs(z0))), 1.0)
    z_drift = hp_rz = ham_max = 0.0
    for t, y in zip(times, states):
        pt = _unpack(t, y)
        z = pines_z(pt).z_vec
        z_drift = max(z_drift, float(np.max(np.abs(z - z0))) / z_scale)
        h_vec = np.cross(pt.r_vec, pt.v_vec)
        pm = float(np.linalg.norm(pt.p_vec))
        denom = max(float(np.linalg.norm(h_vec)) * max(pm, 1e-12), 1.0)
        hp_rz = max(hp_rz, abs(float(h_vec @ pt.p_vec) - float(pt.r_vec @ z0)) / denom)
        ham_max = max(ham_max, abs(hamiltonian_full(pt, vehicle, k, engine_on,
                                                    c_const)))
    return ConservationReport(z_drift_rel=z_drift, hp_rz_rel=hp_rz,
                              hamiltonian_scaled_max=ham_max)
