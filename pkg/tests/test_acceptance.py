"""Acceptance criteria A1-A11.

Each test prints exactly one PASS/FAIL line (through the terminal
reporter, so the lines survive pytest's output capture) and then
asserts the same condition. Expected numbers come from the bundled
reference dataset [REFERENCE: dataset tables 6-8 and boundary orbits]
unless tagged otherwise.
"""
import math

import pytest

from pvtransfer import (
    AdjointConstants,
    AdjointState,
    IntegrationOptions,
    OrbitalState,
    StopCondition,
    compare_reduced_vs_full,
    elements_to_state,
    propagate,
    state_to_elements,
)
from pvtransfer.dynamics import (
    CHI,
    DV,
    LAM,
    MU,
    PHAT,
    PSI,
    R,
    TH,
    VR,
    VTH,
    VrGuard,
    initial_p_hat,
    rhs10,
)
from pvtransfer.integrator import rk4_step
from pvtransfer.oracle import full_system_conservation
from tests.conftest import kind1_spec


_reporter = None


@pytest.fixture(autouse=True)
def _grab_reporter(request):
    global _reporter
    _reporter = request.config.pluginmanager.get_plugin("terminalreporter")


def report(tag: str, ok: bool, detail: str = "") -> None:
    line = f"{tag}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    if _reporter is not None:
        _reporter.write_line("")
        _reporter.write_line(line)
    else:
        print(line, flush=True)
    assert ok, line


@pytest.fixture(scope="session")
def divergence(dataset, ctx, kind1_i0):
    """Full-order cross-validation of the coplanar free-angle root,
    shared by A7 and A8."""
    spec = kind1_spec(dataset, 0.0)
    adj = AdjointState(lam=kind1_i0.params.lam0, mu=kind1_i0.params.mu0,
                       psi_dv=-1.0)
    return compare_reduced_vs_full(ctx.initial_state(), adj,
                                   AdjointConstants(), dataset.vehicle,
                                   dataset.constants,
                                   spec.stop_condition())


def test_a1_coplanar_free_angle(dataset, kind1_i0):
    row = dataset.table6[0]
    s = kind1_i0
    checks = [
        s.converged,
        abs(s.dv_total - row.dv_total) < 4.0,
        abs(s.dv1 - row.dv1) < 4.0,
        abs(s.dv2 - row.dv2) < 4.0,
        abs(s.t_f - row.t_f_s) < 10.0,
        abs(math.degrees(s.theta_f) - row.theta_f_deg) < 0.2,
    ]
    report("A1", all(checks),
           f"dv={s.dv_total:.2f}/{row.dv_total} tf={s.t_f:.2f}/{row.t_f_s} "
           f"thf={math.degrees(s.theta_f):.3f}/{row.theta_f_deg}")


def test_a2_noncoplanar_20deg(dataset, table6_sweep):
    row = dataset.table6[20]
    s = table6_sweep[20]
    ok = (s.converged
          and abs(s.dv_total - row.dv_total) < 5.0
          and abs(s.params.e_ms - row.e_const) < 0.02 * abs(row.e_const))
    report("A2", ok,
           f"dv={s.dv_total:.2f}/{row.dv_total} "
           f"E={s.params.e_ms:.2f}/{row.e_const}")


def test_a3_inclination_sweep(dataset, table6_sweep):
    dvs = [table6_sweep[i].dv_total for i in sorted(table6_sweep)]
    increasing = all(a < b for a, b in zip(dvs, dvs[1:]))
    within = all(
        abs(table6_sweep[i].dv_total - dataset.table6[i].dv_total)
        < 0.002 * dataset.table6[i].dv_total
        for i in dataset.table6
    )
    converged = all(s.converged for s in table6_sweep.values())
    report("A3", converged and increasing and within,
           f"dv(0..90)={dvs[0]:.1f}..{dvs[-1]:.1f} "
           f"monotone={increasing}")


def test_a4_fixed_angle(dataset, kind2_i0):
    row = dataset.table7[0]
    s = kind2_i0
    ok = (s.converged
          and abs(s.dv_total - row.dv_total) < 4.0
          and abs(s.params.a_ms - row.a_const) < 0.02 * abs(row.a_const))
    report("A4", ok,
           f"dv={s.dv_total:.2f}/{row.dv_total} "
           f"A={s.params.a_ms:.2f}/{row.a_const}")


def test_a5_fixed_time(dataset, kind3_i10):
    row = dataset.table8[10]
    s = kind3_i10
    ok = (s.converged
          and abs(s.dv_total - row.dv_total) < 4.0
          and abs(s.params.c_ms2 - row.c_const) < 0.02 * abs(row.c_const))
    report("A5", ok,
           f"dv={s.dv_total:.2f}/{row.dv_total} "
           f"C={s.params.c_ms2:.5f}/{row.c_const}")


def test_a6_free_angle_is_lower_bound(kind1_i0, kind1_i10, kind2_i0,
                                      kind2_i10, kind3_i0, kind3_i10):
    # [DERIVED] fixing the transfer angle or time restricts the free-angle
    # problem, so the free-angle minimum can only be lower (0.5 m/s slack
    # for solver tolerance).
    pairs = [
        ("II/0", kind1_i0, kind2_i0),
        ("III/0", kind1_i0, kind3_i0),
        ("II/10", kind1_i10, kind2_i10),
        ("III/10", kind1_i10, kind3_i10),
    ]
    ok = all(c.converged and f.dv_total <= c.dv_total + 0.5
             for _, f, c in pairs)
    detail = " ".join(f"{n}:{f.dv_total:.1f}<={c.dv_total:.1f}"
                      for n, f, c in pairs)
    report("A6", ok, detail)


def test_a7_full_order_cross_validation(divergence):
    d = divergence
    ok = (d.max_position_m < 10.0
          and d.dv_final_diff_ms < 0.1
          and d.max_switch_time_diff_s < 1e-3)
    report("A7", ok,
           f"pos={d.max_position_m:.2e}m dv={d.dv_final_diff_ms:.2e} "
           f"sw={d.max_switch_time_diff_s:.2e}s")


def test_a8_full_system_invariants(dataset, divergence):
    # Invariants along the cross-validated transfer plus an independent
    # powered segment of the full-order system.
    from tests.test_oracle import embedded_start
    pt, _ = embedded_start(dataset, lam=0.05, mu=1.05)
    rep = full_system_conservation(pt, 60.0, dataset.vehicle,
                                   dataset.constants, engine_on=True,
                                   c_const=0.0)
    vals = (divergence.z_drift_rel, divergence.hp_rz_rel,
            divergence.hamiltonian_scaled_max,
            rep.z_drift_rel, rep.hp_rz_rel, rep.hamiltonian_scaled_max)
    ok = all(v < 1e-6 for v in vals)
    report("A8", ok, "max=" + f"{max(vals):.2e}")


def test_a9_coast_conservation(dataset):
    # [DERIVED] two-body coast invariants over 3000 s at 1 s steps. Uses
    # an elliptical orbit whose perigee clears the impact floor (the
    # reference departure orbit's does not, so a long coast on it impacts
    # by design).
    k = dataset.constants
    st = OrbitalState(t=0.0, r=8000e3, v_r=300.0,
                      v_theta=math.sqrt(k.gamma / 8000e3), theta=0.0,
                      chi=0.0, dv=0.0)
    adj = AdjointState(lam=0.01, mu=0.30, psi_dv=-1.0)
    res = propagate(st, adj, AdjointConstants(), dataset.vehicle, k,
                    StopCondition(variable="time", target=3000.0),
                    IntegrationOptions(record=True))

    def invariants(s):
        v2 = s.state.v_r ** 2 + s.state.v_theta ** 2
        return v2 / 2 - k.gamma / s.state.r, s.state.r * s.state.v_theta

    e0, h0 = invariants(res.samples[0])
    drift = max(max(abs(e / e0 - 1.0), abs(h / h0 - 1.0))
                for e, h in map(invariants, res.samples))
    ok = drift < 1e-7 and all(a.kind == "coast" for a in res.schedule.arcs)
    report("A9", ok, f"drift={drift:.2e}")


def test_a10_adjoint_scaling_invariance(dataset):
    # [DERIVED] the adjoint system is homogeneous: scaling (lam, mu,
    # p_hat, psi_dv) by s leaves the state trajectory unchanged and
    # scales the adjoints by exactly s. Checked over a switch-free
    # burn window so event-time jitter cannot enter.
    s = 7.0
    k, veh = dataset.constants, dataset.vehicle
    init = dataset.initial
    lam, mu, psi = 0.05, 1.05, -1.0
    p0 = initial_p_hat(AdjointState(lam=lam, mu=mu, psi_dv=psi), 0.0,
                       init.v_theta)
    base = (init.r, init.v_r, init.v_theta, 0.0, 0.0, 0.0,
            lam, mu, p0, psi)
    scaled = base[:6] + (s * lam, s * mu, s * p0, s * psi)
    consts = AdjointConstants()
    consts_s = AdjointConstants()
    g1, g2 = VrGuard(), VrGuard()
    y1, y2 = base, scaled
    for _ in range(500):
        y1 = rk4_step(lambda y: rhs10(y, consts, veh, k, True, g1), y1, 0.12)
        y2 = rk4_step(lambda y: rhs10(y, consts_s, veh, k, True, g2), y2,
                      0.12)
    state_rel = max(
        abs(y2[i] - y1[i]) / max(abs(y1[i]), 1.0)
        for i in (R, VR, VTH, TH, CHI, DV)
    )
    adj_rel = max(
        abs(y2[i] - s * y1[i]) / (s * y1[PHAT])
        for i in (LAM, MU, PHAT, PSI)
    )
    ok = state_rel < 1e-12 and adj_rel < 1e-12
    report("A10", ok, f"state={state_rel:.2e} adjoint={adj_rel:.2e}")


def test_a11_element_state_conversions(dataset):
    k = dataset.constants
    worst = 0.0
    for orbit in (dataset.initial, dataset.final):
        r, v_r, v_theta = elements_to_state(orbit.elements, k)
        for got, want in ((r, orbit.r), (v_r, orbit.v_r),
                          (v_theta, orbit.v_theta)):
            worst = max(worst, abs(got - want) / max(abs(want), 1.0))
        el = state_to_elements(orbit.r, orbit.v_r, orbit.v_theta, k)
        worst = max(worst,
                    abs(el.l - orbit.elements.l) / orbit.elements.l,
                    abs(el.e - orbit.elements.e) / orbit.elements.e,
                    abs(el.f - orbit.elements.f) / abs(orbit.elements.f))
    ok = worst < 1e-3
    report("A11", ok, f"worst_rel={worst:.2e}")
