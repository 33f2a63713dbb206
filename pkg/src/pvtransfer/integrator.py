"""Fixed-step RK4 propagation of the reduced system with event location.

Steps never integrate across an engine flip: each arc ends at a located
switching-function zero (or at the terminal stop condition) and the
integration restarts there with the flipped engine flag.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from scipy.optimize import brentq

from .dynamics import (
    CHI, DV, LAM, MU, PHAT, PSI, R, TH, VR, VTH,
    DynamicsError,
    State10,
    VrGuard,
    initial_p_hat,
    rhs10,
)
from .model import (
    AdjointConstants,
    AdjointState,
    OrbitalState,
    PhysicalConstants,
    Vehicle,
)

STOP_VARIABLES = ("radius", "angle", "time", "delta_v")
STOP_DIRECTIONS = ("increasing", "decreasing", "any")

# Switching values this close to zero right after an event are treated as
# sitting on the engine-consistent side of the switch.
_KAPPA_SEED_EPS = 1e-13


class PropagationError(RuntimeError):
    """Base class for propagation failures."""


class DomainError(PropagationError):
    """State left the domain of the equations of motion mid-propagation."""


class DepletionError(PropagationError):
    """Accumulated characteristic velocity crossed the depletion cap.

    Carries the trajectory sample at the cap crossing so callers can use
    the truncated state as a penalized shooting residual.
    """

    def __init__(self, message: str, final: "TrajectorySample"):
        super().__init__(message)
        self.final = final


class StopNotReachedError(PropagationError):
    """Stop condition not met within the time cap."""


class ImpactError(PropagationError):
    """Trajectory descended below the minimum-radius floor."""


class SwitchLimitError(PropagationError):
    """More engine switching events than allowed."""


class EventBracketError(PropagationError):
    """Event location called without a sign change in the bracket."""


class EventConvergenceError(PropagationError):
    """Event refinement failed to converge."""


@dataclass(frozen=True)
class StopCondition:
    """Terminal condition for a propagation."""
    variable: str                 # one of STOP_VARIABLES
    target: float                 # SI value (m, rad, s, m/s)
    direction: str = "increasing"
    crossing_index: int = 1

    def __post_init__(self) -> None:
        if self.variable not in STOP_VARIABLES:
            raise ValueError(f"unknown stop variable {self.variable!r}")
        if self.direction not in STOP_DIRECTIONS:
            raise ValueError(f"unknown stop direction {self.direction!r}")
        if not math.isfinite(self.target):
            raise ValueError("stop target must be finite")
        if self.variable == "radius" and self.target <= 0.0:
            raise ValueError("radius stop target must be positive")
        if self.crossing_index < 1:
            raise ValueError("crossing_index must be >= 1")


@dataclass(frozen=True)
class TrajectorySample:
    """One recorded trajectory point with derived switching quantities."""
    state: OrbitalState
    adjoint: AdjointState
    nu: float
    p_hat: float
    kappa: float
    engine_on: bool

    @property
    def t(self) -> float:
        return self.state.t


@dataclass(frozen=True)
class Arc:
    """One constant-engine-flag span of the trajectory."""
    t_start: float
    t_end: float
    kind: str        # "burn" or "coast"
    dv: float        # characteristic velocity accrued on the arc, m/s


@dataclass(frozen=True)
class BurnSchedule:
    arcs: tuple[Arc, ...]

    @property
    def burn_arcs(self) -> tuple[Arc, ...]:
        return tuple(a for a in self.arcs if a.kind == "burn")

    @property
    def total_dv(self) -> float:
        return sum(a.dv for a in self.arcs)


@dataclass(frozen=True)
class IntegrationOptions:
    step_s: float = 1.0
    event_tol_s: float = 1e-6
    t_max_s: float = 15500.0        # ~5x the longest reference transfer
    r_min_m: float = 0.9 * 6378e3
    max_switches: int = 10
    vr_eps_ms: float = 1e-3
    dv_max_ms: float = 13000.0      # propellant-depletion cap
    record: bool = True
    dlam_scale: float = 1.0         # fault-injection hook, 1.0 in normal use


@dataclass(frozen=True)
class PropagationResult:
    samples: tuple[TrajectorySample, ...]
    schedule: BurnSchedule
    final: TrajectorySample
    guard_activations: int


def rk4_step(rhs: Callable[[State10], State10], y: State10, h: float) -> State10:
    """One classical RK4 step of size h."""
    if h < 0.0:
        raise ValueError(f"step size must be non-negative, got {h}")
    if h == 0.0:
        return y
    k1 = rhs(y)
    half = 0.5 * h
    k2 = rhs(tuple(yi + half * ki for yi, ki in zip(y, k1)))
    k3 = rhs(tuple(yi + half * ki for yi, ki in zip(y, k2)))
    k4 = rhs(tuple(yi + h * ki for yi, ki in zip(y, k3)))
    sixth = h / 6.0
    return tuple(
        yi + sixth * (a + 2.0 * b + 2.0 * c + d)
        for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def locate_event(f: Callable[[float], float], t_lo: float, t_hi: float,
                 tol_t: float = 1e-6) -> float:
    """Refine a bracketed zero of f to bracket width <= tol_t."""
    f_lo = f(t_lo)
    f_hi = f(t_hi)
    if f_lo == 0.0:
        return t_lo
    if f_hi == 0.0:
        return t_hi
    if f_lo * f_hi > 0.0:
        raise EventBracketError(
            f"no sign change on [{t_lo}, {t_hi}]: f={f_lo}..{f_hi}"
        )
    try:
        return float(brentq(f, t_lo, t_hi, xtol=tol_t, rtol=8.9e-16, maxiter=200))
    except ValueError:
        # f re-evaluated at the bracket ends came back with equal signs:
        # the event function is only reproducible to roundoff near the
        # zero. Bisect on our own sign bookkeeping instead; a side that
        # flickers at roundoff level lies within tol_t of the zero anyway.
        lo, hi = t_lo, t_hi
        sign_lo = math.copysign(1.0, f_lo)
        while hi - lo > tol_t:
            mid = 0.5 * (lo + hi)
            f_mid = f(mid)
            if f_mid == 0.0:
                return mid
            if math.copysign(1.0, f_mid) == sign_lo:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    except RuntimeError as exc:
        raise EventConvergenceError(str(exc)) from exc


def _kappa_of(y: State10, e_const: float) -> tuple[float, float, float]:
    nu = e_const / y[VTH]
    p_hat = y[PHAT]
    return nu, p_hat, y[PSI] + p_hat


def _stop_value(variable: str, t: float, y: State10) -> float:
    if variable == "radius":
        return y[R]
    if variable == "angle":
        return y[TH]
    if variable == "delta_v":
        return y[DV]
    return t


def _crossed(direction: str, f_prev: float, f_new: float) -> bool:
    if direction == "increasing":
        return f_prev < 0.0 <= f_new
    if direction == "decreasing":
        return f_prev > 0.0 >= f_new
    return f_prev * f_new < 0.0 or (f_prev != 0.0 and f_new == 0.0)


def _sample(t: float, y: State10, engine_on: bool,
            e_const: float) -> TrajectorySample:
    nu, p_hat, kappa = _kappa_of(y, e_const)
    return TrajectorySample(
        state=OrbitalState(t=t, r=y[R], v_r=y[VR], v_theta=y[VTH],
                           theta=y[TH], chi=y[CHI], dv=y[DV]),
        adjoint=AdjointState(lam=y[LAM], mu=y[MU], psi_dv=y[PSI]),
        nu=nu, p_hat=p_hat, kappa=kappa, engine_on=engine_on,
    )


def propagate(init_state: OrbitalState, init_adjoint: AdjointState,
              consts: AdjointConstants, vehicle: Vehicle,
              k: PhysicalConstants, stop: StopCondition,
              opts: IntegrationOptions | None = None) -> PropagationResult:
    """Propagate the reduced system until the stop condition is met.

    The engine starts on iff the switching function is non-negative at the
    initial point; thereafter it flips only at located switching events.
    """
    if opts is None:
        opts = IntegrationOptions()
    guard = VrGuard(opts.vr_eps_ms)

    t = init_state.t
    y: State10 = (init_state.r, init_state.v_r, init_state.v_theta,
                  init_state.theta, init_state.chi, init_state.dv,
                  init_adjoint.lam, init_adjoint.mu,
                  initial_p_hat(init_adjoint, consts.e_const,
                                init_state.v_theta),
                  init_adjoint.psi_dv)
    _, _, kappa = _kappa_of(y, consts.e_const)
    engine_on = kappa >= 0.0

    def make_rhs(on: bool) -> Callable[[State10], State10]:
        return lambda yy: rhs10(yy, consts, vehicle, k, on, guard, opts.dlam_scale)

    f_arc = make_rhs(engine_on)
    t_cap = init_state.t + opts.t_max_s

    if stop.variable == "time" and stop.target <= t:
        raise ValueError("time stop target must exceed the initial time")
    if stop.variable == "time" and stop.target > t_cap:
        raise StopNotReachedError(
            f"time stop target {stop.target} s exceeds the cap {t_cap} s"
        )

    samples: list[TrajectorySample] = []
    if opts.record:
        samples.append(_sample(t, y, engine_on, consts.e_const))

    arcs: list[Arc] = []
    arc_t0 = t
    arc_dv0 = y[DV]
    switches = 0
    crossings = 0
    kappa_prev = kappa
    sv_prev = (_stop_value(stop.variable, t, y) - stop.target
               if stop.variable != "time" else 0.0)

    def close_arc(t_end: float, dv_end: float) -> None:
        arcs.append(Arc(t_start=arc_t0, t_end=t_end,
                        kind="burn" if engine_on else "coast",
                        dv=dv_end - arc_dv0))

    def finish(t_fin: float, y_fin: State10) -> PropagationResult:
        close_arc(t_fin, y_fin[DV])
        final = _sample(t_fin, y_fin, engine_on, consts.e_const)
        if opts.record:
            samples.append(final)
        return PropagationResult(samples=tuple(samples),
                                 schedule=BurnSchedule(arcs=tuple(arcs)),
                                 final=final,
                                 guard_activations=guard.activations)

    def safe_step(y0: State10, s: float) -> State10:
        try:
            return rk4_step(f_arc, y0, s)
        except (OverflowError, DynamicsError) as exc:
            raise DomainError(
                f"dynamics failure near t={t:.3f} s: {exc}"
            ) from exc

    def probe_step(y0: State10, s: float) -> State10:
        # Event location re-integrates the same step many times; keep those
        # probes free of side effects on the v_r-guard hold value so the
        # event function is reproducible.
        saved = guard.last_dlam
        try:
            return safe_step(y0, s)
        finally:
            guard.last_dlam = saved

    while True:
        if t >= t_cap - 1e-12:
            raise StopNotReachedError(
                f"stop condition {stop.variable}={stop.target} not met "
                f"within {opts.t_max_s} s"
            )
        h = min(opts.step_s, t_cap - t)
        terminal_time_step = False
        if stop.variable == "time" and t + h >= stop.target - 1e-12:
            h = stop.target - t
            terminal_time_step = True

        y_new = safe_step(y, h)
        if y_new[R] <= opts.r_min_m:
            raise ImpactError(
                f"trajectory impacts: r={y_new[R]:.1f} m <= floor {opts.r_min_m:.1f} m"
            )
        if y_new[DV] >= opts.dv_max_ms and stop.variable != "delta_v":
            s_cap = locate_event(
                lambda s: probe_step(y, s)[DV] - opts.dv_max_ms,
                0.0, h, opts.event_tol_s,
            )
            raise DepletionError(
                f"characteristic velocity crossed the {opts.dv_max_ms:.0f} m/s "
                f"depletion cap at t={t + s_cap:.3f} s",
                _sample(t + s_cap, safe_step(y, s_cap), engine_on, consts.e_const),
            )
        _, _, kappa_new = _kappa_of(y_new, consts.e_const)

        # Candidate switching event in (t, t+h].
        sw_s: float | None = None
        kp = kappa_prev
        if abs(kp) < _KAPPA_SEED_EPS:
            kp = _KAPPA_SEED_EPS if engine_on else -_KAPPA_SEED_EPS
        wrong_side = (kappa_new < 0.0) if engine_on else (kappa_new >= 0.0)
        if wrong_side and kp * kappa_new < 0.0:
            def f_switch(s: float) -> float:
                return _kappa_of(probe_step(y, s), consts.e_const)[2]
            if f_switch(0.0) * kappa_new > 0.0:
                # Grazing start-of-arc residual; switch immediately.
                sw_s = 0.0
            else:
                sw_s = locate_event(f_switch, 0.0, h, opts.event_tol_s)

        # Candidate stop crossing in (t, t+h] (time stops are step-aligned).
        st_s: float | None = None
        sv_new = sv_prev
        if stop.variable != "time":
            sv_new = _stop_value(stop.variable, t + h, y_new) - stop.target
            if _crossed(stop.direction, sv_prev, sv_new):
                def f_stop(s: float) -> float:
                    return (_stop_value(stop.variable, t + s,
                                        probe_step(y, s)) - stop.target)
                st_s = locate_event(f_stop, 0.0, h, opts.event_tol_s)

        if sw_s is not None and (st_s is None or sw_s <= st_s):
            t_evt = t + sw_s
            y_evt = safe_step(y, sw_s)
            close_arc(t_evt, y_evt[DV])
            engine_on = not engine_on
            switches += 1
            if switches > opts.max_switches:
                raise SwitchLimitError(
                    f"more than {opts.max_switches} engine switching events"
                )
            f_arc = make_rhs(engine_on)
            t, y = t_evt, y_evt
            arc_t0, arc_dv0 = t, y[DV]
            kappa_prev = _kappa_of(y, consts.e_const)[2]
            if stop.variable != "time":
                sv_prev = _stop_value(stop.variable, t, y) - stop.target
            if opts.record:
                samples.append(_sample(t, y, engine_on, consts.e_const))
            continue

        if st_s is not None:
            crossings += 1
            if crossings >= stop.crossing_index:
                t_fin = t + st_s
                y_fin = safe_step(y, st_s)
                return finish(t_fin, y_fin)
            # Not the requested crossing: fall through and accept the step.

        t += h
        y = y_new
        kappa_prev = kappa_new
        sv_prev = sv_new
        if terminal_time_step:
            # Snap away float dust from the shortened terminal step.
            t = stop.target
            return finish(t, y)
        if opts.record:
            samples.append(_sample(t, y, engine_on, consts.e_const))


CSV_HEADER = ["t", "r", "vr", "vtheta", "theta", "chi", "dv",
              "lambda", "mu", "nu", "psi_dv", "p", "kappa", "engine"]


def write_trajectory_csv(samples: Sequence[TrajectorySample], path: str) -> None:
    """Write recorded samples as CSV in SI units, one row per sample."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for s in samples:
            st, adj = s.state, s.adjoint
            writer.writerow([
                repr(st.t), repr(st.r), repr(st.v_r), repr(st.v_theta),
                repr(st.theta), repr(st.chi), repr(st.dv),
                repr(adj.lam), repr(adj.mu), repr(s.nu), repr(adj.psi_dv),
                repr(s.p_hat), repr(s.kappa), int(s.engine_on),
            ])
