"""Boundary value problem formulation and damped-Newton shooting.

Six problem variants (kinds I/II/III, each coplanar or not) plus the
time-minimal variant III_T. Unknown initial costate parameters are
iterated until the scaled terminal residuals vanish; Jacobians come from
forward differences across full propagations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .integrator import (
    BurnSchedule,
    DepletionError,
    IntegrationOptions,
    PropagationError,
    PropagationResult,
    StopCondition,
    propagate,
)
from .model import (
    AdjointConstants,
    AdjointState,
    OrbitalState,
    PaperDataset,
    PhysicalConstants,
    Vehicle,
)

KINDS = ("I", "II", "III", "III_T")

# Residual scales chosen at the problem's natural magnitudes.
V_REF = 1000.0     # m/s
L_REF = 1000e3     # m
THETA_REF = 0.1    # rad

_COND_LIMIT = 1e13


class ShootingError(RuntimeError):
    """Solver-level failure (infeasible initial guess, bad dimensions)."""


class InfeasibleGuessError(ShootingError):
    """Propagation from a guess failed to reach the stop condition."""


@dataclass(frozen=True)
class ProblemSpec:
    """One transfer boundary value problem."""
    kind: str                    # "I", "II", "III" or "III_T"
    coplanar: bool
    v_fr: float                  # final radial velocity, m/s
    v_ftheta: float              # final transversal velocity, m/s
    r_f: float                   # final radius, m
    chi_f: float | None = None   # plane-change target, rad (noncoplanar)
    dtheta: float | None = None  # transfer angle, rad (kind II)
    dt: float | None = None      # transfer time, s (kind III)
    dv_target: float | None = None  # characteristic velocity, m/s (kind III_T)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.r_f <= 0.0:
            raise ValueError(f"r_f must be positive, got {self.r_f}")
        if self.coplanar:
            if self.chi_f not in (None, 0.0):
                raise ValueError("coplanar problems must not set chi_f")
        elif self.chi_f is None:
            raise ValueError("noncoplanar problems require chi_f")
        if self.kind == "II" and self.dtheta is None:
            raise ValueError("kind II requires dtheta")
        if self.kind == "III" and self.dt is None:
            raise ValueError("kind III requires dt")
        if self.kind == "III_T" and self.dv_target is None:
            raise ValueError("kind III_T requires dv_target")

    @property
    def n_unknowns(self) -> int:
        n = 2                      # lam0, mu0
        if not self.coplanar:
            n += 1                 # E
        if self.kind != "I":
            n += 1                 # A or C
        return n

    @property
    def n_residuals(self) -> int:
        n = 2                      # v_r, v_theta
        if not self.coplanar:
            n += 1                 # chi
        if self.kind != "I":
            n += 1                 # r
        return n

    def stop_condition(self) -> StopCondition:
        if self.kind == "I":
            return StopCondition(variable="radius", target=self.r_f,
                                 direction="increasing")
        if self.kind == "II":
            return StopCondition(variable="angle", target=self.dtheta,
                                 direction="increasing")
        if self.kind == "III":
            return StopCondition(variable="time", target=self.dt)
        return StopCondition(variable="delta_v", target=self.dv_target,
                             direction="increasing")


@dataclass(frozen=True)
class GuessVector:
    """Initial unknowns of the shooting problem."""
    lam0: float
    mu0: float
    e_ms: float | None = None    # noncoplanar only
    a_ms: float | None = None    # kind II only
    c_ms2: float | None = None   # kinds III / III_T only

    def to_array(self, spec: ProblemSpec) -> np.ndarray:
        vals = [self.lam0, self.mu0]
        if not spec.coplanar:
            if self.e_ms is None:
                raise ShootingError("noncoplanar problem requires an E guess")
            vals.append(self.e_ms)
        if spec.kind == "II":
            if self.a_ms is None:
                raise ShootingError("kind II requires an A guess")
            vals.append(self.a_ms)
        elif spec.kind in ("III", "III_T"):
            if self.c_ms2 is None:
                raise ShootingError(f"kind {spec.kind} requires a C guess")
            vals.append(self.c_ms2)
        return np.asarray(vals, dtype=float)

    @staticmethod
    def from_array(x: np.ndarray, spec: ProblemSpec) -> "GuessVector":
        vals = list(map(float, x))
        lam0, mu0 = vals[0], vals[1]
        idx = 2
        e_ms = a_ms = c_ms2 = None
        if not spec.coplanar:
            e_ms = vals[idx]
            idx += 1
        if spec.kind == "II":
            a_ms = vals[idx]
        elif spec.kind in ("III", "III_T"):
            c_ms2 = vals[idx]
        return GuessVector(lam0=lam0, mu0=mu0, e_ms=e_ms, a_ms=a_ms, c_ms2=c_ms2)


@dataclass(frozen=True)
class ShootingContext:
    """Fixed data shared by every propagation of one problem."""
    r0: float
    v_r0: float
    v_theta0: float
    vehicle: Vehicle
    constants: PhysicalConstants

    @classmethod
    def from_dataset(cls, ds: PaperDataset) -> "ShootingContext":
        return cls(r0=ds.initial.r, v_r0=ds.initial.v_r,
                   v_theta0=ds.initial.v_theta,
                   vehicle=ds.vehicle, constants=ds.constants)

    def initial_state(self) -> OrbitalState:
        return OrbitalState(t=0.0, r=self.r0, v_r=self.v_r0,
                            v_theta=self.v_theta0, theta=0.0, chi=0.0, dv=0.0)


@dataclass(frozen=True)
class SolverOptions:
    newton_tol: float = 1e-8
    max_iter: int = 50
    fd_eps: float = 1e-8         # forward-difference step per unknown scale
    step_tol: float = 1e-12      # scaled Newton-step convergence threshold
    line_search_max: int = 8     # step halvings per iteration
    trust_rel: float = 0.5       # Newton-step clamp per unknown scale
    step_s: float = 1.0
    event_tol_s: float = 1e-9    # tighter than the propagation default so
                                 # event jitter stays below newton_tol
    t_max_s: float = 15500.0
    max_switches: int = 10
    vr_eps_ms: float = 1e-3
    multistart_n: int = 1
    multistart_spread: float = 0.2
    rng_seed: int = 0

    def integration_options(self, record: bool = False) -> IntegrationOptions:
        return IntegrationOptions(step_s=self.step_s,
                                  event_tol_s=self.event_tol_s,
                                  t_max_s=self.t_max_s,
                                  max_switches=self.max_switches,
                                  vr_eps_ms=self.vr_eps_ms,
                                  record=record)


@dataclass(frozen=True)
class Solution:
    """Converged (or best-effort) shooting result."""
    spec: ProblemSpec
    params: GuessVector
    residual_norm: float
    residuals: tuple[float, ...]
    schedule: BurnSchedule
    dv1: float
    dv2: float
    dv_total: float
    theta_f: float         # rad
    t_f: float             # s
    chi_f: float           # rad
    iterations: int
    converged: bool
    message: str = ""


def constants_from_guess(g: GuessVector, spec: ProblemSpec) -> AdjointConstants:
    """Fixed first-integral constants implied by the guess and problem kind."""
    e_const = 0.0 if spec.coplanar else float(g.e_ms)
    a_const = float(g.a_ms) if spec.kind == "II" else 0.0
    c_const = float(g.c_ms2) if spec.kind in ("III", "III_T") else 0.0
    return AdjointConstants(e_const=e_const, a_const=a_const, c_const=c_const)


def _propagate_guess(g: GuessVector, spec: ProblemSpec, ctx: ShootingContext,
                     opts: SolverOptions, record: bool = False) -> PropagationResult:
    consts = constants_from_guess(g, spec)
    adj = AdjointState(lam=g.lam0, mu=g.mu0, psi_dv=-1.0)
    try:
        return propagate(ctx.initial_state(), adj, consts, ctx.vehicle,
                         ctx.constants, spec.stop_condition(),
                         opts.integration_options(record=record))
    except PropagationError as exc:
        raise InfeasibleGuessError(str(exc)) from exc


def _residuals_of(final: OrbitalState, spec: ProblemSpec) -> np.ndarray:
    res = [(final.v_r - spec.v_fr) / V_REF,
           (final.v_theta - spec.v_ftheta) / V_REF]
    if not spec.coplanar:
        res.append((final.chi - spec.chi_f) / THETA_REF)
    if spec.kind != "I":
        res.append((final.r - spec.r_f) / L_REF)
    return np.asarray(res, dtype=float)


def residual_vector(g: GuessVector, spec: ProblemSpec, ctx: ShootingContext,
                    opts: SolverOptions | None = None) -> np.ndarray:
    """Scaled terminal residuals of the propagation started from g."""
    if opts is None:
        opts = SolverOptions()
    try:
        final = _propagate_guess(g, spec, ctx, opts).final.state
    except InfeasibleGuessError as exc:
        cause = exc.__cause__
        if not isinstance(cause, DepletionError):
            raise
        # Penalized residual from the state at the depletion cap: large but
        # smooth in the guess, so Newton can descend back to feasibility.
        final = cause.final.state
    return _residuals_of(final, spec)


# ---------------------------------------------------------------------------
# Internal Newton parametrization.
#
# Converged solutions sit on the near-singular surface p_hat0 ~= 1 (the
# switching function at departure is kappa0 = p_hat0 - 1, and residuals are
# ~1e6 times stiffer across that surface than along it). Newton therefore
# iterates on z = (lam0, kappa0[, E][, A | C]) and recovers
# mu0 = sqrt((1 + kappa0)^2 - lam0^2 - nu0^2), which separates the stiff
# direction into its own well-scaled unknown.
# ---------------------------------------------------------------------------

def _nu0_of(e_ms: float, ctx: ShootingContext) -> float:
    return e_ms / ctx.v_theta0


def _internal_scales(spec: ProblemSpec) -> np.ndarray:
    """Natural magnitudes of the internal unknowns."""
    scales = [0.1, 1e-4]                 # lam0, kappa0
    if not spec.coplanar:
        scales.append(1000.0)            # E, m/s
    if spec.kind == "II":
        scales.append(100.0)             # A, m/s
    elif spec.kind in ("III", "III_T"):
        scales.append(0.1)               # C, m/s^2
    return np.asarray(scales)


def _to_internal(x: np.ndarray, spec: ProblemSpec,
                 ctx: ShootingContext) -> np.ndarray:
    z = x.copy()
    lam0, mu0 = x[0], x[1]
    nu0 = 0.0 if spec.coplanar else _nu0_of(x[2], ctx)
    z[1] = math.sqrt(lam0 * lam0 + mu0 * mu0 + nu0 * nu0) - 1.0
    return z


def _from_internal(z: np.ndarray, spec: ProblemSpec,
                   ctx: ShootingContext) -> np.ndarray:
    x = z.copy()
    lam0, kappa0 = z[0], z[1]
    nu0 = 0.0 if spec.coplanar else _nu0_of(z[2], ctx)
    arg = (1.0 + kappa0) ** 2 - lam0 * lam0 - nu0 * nu0
    if kappa0 <= -1.0 or arg <= 0.0:
        raise InfeasibleGuessError(
            f"no positive mu0 for lam0={lam0}, kappa0={kappa0}, nu0={nu0}"
        )
    x[1] = math.sqrt(arg)
    return x


def _eval_internal(z: np.ndarray, spec: ProblemSpec, ctx: ShootingContext,
                   opts: SolverOptions) -> tuple[np.ndarray, bool]:
    """Residuals at an internal point; the flag is False on the penalized
    (propellant-depleted) branch."""
    g = GuessVector.from_array(_from_internal(z, spec, ctx), spec)
    try:
        final = _propagate_guess(g, spec, ctx, opts).final.state
    except InfeasibleGuessError as exc:
        cause = exc.__cause__
        if not isinstance(cause, DepletionError):
            raise
        return _residuals_of(cause.final.state, spec), False
    return _residuals_of(final, spec), True


def _fd_jacobian(z: np.ndarray, r0: np.ndarray, spec: ProblemSpec,
                 ctx: ShootingContext, opts: SolverOptions) -> np.ndarray:
    n = z.size
    jac = np.empty((r0.size, n))
    scales = _internal_scales(spec)
    for j in range(n):
        # The step is a fixed fraction of each unknown's natural scale
        # rather than of its current value; event location at 1e-9 s keeps
        # the finite-difference noise floor well below these steps.
        dx = opts.fd_eps * scales[j]
        for _attempt in range(4):
            zp = z.copy()
            zp[j] += dx
            try:
                rp, _ = _eval_internal(zp, spec, ctx, opts)
                break
            except InfeasibleGuessError:
                dx *= 0.25
        else:
            raise InfeasibleGuessError(
                f"finite-difference perturbation of unknown {j} is infeasible"
            )
        jac[:, j] = (rp - r0) / dx
    return jac


def _newton(z0: np.ndarray, spec: ProblemSpec, ctx: ShootingContext,
            opts: SolverOptions) -> tuple[np.ndarray, np.ndarray, int, bool, str]:
    z = z0.copy()
    r, _ = _eval_internal(z, spec, ctx, opts)
    norm = float(np.linalg.norm(r))
    iterations = 0
    converged = norm < opts.newton_tol
    message = "converged at initial guess" if converged else ""

    scales = _internal_scales(spec)
    while not converged and iterations < opts.max_iter:
        jac = _fd_jacobian(z, r, spec, ctx, opts)
        if not np.all(np.isfinite(jac)):
            message = "non-finite Jacobian"
            break
        # Work in scaled coordinates: the boundary maps are violently
        # anisotropic (condition numbers up to ~1e10 for the four-unknown
        # kinds because lam0, kappa0 and C act through nearly the same
        # switching-time mechanism), so a raw Newton step zig-zags along
        # the ill-determined valley. A Levenberg-Marquardt family of steps
        # with increasing damping restores a descent direction whenever
        # the undamped step fails the line search.
        jac_s = jac * scales[np.newaxis, :]
        u_m, sv, vt = np.linalg.svd(jac_s, full_matrices=False)
        if sv[0] <= 0.0:
            message = "singular Jacobian"
            break
        utr = u_m.T @ r
        clamp = np.maximum(opts.trust_rel * np.abs(z) / scales, opts.trust_rel)

        step = None
        r_trial = None
        for damp_rel in (0.0, 1e-8, 1e-5, 1e-3, 1e-2, 1e-1):
            damp = damp_rel * sv[0]
            gain = sv / (sv * sv + damp * damp)
            dz_s = -(vt.T @ (gain * utr))
            overshoot = float(np.max(np.abs(dz_s) / clamp))
            if overshoot > 1.0:
                dz_s = dz_s / overshoot
            alpha = 1.0
            for _ in range(opts.line_search_max + 1):
                try:
                    cand, _ = _eval_internal(z + alpha * (scales * dz_s),
                                             spec, ctx, opts)
                except InfeasibleGuessError:
                    alpha *= 0.5
                    continue
                if float(np.linalg.norm(cand)) < norm:
                    step = alpha * (scales * dz_s)
                    r_trial = cand
                    break
                alpha *= 0.5
            if step is not None:
                break
        if step is None:
            message = "line search stalled"
            break

        z = z + step
        r = r_trial
        norm = float(np.linalg.norm(r_trial))
        iterations += 1

        scaled_step = float(np.max(np.abs(step) / scales))
        if norm < opts.newton_tol:
            converged = True
            message = "residual norm below tolerance"
        elif scaled_step < opts.step_tol:
            converged = True
            message = "Newton step below tolerance"

    if not converged and not message:
        message = f"max_iter={opts.max_iter} exceeded"
    return z, r, iterations, converged, message


# Feasibility-restoration grid tried when the caller's seed depletes the
# propellant cap or cannot be propagated at all. Impulsive-limit generating
# seeds lie exactly on kappa0 = 0 with the full delta-v at infinite thrust,
# which a finite-thrust bang-bang propagation cannot fly; slightly negative
# kappa0 (a short initial coast) combined with a reduced radial costate
# recovers a feasible two-burn structure to start Newton from.
_RESTORE_KAPPA0 = (None, -1e-6, -3e-6, -1e-5, -3e-5, -1e-4, 1e-5)
_RESTORE_LAM_SCALE = (1.0, 0.7, 0.5, 0.35, 0.25)


def _newton_with_restoration(
        z0: np.ndarray, spec: ProblemSpec, ctx: ShootingContext,
        opts: SolverOptions) -> tuple[np.ndarray, np.ndarray, int, bool, str]:
    """Newton from z0, then from restoration-grid candidates until one
    converges; the best non-converged attempt is returned otherwise."""
    best: tuple[np.ndarray, np.ndarray, int, bool, str] | None = None
    total_iters = 0
    for kappa0 in _RESTORE_KAPPA0:
        for lam_scale in _RESTORE_LAM_SCALE:
            z = z0.copy()
            z[0] *= lam_scale
            if kappa0 is not None:
                z[1] = kappa0
            try:
                z_out, r, iters, ok, msg = _newton(z, spec, ctx, opts)
            except InfeasibleGuessError:
                continue
            total_iters += iters
            if ok:
                return z_out, r, total_iters, ok, msg
            if best is None or float(np.linalg.norm(r)) < float(
                    np.linalg.norm(best[1])):
                best = (z_out, r, total_iters, ok, msg)
    if best is None:
        raise InfeasibleGuessError(
            "no feasibility-restoration candidate produced a propagatable "
            "trajectory"
        )
    z_out, r, _, ok, msg = best
    return z_out, r, total_iters, ok, msg


# A converged free-angle (kind I) root with a barely positive switching
# value at departure usually has an interior-ignition sibling: the same
# transfer preceded by a short coast along the departure orbit, igniting
# where the switching function crosses zero from below. The sibling is the
# stationary point of cost with respect to the ignition point and is the
# root the reference solutions tabulate, so prefer it when it exists.
_IGNITION_KAPPA_MAX = 1e-3


def _refine_ignition(z: np.ndarray, r: np.ndarray, spec: ProblemSpec,
                     ctx: ShootingContext,
                     opts: SolverOptions) -> tuple[np.ndarray, np.ndarray, int]:
    kappa0 = float(z[1])
    if not 0.0 < kappa0 < _IGNITION_KAPPA_MAX:
        return z, r, 0
    z_seed = z.copy()
    z_seed[1] = -kappa0
    try:
        z_alt, r_alt, iters, ok, _ = _newton(z_seed, spec, ctx, opts)
    except InfeasibleGuessError:
        return z, r, 0
    if ok and z_alt[1] < 0.0:
        return z_alt, r_alt, iters
    return z, r, 0


def _build_solution(x: np.ndarray, r: np.ndarray, spec: ProblemSpec,
                    ctx: ShootingContext, opts: SolverOptions,
                    iterations: int, converged: bool, message: str) -> Solution:
    g = GuessVector.from_array(x, spec)
    try:
        result = _propagate_guess(g, spec, ctx, opts, record=True)
    except InfeasibleGuessError as exc:
        failed = _failed_solution(spec, g)
        return replace(failed, residual_norm=float(np.linalg.norm(r)),
                       iterations=iterations, message=str(exc))
    burns = result.schedule.burn_arcs
    final = result.final.state
    return Solution(
        spec=spec,
        params=g,
        residual_norm=float(np.linalg.norm(r)),
        residuals=tuple(map(float, r)),
        schedule=result.schedule,
        dv1=burns[0].dv if burns else 0.0,
        dv2=burns[1].dv if len(burns) > 1 else 0.0,
        dv_total=final.dv,
        theta_f=final.theta,
        t_f=final.t,
        chi_f=final.chi,
        iterations=iterations,
        converged=converged,
        message=message,
    )


def solve(spec: ProblemSpec, guess: GuessVector, ctx: ShootingContext,
          opts: SolverOptions | None = None) -> Solution:
    """Damped-Newton shooting from the given guess.

    With multistart_n > 1, additional perturbed seeds are tried and the
    best converged solution by total dv is kept (local-extremum hedge).
    """
    if opts is None:
        opts = SolverOptions()
    x0 = guess.to_array(spec)
    if x0.size != spec.n_unknowns:
        raise ShootingError(
            f"guess dimension {x0.size} != unknown count {spec.n_unknowns}"
        )

    z0 = _to_internal(x0, spec, ctx)
    scales = _internal_scales(spec)
    seeds = [z0]
    if opts.multistart_n > 1:
        rng = np.random.default_rng(opts.rng_seed)
        for _ in range(opts.multistart_n - 1):
            jitter = opts.multistart_spread * scales * rng.standard_normal(z0.size)
            seeds.append(z0 + jitter)

    best: Solution | None = None
    first_error: InfeasibleGuessError | None = None
    for i, seed in enumerate(seeds):
        try:
            z, r, iters, ok, msg = _newton_with_restoration(seed, spec, ctx,
                                                            opts)
            if ok and spec.kind == "I":
                z, r, extra = _refine_ignition(z, r, spec, ctx, opts)
                iters += extra
            sol = _build_solution(_from_internal(z, spec, ctx), r, spec, ctx,
                                  opts, iters, ok, msg)
        except InfeasibleGuessError as exc:
            if i == 0:
                first_error = exc
            continue
        if best is None:
            best = sol
        elif (sol.converged, -sol.dv_total) > (best.converged, -best.dv_total):
            best = sol
    if best is None:
        raise first_error if first_error is not None else ShootingError(
            "no multistart seed produced a propagatable trajectory"
        )
    return best


def sweep(spec_template: ProblemSpec, chi_list_rad: list[float],
          seed: GuessVector, ctx: ShootingContext,
          opts: SolverOptions | None = None,
          dtheta_by_chi: dict[float, float] | None = None,
          dt_by_chi: dict[float, float] | None = None,
          dataset: PaperDataset | None = None) -> list[Solution]:
    """Continuation sweep over plane-change angles.

    Each converged solution seeds the next angle; on failure the sweep
    retries from the nearest bundled generating solution (when a dataset
    is supplied) and then continues from the last good seed.
    """
    if opts is None:
        opts = SolverOptions()
    if sorted(chi_list_rad) != list(chi_list_rad):
        raise ValueError("chi_list must be sorted ascending")

    solutions: list[Solution] = []
    current_seed = seed
    for chi in chi_list_rad:
        spec = _spec_for_chi(spec_template, chi, dtheta_by_chi, dt_by_chi)
        guess = _adapt_seed(current_seed, spec, chi, dataset)
        sol = None
        try:
            sol = solve(spec, guess, ctx, opts)
        except ShootingError:
            sol = None
        if (sol is None or not sol.converged) and dataset is not None:
            fallback = default_guess(spec, dataset, math.degrees(chi))
            try:
                retry = solve(spec, fallback, ctx, opts)
                if sol is None or (retry.converged and not sol.converged):
                    sol = retry
            except ShootingError:
                pass
        if sol is None:
            sol = _failed_solution(spec, guess)
        solutions.append(sol)
        if sol.converged:
            current_seed = sol.params
    return solutions


def _spec_for_chi(template: ProblemSpec, chi: float,
                  dtheta_by_chi: dict[float, float] | None,
                  dt_by_chi: dict[float, float] | None) -> ProblemSpec:
    coplanar = chi == 0.0
    kwargs = dict(coplanar=coplanar, chi_f=None if coplanar else chi)
    if dtheta_by_chi is not None:
        kwargs["dtheta"] = dtheta_by_chi[chi]
    if dt_by_chi is not None:
        kwargs["dt"] = dt_by_chi[chi]
    return replace(template, **kwargs)


def _adapt_seed(seed: GuessVector, spec: ProblemSpec, chi: float,
                dataset: PaperDataset | None) -> GuessVector:
    g = seed
    if not spec.coplanar and not g.e_ms:
        e_ms = None
        if dataset is not None:
            e_ms = _nearest_row(dataset, math.degrees(chi)).e_const
        g = replace(g, e_ms=e_ms if e_ms else 1000.0)
    if spec.coplanar and g.e_ms is not None:
        g = replace(g, e_ms=None)
    if spec.kind == "II" and g.a_ms is None:
        g = replace(g, a_ms=0.0)
    if spec.kind in ("III", "III_T") and g.c_ms2 is None:
        g = replace(g, c_ms2=0.0)
    return g


def _failed_solution(spec: ProblemSpec, guess: GuessVector) -> Solution:
    return Solution(spec=spec, params=guess, residual_norm=math.inf,
                    residuals=(), schedule=BurnSchedule(arcs=()),
                    dv1=0.0, dv2=0.0, dv_total=math.nan,
                    theta_f=math.nan, t_f=math.nan, chi_f=math.nan,
                    iterations=0, converged=False,
                    message="no propagatable trajectory from any seed")


def _nearest_row(dataset: PaperDataset, chi_deg: float):
    key = min(dataset.table5, key=lambda i: abs(i - chi_deg))
    return dataset.table5[key]


def default_guess(spec: ProblemSpec, dataset: PaperDataset,
                  chi_deg: float | None = None) -> GuessVector:
    """Initial guess from the bundled reference solutions, keyed by the
    nearest inclination.

    Free-angle transfers admit nearby sibling roots that differ in the
    ignition point along the departure orbit; seeding from the reference
    root keeps Newton in the basin of the globally best one.
    """
    if chi_deg is None:
        chi_deg = 0.0 if spec.coplanar else math.degrees(spec.chi_f)
    row = _nearest_row(dataset, chi_deg)
    return GuessVector(
        lam0=row.lam0,
        mu0=row.mu0,
        e_ms=None if spec.coplanar else row.e_const,
        a_ms=0.0 if spec.kind == "II" else None,
        c_ms2=0.0 if spec.kind in ("III", "III_T") else None,
    )
