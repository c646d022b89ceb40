"""Euler forward and SSP-RK2/RK3 stepping with the halving controller.

SSP schemes are convex combinations of Euler steps, so applying the scaling
limiter right after every Euler stage keeps nodal values non-negative
whenever the stage's cell averages stay non-negative.  When an average does
go negative the whole step is restarted from the last accepted state with
half the step size, and the step stays halved for the remainder of the run
(no re-growth).  The analytic weak-positivity bound is available as a
diagnostic but is not enforced a priori.
"""

from __future__ import annotations

from dataclasses import dataclass

from .convolution import ConvolutionPlan, make_plan
from .diagnostics import DiagnosticsRecord, discrete_dissipation, discrete_entropy, total_mass
from .field import NodalField, interpolate
from .limiter import WeakPositivityViolated, apply_positivity_limiter
from .model import ModelSpec
from .quadrature import OperatorSet, lagrange_operators
from .spatial import compute_rhs

# halving below this fraction of the run length aborts the run
_TAU_FLOOR_FRACTION = 1e-14


class SolverAbort(RuntimeError):
    """Step halving hit the floor; the configuration cannot advance."""


@dataclass(frozen=True)
class SolverState:
    rho: NodalField
    t: float
    tau: float
    step_count: int = 0
    halving_count: int = 0
    limited_cells_last: int = 0


@dataclass(frozen=True)
class StepControls:
    limiter: bool = True
    rk_order: int | None = None  # None: chosen from the polynomial degree
    alpha_mult: float = 1.0
    tau_floor: float = 0.0


def rk_order_for_degree(k: int) -> int:
    """Euler is enough for k = 1 under tau ~ h^2; RK2 covers k = 2, 3;
    RK3 covers k = 4 and up."""
    if k <= 1:
        return 1
    if k <= 3:
        return 2
    return 3


def euler_stage(model: ModelSpec, rho: NodalField, t: float, tau: float,
                plan: ConvolutionPlan | None = None, ops: OperatorSet | None = None,
                alpha_mult: float = 1.0) -> NodalField:
    """One Euler forward stage, before any limiting."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    rhs = compute_rhs(model, rho, t=t, plan=plan, ops=ops, alpha_mult=alpha_mult)
    return rho.with_values(rho.values + tau * rhs)


def ssp_stage_combine(weights, fields) -> NodalField:
    """Convex combination of nodal fields (nodewise)."""
    out = weights[0] * fields[0].values
    for w, f in zip(weights[1:], fields[1:]):
        out = out + w * f.values
    return fields[0].with_values(out)


def _limit(rho: NodalField, enabled: bool):
    if not enabled:
        return rho, 0
    limited, report = apply_positivity_limiter(rho)
    return limited, report.cells_modified


def _attempt_step(model, rho, t, tau, plan, ops, controls, order):
    """Run all stages of one step at fixed tau; WeakPositivityViolated escapes."""
    lim_total = 0

    def stage(state, ts):
        nonlocal lim_total
        pre = euler_stage(model, state, ts, tau, plan, ops, controls.alpha_mult)
        out, nlim = _limit(pre, controls.limiter)
        lim_total += nlim
        return out

    if order == 1:
        new = stage(rho, t)
    elif order == 2:
        s1 = stage(rho, t)
        new = ssp_stage_combine((0.5, 0.5), (rho, stage(s1, t + tau)))
    else:
        s1 = stage(rho, t)
        s2 = ssp_stage_combine((0.75, 0.25), (rho, stage(s1, t + tau)))
        new = ssp_stage_combine((1.0 / 3.0, 2.0 / 3.0), (rho, stage(s2, t + 0.5 * tau)))
    return new, lim_total


def advance(model: ModelSpec, state: SolverState, plan: ConvolutionPlan | None = None,
            ops: OperatorSet | None = None, controls: StepControls = StepControls(),
            t_stop: float | None = None) -> SolverState:
    """Take one full time step, halving tau and restarting on weak-positivity
    failure.  The step is clipped so t never overshoots t_stop."""
    if ops is None:
        ops = lagrange_operators(state.rho.rule)
    order = controls.rk_order or rk_order_for_degree(state.rho.rule.degree)

    tau_persistent = state.tau
    tau = state.tau
    if t_stop is not None:
        tau = min(tau, t_stop - state.t)
        if tau <= 0:
            return state
    halvings = 0
    while True:
        try:
            new_rho, lim_cells = _attempt_step(model, state.rho, state.t, tau,
                                               plan, ops, controls, order)
            break
        except WeakPositivityViolated as exc:
            tau *= 0.5
            tau_persistent *= 0.5
            halvings += 1
            if tau < controls.tau_floor:
                raise SolverAbort(
                    f"time step underflow at t = {state.t:.6g} "
                    f"(tau = {tau:.3e} after {halvings} halvings, "
                    f"cell {exc.cell})") from exc
    return SolverState(rho=new_rho, t=state.t + tau, tau=tau_persistent,
                       step_count=state.step_count + 1,
                       halving_count=state.halving_count + halvings,
                       limited_cells_last=lim_cells)


@dataclass(frozen=True)
class Schedule:
    """Run-level controls: step rule tau = c h^2 (or a fixed tau), horizon,
    snapshot instants and diagnostics cadence."""

    t_final: float
    tau_coefficient: float | None = None
    tau_fixed: float | None = None
    snapshot_times: tuple = ()
    diag_every: int = 1
    limiter: bool = True
    rk_order: int | None = None
    alpha_mult: float = 1.0
    convolution: str = "fft"
    conv_tol: float = 1e-10


@dataclass
class RunResult:
    initial: NodalField
    final: SolverState
    snapshots: list  # (t, NodalField) pairs
    records: list  # DiagnosticsRecord series
    plan: ConvolutionPlan | None = None


def _min_cell_size(mesh) -> float:
    if hasattr(mesh, "x"):
        return min(float(mesh.x.sizes.min()), float(mesh.y.sizes.min()))
    return float(mesh.sizes.min())


def run(model: ModelSpec, mesh, rule, rho0, schedule: Schedule) -> RunResult:
    """Drive a full simulation from nodal-interpolated initial data.

    rho0 may be a function of the physical coordinates or an existing
    NodalField.  Initial data that interpolate to negative nodal values are
    limited once before the first step (when the limiter is enabled).
    """
    if isinstance(rho0, NodalField):
        rho = rho0
    else:
        rho = interpolate(mesh, rule, rho0)
    if schedule.limiter and rho.min() < 0.0:
        rho, _ = apply_positivity_limiter(rho)

    plan = make_plan(model.W, mesh, rule, method=schedule.convolution,
                     tol=schedule.conv_tol)
    ops = lagrange_operators(rule)

    if schedule.tau_fixed is not None:
        tau0 = float(schedule.tau_fixed)
    elif schedule.tau_coefficient is not None:
        tau0 = float(schedule.tau_coefficient) * _min_cell_size(mesh) ** 2
    else:
        raise ValueError("schedule needs tau_coefficient or tau_fixed")
    controls = StepControls(limiter=schedule.limiter, rk_order=schedule.rk_order,
                            alpha_mult=schedule.alpha_mult,
                            tau_floor=_TAU_FLOOR_FRACTION * max(schedule.t_final, tau0))

    state = SolverState(rho=rho, t=0.0, tau=tau0)
    records = [_record(model, state, plan, ops)]
    snapshots = [(0.0, rho)]
    pending = sorted(t for t in schedule.snapshot_times if 0.0 < t < schedule.t_final)

    while state.t < schedule.t_final - 1e-14 * max(1.0, schedule.t_final):
        prev = state
        state = advance(model, state, plan, ops, controls, t_stop=schedule.t_final)
        while pending and state.t >= pending[0] - 1e-12:
            t_snap = pending.pop(0)
            if abs(prev.t - t_snap) < abs(state.t - t_snap):
                snapshots.append((prev.t, prev.rho))
            else:
                snapshots.append((state.t, state.rho))
        if state.step_count % schedule.diag_every == 0:
            records.append(_record(model, state, plan, ops))

    if records[-1].t != state.t:
        records.append(_record(model, state, plan, ops))
    if schedule.t_final > 0.0:
        snapshots.append((state.t, state.rho))
    return RunResult(initial=rho, final=state, snapshots=snapshots,
                     records=records, plan=plan)


def _record(model, state: SolverState, plan, ops) -> DiagnosticsRecord:
    return DiagnosticsRecord(
        t=state.t,
        mass=total_mass(state.rho),
        entropy=discrete_entropy(model, state.rho, plan),
        dissipation=discrete_dissipation(model, state.rho, plan, ops),
        min_rho=state.rho.min(),
        tau=state.tau,
        limited_cells=state.limited_cells_last,
    )
