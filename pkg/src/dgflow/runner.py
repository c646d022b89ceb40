"""Scenario runs, convergence studies, steady-state checks, CSV artifacts.

A run directory contains:

    manifest.txt       the fully resolved configuration, one key = value per line
    diagnostics.csv    t, mass, entropy parts, dissipation, min rho, tau, limited cells
    snapshot_###.csv   nodal values with coordinates at requested times
    final_state.csv    the state at t_final

All numeric CSV fields carry 17 significant digits, and every reduction in
the solver uses a fixed summation order, so rerunning the same manifest on
the same platform reproduces the artifacts byte for byte.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, manifest_lines
from .convolution import make_plan
from .diagnostics import error_norms
from .field import NodalField, evaluate, node_coordinates
from .limiter import cell_averages
from .model import validate_model
from .quadrature import ConfigurationError, lagrange_operators
from .scenarios import ScenarioInstance, get_scenario
from .spatial import compute_xi
from .timestep import RunResult, Schedule, run

OUTPUT_ROOT_ENV = "DGFLOW_OUTPUT_ROOT"

_FMT = "%.17g"


def output_root(override=None) -> Path:
    if override is not None:
        return Path(override)
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "."))


def build_instance(cfg: ScenarioConfig) -> ScenarioInstance:
    scenario = get_scenario(cfg.scenario)
    instance = scenario.build(cfg)
    x_half = 0.5 * (cfg.domain[1] - cfg.domain[0])
    report = validate_model(instance.model, rho_max=instance.rho_probe_max,
                            x_range=(-x_half, x_half))
    if not report.passed:
        raise ConfigurationError(
            "model validation failed: " + "; ".join(report.failures))
    return instance


def schedule_from_config(cfg: ScenarioConfig) -> Schedule:
    return Schedule(t_final=cfg.t_final, tau_coefficient=cfg.c, tau_fixed=cfg.tau,
                    snapshot_times=cfg.snapshot_times, diag_every=cfg.diag_every,
                    limiter=cfg.limiter, alpha_mult=cfg.alpha_mult,
                    convolution=cfg.convolution)


def simulate(cfg: ScenarioConfig) -> tuple[ScenarioInstance, RunResult]:
    """Run a configured scenario in memory (no artifacts)."""
    instance = build_instance(cfg)
    result = run(instance.model, instance.mesh, instance.rule,
                 instance.initial, schedule_from_config(cfg))
    return instance, result


@dataclass
class RunArtifacts:
    directory: Path
    instance: ScenarioInstance
    result: RunResult


def run_scenario(cfg: ScenarioConfig, root=None) -> RunArtifacts:
    """Run a scenario and write its artifact set under the output root."""
    directory = output_root(root) / cfg.output_dir
    directory.mkdir(parents=True, exist_ok=True)
    _write_lines(directory / "manifest.txt", manifest_lines(cfg))

    instance, result = simulate(cfg)

    _write_diagnostics(directory / "diagnostics.csv", result.records)
    for i, (t, field) in enumerate(result.snapshots):
        _write_state(directory / f"snapshot_{i:03d}.csv", field, t)
    _write_state(directory / "final_state.csv", result.final.rho, result.final.t)
    return RunArtifacts(directory=directory, instance=instance, result=result)


def _write_lines(path: Path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_diagnostics(path: Path, records):
    rows = ["t,mass,entropy_total,entropy_internal,entropy_confinement,"
            "entropy_interaction,dissipation,min_rho,tau,limited_cells"]
    for r in records:
        e = r.entropy
        nums = (r.t, r.mass, e.total, e.internal, e.confinement, e.interaction,
                r.dissipation, r.min_rho, r.tau)
        rows.append(",".join(_FMT % v for v in nums) + f",{r.limited_cells}")
    _write_lines(path, rows)


def _write_state(path: Path, field: NodalField, t: float):
    rows = []
    if field.ndim == 1:
        rows.append("x,rho")
        x = node_coordinates(field.mesh, field.rule)
        for xv, rv in zip(x.ravel(), field.values.ravel()):
            rows.append(f"{_FMT % xv},{_FMT % rv}")
    else:
        rows.append("x,y,rho")
        xs, ys = node_coordinates(field.mesh, field.rule)
        xf = np.broadcast_to(xs, field.values.shape).ravel()
        yf = np.broadcast_to(ys, field.values.shape).ravel()
        for xv, yv, rv in zip(xf, yf, field.values.ravel()):
            rows.append(f"{_FMT % xv},{_FMT % yv},{_FMT % rv}")
    _write_lines(path, rows)


def read_state(path, mesh, rule) -> NodalField:
    """Rebuild a nodal field from a state CSV (row order is C order)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    vals = data[:, -1]
    if hasattr(mesh, "x"):
        shape = (*mesh.shape, rule.npoints, rule.npoints)
    else:
        shape = (mesh.n_cells, rule.npoints)
    return NodalField(mesh=mesh, rule=rule, values=vals.reshape(shape))


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    n: int
    l1: float
    order1: float | None
    l2: float
    order2: float | None
    linf: float
    orderinf: float | None


def _order(coarse, fine):
    return math.log2(coarse / fine) if coarse > 0 and fine > 0 else float("nan")


def convergence_study(cfg: ScenarioConfig, n_list, reference="exact",
                      ref_k: int = 4, ref_n: int = 640) -> list[ConvergenceRow]:
    """Error table over a mesh family against an exact or fine reference.

    reference = "exact" uses the scenario's closed-form solution at t_final;
    reference = "fine" runs the same scenario once at (ref_k, ref_n) and
    evaluates its interpolation polynomials at each coarse run's nodes.
    """
    n_list = list(n_list)
    if any(b != 2 * a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError("study resolutions must double: n 20,40,80,...")
    if reference not in ("exact", "fine"):
        raise ConfigurationError("reference must be 'exact' or 'fine'")

    ref_field = None
    if reference == "fine":
        fine_cfg = replace(cfg.with_n(ref_n), k=ref_k)
        _, fine_result = simulate(fine_cfg)
        ref_field = fine_result.final.rho

    rows = []
    prev = None
    for n in n_list:
        sub = cfg.with_n(n)
        instance, result = simulate(sub)
        t_final = result.final.t
        if reference == "exact":
            if instance.exact is None:
                raise ConfigurationError(
                    f"scenario {cfg.scenario!r} has no exact solution; "
                    "use the fine-grid reference")
            if result.final.rho.ndim == 2:
                ref = lambda x, y, e=instance.exact, t=t_final: e(x, y, t)
            else:
                ref = lambda x, e=instance.exact, t=t_final: e(x, t)
        else:
            ref = lambda x, f=ref_field: evaluate(f, x)
        l1, l2, linf = error_norms(result.final.rho, ref)
        if prev is None:
            rows.append(ConvergenceRow(sub.k, n, l1, None, l2, None, linf, None))
        else:
            rows.append(ConvergenceRow(sub.k, n, l1, _order(prev[0], l1),
                                       l2, _order(prev[1], l2),
                                       linf, _order(prev[2], linf)))
        prev = (l1, l2, linf)
    return rows


def format_table(rows) -> str:
    head = f"{'k':>2} {'N':>5} {'L1':>13} {'ord':>6} {'L2':>13} {'ord':>6} {'Linf':>13} {'ord':>6}"
    lines = [head]

    def o(v):
        return "  -  " if v is None else f"{v:5.2f}"

    for r in rows:
        lines.append(f"{r.k:>2} {r.n:>5} {r.l1:13.6e} {o(r.order1):>6} "
                     f"{r.l2:13.6e} {o(r.order2):>6} {r.linf:13.6e} {o(r.orderinf):>6}")
    return "\n".join(lines)


def write_study(rows, directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    csv_rows = ["k,N,L1,order1,L2,order2,Linf,orderinf"]
    for r in rows:
        def num(v):
            return "" if v is None else _FMT % v
        csv_rows.append(f"{r.k},{r.n},{_FMT % r.l1},{num(r.order1)},"
                        f"{_FMT % r.l2},{num(r.order2)},{_FMT % r.linf},{num(r.orderinf)}")
    _write_lines(directory / "study.csv", csv_rows)
    _write_lines(directory / "study.txt", format_table(rows).splitlines())


# ---------------------------------------------------------------------------
# steady-state checks
# ---------------------------------------------------------------------------

@dataclass
class SteadyReport:
    max_rho_dxi: float
    components: list  # (first_cell, last_cell, xi_spread) per support component
    disconnected: bool


def steady_state_check(run_dir, support_threshold: float = 1e-10) -> SteadyReport:
    """Check a finished run for stationarity: rho * dxi/dx at all nodes and
    constancy of xi on each connected component of the support."""
    from .config import config_from_file

    directory = Path(run_dir)
    cfg = config_from_file(directory / "manifest.txt")
    instance = build_instance(cfg)
    rho = read_state(directory / "final_state.csv", instance.mesh, instance.rule)
    plan = make_plan(instance.model.W, instance.mesh, instance.rule,
                     method=cfg.convolution)
    xi = compute_xi(instance.model, rho, plan)
    ops = lagrange_operators(instance.rule)

    if rho.ndim == 2:
        hx = instance.mesh.x.sizes[:, None, None, None]
        hy = instance.mesh.y.sizes[None, :, None, None]
        dxi_x = (2.0 / hx) * np.einsum("rq,ijqs->ijrs", ops.D, xi)
        dxi_y = (2.0 / hy) * np.einsum("sq,ijrq->ijrs", ops.D, xi)
        resid = max(float(np.abs(rho.values * dxi_x).max()),
                    float(np.abs(rho.values * dxi_y).max()))
        return SteadyReport(max_rho_dxi=resid, components=[], disconnected=False)

    h = instance.mesh.sizes[:, None]
    dxi = (2.0 / h) * (xi @ ops.D.T)
    resid = float(np.abs(rho.values * dxi).max())

    support = rho.values.max(axis=1) > support_threshold
    components = _periodic_components(support)
    comps = []
    for cells in components:
        vals = xi[cells, :]
        comps.append((int(cells[0]), int(cells[-1]),
                      float(vals.max() - vals.min())))
    return SteadyReport(max_rho_dxi=resid, components=comps,
                        disconnected=len(comps) > 1)


def _periodic_components(mask: np.ndarray) -> list:
    """Connected runs of True cells with periodic wrap-around."""
    n = mask.size
    if mask.all():
        return [np.arange(n)]
    if not mask.any():
        return []
    runs = []
    idx = np.flatnonzero(mask)
    current = [idx[0]]
    for i in idx[1:]:
        if i == current[-1] + 1:
            current.append(i)
        else:
            runs.append(current)
            current = [i]
    runs.append(current)
    # merge wrap-around: last run touching N-1 with first run touching 0
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == n - 1:
        runs[0] = runs.pop() + runs[0]
    return [np.array(r) for r in runs]
