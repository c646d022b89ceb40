"""Scenario catalog: named problem presets with meshes, data, and defaults.

Each scenario bundles a model, a domain, initial data, and desk-scale run
defaults.  Scenarios flagged `long` have published studies that take hours
at full resolution; their defaults here are trimmed so a default run stays
in the seconds-to-minutes range, and the full-scale settings can be dialed
back in through the config file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.special import xlogy

from .field import NodalField
from .mesh import Mesh1D, Mesh2D, uniform_mesh_1d, uniform_mesh_2d
from .model import InteractionKernel, Linear, MirrorF, ModelSpec
from .quadrature import ConfigurationError, QuadRule, gauss_lobatto_rule


@dataclass(frozen=True)
class ScenarioInstance:
    """A fully materialized problem: model + discretization + data."""

    model: ModelSpec
    mesh: Mesh1D | Mesh2D
    rule: QuadRule
    initial: Callable
    exact: Optional[Callable] = None   # (x, t) or (x, y, t)
    steady: Optional[Callable] = None  # closed-form stationary profile
    rho_probe_max: float = 1.0


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    dimension: int
    long: bool
    defaults: dict
    build: Callable  # (config) -> ScenarioInstance


REGISTRY: dict[str, Scenario] = {}


def _register(name, description, dimension, defaults, build, long=False):
    REGISTRY[name] = Scenario(name=name, description=description,
                              dimension=dimension, long=long,
                              defaults=defaults, build=build)


def get_scenario(name: str) -> Scenario:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise ConfigurationError(f"unknown scenario {name!r}; known: {known}") from None


def _mesh_rule(config):
    rule = gauss_lobatto_rule(config.k)
    if config.dimension == 2:
        ax, bx, ay, by = config.domain
        mesh = uniform_mesh_2d(ax, bx, config.nx, ay, by, config.ny)
    else:
        a, b = config.domain
        mesh = uniform_mesh_1d(a, b, config.n)
    return mesh, rule


def _identity(r):
    return r


def _zero_like(r):
    return np.zeros_like(r)


# ---------------------------------------------------------------------------
# accuracy scenarios
# ---------------------------------------------------------------------------

def _build_advection(config):
    model = ModelSpec(f=_identity, g_choice=MirrorF(),
                      H=_zero_like, Hprime=_zero_like,
                      V=lambda x: x,
                      xi_boundary_override=(-math.pi, math.pi))
    mesh, rule = _mesh_rule(config)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x: 1.0 + np.sin(x),
        exact=lambda x, t: 1.0 + np.sin(x + t))


_register(
    "advection", "linear advection as a degenerate flow: f = rho, xi = x "
    "(potential flux pinned at the boundary), exact 1 + sin(x + t)",
    dimension=1,
    defaults=dict(k=2, n=40, domain=(-math.pi, math.pi), c=0.02, t_final=2.0,
                  limiter=False),
    build=_build_advection)


def _h_log(r):
    return xlogy(r, r) - r


def _build_heat_log(config):
    model = ModelSpec(f=_identity, g_choice=MirrorF(), H=_h_log, Hprime=np.log)
    mesh, rule = _mesh_rule(config)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x: 2.0 + np.sin(x),
        exact=lambda x, t: 2.0 + np.exp(-t) * np.sin(x),
        rho_probe_max=3.0)


_register(
    "heat_log", "heat equation in entropy form: f = rho, H' = log(rho), "
    "exact 2 + exp(-t) sin(x)",
    dimension=1,
    defaults=dict(k=2, n=40, domain=(-math.pi, math.pi), c=0.01, t_final=2.0,
                  limiter=True),
    build=_build_heat_log)


def _build_heat_sqrt(config):
    model = ModelSpec(f=np.sqrt, g_choice=MirrorF(),
                      H=lambda r: (4.0 / 3.0) * r ** 1.5,
                      Hprime=lambda r: 2.0 * np.sqrt(r))
    mesh, rule = _mesh_rule(config)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x: 2.0 + np.sin(x),
        exact=lambda x, t: 2.0 + np.exp(-t) * np.sin(x),
        rho_probe_max=3.0)


_register(
    "heat_sqrt", "heat equation, alternative split: f = sqrt(rho), "
    "H' = 2 sqrt(rho)",
    dimension=1,
    defaults=dict(k=4, n=40, domain=(-math.pi, math.pi), c=0.01, t_final=2.0,
                  limiter=True),
    build=_build_heat_sqrt)


def _gauss_bump(x, scale=0.1):
    return np.exp(-x * x / scale) / math.sqrt(scale * math.pi)


_SMOOTH_KERNEL = InteractionKernel(
    evaluate=lambda z: 0.2 * _gauss_bump(z), smooth=True, images=1)

_HAT_KERNEL = InteractionKernel(
    evaluate=lambda z: np.maximum(0.2 - np.abs(z), 0.0), smooth=False,
    breakpoints=(-0.2, 0.0, 0.2), images=1)


def _build_kernel(kernel):
    def build(config):
        model = ModelSpec(f=_identity, g_choice=MirrorF(),
                          H=_zero_like, Hprime=_zero_like, W=kernel)
        mesh, rule = _mesh_rule(config)
        return ScenarioInstance(
            model=model, mesh=mesh, rule=rule,
            initial=lambda x: _gauss_bump(x) ** 4,
            rho_probe_max=4.0)
    return build


_register(
    "kernel_smooth", "pure aggregation with a smooth Gaussian attraction "
    "kernel; accuracy is measured against a fine self-reference",
    dimension=1,
    defaults=dict(k=3, n=80, domain=(-1.0, 1.0), c=0.4, t_final=0.2,
                  limiter=False),
    build=_build_kernel(_SMOOTH_KERNEL))

_register(
    "kernel_hat", "pure aggregation with the compactly supported hat kernel "
    "max(0.2 - |x|, 0); kernel moments are integrated exactly",
    dimension=1,
    defaults=dict(k=2, n=80, domain=(-1.0, 1.0), c=0.4, t_final=0.2,
                  limiter=False),
    build=_build_kernel(_HAT_KERNEL))


# ---------------------------------------------------------------------------
# Fokker-Planck family
# ---------------------------------------------------------------------------

def _build_porous_m2(config):
    shift = float(config.params.get("shift", 0.0))
    model = ModelSpec(f=_identity, g_choice=MirrorF(),
                      H=lambda r: r * r, Hprime=lambda r: 2.0 * r,
                      V=lambda x: 0.5 * x * x)
    mesh, rule = _mesh_rule(config)
    peak = (3.0 / 8.0) ** (2.0 / 3.0)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x: np.maximum(1.0 - np.abs(x - shift), 0.0),
        steady=lambda x: np.maximum(peak - 0.25 * x * x, 0.0))


_register(
    "porous_m2", "porous medium (m = 2) with quadratic confinement; hat "
    "initial data (param shift moves the hat) relax to a compactly "
    "supported parabolic steady profile",
    dimension=1,
    defaults=dict(k=2, n=40, domain=(-2.0, 2.0), c=0.005, t_final=5.0,
                  limiter=True, snapshot_times=(1.0, 2.5),
                  params=dict(shift=0.0)),
    build=_build_porous_m2)


def _build_fp(kappa):
    def build(config):
        def hfun(r):
            return xlogy(r, r) - kappa * xlogy(1.0 + kappa * r, 1.0 + kappa * r)

        model = ModelSpec(
            f=lambda r: r * (1.0 + kappa * r), g_choice=Linear(2.0),
            H=hfun,
            Hprime=lambda r: np.log(r / (1.0 + kappa * r)),
            V=lambda x: 0.5 * x * x)
        mesh, rule = _mesh_rule(config)
        return ScenarioInstance(
            model=model, mesh=mesh, rule=rule,
            initial=lambda x: np.exp(-(x - 1.0) ** 2 / 0.4) / (0.4 * math.pi))
    return build


_register(
    "fp_boson", "Fokker-Planck relaxation of a boson gas: f = rho (1 + rho), "
    "H' = log(rho / (1 + rho)), quadratic confinement; flux constant 2",
    dimension=1, long=True,
    defaults=dict(k=2, n=100, domain=(-10.0, 10.0), c=0.0002, t_final=0.1,
                  limiter=True, diag_every=50),
    build=_build_fp(+1.0))

_register(
    "fp_fermion", "Fokker-Planck relaxation of a fermion gas: "
    "f = rho (1 - rho), H' = log(rho / (1 - rho)); flux constant 2",
    dimension=1, long=True,
    defaults=dict(k=2, n=100, domain=(-10.0, 10.0), c=0.0002, t_final=0.1,
                  limiter=True, diag_every=50),
    build=_build_fp(-1.0))


def _inv_cubic_antiderivative(r):
    """Integral of 1/(1+s^3) from 0 to r."""
    return (np.log((r + 1.0) ** 2 / (r * r - r + 1.0)) / 6.0
            + (np.arctan((2.0 * r - 1.0) / math.sqrt(3.0)) + math.pi / 6.0)
            / math.sqrt(3.0))


def _build_fp_generalized(config):
    mass = float(config.params.get("mass", 1.0))

    def hfun(r):
        log_term = r * np.log1p(r ** 3) - 3.0 * r + 3.0 * _inv_cubic_antiderivative(r)
        return xlogy(r, r) - r - log_term / 3.0

    model = ModelSpec(
        f=lambda r: r * (1.0 + r ** 3), g_choice=MirrorF(),
        H=hfun,
        Hprime=lambda r: np.log(r) - np.log1p(r ** 3) / 3.0,
        V=lambda x: 0.5 * x * x)
    mesh, rule = _mesh_rule(config)
    amp = mass / (2.0 * math.sqrt(2.0 * math.pi))
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x: amp * (np.exp(-(x - 2.0) ** 2 / 2.0)
                                 + np.exp(-(x + 2.0) ** 2 / 2.0)),
        rho_probe_max=max(1.0, mass))


_register(
    "fp_generalized", "boson-type Fokker-Planck with superlinear drift "
    "f = rho (1 + rho^3); param mass selects sub/supercritical data "
    "(mass = 10 develops a central spike; use c = 0.0005 there)",
    dimension=1, long=True,
    defaults=dict(k=4, n=120, domain=(-6.0, 6.0), c=0.003, t_final=0.5,
                  limiter=True, diag_every=50, params=dict(mass=1.0)),
    build=_build_fp_generalized)


# ---------------------------------------------------------------------------
# aggregation models
# ---------------------------------------------------------------------------

_AGG_SMOOTH_KERNEL = InteractionKernel(
    evaluate=lambda z: -np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi),
    smooth=True, images=1)


def _staircase(x):
    return (0.15 * np.maximum(1.0 - np.abs(x - 4.75), 0.0)
            + 0.25 * np.maximum(1.0 - np.abs(x - 2.0), 0.0)
            + 0.20 * np.maximum(1.0 - np.abs(x + 0.425), 0.0)
            + 0.40 * np.maximum(1.0 - np.abs(x + 3.75), 0.0))


def _build_aggregation_smooth(config):
    m = float(config.params.get("m", 1.5))
    nu = float(config.params.get("nu", 0.33))
    data = str(config.params.get("initial", "two_bumps"))

    model = ModelSpec(
        f=_identity, g_choice=MirrorF(),
        H=lambda r: nu * r ** m / m,
        Hprime=lambda r: nu * r ** (m - 1.0),
        W=_AGG_SMOOTH_KERNEL)
    mesh, rule = _mesh_rule(config)
    if data == "staircase":
        initial = _staircase
    elif data == "two_bumps":
        amp = 0.5 / math.sqrt(2.0 * math.pi)
        initial = lambda x: amp * (np.exp(-0.5 * (x - 2.5) ** 2)
                                   + np.exp(-0.5 * (x + 2.5) ** 2))
    else:
        raise ConfigurationError(
            f"aggregation_smooth initial must be two_bumps or staircase, got {data!r}")
    return ScenarioInstance(model=model, mesh=mesh, rule=rule, initial=initial)


_register(
    "aggregation_smooth", "nonlinear diffusion nu rho^(m-1) against smooth "
    "Gaussian attraction; params m, nu, initial = two_bumps | staircase "
    "(staircase shows metastable stepwise decay, published runs go to "
    "T = 1800)",
    dimension=1, long=True,
    defaults=dict(k=2, n=120, domain=(-6.0, 6.0), c=0.05, t_final=2.0,
                  limiter=True, diag_every=20,
                  params=dict(m=1.5, nu=0.33, initial="two_bumps")),
    build=_build_aggregation_smooth)


_AGG_LOCAL_KERNEL = InteractionKernel(
    evaluate=lambda z: -np.maximum(1.0 - np.abs(z), 0.0), smooth=False,
    breakpoints=(-1.0, 0.0, 1.0), images=1)


def _build_aggregation_local(config):
    a = float(config.params.get("a", 2.0))
    model = ModelSpec(
        f=_identity, g_choice=MirrorF(),
        H=lambda r: r ** 3 / 12.0,
        Hprime=lambda r: 0.25 * r * r,
        W=_AGG_LOCAL_KERNEL)
    mesh, rule = _mesh_rule(config)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x: np.where(np.abs(x) <= a, 1.0, 0.0))


_register(
    "aggregation_local", "quadratic diffusion against the compactly "
    "supported hat attraction; indicator data on [-a, a] (param a) can relax "
    "to steady states with disconnected support (a = 3 does by t = 30)",
    dimension=1, long=True,
    defaults=dict(k=2, n=80, domain=(-4.0, 4.0), c=0.01, t_final=5.0,
                  limiter=True, diag_every=100, params=dict(a=2.0)),
    build=_build_aggregation_local)


# ---------------------------------------------------------------------------
# two dimensional scenarios
# ---------------------------------------------------------------------------

_COS_KERNEL = InteractionKernel(
    evaluate=lambda zx, zy: np.cos(zx + zy), smooth=True, ndim=2, images=0)


def _acc2d_source(x, y, t):
    s = x + y
    pi2 = math.pi * math.pi
    return (4.0 * np.sin(s) + np.cos(s + t) + (2.0 + 8.0 * pi2) * np.sin(s + t)
            - 2.0 * np.cos(2.0 * s + t) - 4.0 * pi2 * np.cos(2.0 * (s + t)))


def _build_accuracy2d(config):
    model = ModelSpec(f=_identity, g_choice=MirrorF(),
                      H=_h_log, Hprime=np.log,
                      V=lambda x, y: np.sin(x + y),
                      W=_COS_KERNEL, source=_acc2d_source)
    mesh, rule = _mesh_rule(config)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x, y: 2.0 + np.sin(x + y) + 0.0 * x * y,
        exact=lambda x, y, t: 2.0 + np.sin(x + y + t),
        rho_probe_max=3.0)


_register(
    "accuracy2d", "2D manufactured-solution test with log entropy, "
    "sin(x + y) confinement, cos(x + y) interaction and a source term; "
    "exact solution 2 + sin(x + y + t)",
    dimension=2,
    defaults=dict(k=2, nx=10, ny=10,
                  domain=(-math.pi, math.pi, -math.pi, math.pi),
                  c=0.0005, t_final=0.1, limiter=True, diag_every=20),
    build=_build_accuracy2d)


def _dumbbell_profile(x, y, sigma2):
    window = np.maximum(24.0 - (x * x + y * y), 0.0)
    bumps = (np.exp(-((x - 2.0) ** 2 + (y - 2.0) ** 2) / (2.0 * sigma2))
             + np.exp(-((x + 2.0) ** 2 + (y + 2.0) ** 2) / (2.0 * sigma2))
             + np.exp(-((x - 1.0) ** 2 + (y - 1.0) ** 2) / (2.0 * sigma2))
             + np.exp(-((x + 1.0) ** 2 + (y + 1.0) ** 2) / (2.0 * sigma2)))
    return window * bumps


def _build_dumbbell(config):
    r = float(config.params.get("r", 5.0))
    k11 = float(config.params.get("k11", 0.3))
    k12 = float(config.params.get("k12", 0.2))
    k22 = float(config.params.get("k22", -0.3))
    sigma2 = float(config.params.get("sigma2", 0.2))

    def potential(x, y):
        # spring potential clamped just inside the extensibility radius:
        # the density never reaches it, but corner nodes must stay evaluable
        gap = np.maximum(1.0 - (x * x + y * y) / (r * r), 1e-12)
        spring = -0.5 * r * r * np.log(gap)
        flow = 0.5 * (k11 * x * x + 2.0 * k12 * x * y + k22 * y * y)
        return spring - flow

    # normalization of the initial profile, fixed midpoint grid
    g = (np.arange(600) + 0.5) / 600.0 * 10.0 - 5.0
    gx, gy = np.meshgrid(g, g, indexing="ij")
    mass0 = np.sum(_dumbbell_profile(gx, gy, sigma2)) * (10.0 / 600.0) ** 2
    c = 1.0 / mass0

    model = ModelSpec(f=_identity, g_choice=MirrorF(),
                      H=_h_log, Hprime=np.log, V=potential)
    mesh, rule = _mesh_rule(config)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x, y: c * _dumbbell_profile(x, y, sigma2))


_register(
    "dumbbell_fene", "FENE dumbbell configuration density under a linear "
    "background flow (params r, k11, k12, k22, sigma2); published run uses "
    "k = 3, 50x50 cells, tau = 2e-6 for t <= 0.6",
    dimension=2, long=True,
    defaults=dict(k=2, nx=20, ny=20, domain=(-5.0, 5.0, -5.0, 5.0),
                  tau=2e-4, t_final=0.05, limiter=True, diag_every=50,
                  params=dict(r=5.0, k11=0.3, k12=0.2, k22=-0.3, sigma2=0.2)),
    build=_build_dumbbell)


_LOG_KERNEL = InteractionKernel(
    evaluate=lambda zx, zy: 0.25 / math.pi * np.log(zx * zx + zy * zy),
    smooth=False, ndim=2, images=0, singular_origin=True)


def _build_keller_segel(config):
    variant = str(config.params.get("variant", "supercritical"))
    if variant == "supercritical":
        level = 2.0 * (math.pi + 0.2)
    elif variant == "subcritical":
        level = 2.0 * (math.pi - 0.2)
    else:
        raise ConfigurationError(
            f"keller_segel variant must be subcritical or supercritical, got {variant!r}")
    model = ModelSpec(f=_identity, g_choice=MirrorF(),
                      H=_h_log, Hprime=np.log, W=_LOG_KERNEL)
    mesh, rule = _mesh_rule(config)
    return ScenarioInstance(
        model=model, mesh=mesh, rule=rule,
        initial=lambda x, y: np.where((np.abs(x) <= 1.0) & (np.abs(y) <= 1.0),
                                      level, 0.0),
        rho_probe_max=2.0 * level)


_register(
    "keller_segel", "2D chemotaxis with the logarithmic kernel; param "
    "variant = supercritical (mass 8 pi + 0.4, box [-1.5, 1.5]^2, blow-up) "
    "or subcritical (mass 8 pi - 0.4, box [-5, 5]^2, spreading); published "
    "runs use 50x50 cells",
    dimension=2, long=True,
    defaults=dict(k=2, nx=24, ny=24, domain=(-1.5, 1.5, -1.5, 1.5),
                  c=0.002, t_final=0.2, limiter=True, diag_every=50,
                  params=dict(variant="supercritical")),
    build=_build_keller_segel)


def scenario_defaults(name: str) -> dict:
    """Config-level defaults for a scenario (copy; caller may mutate)."""
    sc = get_scenario(name)
    out = dict(k=2, n=40, nx=None, ny=None, c=None, tau=None, t_final=1.0,
               limiter=True, convolution="fft", seed=0,
               output_dir=f"runs/{name}", snapshot_times=(), diag_every=1,
               alpha_mult=1.0, params={})
    out.update({k: v for k, v in sc.defaults.items() if k != "params"})
    out["params"] = dict(sc.defaults.get("params", {}))
    out["scenario"] = name
    out["dimension"] = sc.dimension
    if sc.dimension == 2:
        out.setdefault("nx", 10)
        out.setdefault("ny", 10)
        out["n"] = None
    return out
