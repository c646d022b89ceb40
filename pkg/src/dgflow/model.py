"""Problem declarations: mobility f, flux companion g, energy density H,
confinement V, interaction kernel W, and optional source term.

The continuous problem is  d rho/dt = div( f(rho) grad(xi) )  with
xi = H'(rho) + V + W * rho.  A model instance packages the five ingredients
plus the choice of g used in the interface flux: g = f when f increases,
or g(rho) = C rho with f(rho)/rho <= C otherwise.  All callables must be
pure and accept numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

# floor for evaluating H' at exact vacuum when H' is singular at 0
# (pure IEEE guard: keeps log(rho) finite without introducing a physical scale)
VACUUM_FLOOR = 1e-300


@dataclass(frozen=True)
class MirrorF:
    """Use g = f in the interface flux; requires f nondecreasing."""


@dataclass(frozen=True)
class Linear:
    """Use g(rho) = C rho in the interface flux; requires f(rho)/rho <= C."""

    C: float


@dataclass(frozen=True)
class InteractionKernel:
    """Interaction potential W with evaluation metadata.

    evaluate:    vectorized kernel W(z) (1D) or W(zx, zy) (2D)
    smooth:      True selects nodal-quadrature convolution, False the
                 exactly integrated kernel moments
    breakpoints: kink/singularity locations of W used to split integration
                 panels in exact moment construction (1D: z values; 2D the
                 only supported singular point is the origin)
    images:      number of periodic kernel images summed on each side when
                 the moments are assembled on a periodic box (0 means the
                 kernel is already box-periodic or the tails are dropped)
    """

    evaluate: Callable
    smooth: bool
    ndim: int = 1
    breakpoints: tuple = ()
    images: int = 1
    singular_origin: bool = False


@dataclass(frozen=True)
class ModelSpec:
    """The (f, g, H, V, W) quintuple plus optional source and flux overrides."""

    f: Callable
    g_choice: MirrorF | Linear
    H: Callable
    Hprime: Callable
    V: Optional[Callable] = None
    W: Optional[InteractionKernel] = None
    source: Optional[Callable] = None
    # (value at domain left edge, value at domain right edge) replacing the
    # central flux for xi there; needed when V breaks periodicity on purpose
    xi_boundary_override: Optional[tuple] = None

    def g(self, rho: np.ndarray) -> np.ndarray:
        if isinstance(self.g_choice, Linear):
            return self.g_choice.C * rho
        return self.f(rho)

    def hprime_safe(self, rho: np.ndarray) -> np.ndarray:
        """H' clamped away from exact vacuum so singular entropies stay finite."""
        return self.Hprime(np.maximum(rho, VACUUM_FLOOR))


@dataclass(frozen=True)
class EntropyParts:
    """Internal + confinement + interaction contributions to the entropy."""

    internal: float
    confinement: float
    interaction: float

    @property
    def total(self) -> float:
        return self.internal + self.confinement + self.interaction


@dataclass
class ValidationReport:
    passed: bool
    failures: list = dc_field(default_factory=list)

    def add(self, message: str):
        self.failures.append(message)
        self.passed = False


def validate_model(spec: ModelSpec, rho_max: float = 1.0,
                   x_range: tuple = (-1.0, 1.0)) -> ValidationReport:
    """Check the structural assumptions on (f, g, W) on probe grids.

    Never raises: returns a report listing every violated condition together
    with an offending sample.  Probes f and g on 1024 densities in
    [0, rho_max] and W symmetry on 256 points across x_range.
    """
    report = ValidationReport(passed=True)
    rho = np.linspace(0.0, rho_max, 1024)
    f = np.asarray(spec.f(rho), dtype=float)

    if abs(f[0]) > 1e-14:
        report.add(f"f(0) = {f[0]:.3e}, expected 0")
    neg = f < -1e-14
    if neg.any():
        i = int(np.argmax(neg))
        report.add(f"f is negative: f({rho[i]:.6g}) = {f[i]:.3e}")

    if isinstance(spec.g_choice, Linear):
        C = spec.g_choice.C
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(rho > 0, f / np.where(rho > 0, rho, 1.0), 0.0)
        bad = ratio > C * (1 + 1e-12)
        if bad.any():
            i = int(np.argmax(bad))
            report.add(f"f(rho)/rho = {ratio[i]:.6g} exceeds C = {C:.6g} "
                       f"at rho = {rho[i]:.6g}")
    else:
        df = np.diff(f)
        bad = df < -1e-12 * max(1.0, float(np.max(np.abs(f))))
        if bad.any():
            i = int(np.argmax(bad))
            report.add(f"f is decreasing near rho = {rho[i]:.6g} "
                       f"(f drops by {-df[i]:.3e}) but g = f was requested")

    if spec.W is not None:
        xs = np.linspace(x_range[0], x_range[1], 256)
        if spec.W.ndim == 2:
            wp = spec.W.evaluate(xs, xs[::-1])
            wm = spec.W.evaluate(-xs, -xs[::-1])
        else:
            wp = spec.W.evaluate(xs)
            wm = spec.W.evaluate(-xs)
        wp, wm = np.asarray(wp, dtype=float), np.asarray(wm, dtype=float)
        ok = np.isclose(wp, wm, rtol=1e-10, atol=1e-12) | ~np.isfinite(wp)
        if not ok.all():
            i = int(np.argmax(~ok))
            report.add(f"W is not symmetric: W({xs[i]:.6g}) = {wp[i]:.6g} "
                       f"vs W({-xs[i]:.6g}) = {wm[i]:.6g}")
    return report
