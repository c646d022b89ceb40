"""Nonlocal interaction term (W * rho) evaluated at the scheme's nodes.

Three evaluation routes, all agreeing on their overlap:

  * kernel moments + direct summation: per-offset matrices K_m with
    (K_m)_{rs} = integral over one cell of W against the s-th Lagrange
    polynomial, so (W*rho)_i = sum_m K_m rho_{i+m} with periodic wrap.
    Moments exist in two flavours: "quadrature" (entries are Gauss-Lobatto
    point evaluations, the variant covered by the discrete entropy
    inequality) and "exact" (adaptive panel integration with splits at the
    kernel's kinks, for non-smooth W).
  * kernel moments + FFT: the offset sum is a circular cross-correlation
    per (r, s) pair, so rFFTs bring the cost from O(N^2 k^2) down to
    O(k^2 N log N).  Identical to direct summation to roundoff.
  * literal nodal quadrature: the double sum over all node pairs, used as
    a reference and for small problems.

Translation invariance of the moments requires a uniform mesh.  Offsets use
the centered representative (|displacement| minimized), and decaying kernels
are periodized by summing a few box images so that the circulant
identification is consistent across the wrap seam.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .field import NodalField
from .mesh import Mesh1D, Mesh2D, physical_nodes
from .model import InteractionKernel
from .quadrature import QuadRule, lagrange_basis_at

_MAX_REFINE = 14


class UnsupportedMeshError(ValueError):
    """The fast convolution path needs a uniform mesh."""


class ToleranceError(RuntimeError):
    """Adaptive moment integration failed to reach the requested tolerance."""


@dataclass
class KernelMoments:
    """Per-offset convolution matrices on a uniform periodic mesh."""

    ndim: int
    K: np.ndarray  # (N, p, p) in 1D, (Nx, Ny, p, p, p, p) in 2D
    mesh: Mesh1D | Mesh2D
    rule: QuadRule
    mode: str  # "quadrature" | "exact"
    _fft: np.ndarray | None = dc_field(default=None, repr=False)

    def fft(self) -> np.ndarray:
        if self._fft is None:
            axes = (0,) if self.ndim == 1 else (0, 1)
            self._fft = np.conj(np.fft.rfftn(self.K, axes=axes))
        return self._fft


def _require_uniform(mesh):
    meshes = (mesh.x, mesh.y) if isinstance(mesh, Mesh2D) else (mesh,)
    for m in meshes:
        if not m.is_uniform:
            raise UnsupportedMeshError("kernel moments require a uniform mesh")


def _centered_offsets(n: int) -> np.ndarray:
    """Representative displacement count for offsets 0..n-1, in (-n/2, n/2]."""
    m = np.arange(n)
    return np.where(m <= n // 2, m, m - n)


def _periodized(kernel: InteractionKernel, length, ndim: int):
    """Sum of kernel images over shifted copies of the periodic box."""
    j = np.arange(-kernel.images, kernel.images + 1)
    if ndim == 1:
        if kernel.images == 0:
            return kernel.evaluate

        def weff(z):
            z = np.asarray(z, dtype=float)
            return sum(kernel.evaluate(z + jj * length) for jj in j)

        return weff
    lx, ly = length
    if kernel.images == 0:
        return kernel.evaluate

    def weff2(zx, zy):
        zx = np.asarray(zx, dtype=float)
        zy = np.asarray(zy, dtype=float)
        out = 0.0
        for jx in j:
            for jy in j:
                out = out + kernel.evaluate(zx + jx * lx, zy + jy * ly)
        return out

    return weff2


# ---------------------------------------------------------------------------
# moment construction
# ---------------------------------------------------------------------------

def kernel_moments(kernel: InteractionKernel, mesh: Mesh1D, rule: QuadRule,
                   tol: float = 1e-10) -> KernelMoments:
    """Build the 1D offset matrices K_m for a kernel on a uniform mesh.

    Smooth kernels get quadrature-mode moments (nodal point values weighted
    by the rule); non-smooth kernels are integrated exactly by adaptive
    composite Gauss-Legendre panels split at every kink location.
    """
    _require_uniform(mesh)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = mesh.n_cells
    h = float(mesh.length) / n
    x1 = physical_nodes(mesh, rule)[0]  # nodes of the first cell
    weff = _periodized(kernel, mesh.length, 1)
    offs = _centered_offsets(n)

    if kernel.smooth:
        disp = x1[None, :, None] - x1[None, None, :] - offs[:, None, None] * h
        K = 0.5 * h * rule.weights[None, None, :] * weff(disp)
        return KernelMoments(ndim=1, K=K, mesh=mesh, rule=rule, mode="quadrature")

    breaks = [b + jj * mesh.length for b in kernel.breakpoints
              for jj in range(-kernel.images, kernel.images + 1)]
    p = rule.npoints
    K = np.empty((n, p, p))
    ylo, yhi = mesh.edges[0], mesh.edges[1]
    for m in range(n):
        centers = x1 - offs[m] * h  # kernel argument is centers[r] - y
        splits = {ylo, yhi}
        for b in breaks:
            for c in centers:
                y = c - b
                if ylo < y < yhi:
                    splits.add(float(y))
        edges = np.array(sorted(splits))
        K[m] = _adaptive_panels_1d(weff, centers, edges, mesh, rule, tol, m)
    return KernelMoments(ndim=1, K=K, mesh=mesh, rule=rule, mode="exact")


def _composite_gl(edges: np.ndarray, per_segment: int, order: int):
    """Nodes/weights of composite Gauss-Legendre panels between edges."""
    t, v = leggauss(order)
    lo = np.repeat(edges[:-1], per_segment)
    widths = np.repeat(np.diff(edges), per_segment) / per_segment
    lo = lo + widths * np.tile(np.arange(per_segment), edges.size - 1)
    nodes = lo[:, None] + 0.5 * widths[:, None] * (t[None, :] + 1.0)
    wts = 0.5 * widths[:, None] * np.broadcast_to(v, nodes.shape)
    return nodes.ravel(), wts.ravel()


def _adaptive_panels_1d(weff, centers, edges, mesh: Mesh1D, rule: QuadRule,
                        tol: float, m: int) -> np.ndarray:
    h = mesh.sizes[0]
    a = mesh.edges[0]
    prev = None
    for level in range(_MAX_REFINE):
        y, v = _composite_gl(edges, 2 ** level, 12)
        wv = weff(centers[:, None] - y[None, :])  # (p, Q)
        basis = lagrange_basis_at(rule, 2.0 * (y - a) / h - 1.0)  # (Q, p)
        cur = (wv * v[None, :]) @ basis
        if prev is not None and np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
    raise ToleranceError(f"moment integration did not converge at offset {m}")


def kernel_moments_2d(kernel: InteractionKernel, mesh: Mesh2D, rule: QuadRule,
                      tol: float = 1e-10) -> KernelMoments:
    """Tensor-offset moments K_{m,n} on a uniform Cartesian mesh."""
    _require_uniform(mesh)
    nx, ny = mesh.shape
    hx, hy = float(mesh.x.length) / nx, float(mesh.y.length) / ny
    x1 = physical_nodes(mesh.x, rule)[0]
    y1 = physical_nodes(mesh.y, rule)[0]
    weff = _periodized(kernel, (mesh.x.length, mesh.y.length), 2)
    mx = _centered_offsets(nx)
    my = _centered_offsets(ny)
    p = rule.npoints
    w = rule.weights

    if kernel.smooth:
        dx = (x1[:, None] - x1[None, :])[None, :, :] - mx[:, None, None] * hx
        dy = (y1[:, None] - y1[None, :])[None, :, :] - my[:, None, None] * hy
        wv = weff(dx[:, None, :, None, :, None], dy[None, :, None, :, None, :])
        K = 0.25 * hx * hy * wv * (w[None, None, None, None, :, None] *
                                   w[None, None, None, None, None, :])
        return KernelMoments(ndim=2, K=K, mesh=mesh, rule=rule, mode="quadrature")

    K = np.empty((nx, ny, p, p, p, p))
    with np.errstate(divide="ignore", invalid="ignore"):
        for m in range(nx):
            cx = x1 - mx[m] * hx
            for n in range(ny):
                cy = y1 - my[n] * hy
                # graded panels for every offset near the kernel singularity,
                # uniform refinement for the analytic rest
                near = (kernel.singular_origin
                        and abs(mx[m]) <= 2 and abs(my[n]) <= 2)
                if near:
                    K[m, n] = _singular_block_2d(weff, cx, cy, mesh, rule, tol)
                else:
                    K[m, n] = _adaptive_block_2d(weff, cx, cy, mesh, rule, tol, (m, n))
    if not np.isfinite(K).all():
        raise ToleranceError("2D moments are not finite; the kernel was "
                             "sampled at a singular point")
    return KernelMoments(ndim=2, K=K, mesh=mesh, rule=rule, mode="exact")


def _adaptive_block_2d(weff, cx, cy, mesh: Mesh2D, rule: QuadRule,
                       tol: float, offset) -> np.ndarray:
    # level cap keeps the tensor evaluation grid bounded; offsets that would
    # need deeper refinement (kernel singularities) take the graded path
    xe = mesh.x.edges[:2]
    ye = mesh.y.edges[:2]
    hx, hy = xe[1] - xe[0], ye[1] - ye[0]
    prev = None
    for level in range(7):
        xq, vx = _composite_gl(xe, 2 ** level, 10)
        yq, vy = _composite_gl(ye, 2 ** level, 10)
        cur = _block_from_grid(weff, cx, cy, xq, vx, yq, vy,
                               xe[0], hx, ye[0], hy, rule)
        if prev is not None and np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
    raise ToleranceError(f"2D moment integration did not converge at offset {offset}")


def _block_from_grid(weff, cx, cy, xq, vx, yq, vy, x0, hx, y0, hy,
                     rule: QuadRule) -> np.ndarray:
    bx = lagrange_basis_at(rule, 2.0 * (xq - x0) / hx - 1.0)  # (Qx, p)
    by = lagrange_basis_at(rule, 2.0 * (yq - y0) / hy - 1.0)  # (Qy, p)
    wv = weff(cx[:, None, None, None] - xq[None, :, None, None],
              cy[None, None, :, None] - yq[None, None, None, :])  # (p,Qx,p,Qy)
    wv = wv * vx[None, :, None, None] * vy[None, None, None, :]
    return np.einsum("aqbp,qc,pd->abcd", wv, bx, by, optimize=True)


def _graded_edges(lo: float, hi: float, point: float) -> np.ndarray:
    """Panel edges geometrically refined toward a (near-)singular point.

    The point itself is never an edge and the innermost width is floored
    well above float spacing, so quadrature nodes cannot round onto the
    singularity; the skipped sliver contributes O(w0 log w0) ~ 1e-12 h.
    """
    width = hi - lo
    anchor = min(max(point, lo), hi)
    w0 = max(width * 2.0 ** -40, 1e-13 * max(1.0, abs(anchor)))
    edges = {lo, hi}
    d = w0
    while d < width:
        for e in (anchor - d, anchor + d):
            if lo < e < hi:
                edges.add(e)
        d *= 2.0
    return np.array(sorted(edges))


def _singular_block_2d(weff, cx, cy, mesh: Mesh2D, rule: QuadRule,
                       tol: float) -> np.ndarray:
    """Exact moments for an offset whose displacement window contains the
    kernel's singular point: per output node, tensor panels graded toward it."""
    xe = mesh.x.edges[:2]
    ye = mesh.y.edges[:2]
    hx, hy = xe[1] - xe[0], ye[1] - ye[0]
    p = rule.npoints
    out = np.empty((p, p, p, p))
    for r in range(p):
        ex = _graded_edges(xe[0], xe[1], cx[r])
        for s in range(p):
            ey = _graded_edges(ye[0], ye[1], cy[s])
            vals = []
            for order in (6, 10):
                xq, vx = _composite_gl(ex, 1, order)
                yq, vy = _composite_gl(ey, 1, order)
                vals.append(_block_from_grid(
                    weff, cx[r:r + 1], cy[s:s + 1], xq, vx, yq, vy,
                    xe[0], hx, ye[0], hy, rule)[0, 0])
            if np.max(np.abs(vals[1] - vals[0])) > tol:
                raise ToleranceError(
                    "singular moment integration missed tolerance "
                    f"at node ({r}, {s})")
            out[r, s] = vals[1]
    return out


# ---------------------------------------------------------------------------
# convolution application
# ---------------------------------------------------------------------------

def convolve_direct(moments: KernelMoments, rho: NodalField) -> np.ndarray:
    """(W*rho)_i = sum_m K_m rho_{i+m}, periodic wrap; O(N^2 k^2)."""
    _check_match(moments, rho)
    vals = rho.values
    if moments.ndim == 1:
        out = np.zeros_like(vals)
        for m in range(vals.shape[0]):
            out += np.roll(vals, -m, axis=0) @ moments.K[m].T
        return out
    nx, ny = vals.shape[:2]
    p2 = vals.shape[2] * vals.shape[3]
    out = np.zeros((nx * ny, p2))
    for m in range(nx):
        rolled_x = np.roll(vals, -m, axis=0)
        for n in range(ny):
            rolled = np.roll(rolled_x, -n, axis=1).reshape(nx * ny, p2)
            out += rolled @ moments.K[m, n].reshape(p2, p2).T
    return out.reshape(vals.shape)


def convolve_fft(moments: KernelMoments, rho: NodalField) -> np.ndarray:
    """Same sum as convolve_direct via circular cross-correlation FFTs."""
    _check_match(moments, rho)
    vals = rho.values
    khat = moments.fft()
    if moments.ndim == 1:
        n = vals.shape[0]
        rhat = np.fft.rfft(vals, axis=0)
        xhat = np.einsum("wrs,ws->wr", khat, rhat)
        return np.fft.irfft(xhat, n=n, axis=0)
    nx, ny = vals.shape[:2]
    rhat = np.fft.rfftn(vals, axes=(0, 1))
    xhat = np.einsum("xyrsab,xyab->xyrs", khat, rhat, optimize=True)
    return np.fft.irfftn(xhat, s=(nx, ny), axes=(0, 1))


def convolve_quadrature(kernel: InteractionKernel, rho: NodalField) -> np.ndarray:
    """Literal nodal-quadrature convolution over all node pairs.

    (W*rho)(x_i^r) = sum_j (h_j/2) sum_s w_s W(x_i^r - x_j^s) rho_j^s, the
    variant for which the discrete entropy inequality is exact.  Cost is
    O(N^2 k^2); intended for references and modest meshes.
    """
    if not kernel.smooth:
        raise ValueError("nodal-quadrature convolution requires a smooth kernel")
    w = rho.rule.weights
    if rho.ndim == 1:
        x = physical_nodes(rho.mesh, rho.rule)
        xf = x.ravel()
        density = (0.5 * rho.mesh.sizes[:, None] * w[None, :] * rho.values).ravel()
        out = np.empty_like(xf)
        step = max(1, 2 ** 22 // max(xf.size, 1))
        for lo in range(0, xf.size, step):
            hi = min(lo + step, xf.size)
            out[lo:hi] = kernel.evaluate(xf[lo:hi, None] - xf[None, :]) @ density
        return out.reshape(rho.values.shape)
    xs = physical_nodes(rho.mesh.x, rho.rule)
    ys = physical_nodes(rho.mesh.y, rho.rule)
    hx = rho.mesh.x.sizes[:, None] * w[None, :]
    hy = rho.mesh.y.sizes[:, None] * w[None, :]
    density = 0.25 * (hx[:, None, :, None] * hy[None, :, None, :] * rho.values)
    xf = np.broadcast_to(xs[:, None, :, None], rho.values.shape).ravel()
    yf = np.broadcast_to(ys[None, :, None, :], rho.values.shape).ravel()
    df = density.ravel()
    out = np.empty_like(xf)
    step = max(1, 2 ** 21 // max(xf.size, 1))
    for lo in range(0, xf.size, step):
        hi = min(lo + step, xf.size)
        out[lo:hi] = kernel.evaluate(xf[lo:hi, None] - xf[None, :],
                                     yf[lo:hi, None] - yf[None, :]) @ df
    return out.reshape(rho.values.shape)


def _check_match(moments: KernelMoments, rho: NodalField):
    if moments.K.shape[-1] != rho.rule.npoints or rho.ndim != moments.ndim:
        raise ValueError("moments and field use different meshes or rules")
    lead = moments.K.shape[:moments.ndim]
    if lead != rho.values.shape[:moments.ndim]:
        raise ValueError("moments and field use different meshes or rules")


# ---------------------------------------------------------------------------
# plan: the scheme-facing entry point
# ---------------------------------------------------------------------------

@dataclass
class ConvolutionPlan:
    """Bound (kernel, mesh, rule, method) ready to apply to nodal fields.

    Moments are built once and reused across time steps; they depend only
    on the kernel and the discretization, never on the state.
    """

    kernel: InteractionKernel | None
    method: str = "fft"
    moments: KernelMoments | None = None

    def apply(self, rho: NodalField) -> np.ndarray | float:
        if self.kernel is None:
            return 0.0
        if self.method == "quadrature":
            return convolve_quadrature(self.kernel, rho)
        if self.method == "direct":
            return convolve_direct(self.moments, rho)
        return convolve_fft(self.moments, rho)


def make_plan(kernel: InteractionKernel | None, mesh, rule: QuadRule,
              method: str = "fft", tol: float = 1e-10) -> ConvolutionPlan:
    """Prepare the convolution route for a kernel on a given discretization."""
    if kernel is None:
        return ConvolutionPlan(kernel=None)
    if method not in ("fft", "direct", "quadrature"):
        raise ValueError(f"unknown convolution method {method!r}")
    if method == "quadrature":
        return ConvolutionPlan(kernel=kernel, method=method)
    if isinstance(mesh, Mesh2D):
        moments = kernel_moments_2d(kernel, mesh, rule, tol=tol)
    else:
        moments = kernel_moments(kernel, mesh, rule, tol=tol)
    return ConvolutionPlan(kernel=kernel, method=method, moments=moments)
