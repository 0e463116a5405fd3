"""Truncated singular integrals on sampled functions: Hilbert transform and
Cauchy-type kernels over Lipschitz graphs, sharp and smooth truncations,
their q-variation, and an empirical regularity certificate for kernels.

Integrals act on the linear interpolant of the samples (zero outside the
grid) and are evaluated with Gauss-Legendre nodes on every grid cell
fragment, cells being split exactly at the truncation cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .averaging import ConvKernel, KernelPiece, gauss_cells, _eval_grid
from .errors import KernelError, ParameterError
from .seqcore import ParamGrid, SampledFunction
from .variation import variation_norm

__all__ = [
    "Kernel",
    "LipschitzGraph",
    "hilbert_kernel",
    "cauchy_kernel",
    "kernel_from_spec",
    "GRAPHS",
    "smooth_cutoff",
    "smooth_cutoff_deriv",
    "truncated_apply",
    "smooth_truncated_apply",
    "truncation_gap",
    "vq_kernel",
    "hphi_vq_check",
    "kernel_regularity_certify",
    "psi_kernel",
]

DEFAULT_ORDER = 4


@dataclass(frozen=True)
class Kernel:
    """``evaluator(x, y)`` must broadcast over numpy arrays."""

    evaluator: Callable
    delta: float = 1.0
    name: str = "kernel"
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, x, y):
        return self.evaluator(x, y)


@dataclass(frozen=True)
class LipschitzGraph:
    phi: Callable
    lip: float
    name: str = "graph"


GRAPHS = {
    "flat": LipschitzGraph(lambda x: np.zeros_like(np.asarray(x, dtype=float)), 0.0, "flat"),
    "abs_half": LipschitzGraph(lambda x: 0.5 * np.abs(x), 0.5, "abs_half"),
    "sine_half": LipschitzGraph(lambda x: 0.5 * np.sin(x), 0.5, "sine_half"),
    "zigzag": LipschitzGraph(lambda x: 0.8 * np.abs(np.mod(x, 2.0) - 1.0), 0.8, "zigzag"),
}


def hilbert_kernel() -> Kernel:
    """``1/(x - y)`` (no ``1/pi`` normalisation)."""
    return Kernel(lambda x, y: 1.0 / (x - y), 1.0, "hilbert")


def cauchy_kernel(graph: LipschitzGraph) -> Kernel:
    """``1/((x - y) + i(phi(x) - phi(y)))`` for the graph of ``phi``."""
    phi = graph.phi

    def ev(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return 1.0 / ((x - y) + 1j * (phi(x) - phi(y)))

    return Kernel(ev, 1.0, f"cauchy:{graph.name}", {"lip": graph.lip})


def kernel_from_spec(spec: str) -> Kernel:
    """``hilbert`` or ``cauchy:<graph>`` with a graph name from ``GRAPHS``."""
    if spec == "hilbert":
        return hilbert_kernel()
    if spec.startswith("cauchy:"):
        name = spec.split(":", 1)[1]
        if name not in GRAPHS:
            raise KernelError(f"unknown graph {name!r}; known: {sorted(GRAPHS)}")
        return cauchy_kernel(GRAPHS[name])
    raise KernelError(f"unknown kernel spec {spec!r}")


def smooth_cutoff(s):
    """Quintic smoothstep: 0 below 1/2, 1 above 3/2, C^2 in between."""
    u = np.clip(np.asarray(s, dtype=float) - 0.5, 0.0, 1.0)
    return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)


def smooth_cutoff_deriv(s):
    u = np.clip(np.asarray(s, dtype=float) - 0.5, 0.0, 1.0)
    return 30.0 * u * u * (1.0 - u) * (1.0 - u)


def _check(f: SampledFunction, t: float):
    if not isinstance(f, SampledFunction):
        raise ParameterError("singular integrals act on SampledFunction input")
    if not t > 0:
        raise ParameterError(f"truncation level must be positive, got {t}")


def truncated_apply(K: Kernel, f: SampledFunction, x: float, t: float, order: int = DEFAULT_ORDER):
    """``integral_{|x-y| > t} K(x, y) f(y) dy``."""
    _check(f, t)
    fn = lambda y: K(x, y)
    return gauss_cells(f, fn, -np.inf, x - t, order) + gauss_cells(f, fn, x + t, np.inf, order)


def smooth_truncated_apply(f: SampledFunction, x: float, t: float, K: Kernel | None = None, order: int = DEFAULT_ORDER):
    """``integral phi(|x-y|/t) K(x, y) f(y) dy`` with the smooth cutoff phi
    (Hilbert kernel unless ``K`` is given)."""
    _check(f, t)
    K = K or hilbert_kernel()
    fn = lambda y: smooth_cutoff(np.abs(x - y) / t) * K(x, y)
    left = gauss_cells(f, fn, -np.inf, x - t / 2, order, extra=(x - 1.5 * t,))
    right = gauss_cells(f, fn, x + t / 2, np.inf, order, extra=(x + 1.5 * t,))
    return left + right


def psi_kernel(side: str) -> ConvKernel:
    """Pieces of the difference between sharp and smooth Hilbert truncation.

    ``(H_t - H~_t) f = psi_t^+ * f + psi_t^- * f`` with
    ``psi^+(u) = (1_[1,3/2](u) - phi(u)) / u`` on ``[1/2, 3/2]`` and
    ``psi^-(u) = -psi^+(-u)``.  The jump at ``|u| = 1`` splits each side in
    two smooth pieces.
    """
    phi, dphi = smooth_cutoff, smooth_cutoff_deriv
    inner = lambda u: -phi(u) / u
    d_inner = lambda u: -(dphi(u) * u - phi(u)) / (u * u)
    outer = lambda u: (1.0 - phi(u)) / u
    d_outer = lambda u: (-dphi(u) * u - (1.0 - phi(u))) / (u * u)
    if side == "plus":
        pieces = (KernelPiece(0.5, 1.0, inner, d_inner), KernelPiece(1.0, 1.5, outer, d_outer))
    elif side == "minus":
        # psi^-(u) = -psi^+(-u), derivative psi^+'(-u)
        pieces = (
            KernelPiece(-1.5, -1.0, lambda u: -outer(-u), lambda u: d_outer(-u)),
            KernelPiece(-1.0, -0.5, lambda u: -inner(-u), lambda u: d_inner(-u)),
        )
    else:
        raise KernelError("side must be 'plus' or 'minus'")
    return ConvKernel(f"psi_{side}", pieces)


def truncation_gap(f: SampledFunction, t: float, x: float, order: int = 8):
    """``H_t f(x) - H~_t f(x)``, computed directly from both truncations."""
    K = hilbert_kernel()
    return truncated_apply(K, f, x, t, order) - smooth_truncated_apply(f, x, t, K, order)


def vq_kernel(K: Kernel, f: SampledFunction, q: float, t_grid, eval_points, smooth: bool = False) -> SampledFunction:
    """q-variation over ``t_grid`` of the truncations ``K_t f(x)`` at each
    evaluation point.  ``smooth=True`` uses the smooth truncations."""
    grid = t_grid if isinstance(t_grid, ParamGrid) else ParamGrid(t_grid)
    grid.require_positive()
    xs, step = _eval_grid(eval_points)
    if smooth:
        apply = lambda x, t: smooth_truncated_apply(f, x, t, K)
    else:
        apply = lambda x, t: truncated_apply(K, f, x, t)
    vals = []
    for x in xs:
        tr = np.array([apply(float(x), float(t)) for t in grid.points])
        vals.append(variation_norm(tr, q).value)
    warnings = []
    if grid.points[0] < f.step:
        warnings.append(f"t={grid.points[0]:g} below sample step {f.step:g}")
    meta = {"kernel": K.name, "q": float(q), "t_grid": grid.points.tolist(), "smooth": smooth, "warnings": warnings}
    return SampledFunction(xs[0], step, np.asarray(vals), meta)


def hphi_vq_check(x: float, q: float, t_grid) -> dict:
    """Variation over ``t_grid`` of the smoothly truncated Hilbert kernel
    ``t -> phi(|x|/t)/x`` against ``(integral |phi'|)/|x|``."""
    if x == 0:
        raise ParameterError("x must be nonzero")
    grid = t_grid if isinstance(t_grid, ParamGrid) else ParamGrid(t_grid)
    grid.require_positive()
    trace = smooth_cutoff(abs(x) / grid.points) / x
    lhs = variation_norm(trace, q).value
    tv, _ = integrate.quad(lambda s: abs(float(smooth_cutoff_deriv(s))), 0.5, 1.5, epsabs=1e-12)
    rhs = tv / abs(x)
    return {"x": float(x), "q": float(q), "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs, "holds": lhs <= rhs * (1 + 1e-12)}


def kernel_regularity_certify(K: Kernel, box, sample_count: int = 4096, seed: int = 0) -> dict:
    """Empirical size and smoothness constants of ``K`` on ``box = (a, b)``.

    Draws ``(x, y, z)`` with ``|x - y| > 2|x - z|`` and returns the largest
    observed values of ``|K(x,y)||x-y|`` (C0),
    ``|K(x,y) - K(z,y)| |x-y|^(1+d) / |x-z|^d`` (C1) and the same with the
    arguments of K swapped (C2), ``d`` being the kernel's delta.
    """
    a, b = float(box[0]), float(box[1])
    if not b > a:
        raise ParameterError("box must satisfy a < b")
    if sample_count < 1:
        raise ParameterError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    x = rng.uniform(a, b, sample_count)
    y = rng.uniform(a, b, sample_count)
    r = np.abs(x - y)
    ok = r > 0
    x, y, r = x[ok], y[ok], r[ok]
    # |x - z| uniform in (0, r/2), random sign; z may leave the box slightly
    s = rng.uniform(0.0, 0.5, x.size) * r * rng.choice([-1.0, 1.0], x.size)
    s = np.where(s == 0, 1e-3 * r, s)
    z = x + s
    d = K.delta
    kxy = K(x, y)
    c0 = np.abs(kxy) * r
    c1 = np.abs(kxy - K(z, y)) * r ** (1 + d) / np.abs(s) ** d
    c2 = np.abs(K(y, x) - K(y, z)) * r ** (1 + d) / np.abs(s) ** d
    out = {"C0": float(np.max(c0)), "C1": float(np.max(c1)), "C2": float(np.max(c2))}
    if not all(math.isfinite(v) for v in out.values()):
        raise KernelError(f"kernel {K.name} produced non-finite constants")
    out.update({"delta": d, "samples": int(x.size), "seed": int(seed), "box": [a, b], "kernel": K.name})
    return out
