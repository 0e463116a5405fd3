"""Averaging operator families (discrete and continuous), their q-variation
fields, and variation of dilated convolution families.

The discrete q-variation over *all* N >= 0 is exact: past the far edge of
the support the averages are S/(N+1) (or S/(2N+1)), monotone with limit 0,
so the infinite tail is replaced by one terminal point equal to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .errors import KernelError, ParameterError
from .maximal import default_window
from .seqcore import FamilyTrace, ParamGrid, SampledFunction, Sequence
from .variation import VariationResult, _dp, variation_norm

__all__ = [
    "AvgFamilySpec",
    "avg_family",
    "vq_avg",
    "vq_avg_point",
    "vq_avg_continuous",
    "vq_avg_continuous_exact",
    "continuous_avg",
    "KernelPiece",
    "ConvKernel",
    "builtin_kernel",
    "tabulated_kernel",
    "convolve_dilated",
    "vq_convolution",
    "gauss_cells",
]

SIDES = ("plus", "minus", "symmetric")


@dataclass(frozen=True)
class AvgFamilySpec:
    side: str = "plus"
    mode: str = "discrete"
    grid: ParamGrid | None = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise ParameterError(f"side must be one of {SIDES}")
        if self.mode not in ("discrete", "continuous"):
            raise ParameterError("mode must be 'discrete' or 'continuous'")
        if self.grid is not None:
            if self.mode == "discrete" and not self.grid.is_integer:
                raise ParameterError("discrete grids hold nonnegative integers")
            if self.mode == "continuous":
                self.grid.require_positive()


def _side_of(spec) -> str:
    if isinstance(spec, AvgFamilySpec):
        return spec.side
    if spec not in SIDES:
        raise ParameterError(f"side must be one of {SIDES}")
    return spec


# ---------------------------------------------------------------------------
# discrete


def avg_family(f: Sequence, n: int, spec: AvgFamilySpec) -> FamilyTrace:
    """``A_N f(n)`` for every N of ``spec.grid``."""
    if spec.mode != "discrete":
        raise ParameterError("avg_family works on discrete specs")
    if spec.grid is None:
        raise ParameterError("avg_family needs an explicit grid")
    Ns = spec.grid.points.astype(np.int64)
    top = int(Ns[-1])
    if spec.side == "minus":
        return avg_family(f.reflect(), -n, AvgFamilySpec("plus", "discrete", spec.grid))
    if spec.side == "plus":
        s = np.cumsum(f.window(n, n + top))
        vals = s[Ns] / (Ns + 1)
    else:
        seg = f.window(n - top, n + top)
        c = seg[top]
        left = seg[:top][::-1]
        right = seg[top + 1 :]
        s = np.concatenate(([c], c + np.cumsum(left + right)))
        vals = s[Ns] / (2 * Ns + 1)
    return FamilyTrace(spec.grid.points, vals)


@njit(cache=True)
def _family(g, p, symmetric, buf):
    # Fill buf with A_N at position p of the dense array g (zeros outside)
    # for N = 0..N*, followed by the limit 0; return the used length.
    m = g.shape[0]
    if symmetric:
        nstar = max(p, m - 1 - p)
        s = 0.0
        if 0 <= p < m:
            s = g[p]
        buf[0] = s
        for N in range(1, nstar + 1):
            i = p - N
            if 0 <= i < m:
                s += g[i]
            i = p + N
            if 0 <= i < m:
                s += g[i]
            buf[N] = s / (2 * N + 1)
    else:
        if p >= m:
            buf[0] = 0.0
            return 1
        nstar = m - 1 - p
        s = 0.0
        for N in range(nstar + 1):
            i = p + N
            if i >= 0:
                s += g[i]
            buf[N] = s / (N + 1)
    buf[nstar + 1] = 0.0
    return nstar + 2


@njit(cache=True)
def _turn_points(a, n, out):
    k = 1
    out[0] = 0
    last = 0
    direction = 0
    for i in range(1, n):
        if a[i] == a[last]:
            continue
        d = 1 if a[i] > a[last] else -1
        if direction == 0 or d == direction:
            # extend the current monotone run
            if direction == 0:
                k = 2
            out[k - 1] = i
        else:
            out[k] = i
            k += 1
        direction = d
        last = i
    return k


@njit(cache=True)
def _vq_field(g, positions, q, symmetric):
    m = g.shape[0]
    maxlen = 0
    for t in range(positions.shape[0]):
        p = positions[t]
        L = max(abs(p), abs(m - 1 - p)) + m + 2
        if L > maxlen:
            maxlen = L
    buf = np.empty(maxlen)
    idx = np.empty(maxlen, dtype=np.int64)
    sub = np.empty(maxlen)
    out = np.zeros(positions.shape[0])
    for t in range(positions.shape[0]):
        n = _family(g, positions[t], symmetric, buf)
        k = _turn_points(buf, n, idx)
        for j in range(k):
            sub[j] = buf[idx[j]]
        best, _ = _dp(sub[:k], q)
        mx = 0.0
        for j in range(k):
            if best[j] > mx:
                mx = best[j]
        out[t] = mx ** (1.0 / q)
    return out


def vq_avg(f: Sequence, q: float, spec="plus", window=None) -> Sequence:
    """q-variation over all N >= 0 of ``{A_N f(n)}`` for every n in ``window``."""
    side = _side_of(spec)
    if isinstance(spec, AvgFamilySpec) and spec.mode != "discrete":
        raise ParameterError("vq_avg works on discrete specs")
    if not q >= 1:
        raise ParameterError(f"q must be >= 1, got {q}")
    if np.iscomplexobj(f.values):
        raise ParameterError("vq_avg needs a real sequence")
    lo, hi = window if window is not None else default_window(f)
    lo, hi = int(lo), int(hi)
    s = f.support()
    if s is None:
        return Sequence(lo, np.zeros(hi - lo + 1))
    if side == "minus":
        return vq_avg(f.reflect(), q, "plus", (-hi, -lo)).reflect()
    g = f.window(*s)
    pos = np.arange(lo, hi + 1, dtype=np.int64) - s[0]
    return Sequence(lo, _vq_field(g, pos, float(q), side == "symmetric"))


def vq_avg_point(f: Sequence, n: int, q: float, side: str = "plus"):
    """Exact q-variation at one point together with its optimal chain.

    Returns ``(VariationResult, FamilyTrace)``; the family's last parameter is
    ``inf`` and stands for the limit 0 of the averages.
    """
    side = _side_of(side)
    if side == "minus":
        return vq_avg_point(f.reflect(), -n, q, "plus")
    s = f.support()
    if s is None:
        fam = FamilyTrace([0.0, math.inf], [0.0, 0.0])
        return VariationResult(0.0, (0,), float(q)), fam
    g = f.window(*s)
    p = n - s[0]
    buf = np.empty(max(abs(p), abs(len(g) - 1 - p)) + len(g) + 2)
    m = _family(g, p, side == "symmetric", buf)
    vals = buf[:m].copy()
    params = np.arange(m, dtype=float)
    params[-1] = math.inf
    res = variation_norm(vals, q)
    fam = FamilyTrace(params, vals)
    return res, fam


# ---------------------------------------------------------------------------
# continuous


def _primitive(f: SampledFunction):
    """Return F(y) = integral of the linear interpolant of f from x0 to y."""
    v = np.asarray(f.values, dtype=float)
    h = f.step
    cell = 0.5 * h * (v[:-1] + v[1:])
    P = np.concatenate(([0.0], np.cumsum(cell)))
    n = len(v)

    def F(y):
        y = np.asarray(y, dtype=float)
        u = (y - f.x0) / h
        j = np.clip(np.floor(u).astype(np.int64), 0, n - 2)
        tau = np.clip(u - j, 0.0, 1.0)
        val = P[j] + h * tau * (v[j] + 0.5 * tau * (v[j + 1] - v[j]))
        val = np.where(u <= 0, 0.0, val)
        return np.where(u >= n - 1, P[-1], val)

    return F


def continuous_avg(f: SampledFunction, x, t, side: str = "plus"):
    """``A_t f(x)`` for the linear interpolant of f (zero off its grid)."""
    if np.iscomplexobj(f.values):
        re = continuous_avg(SampledFunction(f.x0, f.step, f.values.real), x, t, side)
        im = continuous_avg(SampledFunction(f.x0, f.step, f.values.imag), x, t, side)
        return re + 1j * im
    F = _primitive(f)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if side == "plus":
        return (F(x + t) - F(x)) / t
    if side == "minus":
        return (F(x) - F(x - t)) / t
    if side == "symmetric":
        return (F(x + t) - F(x - t)) / (2 * t)
    raise ParameterError(f"side must be one of {SIDES}")


def _eval_grid(eval_points):
    x = np.atleast_1d(np.asarray(eval_points, dtype=float))
    if x.size == 0:
        raise ParameterError("no evaluation points")
    step = 1.0
    if x.size > 1:
        d = np.diff(x)
        if np.any(d <= 0) or np.ptp(d) > 1e-9 * max(1.0, abs(d[0])):
            raise ParameterError("evaluation points must be uniformly spaced")
        step = float(d[0])
    return x, step


def vq_avg_continuous(f: SampledFunction, q: float, spec, t_grid: ParamGrid, eval_points) -> SampledFunction:
    """q-variation of ``{A_t f(x)}`` over the finite grid ``t_grid``.

    Averages integrate the linear interpolant of f exactly.  Grid values
    below one sample step are flagged in ``meta['warnings']``.
    """
    side = _side_of(spec)
    grid = t_grid if isinstance(t_grid, ParamGrid) else ParamGrid(t_grid)
    grid.require_positive()
    x, step = _eval_grid(eval_points)
    t = grid.points
    A = continuous_avg(f, x[:, None], t[None, :], side)
    vals = np.array([variation_norm(row, q).value for row in A])
    warnings = []
    if t[0] < f.step:
        warnings.append(f"t={t[0]:g} below sample step {f.step:g}: averages resolve sub-cell detail only linearly")
    meta = {"t_grid": t.tolist(), "side": side, "q": float(q), "warnings": warnings}
    return SampledFunction(x[0], step, vals, meta)


def _breakpoints(f: SampledFunction, x: float, side: str) -> tuple[np.ndarray, float]:
    xs = f.x
    cand = []
    if side in ("plus", "symmetric"):
        cand.append(xs - x)
    if side in ("minus", "symmetric"):
        cand.append(x - xs)
    b = np.concatenate(cand)
    b = np.unique(b[b > 0])
    # past t_end the window covers the whole support: A_t = const / t
    if side == "plus":
        t_end = f.x1 - x
    elif side == "minus":
        t_end = x - f.x0
    else:
        t_end = max(f.x1 - x, x - f.x0)
    return b, t_end


def vq_avg_continuous_exact(f: SampledFunction, q: float, side: str, x: float) -> VariationResult:
    """q-variation over *all* t > 0 of ``A_t f(x)`` for the linear interpolant.

    Between consecutive kinks the numerator is quadratic in t, so
    ``A_t = a/t + b + c t`` has at most one interior critical point
    ``sqrt(a/c)``; the family restricted to the limits at 0 and infinity, the
    kinks and those critical points has the same q-variation.
    """
    side = _side_of(side)
    b, t_end = _breakpoints(f, x, side)
    if t_end <= 0:
        b = b[b > 0]
    pts = [b]
    scale = 2.0 if side == "symmetric" else 1.0
    edges = np.concatenate(([0.0], b))
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        ts = np.array([lo, 0.5 * (lo + hi), hi])
        # G(t) = t * A_t (times the symmetric factor), exactly quadratic here
        G = scale * ts * np.where(ts > 0, continuous_avg(f, x, np.maximum(ts, 1e-300), side), 0.0)
        if lo == 0.0:
            G[0] = 0.0
        w = hi - lo
        c0 = G[0]
        c1 = (4 * G[1] - 3 * G[0] - G[2]) / w
        c2 = 2 * (G[2] - 2 * G[1] + G[0]) / (w * w)
        # back to powers of t: G = a + b t + c t^2, critical point sqrt(a/c)
        a = c0 - c1 * lo + c2 * lo * lo
        if c2 != 0 and a / c2 > 0:
            tc = math.sqrt(a / c2)
            if lo < tc < hi:
                pts.append(np.array([tc]))
    ts = np.unique(np.concatenate(pts))
    ts = ts[ts > 0]
    at0 = float(f(x)) if f.x0 <= x <= f.x1 else 0.0
    if side == "minus" and x == f.x0:
        at0 = float(f.values[0])
    vals = np.concatenate(([at0], continuous_avg(f, x, ts, side), [0.0]))
    return variation_norm(vals, q)


# ---------------------------------------------------------------------------
# convolution kernels


@dataclass(frozen=True)
class KernelPiece:
    """A continuously differentiable function on ``[a, b]``."""

    a: float
    b: float
    psi: Callable
    dpsi: Callable

    def __post_init__(self):
        if not self.b > self.a:
            raise KernelError("kernel piece needs a < b")
        if self.a < 0 < self.b:
            raise KernelError("kernel pieces may not straddle 0; split them")


@dataclass(frozen=True)
class ConvKernel:
    """Function on the line given as a sum of smooth pieces with disjoint
    interiors (jumps between pieces are allowed)."""

    name: str
    pieces: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for pc in self.pieces:
            inside = (u >= pc.a) & (u < pc.b) if pc.b != self.pieces[-1].b else (u >= pc.a) & (u <= pc.b)
            if np.any(inside):
                out = np.where(inside, pc.psi(np.where(inside, u, pc.a)), out)
        return out

    @property
    def support(self):
        return min(p.a for p in self.pieces), max(p.b for p in self.pieces)


def _poly_piece(a, b, coeffs):
    P = np.polynomial.Polynomial(coeffs)
    return KernelPiece(a, b, P, P.deriv())


def builtin_kernel(name: str, a: float = 0.0, b: float = 1.0) -> ConvKernel:
    """Named kernels on ``[a, b]`` (``0 <= a < b`` or ``a < b <= 0``).

    ``box``: normalised indicator; ``hat``: tent peaking mid-interval;
    ``smoothstep``: ``3s^2 - 2s^3`` bump profile, ``s`` the relative position;
    ``zero``: identically 0.  ``psi_plus`` / ``psi_minus`` are the truncated
    ``1/y`` pieces separating sharp and smooth Hilbert truncations.
    """
    if name in ("psi_plus", "psi_minus"):
        from .singular import psi_kernel

        return psi_kernel(name.split("_")[1])
    if not b > a:
        raise KernelError("need a < b")
    if a < 0 < b:
        raise KernelError("built-in kernels live on one side of 0")
    L = b - a
    if name == "box":
        pieces = (_poly_piece(a, b, [1.0 / L]),)
    elif name == "zero":
        pieces = (_poly_piece(a, b, [0.0]),)
    elif name == "hat":
        m = 0.5 * (a + b)
        h = 2.0 / L
        pieces = (
            _poly_piece(a, m, [-h * a / (m - a), h / (m - a)]),
            _poly_piece(m, b, [h * b / (b - m), -h / (b - m)]),
        )
    elif name == "smoothstep":
        # s = (u - a)/L, psi = 3 s^2 - 2 s^3
        P = np.polynomial.Polynomial([0.0, 0.0, 3.0, -2.0])
        S = np.polynomial.Polynomial([-a / L, 1.0 / L])
        Q = P(S)
        pieces = (KernelPiece(a, b, Q, Q.deriv()),)
    else:
        raise KernelError(f"unknown kernel {name!r}")
    return ConvKernel(name, pieces, {"a": a, "b": b})


def tabulated_kernel(grid, values, derivatives, name: str = "tabulated") -> ConvKernel:
    """Cubic Hermite kernel through tabulated values and derivatives."""
    grid = np.asarray(grid, dtype=float)
    if grid[0] < 0 < grid[-1]:
        raise KernelError("tabulated kernels must not straddle 0")
    spl = CubicHermiteSpline(grid, np.asarray(values, float), np.asarray(derivatives, float))
    pc = KernelPiece(float(grid[0]), float(grid[-1]), spl, spl.derivative())
    return ConvKernel(name, (pc,), {"a": float(grid[0]), "b": float(grid[-1])})


_GL_CACHE: dict = {}


def _gl(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def gauss_cells(f: SampledFunction, weight_fn, y_lo: float, y_hi: float, order: int = 4, extra=()):
    """``integral_{y_lo}^{y_hi} weight_fn(y) * f(y) dy`` with f linearly
    interpolated; Gauss-Legendre on every grid cell fragment.  ``extra``
    adds breakpoints where ``weight_fn`` is not smooth."""
    a, b = max(y_lo, f.x0), min(y_hi, f.x1)
    if not b > a:
        return 0.0
    cuts = np.concatenate((f.x, np.asarray(extra, dtype=float)))
    inner = np.unique(cuts[(cuts > a) & (cuts < b)])
    edges = np.concatenate(([a], inner, [b]))
    lo, hi = edges[:-1], edges[1:]
    xg, wg = _gl(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    y = mid[:, None] + half[:, None] * xg[None, :]
    vals = weight_fn(y) * f(y)
    return np.sum(vals * wg[None, :] * half[:, None])


def convolve_dilated(f: SampledFunction, kernel: ConvKernel, t: float, x: float, order: int = 4):
    """``psi_t * f(x) = integral psi(u) f(x - t u) du`` via cell-exact quadrature."""
    total = 0.0
    for pc in kernel.pieces:
        # y = x - t u runs over [x - t b, x - t a]
        fn = lambda y, pc=pc: pc.psi((x - y) / t) / t
        total += gauss_cells(f, fn, x - t * pc.b, x - t * pc.a, order)
    return total


def _piece_factor(pc: KernelPiece) -> float:
    """``(a+b)|psi(b)| + a int|psi'| + int z|psi'(z)| dz`` for a piece on [a, b], a >= 0."""
    a, b = pc.a, pc.b
    i1, _ = integrate.quad(lambda z: abs(float(pc.dpsi(z))), a, b, epsabs=1e-9, limit=200)
    i2, _ = integrate.quad(lambda z: z * abs(float(pc.dpsi(z))), a, b, epsabs=1e-9, limit=200)
    out = (a + b) * abs(float(pc.psi(b))) + a * i1 + i2
    if not math.isfinite(out):
        raise KernelError("kernel derivative is not integrable")
    return out


def bound_factors(kernel: ConvKernel) -> dict:
    """Bound factors against the backward (``minus``) and forward (``plus``)
    averaging variations; pieces on the negative axis are reflected."""
    out = {"minus": 0.0, "plus": 0.0}
    for pc in kernel.pieces:
        if pc.a >= 0:
            out["minus"] += _piece_factor(pc)
        else:
            refl = KernelPiece(-pc.b, -pc.a, lambda z, pc=pc: pc.psi(-z), lambda z, pc=pc: -pc.dpsi(-z))
            out["plus"] += _piece_factor(refl)
    return out


def vq_convolution(f: SampledFunction, psi: ConvKernel, q: float, t_grid, eval_points):
    """q-variation of ``{psi_t * f(x)}`` over ``t_grid`` together with the
    bound factor of the convolution domination.

    Returns ``(SampledFunction, bound_factor)`` where ``bound_factor`` is the
    total over all pieces; per-side factors are in ``meta['bound_factors']``.
    """
    grid = t_grid if isinstance(t_grid, ParamGrid) else ParamGrid(t_grid)
    grid.require_positive()
    x, step = _eval_grid(eval_points)
    factors = bound_factors(psi)
    vals = []
    for xv in x:
        tr = np.array([convolve_dilated(f, psi, t, xv) for t in grid.points])
        vals.append(variation_norm(tr, q).value)
    meta = {"t_grid": grid.points.tolist(), "q": float(q), "bound_factors": factors, "kernel": psi.name}
    return SampledFunction(x[0], step, np.asarray(vals), meta), factors["minus"] + factors["plus"]
