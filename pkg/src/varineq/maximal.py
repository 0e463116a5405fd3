"""One-sided and two-sided maximal functions, sharp maximal functions and the
weighted one-sided BMO norm.

For finitely supported input every supremum is over finitely many
candidates, so all values here are exact up to floating point rounding.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import ParameterError
from .seqcore import SampledFunction, Sequence, Weight

__all__ = ["maximal", "sharp_plus", "sharp_sym", "bmo_plus_norm", "default_window"]

SIDES = ("plus", "minus", "both")


def default_window(f: Sequence, pad: int | None = None) -> tuple[int, int]:
    """Support of ``f`` padded by its own length on both sides."""
    s = f.support() or (f.lo, f.lo)
    if pad is None:
        pad = s[1] - s[0] + 1
    return s[0] - pad, s[1] + pad


@njit(cache=True)
def _forward_max(g, start, stop):
    # g is dense on [0, len(g)); position p in [start, stop) gets
    # max over N of mean(g[p:p+N+1]), truncated at the last index of g.
    n = g.shape[0]
    out = np.zeros(stop - start)
    for p in range(start, stop):
        if p >= n:
            continue
        s = 0.0
        best = 0.0
        for e in range(max(p, 0), n):
            s += g[e]
            cnt = e - p + 1
            v = s / cnt
            if v > best:
                best = v
        out[p - start] = best
    return out


@njit(cache=True)
def _interval_max(g):
    # M(p) = max over a <= p <= b of mean(g[a:b+1]) on a dense array.
    n = g.shape[0]
    out = np.zeros(n)
    sm = np.empty(n)
    for a in range(n):
        s = 0.0
        for b in range(a, n):
            s += g[b]
            sm[b] = s / (b - a + 1)
        for b in range(n - 2, a - 1, -1):
            if sm[b + 1] > sm[b]:
                sm[b] = sm[b + 1]
        for p in range(a, n):
            if sm[p] > out[p]:
                out[p] = sm[p]
    return out


def _check_window(window):
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise ParameterError(f"empty window [{lo}, {hi}]")
    return lo, hi


def maximal(f: Sequence, side: str = "plus", r: float = 1.0, window=None) -> Sequence:
    """``(M^side(|f|^r))^(1/r)`` on ``window``.

    ``side='plus'`` averages over forward windows ``[n, n+N]``, ``'minus'``
    over backward ones and ``'both'`` over every interval containing ``n``.
    The default window is the support padded by its length on both sides.
    """
    if side not in SIDES:
        raise ParameterError(f"side must be one of {SIDES}")
    if not r >= 1:
        raise ParameterError(f"r must be >= 1, got {r}")
    lo, hi = _check_window(window if window is not None else default_window(f))
    s = f.support()
    if s is None:
        return Sequence(lo, np.zeros(hi - lo + 1))
    if side == "minus":
        m = maximal(f.reflect(), "plus", r, (-hi, -lo))
        return m.reflect()
    g = np.abs(f.window(*s)) ** r
    if side == "plus":
        out = _forward_max(g, lo - s[0], hi - s[0] + 1)
    else:
        dense = np.abs(f.window(s[0], s[1])) ** r
        out = np.zeros(hi - lo + 1)
        # points inside the support: full interval search
        inner = _interval_max(dense)
        a, b = max(lo, s[0]), min(hi, s[1])
        if a <= b:
            out[a - lo : b - lo + 1] = inner[a - s[0] : b - s[0] + 1]
        # points left of the support: best interval starts at the point
        if lo < s[0]:
            left = _forward_max(g, lo - s[0], min(hi, s[0] - 1) - s[0] + 1)
            out[: len(left)] = left
        # points right of the support: mirror image
        if hi > s[1]:
            rg = g[::-1].copy()
            start = max(lo, s[1] + 1)
            right = _forward_max(rg, s[1] - hi, s[1] - start + 1)
            out[start - lo :] = right[::-1]
    if r != 1.0:
        out = out ** (1.0 / r)
    return Sequence(lo, out)


@njit(cache=True)
def _sharp_rows(g, pos, logw_max):
    # For each position p in ``pos`` of the dense array g (zeros outside it)
    # return max over k >= 1 of
    #   exp(logw_max[t, k]) * mean_{i in [p, p+k]} (g_i - mean_{[p+k, p+2k]} g)^+ .
    # logw_max is ignored when it has zero rows.  The positive-part sums come
    # from a Fenwick tree over the ranks of the values seen so far.
    n = g.shape[0]
    cs = np.zeros(n + 1)
    for i in range(n):
        cs[i + 1] = cs[i] + g[i]
    vals = np.unique(np.append(g, 0.0))
    m = vals.shape[0]
    rank = np.searchsorted(vals, g)
    zero_rank = np.searchsorted(vals, 0.0)
    cnt = np.zeros(m + 1)
    tot = np.zeros(m + 1)
    weighted = logw_max.shape[0] > 0
    out = np.zeros(pos.shape[0])
    for t in range(pos.shape[0]):
        p = pos[t]
        if p >= n:
            continue
        kmax = n - p
        if weighted:
            kmax = max(kmax, logw_max.shape[1] - 1)
        for j in range(m + 1):
            cnt[j] = 0.0
            tot[j] = 0.0
        all_cnt = 0.0
        all_tot = 0.0
        best = 0.0
        for k in range(0, kmax + 1):
            # insert the element at index p + k
            i = p + k
            if 0 <= i < n:
                r = rank[i]
                v = g[i]
            else:
                r = zero_rank
                v = 0.0
            j = r + 1
            while j <= m:
                cnt[j] += 1.0
                tot[j] += v
                j += j & (-j)
            all_cnt += 1.0
            all_tot += v
            if k == 0:
                continue
            a = p + k
            b = min(p + 2 * k, n - 1)
            inner = 0.0
            if b >= max(a, 0) and a < n:
                inner = (cs[b + 1] - cs[max(a, 0)]) / (k + 1)
            # count and sum of inserted values <= inner
            r = np.searchsorted(vals, inner, side="right")
            c_le = 0.0
            s_le = 0.0
            j = r
            while j > 0:
                c_le += cnt[j]
                s_le += tot[j]
                j -= j & (-j)
            acc = (all_tot - s_le) - inner * (all_cnt - c_le)
            if acc < 0.0:
                acc = 0.0
            v = acc / (k + 1)
            if weighted:
                kk = min(k, logw_max.shape[1] - 1)
                v = v * math.exp(logw_max[t, kk])
            if v > best:
                best = v
        out[t] = best
    return out


def sharp_plus(f: Sequence, window=None) -> Sequence:
    """One-sided sharp maximal function

    ``sup_k mean_{i=n}^{n+k} (f(i) - mean_{j=n+k}^{n+2k} f(j))^+``

    evaluated exactly on ``window`` (default: padded support).
    """
    if np.iscomplexobj(f.values):
        raise ParameterError("sharp_plus needs a real sequence")
    lo, hi = _check_window(window if window is not None else default_window(f))
    s = f.support()
    if s is None:
        return Sequence(lo, np.zeros(hi - lo + 1))
    base = s[0]
    g = f.window(base, s[1])
    pos = np.arange(lo, hi + 1, dtype=np.int64) - base
    out = _sharp_rows(g, pos, np.zeros((0, 0)))
    return Sequence(lo, out)


def bmo_plus_norm(f: Sequence, w: Weight, window=None) -> float:
    """Weighted one-sided BMO norm with ``n`` and ``l`` ranging over ``window``."""
    if np.iscomplexobj(f.values):
        raise ParameterError("bmo_plus_norm needs a real sequence")
    lo, hi = _check_window(window if window is not None else (w.lo, w.hi))
    if lo < w.lo or hi > w.hi:
        raise ParameterError(f"window [{lo}, {hi}] exceeds weight domain [{w.lo}, {w.hi}]")
    s = f.support()
    if s is None:
        return 0.0
    lw = w.log_window(lo, hi)
    # running max of log w over [n-k, n] clipped to the window, per n and k
    width = hi - lo + 1
    table = np.full((width, width), -np.inf)
    for t in range(width):
        seg = lw[: t + 1][::-1]
        table[t, : t + 1] = np.maximum.accumulate(seg)
        table[t, t + 1 :] = table[t, t]
    base = min(s[0], lo)
    g = f.window(base, max(s[1], lo))
    pos = np.arange(lo, hi + 1, dtype=np.int64) - base
    out = _sharp_rows(g, pos, table)
    return float(out.max())


@njit(cache=True)
def _mean_osc_max(v):
    n = v.shape[0]
    out = np.zeros(n)
    row = np.empty(n)
    for a in range(n):
        s = 0.0
        for b in range(a, n):
            s += v[b]
            m = s / (b - a + 1)
            acc = 0.0
            for i in range(a, b + 1):
                acc += abs(v[i] - m)
            row[b] = acc / (b - a + 1)
        for b in range(n - 2, a - 1, -1):
            if row[b + 1] > row[b]:
                row[b] = row[b + 1]
        for p in range(a, n):
            if row[p] > out[p]:
                out[p] = row[p]
    return out


def sharp_sym(f, window=None):
    """Two-sided sharp function ``sup_{I containing x} mean_I |f - mean_I f|``
    over intervals inside ``window``.

    Sequences are handled exactly; sampled functions use the grid values with
    equal cell weights.
    """
    if isinstance(f, SampledFunction):
        vals = np.asarray(f.values)
        if window is not None:
            i0 = max(0, int(math.ceil((window[0] - f.x0) / f.step - 1e-9)))
            i1 = min(len(vals) - 1, int(math.floor((window[1] - f.x0) / f.step + 1e-9)))
        else:
            i0, i1 = 0, len(vals) - 1
        seg = vals[i0 : i1 + 1]
        if np.iscomplexobj(seg):
            raise ParameterError("sharp_sym needs real values")
        return SampledFunction(f.x0 + i0 * f.step, f.step, _mean_osc_max(np.ascontiguousarray(seg)))
    lo, hi = _check_window(window if window is not None else default_window(f))
    return Sequence(lo, _mean_osc_max(f.window(lo, hi).astype(np.float64)))
