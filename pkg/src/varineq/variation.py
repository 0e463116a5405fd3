"""q-variation and oscillation of finite families.

``variation_norm`` is the exact O(n^2) dynamic program over increasing
subsequences; ``variation_oracle`` is a brute-force enumeration kept
deliberately separate from it for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ParameterError, SizeError
from .seqcore import FamilyTrace, ParamGrid

__all__ = [
    "VariationResult",
    "variation_norm",
    "total_variation",
    "oscillation",
    "variation_oracle",
    "turning_points",
    "witness_value",
]

ORACLE_MAX_LEN = 20


@dataclass(frozen=True)
class VariationResult:
    value: float
    witness: tuple
    q: float

    def to_dict(self) -> dict:
        return {"value": self.value, "witness": list(self.witness), "q": self.q}


@njit(cache=True)
def _dp(a, q):
    # best[i]: largest sum of |jumps|**q over increasing chains ending at i.
    # A predecessor j is skipped when some k in (j, i) lies strictly beyond
    # a[j] as seen from a[i]: best[k] >= best[j] and |a[i]-a[k]| > |a[i]-a[j]|.
    # Scanning j downward, only suffix records survive, and the scan stops
    # once the suffix range covers the prefix range.
    n = a.shape[0]
    best = np.zeros(n)
    back = np.full(n, -1, dtype=np.int64)
    pmin = np.empty(n)
    pmax = np.empty(n)
    for j in range(n):
        pmin[j] = a[j] if j == 0 or a[j] < pmin[j - 1] else pmin[j - 1]
        pmax[j] = a[j] if j == 0 or a[j] > pmax[j - 1] else pmax[j - 1]
    for i in range(1, n):
        b = 0.0
        arg = -1
        ai = a[i]
        lo = ai
        hi = ai
        for j in range(i - 1, -1, -1):
            aj = a[j]
            if aj <= lo or aj >= hi:
                v = best[j] + abs(ai - aj) ** q
                if v > b or (v == b and v > 0.0):
                    b = v
                    arg = j
                if aj < lo:
                    lo = aj
                if aj > hi:
                    hi = aj
            # no earlier point can reach lo or hi (strict, so equal values
            # still compete for the smaller-index tie-break)
            if j > 0 and lo < pmin[j - 1] and hi > pmax[j - 1]:
                break
        best[i] = b
        back[i] = arg
    return best, back


@njit(cache=True)
def _dp_plain(a, q):
    # unpruned O(n^2) recurrence; used for complex families
    n = a.shape[0]
    best = np.zeros(n)
    back = np.full(n, -1, dtype=np.int64)
    for i in range(1, n):
        b = 0.0
        arg = -1
        for j in range(i - 1, -1, -1):
            v = best[j] + abs(a[i] - a[j]) ** q
            if v > b or (v == b and v > 0.0):
                b = v
                arg = j
        best[i] = b
        back[i] = arg
    return best, back


def _as_values(family) -> np.ndarray:
    if isinstance(family, FamilyTrace):
        return family.values
    vals = np.asarray(family)
    if not np.iscomplexobj(vals):
        vals = vals.astype(np.float64, copy=False)
    return vals


def turning_points(values: np.ndarray) -> np.ndarray:
    """Indices of the first point, the last point and every strict local
    extremum of a real sequence, with plateaus collapsed to their first index.
    """
    a = np.asarray(values, dtype=np.float64)
    n = a.size
    if n <= 2:
        return np.arange(n)
    keep = np.empty(n, dtype=bool)
    keep[0] = True
    keep[1:] = a[1:] != a[:-1]
    idx = np.flatnonzero(keep)
    if idx.size <= 2:
        if idx[-1] != n - 1:
            idx = np.append(idx, n - 1)
        return idx
    b = a[idx]
    d = np.sign(np.diff(b))
    turn = np.flatnonzero(d[1:] != d[:-1]) + 1
    out = np.concatenate(([idx[0]], idx[turn], [idx[-1]]))
    if out[-1] != n - 1:
        out = np.append(out, n - 1)
    return out


def witness_value(values, witness, q: float) -> float:
    """``(sum |a[w_{j+1}] - a[w_j]|**q)**(1/q)`` along ``witness``."""
    a = _as_values(values)
    w = np.asarray(witness, dtype=np.int64)
    if w.size < 2:
        return 0.0
    s = 0.0
    for x, y in zip(w[:-1], w[1:]):
        s += abs(a[y] - a[x]) ** q
    return s ** (1.0 / q)


def variation_norm(family, q: float, prefilter: bool | None = None) -> VariationResult:
    """Exact q-variation of a finite family.

    Real families are first reduced to their turning points (an optimal
    chain never needs an interior point of a monotone run); complex families
    are processed in full.  Ties in the DP break toward the smaller
    predecessor index.
    """
    if not q >= 1:
        raise ParameterError(f"q must be >= 1, got {q}")
    a = _as_values(family)
    if a.size == 0:
        raise ParameterError("empty family")
    if q == 1:
        # the full chain is optimal by the triangle inequality; summing the
        # consecutive jumps directly keeps V_1 identical to total_variation
        return VariationResult(total_variation(a), tuple(range(a.size)), 1.0)
    complex_valued = np.iscomplexobj(a)
    if prefilter is None:
        prefilter = not complex_valued
    if prefilter and complex_valued:
        raise ParameterError("the turning-point filter only applies to real families")
    keep = turning_points(a) if prefilter else np.arange(a.size)
    sub = np.ascontiguousarray(a[keep])
    # rescale by a power of two (exact) so |jump|**q neither under- nor overflows
    top = float(np.max(np.abs(sub)))
    scale = 2.0 ** math.frexp(top)[1] if top > 0 and math.isfinite(top) else 1.0
    best, back = (_dp_plain if complex_valued else _dp)(sub / scale, float(q))
    i = int(np.argmax(best))
    chain = [i]
    while back[chain[-1]] >= 0:
        chain.append(int(back[chain[-1]]))
    chain.reverse()
    witness = tuple(int(keep[c]) for c in chain)
    return VariationResult(float(best[i] ** (1.0 / q)) * scale, witness, float(q))


def total_variation(family) -> float:
    """Sum of consecutive jumps (the q = 1 variation)."""
    a = _as_values(family)
    if a.size == 0:
        raise ParameterError("empty family")
    if a.size == 1:
        return 0.0
    return float(np.cumsum(np.abs(np.diff(a)))[-1])


def oscillation(family, partition) -> float:
    """Square-summed block ranges of ``family`` relative to ``partition``.

    ``partition`` lists increasing grid indices ``N_0 < N_1 < ...``; block j
    covers ``N_j <= N < N_{j+1}``.  The last point may equal ``len(family)``.
    """
    a = _as_values(family)
    pts = partition.points if isinstance(partition, ParamGrid) else np.asarray(partition, float)
    if pts.size == 0 or np.any(pts != np.round(pts)):
        raise ParameterError("partition must be a non-empty list of integer indices")
    pts = pts.astype(np.int64)
    if np.any(np.diff(pts) <= 0):
        raise ParameterError("partition must be strictly increasing")
    if pts[0] < 0 or pts[-1] > a.size:
        raise ParameterError(f"partition outside [0, {a.size}]")
    total = 0.0
    for s, e in zip(pts[:-1], pts[1:]):
        block = a[s:e]
        if block.size < 2:
            continue
        if np.iscomplexobj(block):
            diam = np.max(np.abs(block[:, None] - block[None, :]))
        else:
            diam = block.max() - block.min()
        total += float(diam) ** 2
    return math.sqrt(total)


def variation_oracle(family, q: float) -> float:
    """Brute-force q-variation: maximum over every subsequence of length >= 2."""
    if not q >= 1:
        raise ParameterError(f"q must be >= 1, got {q}")
    a = _as_values(family)
    n = a.size
    if n == 0:
        raise ParameterError("empty family")
    if n > ORACLE_MAX_LEN:
        raise SizeError(f"oracle limited to {ORACLE_MAX_LEN} points, got {n}")
    if n == 1:
        return 0.0
    ii, jj = np.triu_indices(n, k=1)
    pair = (np.int64(1) << ii) | (np.int64(1) << jj)
    # bits strictly between i and j
    between = ((np.int64(1) << jj) - 1) & ~((np.int64(1) << (ii + 1)) - 1)
    cost = np.abs(a[jj] - a[ii]) ** q
    best = 0.0
    chunk = 1 << 14
    for start in range(0, 1 << n, chunk):
        s = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)[:, None]
        active = ((s & pair) == pair) & ((s & between) == 0)
        tot = (active * cost).sum(axis=1)
        best = max(best, float(tot.max()))
    return best ** (1.0 / q)
