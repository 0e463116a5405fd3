"""Constructive one-sided Calderon-Zygmund decomposition at a level lambda,
with an independent verifier for every property the decomposition promises.

Omega = {M^+ |f| > lambda} comes straight from the maximal function.  With
``G(k) = S(k) - lambda*k`` for the partial sums S of |f|, a point n lies in
Omega exactly when ``max_{m >= n} G(m) > G(n-1)``; from this every connected
component [a, b] of Omega has ``G(b) > G(a-1)`` (average above lambda) and
``G(b) <= G(a-2)`` (average at most 2 lambda).  The dyadic stopping-time
refinement is therefore only a fallback, used by the two-sided mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionError, ParameterError
from .maximal import maximal
from .seqcore import Sequence

__all__ = ["CZDecomposition", "cz_decompose_plus", "verify_cz", "omega_plus"]

TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CZDecomposition:
    lam: float
    intervals: tuple
    good: Sequence
    bad: tuple
    omega: tuple
    mode: str = "plus"
    tripled: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "mode": self.mode,
            "intervals": [list(i) for i in self.intervals],
            "omega": list(self.omega),
            "good": {"offset": self.good.offset, "values": self.good.values.tolist()},
            "bad": [{"offset": b.offset, "values": b.values.tolist()} for b in self.bad],
            "tripled": [list(i) for i in self.tripled],
        }


def omega_plus(f: Sequence, lam: float) -> np.ndarray:
    """Sorted indices where the forward maximal function of |f| exceeds
    ``lam``.  Left of the support ``M^+ f(n) <= ||f||_1 / (s0 - n + 1)``,
    which bounds the window that needs scanning."""
    s = f.support()
    if s is None:
        return np.zeros(0, dtype=np.int64)
    pad = int(np.ceil(float(np.abs(f.values).sum()) / lam)) + 1
    M = maximal(f, "plus", 1.0, (s[0] - pad, s[1]))
    return M.indices[M.values > lam]


def _components(points: np.ndarray) -> list[tuple[int, int]]:
    if points.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(points) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [points.size - 1]))
    return [(int(points[a]), int(points[b])) for a, b in zip(starts, ends)]


def _avg(absf: Sequence, a: int, b: int) -> float:
    return float(absf.window(a, b).sum() / (b - a + 1))


def _fits(v: float, lam: float) -> bool:
    return lam * (1 - TOL) < v <= 2 * lam * (1 + TOL)


def _refine(absf: Sequence, comp: tuple[int, int], lam: float) -> list[tuple[int, int]]:
    a, b = comp
    if _fits(_avg(absf, a, b), lam):
        return [comp]
    # dyadic halving until no piece is above 2*lam (left-biased split)
    todo = [comp]
    pieces = []
    while todo:
        a, b = todo.pop(0)
        if _avg(absf, a, b) > 2 * lam and b > a:
            m = a + (b - a + 1 + 1) // 2 - 1
            todo[:0] = [(a, m), (m + 1, b)]
        else:
            pieces.append((a, b))
    # merge-forward pieces at or below lam with their right neighbour
    out: list[tuple[int, int]] = []
    carry = None
    for a, b in pieces:
        if carry is not None:
            a = carry
            carry = None
        if _avg(absf, a, b) <= lam:
            carry = a
            continue
        out.append((a, b))
    if carry is not None:
        if not out:
            raise DecompositionError("component average never exceeds lambda", comp)
        a0, _ = out.pop()
        out.append((a0, comp[1]))
    for a, b in out:
        v = _avg(absf, a, b)
        if not _fits(v, lam):
            raise DecompositionError(f"interval [{a}, {b}] has average {v} outside (lambda, 2 lambda]", comp)
    return out


def cz_decompose_plus(f: Sequence, lam: float, mode: str = "plus") -> CZDecomposition:
    """Decompose ``f = g + sum_i b_i`` at level ``lam``.

    ``mode='both'`` serves the two-sided setting: the intervals are the
    same (they satisfy every one-sided property, and components of the
    two-sided level set can average below lambda), and the tripled intervals
    ``3I`` with the same centres are recorded alongside.
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if mode not in ("plus", "both"):
        raise ParameterError("mode must be 'plus' or 'both'")
    if np.iscomplexobj(f.values):
        raise ParameterError("cz_decompose_plus needs a real sequence")
    absf = f.abs()
    om = omega_plus(f, lam)
    comps = _components(om)
    intervals = []
    for c in comps:
        intervals.extend(_refine(absf, c, lam))
    lo = min([f.lo] + [a for a, _ in intervals])
    hi = max([f.hi] + [b for _, b in intervals])
    g = f.window(lo, hi).astype(float).copy()
    bad = []
    for a, b in intervals:
        seg = f.window(a, b)
        m = seg.sum() / (b - a + 1)
        bad.append(Sequence(a, seg - m))
        g[a - lo : b - lo + 1] = m
    tripled = ()
    if mode == "both":
        tripled = tuple((a - (b - a + 1), b + (b - a + 1)) for a, b in intervals)
    return CZDecomposition(float(lam), tuple(intervals), Sequence(lo, g), tuple(bad), tuple(int(x) for x in om), mode, tripled)


def verify_cz(d: CZDecomposition, f: Sequence) -> dict:
    """Check the decomposition's six properties; returns per-check booleans
    with the offending detail for failures."""
    lam = d.lam
    tol = TOL
    checks: dict = {}
    om = set(d.omega)
    absf = f.abs()
    l1 = float(np.abs(f.values).sum())
    lo = min(f.lo, d.good.lo, *(b.lo for b in d.bad)) if d.bad else min(f.lo, d.good.lo)
    hi = max(f.hi, d.good.hi, *(b.hi for b in d.bad)) if d.bad else max(f.hi, d.good.hi)
    idx = np.arange(lo, hi + 1)
    fv = f.window(lo, hi)

    off = [int(n) for n, v in zip(idx, fv) if int(n) not in om and abs(v) > lam * (1 + tol)]
    checks["a_bounded_off_omega"] = {"ok": not off, "violations": off[:10]}

    checks["b_omega_size"] = {"ok": len(om) <= l1 / lam * (1 + tol) + tol, "size": len(om), "bound": l1 / lam}

    bad_avg = []
    covered = set()
    for a, b in d.intervals:
        v = _avg(absf, a, b)
        if not (lam * (1 - tol) < v <= 2 * lam * (1 + tol)):
            bad_avg.append([a, b, v])
        covered.update(range(a, b + 1))
    ivs = sorted(d.intervals)
    disjoint = all(ivs[i][1] < ivs[i + 1][0] for i in range(len(ivs) - 1))
    checks["c_interval_averages"] = {
        "ok": not bad_avg and disjoint and covered == om,
        "violations": bad_avg[:10],
        "disjoint": disjoint,
        "tiles_omega": covered == om,
    }

    g = d.good.window(lo, hi)
    ginf = float(np.max(np.abs(g))) if g.size else 0.0
    g1 = float(np.abs(g).sum())
    checks["d_good_part"] = {"ok": ginf <= 2 * lam * (1 + tol) and g1 <= l1 * (1 + tol) + tol, "sup": ginf, "l1": g1}

    e_bad = []
    for (a, b), bi in zip(d.intervals, d.bad):
        inside = bi.lo >= a and bi.hi <= b
        mean = float(bi.values.sum())
        avg_abs = float(np.abs(bi.values).sum()) / (b - a + 1)
        scale = max(1.0, float(np.abs(bi.values).sum()))
        if not (inside and abs(mean) <= tol * scale and avg_abs <= 4 * lam * (1 + tol)):
            e_bad.append([a, b, mean, avg_abs])
    checks["e_bad_parts"] = {"ok": not e_bad and len(d.bad) == len(d.intervals), "violations": e_bad[:10]}

    rec = g.copy()
    for bi in d.bad:
        rec[bi.lo - lo : bi.hi - lo + 1] += bi.values
    err = float(np.max(np.abs(rec - fv))) if rec.size else 0.0
    checks["f_reconstruction"] = {"ok": err <= tol, "max_error": err}

    checks["all_ok"] = all(c["ok"] for c in checks.values() if isinstance(c, dict))
    return checks
