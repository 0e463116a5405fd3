"""Finite-window A_p characteristics (two-sided and one-sided) and a ladder
based membership heuristic.

Every sum of weight values is accumulated in log form against a running
maximum, so exponential weights never overflow and the constant weight gives
exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import logsumexp

from .errors import ParameterError
from .seqcore import Weight

__all__ = [
    "WeightCharacteristic",
    "ap_plus_constant",
    "ap_minus_constant",
    "ap_constant",
    "characteristic",
    "evaluate_witness",
    "classify",
    "ClassifyReport",
]

SIDES = ("plus", "minus", "both")


@dataclass(frozen=True)
class WeightCharacteristic:
    """Best constant found on ``window``; ``witness`` is ``(n, k)`` for the
    one-sided classes and the interval ``(a, b)`` for the two-sided ones."""

    value: float
    log_value: float
    witness: tuple | None
    p: float
    side: str
    window: tuple

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "witness": None if self.witness is None else list(self.witness),
            "p": self.p,
            "side": self.side,
            "window": list(self.window),
        }


@njit(cache=True)
def _push(ref, acc, x):
    # add exp(x) to the pair (ref, acc) representing exp(ref) * acc
    if x > ref:
        return x, acc * math.exp(ref - x) + 1.0
    return ref, acc + math.exp(x - ref)


@njit(cache=True)
def _scan(lw, p, one_sided):
    """Return (best_log, i, k) over all admissible pairs of the window.

    p > 1, one-sided:  log[mean_{[n, n+k]} w * (mean_{[n+k, n+2k]} s)^(p-1)]
    p > 1, two-sided:  log[mean_I w * (mean_I s)^(p-1)], I = [a, a+k]
    p = 1, one-sided:  log[mean_{[n-k, n]} w / min_{[n, n+k]} w]
    p = 1, two-sided:  log[mean_I w / min_I w]
    where s = w^(-1/(p-1)).  ``i`` is n (one-sided) or a (two-sided).
    """
    m = lw.shape[0]
    ref_w = np.empty(m)
    acc_w = np.zeros(m)
    ref_s = np.empty(m)
    acc_s = np.zeros(m)
    mn = np.empty(m)
    dual = p > 1.0
    e = 0.0
    if dual:
        e = -1.0 / (p - 1.0)
    for a in range(m):
        ref_w[a] = -np.inf
        ref_s[a] = -np.inf
        mn[a] = np.inf
    best = -np.inf
    bi = -1
    bk = -1
    for k in range(m):
        lk = math.log(k + 1.0)
        last = m - k
        for a in range(last):
            x = lw[a + k]
            r, c = _push(ref_w[a], acc_w[a], x)
            ref_w[a] = r
            acc_w[a] = c
            if dual:
                r, c = _push(ref_s[a], acc_s[a], e * x)
                ref_s[a] = r
                acc_s[a] = c
            if x < mn[a]:
                mn[a] = x
        if one_sided:
            if dual:
                # [n - k, n + 2k] must fit in the window
                for n in range(k, m - 2 * k):
                    v = (ref_w[n] + math.log(acc_w[n]) - lk) + (p - 1.0) * (
                        ref_s[n + k] + math.log(acc_s[n + k]) - lk
                    )
                    if v > best:
                        best = v
                        bi = n
                        bk = k
            else:
                # n - k >= 0 and n + k <= m - 1
                for n in range(k, m - k):
                    v = (ref_w[n - k] + math.log(acc_w[n - k]) - lk) - mn[n]
                    if v > best:
                        best = v
                        bi = n
                        bk = k
        else:
            for a in range(last):
                if dual:
                    v = (ref_w[a] + math.log(acc_w[a]) - lk) + (p - 1.0) * (
                        ref_s[a] + math.log(acc_s[a]) - lk
                    )
                else:
                    v = (ref_w[a] + math.log(acc_w[a]) - lk) - mn[a]
                if v > best:
                    best = v
                    bi = a
                    bk = k
    return best, bi, bk


def _window(w: Weight, window):
    if window is None:
        return w.lo, w.hi
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise ParameterError(f"empty window [{lo}, {hi}]")
    if lo < w.lo or hi > w.hi:
        raise ParameterError(f"window [{lo}, {hi}] exceeds weight domain [{w.lo}, {w.hi}]")
    return lo, hi


def _log_mean(x: np.ndarray) -> float:
    return float(logsumexp(x) - math.log(x.size))


def evaluate_witness(w: Weight, p: float, side: str, witness) -> float:
    """Log of the defining expression at ``witness``, computed from scratch."""
    lw = lambda a, b: w.log_window(a, b)
    if side == "both":
        a, b = witness
        seg = lw(a, b)
        if p > 1:
            return _log_mean(seg) + (p - 1) * _log_mean(-seg / (p - 1))
        return _log_mean(seg) - float(seg.min())
    if side == "minus":
        return evaluate_witness(w.reflect(), p, "plus", (-witness[0], witness[1]))
    n, k = witness
    if p > 1:
        return _log_mean(lw(n, n + k)) + (p - 1) * _log_mean(-lw(n + k, n + 2 * k) / (p - 1))
    return _log_mean(lw(n - k, n)) - float(lw(n, n + k).min())


def characteristic(w: Weight, p: float, side: str = "both", window=None) -> WeightCharacteristic:
    """A_p (``side='both'``), A_p^+ or A_p^- characteristic of ``w`` on ``window``.

    A one-sided pair (n, k) is admissible when ``[n-k, n+2k]`` (p > 1) or
    ``[n-k, n+k]`` (p = 1) lies in the window, mirrored for the minus side;
    an empty admissible set yields the value 1 with no witness.
    """
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    if side not in SIDES:
        raise ParameterError(f"side must be one of {SIDES}")
    lo, hi = _window(w, window)
    if side == "minus":
        ref = characteristic(w.reflect(), p, "plus", (-hi, -lo))
        wit = None if ref.witness is None else (-ref.witness[0], ref.witness[1])
        return WeightCharacteristic(ref.value, ref.log_value, wit, float(p), "minus", (lo, hi))
    lw = np.ascontiguousarray(w.log_window(lo, hi))
    best, i, k = _scan(lw, float(p), side == "plus")
    if i < 0:
        return WeightCharacteristic(1.0, 0.0, None, float(p), side, (lo, hi))
    if side == "plus":
        wit = (lo + int(i), int(k))
    else:
        wit = (lo + int(i), lo + int(i) + int(k))
    with np.errstate(over="ignore"):
        value = float(np.exp(best))
    return WeightCharacteristic(value, float(best), wit, float(p), side, (lo, hi))


def ap_plus_constant(w: Weight, p: float, window=None) -> WeightCharacteristic:
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    return characteristic(w, p, "plus", window)


def ap_minus_constant(w: Weight, p: float, window=None) -> WeightCharacteristic:
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    return characteristic(w, p, "minus", window)


def ap_constant(w: Weight, p: float, window=None) -> WeightCharacteristic:
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    return characteristic(w, p, "both", window)


@dataclass
class ClassifyReport:
    verdict: str
    p: float
    side: str
    growth_tol: float
    curve: list = field(default_factory=list)

    @property
    def growth(self) -> float:
        """Last-to-first ratio of the characteristic along the ladder."""
        if len(self.curve) < 2:
            return 1.0
        return math.exp(self.curve[-1]["log_value"] - self.curve[0]["log_value"])

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "p": self.p,
            "side": self.side,
            "growth_tol": self.growth_tol,
            "growth": self.growth,
            "curve": self.curve,
        }


def classify(w, p: float, side: str, window_ladder, growth_tol: float = 0.15) -> ClassifyReport:
    """Compute the characteristic along an increasing window ladder.

    ``w`` is either a Weight covering every window or a callable
    ``(lo, hi) -> Weight`` used to build the weight per window.  The verdict
    is ``member`` when the last-to-first ratio is at most
    ``1 + growth_tol * len(window_ladder)``, else ``diverging``.
    """
    ladder = [(int(a), int(b)) for a, b in window_ladder]
    if not ladder:
        raise ParameterError("empty window ladder")
    for (a0, b0), (a1, b1) in zip(ladder, ladder[1:]):
        if not (a1 <= a0 and b1 >= b0 and (a1, b1) != (a0, b0)):
            raise ParameterError("window ladder must be strictly increasing")
    curve = []
    for lo, hi in ladder:
        wt = w if isinstance(w, Weight) else w(lo, hi)
        c = characteristic(wt, p, side, (lo, hi))
        curve.append({"window": [lo, hi], "value": c.value, "log_value": c.log_value})
    rep = ClassifyReport("member", float(p), side, float(growth_tol), curve)
    limit = math.log1p(growth_tol * len(ladder))
    if curve[-1]["log_value"] - curve[0]["log_value"] > limit:
        rep.verdict = "diverging"
    return rep
