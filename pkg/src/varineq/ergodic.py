"""Operators ``T f = h * f(. + 1)`` on the integers with counting measure,
their transference weights, and probes of the ergodic averages.

Everything is held in log form: ``log h_i(n) = C(n + i) - C(n)`` with C the
running sum of ``log h``, which makes the cocycle identity
``h_{i+j}(n) = h_i(n) h_j(n + i)`` hold by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .averaging import vq_avg
from .errors import ParameterError, SizeError
from .seqcore import ParamGrid, Sequence, Weight, read_weight_csv
from .variation import variation_norm

__all__ = [
    "ErgodicSystem",
    "system_from_spec",
    "log_cocycle",
    "iterate",
    "transference_weight",
    "ergodic_averages",
    "ergodic_vq",
    "mean_boundedness_probe",
    "pointwise_convergence_check",
]


@dataclass(frozen=True, eq=False)
class ErgodicSystem:
    """``h`` is either a positive constant or a Weight giving ``h`` on its
    domain; ``p`` is the exponent of the ambient space."""

    h: object
    p: float = 2.0

    def __post_init__(self):
        if isinstance(self.h, Weight):
            return
        c = float(self.h)
        if not c > 0:
            raise ParameterError("h must be positive")
        object.__setattr__(self, "h", c)

    @property
    def is_constant(self) -> bool:
        return not isinstance(self.h, Weight)

    @property
    def is_identity(self) -> bool:
        return self.is_constant and self.h == 1.0

    def describe(self) -> str:
        if self.is_constant:
            return f"shift:h=const:{self.h!r}"
        return f"shift:h=table[{self.h.lo},{self.h.hi}]"


def system_from_spec(spec: str, p: float = 2.0) -> ErgodicSystem:
    """Parse ``shift:h=const:<c>`` or ``shift:h=csv:<file>``."""
    prefix = "shift:h="
    if not spec.startswith(prefix):
        raise ParameterError(f"system spec must start with {prefix!r}: {spec!r}")
    kind, _, arg = spec[len(prefix) :].partition(":")
    if kind == "const":
        try:
            c = float(arg)
        except ValueError:
            raise ParameterError(f"bad constant in system spec {spec!r}") from None
        return ErgodicSystem(c, p)
    if kind == "csv":
        return ErgodicSystem(read_weight_csv(Path(arg)), p)
    raise ParameterError(f"unknown h kind {kind!r}")


def log_cocycle(sys: ErgodicSystem, n, i: int) -> np.ndarray:
    """``log h_i(n)`` for an array of base points n."""
    n = np.asarray(n, dtype=np.int64)
    if sys.is_constant:
        return np.full(n.shape, i * math.log(sys.h))
    if i == 0:
        return np.zeros(n.shape)
    w = sys.h
    lo = int(min(n.min(), (n + i).min()))
    hi = int(max(n.max(), (n + i).max()))
    # C(k) = sum_{m < k} log h(m), relative to C(lo) = 0; needs h on [lo, hi-1]
    if lo < w.lo or hi - 1 > w.hi:
        raise SizeError(f"h is known on [{w.lo}, {w.hi}] but [{lo}, {hi - 1}] is needed")
    C = np.concatenate(([0.0], np.cumsum(w.log_window(lo, max(lo, hi - 1)))))
    return C[n + i - lo] - C[n - lo]


def iterate(sys: ErgodicSystem, f: Sequence, i: int) -> Sequence:
    """``T^i f (n) = h_i(n) f(n + i)``."""
    n = np.arange(f.lo - i, f.hi - i + 1)
    with np.errstate(over="raise"):
        try:
            vals = np.exp(log_cocycle(sys, n, i)) * f.values
        except FloatingPointError:
            raise SizeError(f"T^{i} overflows double precision") from None
    return Sequence(f.lo - i, vals)


def transference_weight(sys: ErgodicSystem, x: int, p: float, rng) -> Weight:
    """``i -> h_i(x)^(-p)`` on ``rng = (lo, hi)`` (the Jacobians are 1)."""
    if not p > 1:
        raise ParameterError("p must be > 1")
    lo, hi = int(rng[0]), int(rng[1])
    if hi < lo:
        raise ParameterError("empty range")
    lw = np.array([-p * float(log_cocycle(sys, [x], i)[0]) for i in range(lo, hi + 1)])
    return Weight.from_log(lo, lw)


def _log_h_row(sys: ErgodicSystem, x: int, N: int) -> np.ndarray:
    # log h_n(x) for n = 0..N
    n = np.arange(N + 1)
    if sys.is_constant:
        return n * math.log(sys.h)
    w = sys.h
    if N == 0:
        return np.zeros(1)
    if x < w.lo or x + N - 1 > w.hi:
        raise SizeError(f"h is known on [{w.lo}, {w.hi}] but [{x}, {x + N - 1}] is needed")
    return np.concatenate(([0.0], np.cumsum(w.log_window(x, x + N - 1))))


def ergodic_averages(sys: ErgodicSystem, f: Sequence, x: int, N_max: int) -> np.ndarray:
    """``(1/(N+1)) sum_{n <= N} T^n f(x)`` for ``N = 0..N_max``."""
    if N_max < 0:
        raise ParameterError("N_max must be nonnegative")
    n = np.arange(N_max + 1)
    fv = f.window(x, x + N_max)
    if sys.is_identity:
        terms = fv
    else:
        with np.errstate(over="raise"):
            try:
                terms = np.exp(_log_h_row(sys, x, N_max)) * fv
            except FloatingPointError:
                raise SizeError("ergodic averages overflow double precision") from None
    return np.cumsum(terms) / (n + 1)


def _default_window(f: Sequence, N_max: int):
    s = f.support() or (f.lo, f.lo)
    return s[0] - N_max, s[1]


def ergodic_vq(sys: ErgodicSystem, f: Sequence, q: float, N_max: int, window=None) -> Sequence:
    """q-variation of the ergodic averages over ``N = 0..N_max`` at each x.

    No tail closure is applied; outside the default window ``[s0 - N_max,
    s1]`` every average vanishes.
    """
    lo, hi = window if window is not None else _default_window(f, N_max)
    out = np.array([variation_norm(ergodic_averages(sys, f, x, N_max), q).value for x in range(lo, hi + 1)])
    return Sequence(lo, out)


def mean_boundedness_probe(sys: ErgodicSystem, p: float, corpus, N_grid) -> dict:
    """``sup ||A_N(T) f||_p / ||f||_p`` over corpus and N grid, exact for
    finitely supported f (the averages live on ``[s0 - N, s1]``)."""
    grid = N_grid if isinstance(N_grid, ParamGrid) else ParamGrid(N_grid)
    if not grid.is_integer:
        raise ParameterError("N grid must hold integers")
    best, arg = 0.0, None
    per = []
    for idx, f in enumerate(corpus):
        nf = f.norm(p)
        if nf == 0:
            continue
        s = f.support()
        for N in grid.points.astype(int):
            xs = range(s[0] - N, s[1] + 1)
            vals = np.array([ergodic_averages(sys, f, x, int(N))[-1] for x in xs])
            r = float(np.sum(np.abs(vals) ** p) ** (1 / p) / nf)
            per.append({"input_id": idx, "N": int(N), "ratio": r})
            if r > best:
                best, arg = r, (idx, int(N))
    return {"sup_ratio": best, "argmax": arg, "per_input": per, "p": float(p), "system": sys.describe()}


def pointwise_convergence_check(sys: ErgodicSystem, f: Sequence, N_grid, q: float = 3.0, lambda_grid=None) -> dict:
    """For ``h = 1``: tail oscillation of the averages as the starting index
    grows, and the weak-type ratio ``lambda |{V_q > lambda}| / ||f||_1``."""
    if not sys.is_identity:
        raise ParameterError("pointwise convergence check needs h = 1")
    grid = N_grid if isinstance(N_grid, ParamGrid) else ParamGrid(N_grid)
    Ns = grid.points.astype(int)
    s = f.support()
    if s is None:
        return {"profile": [], "weak_type": [], "sup_weak_ratio": 0.0}
    N_top = int(Ns[-1])
    xs = range(s[0] - N_top, s[1] + 1)
    fams = {x: ergodic_averages(sys, f, x, N_top) for x in xs}
    profile = []
    for N0 in Ns:
        inc = max(float(np.ptp(a[N0:])) for a in fams.values())
        profile.append({"N0": int(N0), "max_increment": inc})
    l1 = f.norm(1)
    lams = np.asarray(lambda_grid if lambda_grid is not None else np.geomspace(0.02, 2, 20) * float(np.max(np.abs(f.values))))
    pad = int(np.ceil(2 * l1 / lams.min())) + 2
    V = vq_avg(f, q, "plus", (s[0] - pad, s[1]))
    weak = []
    for lam in lams:
        cnt = int(np.sum(V.values > lam))
        weak.append({"lambda": float(lam), "count": cnt, "ratio": float(lam * cnt / l1)})
    return {
        "profile": profile,
        "weak_type": weak,
        "sup_weak_ratio": max(w["ratio"] for w in weak),
        "q": float(q),
    }
