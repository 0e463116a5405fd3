"""Core value types (sequences, weights, sampled functions, parameter grids)
and deterministic generators for test corpora.

All containers are immutable: the backing numpy arrays are flagged read-only
after construction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, SizeError

__all__ = [
    "Sequence",
    "Weight",
    "SampledFunction",
    "ParamGrid",
    "FamilyTrace",
    "gen_power_weight",
    "gen_exp_weight",
    "gen_block_function",
    "gen_corpus",
    "delta",
    "read_sequence_csv",
    "read_weight_csv",
    "write_csv",
    "MAX_DENSE",
]

# Largest dense window we are willing to allocate.
MAX_DENSE = 1 << 22

CORPUS_KINDS = ("random_bounded", "random_sparse", "dyadic_blocks", "gaussians")


def _frozen(arr, dtype=None):
    a = np.array(arr, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Sequence:
    """Finitely supported function on the integers.

    ``values[j]`` is the value at index ``offset + j``; every other index
    carries the value 0.
    """

    offset: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1 or vals.size == 0:
            raise ParameterError("Sequence values must be a non-empty 1-d array")
        dtype = np.complex128 if np.iscomplexobj(vals) else np.float64
        vals = _frozen(vals, dtype)
        if not np.all(np.isfinite(vals)):
            raise ParameterError("Sequence values must be finite")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "values", vals)

    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def __call__(self, n: int):
        j = int(n) - self.offset
        if 0 <= j < len(self.values):
            return self.values[j]
        return self.values.dtype.type(0)

    def __eq__(self, other):
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"Sequence(offset={self.offset}, n={len(self.values)})"

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def support(self):
        """Index range ``(first, last)`` of the nonzero entries, or None."""
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return None
        return self.offset + int(nz[0]), self.offset + int(nz[-1])

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Values on ``[lo, hi]`` as a fresh array, zero-filled outside storage."""
        if hi < lo:
            raise ParameterError(f"empty window [{lo}, {hi}]")
        if hi - lo + 1 > MAX_DENSE:
            raise SizeError(f"window of length {hi - lo + 1} exceeds {MAX_DENSE}")
        out = np.zeros(hi - lo + 1, dtype=self.values.dtype)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.values[a - self.lo : b - self.lo + 1]
        return out

    def restrict(self, lo: int, hi: int) -> "Sequence":
        return Sequence(lo, self.window(lo, hi))

    def trimmed(self) -> "Sequence":
        """Same function stored on its minimal support (one zero if f = 0)."""
        s = self.support()
        if s is None:
            return Sequence(self.offset, [0.0])
        return self.restrict(*s)

    def reflect(self) -> "Sequence":
        """The function ``n -> f(-n)``."""
        return Sequence(-self.hi, self.values[::-1])

    def shift(self, m: int) -> "Sequence":
        """The function ``n -> f(n + m)``."""
        return Sequence(self.offset - m, self.values)

    def scaled(self, c) -> "Sequence":
        return Sequence(self.offset, c * self.values)

    def __add__(self, other: "Sequence") -> "Sequence":
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return Sequence(lo, self.window(lo, hi) + other.window(lo, hi))

    def __sub__(self, other: "Sequence") -> "Sequence":
        return self + other.scaled(-1.0)

    def abs(self) -> "Sequence":
        return Sequence(self.offset, np.abs(self.values))

    def norm(self, p: float = 1.0) -> float:
        a = np.abs(self.values)
        if math.isinf(p):
            return float(a.max())
        return float(np.sum(a**p) ** (1.0 / p))

    @classmethod
    def zeros(cls, lo: int, hi: int) -> "Sequence":
        return cls(lo, np.zeros(hi - lo + 1))


@dataclass(frozen=True, eq=False)
class Weight:
    """Strictly positive function on an integer window.

    Stored through its logarithm so that exponential weights such as ``4**n``
    stay representable on windows of a few thousand points.
    """

    offset: int
    log_values: np.ndarray

    def __init__(self, offset: int, values):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise ParameterError("Weight values must be a non-empty 1-d array")
        if not np.all(vals > 0) or not np.all(np.isfinite(vals)):
            raise ParameterError("Weight values must be finite and strictly positive")
        object.__setattr__(self, "offset", int(offset))
        object.__setattr__(self, "log_values", _frozen(np.log(vals)))

    @classmethod
    def from_log(cls, offset: int, log_values) -> "Weight":
        lv = np.asarray(log_values, dtype=np.float64)
        if lv.ndim != 1 or lv.size == 0 or not np.all(np.isfinite(lv)):
            raise ParameterError("log-weights must be a finite non-empty 1-d array")
        obj = cls.__new__(cls)
        object.__setattr__(obj, "offset", int(offset))
        object.__setattr__(obj, "log_values", _frozen(lv))
        return obj

    @property
    def values(self) -> np.ndarray:
        """Plain values; may overflow for extreme weights, prefer ``log_values``."""
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.log_values)

    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.log_values) - 1

    def __len__(self):
        return len(self.log_values)

    def __call__(self, n: int) -> float:
        j = int(n) - self.offset
        if not 0 <= j < len(self.log_values):
            raise ParameterError(f"index {n} outside weight domain [{self.lo}, {self.hi}]")
        return float(np.exp(self.log_values[j]))

    def __eq__(self, other):
        if not isinstance(other, Weight):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.log_values, other.log_values)

    def __repr__(self):
        return f"Weight(offset={self.offset}, n={len(self.log_values)})"

    def log_window(self, lo: int, hi: int) -> np.ndarray:
        if lo < self.lo or hi > self.hi:
            raise ParameterError(
                f"window [{lo}, {hi}] exceeds weight domain [{self.lo}, {self.hi}]"
            )
        return self.log_values[lo - self.lo : hi - self.lo + 1]

    def restrict(self, lo: int, hi: int) -> "Weight":
        return Weight.from_log(lo, self.log_window(lo, hi))

    def reflect(self) -> "Weight":
        return Weight.from_log(-self.hi, self.log_values[::-1])

    def scaled(self, c: float) -> "Weight":
        if c <= 0:
            raise ParameterError("weights can only be scaled by positive factors")
        return Weight.from_log(self.offset, self.log_values + math.log(c))

    def power(self, s: float) -> "Weight":
        return Weight.from_log(self.offset, s * self.log_values)

    @classmethod
    def ones(cls, lo: int, hi: int) -> "Weight":
        return cls.from_log(lo, np.zeros(hi - lo + 1))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Function on a uniform grid ``x0 + k*step``."""

    x0: float
    step: float
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterError("step must be positive")
        vals = np.asarray(self.values)
        if vals.ndim != 1 or vals.size == 0:
            raise ParameterError("SampledFunction values must be a non-empty 1-d array")
        dtype = np.complex128 if np.iscomplexobj(vals) else np.float64
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "values", _frozen(vals, dtype))

    def __len__(self):
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.step * np.arange(len(self.values))

    @property
    def x1(self) -> float:
        return self.x0 + self.step * (len(self.values) - 1)

    def __call__(self, x):
        """Linear interpolation, zero outside ``[x0, x1]``."""
        return np.interp(x, self.x, self.values, left=0.0, right=0.0)

    def index_of(self, x: float) -> int:
        k = (x - self.x0) / self.step
        j = int(round(k))
        if abs(k - j) > 1e-9 or not 0 <= j < len(self.values):
            raise ParameterError(f"x={x} is not a grid point")
        return j

    @classmethod
    def from_callable(cls, fn, a: float, b: float, n: int) -> "SampledFunction":
        """Sample ``fn`` at ``n`` equally spaced points of ``[a, b]``."""
        if n < 2:
            raise ParameterError("need at least two samples")
        x = np.linspace(a, b, n)
        return cls(a, (b - a) / (n - 1), np.asarray(fn(x), dtype=float))


@dataclass(frozen=True, eq=False)
class ParamGrid:
    """Strictly increasing, nonnegative parameter values (N's or t's)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size == 0:
            raise ParameterError("ParamGrid needs at least one point")
        if np.any(np.diff(pts) <= 0):
            raise ParameterError("ParamGrid points must be strictly increasing")
        if pts[0] < 0:
            raise ParameterError("ParamGrid points must be nonnegative")
        object.__setattr__(self, "points", _frozen(pts))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def is_integer(self) -> bool:
        return bool(np.all(self.points == np.round(self.points)))

    def require_positive(self):
        if self.points[0] <= 0:
            raise ParameterError("truncation grids must be strictly positive")
        return self

    @classmethod
    def integers(cls, lo: int, hi: int) -> "ParamGrid":
        return cls(np.arange(lo, hi + 1))

    @classmethod
    def dyadic(cls, lo_exp: float, hi_exp: float, per_octave: int = 1) -> "ParamGrid":
        n = int(round((hi_exp - lo_exp) * per_octave)) + 1
        return cls(2.0 ** np.linspace(lo_exp, hi_exp, n))


@dataclass(frozen=True, eq=False)
class FamilyTrace:
    """Ordered family ``{a_t}`` over an increasing parameter grid."""

    params: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1:
            raise ParameterError("FamilyTrace values must be 1-d")
        params = self.params
        if params is None:
            params = np.arange(len(vals), dtype=float)
        params = np.asarray(params, dtype=float)
        if params.shape != vals.shape:
            raise ParameterError("params and values must have equal length")
        if params.size > 1 and np.any(np.diff(params) <= 0):
            raise ParameterError("FamilyTrace params must be strictly increasing")
        dtype = np.complex128 if np.iscomplexobj(vals) else np.float64
        object.__setattr__(self, "params", _frozen(params))
        object.__setattr__(self, "values", _frozen(vals, dtype))

    def __len__(self):
        return len(self.values)

    @classmethod
    def of(cls, values) -> "FamilyTrace":
        """Family indexed by 0, 1, 2, ..."""
        return cls(None, values)


def delta(n0: int = 0, c: float = 1.0) -> Sequence:
    """``c`` times the indicator of ``{n0}``."""
    return Sequence(n0, [c])


def gen_power_weight(alpha: float, lo: int, hi: int) -> Weight:
    """``w(n) = (|n| + 1)**alpha`` on ``[lo, hi]``."""
    if lo > hi:
        raise ParameterError("gen_power_weight needs lo <= hi")
    n = np.arange(lo, hi + 1)
    return Weight.from_log(lo, alpha * np.log1p(np.abs(n)))


def gen_exp_weight(base: float, lo: int, hi: int) -> Weight:
    """``w(n) = base**n`` on ``[lo, hi]`` (held in log form)."""
    if lo > hi:
        raise ParameterError("gen_exp_weight needs lo <= hi")
    if base <= 0:
        raise ParameterError("base must be positive")
    return Weight.from_log(lo, np.arange(lo, hi + 1) * math.log(base))


def _block_indicator(k_max: int, lo: int, hi: int) -> np.ndarray:
    out = np.zeros(hi - lo + 1)
    for k in range(k_max + 1):
        a, b = (1 << (2 * k)) + 1, 1 << (2 * k + 1)
        a, b = max(a, lo), min(b, hi)
        if a <= b:
            out[a - lo : b - lo + 1] = 1.0
    return out


def gen_block_function(k_max: int) -> Sequence:
    """Indicator of the union of ``(4**k, 2 * 4**k]`` over ``0 <= k <= k_max``.

    Stored on ``[0, 2**(2*k_max + 1)]``.
    """
    if k_max < 0:
        raise ParameterError("k_max must be nonnegative")
    if 2 * k_max + 1 >= 62 or (1 << (2 * k_max + 1)) + 1 > MAX_DENSE:
        raise SizeError(f"k_max={k_max} needs a dense window beyond {MAX_DENSE} points")
    hi = 1 << (2 * k_max + 1)
    return Sequence(0, _block_indicator(k_max, 0, hi))


def gen_corpus(kind: str, count: int, seed: int, window: tuple[int, int]) -> list[Sequence]:
    """Deterministic corpus of sequences stored on ``window``.

    Randomness comes from numpy's PCG64 generator seeded with ``seed``, so
    reruns with the same arguments are bitwise identical.
    """
    if kind not in CORPUS_KINDS:
        raise ParameterError(f"unknown corpus kind {kind!r}; expected one of {CORPUS_KINDS}")
    if count < 1:
        raise ParameterError("count must be >= 1")
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise ParameterError("empty window")
    size = hi - lo + 1
    if size > MAX_DENSE:
        raise SizeError(f"window of {size} points exceeds {MAX_DENSE}")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        if kind == "random_bounded":
            vals = rng.uniform(-1.0, 1.0, size)
        elif kind == "random_sparse":
            vals = np.zeros(size)
            cap = max(1, size // 4)
            m = int(rng.integers(1, cap + 1))
            pos = rng.choice(size, size=m, replace=False)
            vals[pos] = rng.uniform(0.1, 1.0, m) * rng.choice([-1.0, 1.0], m)
        elif kind == "dyadic_blocks":
            k_max = 0
            while (1 << (2 * (k_max + 1) + 1)) <= hi:
                k_max += 1
            vals = _block_indicator(max(k_max - i, 0), lo, hi)
        else:
            x = np.arange(lo, hi + 1, dtype=float)
            vals = np.zeros(size)
            for _ in range(int(rng.integers(1, 4))):
                c = rng.uniform(lo, hi)
                s = rng.uniform(0.5, max(1.0, size / 6.0))
                vals += rng.uniform(-1.0, 1.0) * np.exp(-0.5 * ((x - c) / s) ** 2)
        out.append(Sequence(lo, vals))
    return out


def _read_index_value(path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    idx, val = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["index", "value"]:
            raise ParameterError(f"{path}: expected header 'index,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParameterError(f"{path}:{lineno}: expected two columns")
            try:
                idx.append(int(row[0]))
                val.append(float(row[1]))
            except ValueError as exc:
                raise ParameterError(f"{path}:{lineno}: {exc}") from None
    if not idx:
        raise ParameterError(f"{path}: no data rows")
    idx = np.asarray(idx)
    if np.any(np.diff(idx) <= 0):
        raise ParameterError(f"{path}: indices must be strictly increasing")
    return idx, np.asarray(val)


def read_sequence_csv(path) -> Sequence:
    """Read ``index,value`` rows; missing indices are zeros."""
    idx, val = _read_index_value(path)
    out = np.zeros(idx[-1] - idx[0] + 1)
    out[idx - idx[0]] = val
    return Sequence(int(idx[0]), out)


def read_weight_csv(path) -> Weight:
    """Read ``index,value`` rows; gaps are an error for weights."""
    idx, val = _read_index_value(path)
    if idx[-1] - idx[0] + 1 != len(idx):
        raise ParameterError(f"{path}: weight indices must be contiguous")
    return Weight(int(idx[0]), val)


def write_csv(obj, path_or_file) -> None:
    """Write a Sequence or Weight as ``index,value`` rows."""
    if isinstance(obj, Weight):
        idx, vals = np.arange(obj.lo, obj.hi + 1), obj.values
    else:
        idx, vals = obj.indices, obj.values
    close = False
    if isinstance(path_or_file, (str, Path)):
        fh = open(path_or_file, "w", newline="")
        close = True
    else:
        fh = path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "value"])
        for i, v in zip(idx, vals):
            w.writerow([int(i), repr(float(v))])
    finally:
        if close:
            fh.close()
