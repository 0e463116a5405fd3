"""Experiment drivers: each runs an inequality on a corpus over a ladder of
windows and returns an InequalityReport.

Weighted sums are accumulated in log form, so exponential weights on wide
windows never overflow.  All loops run in a fixed order, so a report is a
deterministic function of its parameters (apart from ``runtime_ms``).
"""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.special import logsumexp

from ..averaging import builtin_kernel, vq_avg, vq_avg_continuous, vq_convolution
from ..errors import ParameterError
from ..ergodic import ErgodicSystem, ergodic_vq, mean_boundedness_probe, pointwise_convergence_check, transference_weight
from ..maximal import maximal, sharp_plus, sharp_sym
from ..seqcore import ParamGrid, SampledFunction, Sequence, gen_block_function
from ..singular import kernel_from_spec, vq_kernel
from ..variation import variation_norm
from ..weights import characteristic, classify
from .inputs import STANDARD_CORPUS, corpus_from_spec, log_weight_fn, sampled_corpus, weight_from_spec
from .report import InequalityReport, ladder_verdict

__all__ = [
    "strong_type_report",
    "weak_type_report",
    "sharp_domination_report",
    "lemma_increasing_seq_check",
    "fs_domination_check",
    "vector_valued_report",
    "counterexample_report",
    "counterexample_family",
    "ergodic_dichotomy_report",
    "pointwise_report",
    "DISCRETE_OPS",
    "CONTINUOUS_OPS",
]

DISCRETE_OPS = {"avg_plus": "plus", "avg_minus": "minus", "avg_sym": "symmetric"}
CONTINUOUS_OPS = ("avg_cont", "hilbert", "cauchy", "convolution")
ALL_OPS = tuple(DISCRETE_OPS) + CONTINUOUS_OPS + ("ergodic",)


def _dyadic_windows(k0: int, k1: int):
    return [[-(1 << k), 1 << k] for k in range(k0, k1 + 1)]


def _log_pnorm(values, logw, p: float) -> float:
    """``log (sum |v|^p w)^(1/p)`` with ``w = exp(logw)``; ``-inf`` for v = 0."""
    v = np.abs(np.asarray(values))
    nz = v > 0
    if not np.any(nz):
        return -math.inf
    return float(logsumexp(p * np.log(v[nz]) + np.asarray(logw)[nz])) / p


def _ratio(lognum: float, logden: float) -> float | None:
    if logden == -math.inf:
        return None
    if lognum == -math.inf:
        return 0.0
    return math.exp(lognum - logden)


def _finish(theorem_id, params, seed, windows, per_input, ladder, t0, growth_tol, details=None, verdict=None):
    sup = max((e["ratio"] for e in per_input), default=0.0)
    if verdict is None:
        verdict = ladder_verdict([e["constant"] for e in ladder], growth_tol)
    return InequalityReport(
        theorem_id=theorem_id,
        params=params,
        seed=seed,
        windows=windows,
        per_input=per_input,
        sup_ratio=sup,
        ladder=ladder,
        verdict=verdict,
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
        details=details or {},
    )


# ---------------------------------------------------------------------------
# inputs adapted to a weight


def _indicator_sigma(lw_window: np.ndarray, lo: int, a: int, b: int, p: float) -> Sequence:
    # sigma = w^(-1/(p-1)) on [a, b], scaled so its largest value is 1
    ls = -lw_window[a - lo : b - lo + 1] / (p - 1)
    return Sequence(a, np.exp(ls - ls.max()))


def _adapted_inputs(w, p: float, side: str, lo: int, hi: int):
    """Test functions concentrated where the weight's characteristic peaks;
    they make failing weights visible on any window."""
    if p <= 1:
        return []
    lw = w.log_window(lo, hi)
    out = []
    if side in ("plus", "symmetric"):
        c = characteristic(w, p, "plus", (lo, hi))
        if c.witness is not None:
            n, k = c.witness
            out.append(("adapted_plus", _indicator_sigma(lw, lo, n + k, n + 2 * k, p)))
    if side in ("minus", "symmetric"):
        c = characteristic(w, p, "minus", (lo, hi))
        if c.witness is not None:
            n, k = c.witness
            out.append(("adapted_minus", _indicator_sigma(lw, lo, n - 2 * k, n - k, p)))
    if side == "symmetric":
        c = characteristic(w, p, "both", (lo, hi))
        if c.witness is not None:
            a, b = c.witness
            out.append(("adapted_both", _indicator_sigma(lw, lo, a, b, p)))
    return out


# ---------------------------------------------------------------------------
# field evaluation shared by the strong, weak and vector reports


def _continuous_setup(params, a, b):
    n = int(params.get("n_samples", 257))
    stride = int(params.get("eval_stride", 4))
    step = (b - a) / (n - 1)
    t_grid = ParamGrid.dyadic(math.log2(2 * step), math.log2(b - a), int(params.get("per_octave", 2)))
    eval_points = np.linspace(a, b, n)[::stride]
    return n, step, t_grid, eval_points


def _continuous_field(op, f: SampledFunction, q, params, t_grid, eval_points) -> np.ndarray:
    if op == "avg_cont":
        return vq_avg_continuous(f, q, params.get("side", "symmetric"), t_grid, eval_points).values
    if op in ("hilbert", "cauchy"):
        spec = "hilbert" if op == "hilbert" else f"cauchy:{params.get('graph', 'abs_half')}"
        return vq_kernel(kernel_from_spec(spec), f, q, t_grid, eval_points).values
    if op == "convolution":
        psi = builtin_kernel(params.get("psi", "smoothstep"), *params.get("psi_support", [0.5, 1.5]))
        return vq_convolution(f, psi, q, t_grid, eval_points)[0].values
    raise ParameterError(f"unknown operator {op!r}")


def _discrete_field(op, f: Sequence, q, lo, hi, params) -> np.ndarray:
    if op in DISCRETE_OPS:
        return vq_avg(f, q, DISCRETE_OPS[op], (lo, hi)).values
    if op == "ergodic":
        sys = ErgodicSystem(float(params.get("h", 1.0)))
        return ergodic_vq(sys, f, q, int(params.get("N_max", 64)), (lo, hi)).values
    raise ParameterError(f"unknown operator {op!r}")


def _default_corpus(op, seed):
    if op in CONTINUOUS_OPS:
        return {"kinds": ["gaussians", "bumps"], "count": 2, "seed": seed, "support": None}
    return dict(STANDARD_CORPUS, seed=seed)


def _default_windows(op):
    if op in CONTINUOUS_OPS:
        return [[-(2.0**k), 2.0**k] for k in range(0, 4)]
    return _dyadic_windows(4, 8)


def _check_common(op, p=None, q=None):
    if op not in ALL_OPS:
        raise ParameterError(f"op must be one of {ALL_OPS}")
    if p is not None and not p > 1:
        raise ParameterError("p must be > 1")
    if q is not None and not q >= 1:
        raise ParameterError("q must be >= 1")


def _fields(op, p, q, weight, corpus, windows, adapted, params):
    """Yield ``(window, input_id, V, F, log_w_V, log_w_F)`` for every window
    and input; V is the variation field and F the input, both on grids where
    ``log_w`` already includes the cell size for continuous operators."""
    for win in windows:
        if op in CONTINUOUS_OPS:
            a, b = float(win[0]), float(win[1])
            n, step, t_grid, ev = _continuous_setup(params, a, b)
            lwf = log_weight_fn(weight)
            inputs = sampled_corpus(corpus, a, b, n)
            ev_step = ev[1] - ev[0] if ev.size > 1 else step
            lw_V = lwf(ev) + math.log(ev_step)
            for iid, f in inputs:
                lw_F = lwf(f.x) + math.log(f.step)
                V = _continuous_field(op, f, q, params, t_grid, ev)
                yield win, iid, V, np.asarray(f.values), lw_V, lw_F
        else:
            lo, hi = int(win[0]), int(win[1])
            w = weight_from_spec(weight, lo, hi)
            lw = w.log_window(lo, hi)
            inputs = corpus_from_spec(corpus, (lo, hi))
            if adapted and op in DISCRETE_OPS:
                inputs = inputs + _adapted_inputs(w, p, DISCRETE_OPS[op], lo, hi)
            for iid, f in inputs:
                V = _discrete_field(op, f, q, lo, hi, params)
                yield win, iid, V, f.window(lo, hi), lw, lw


# ---------------------------------------------------------------------------
# strong and weak type


def strong_type_report(
    op: str = "avg_plus",
    p: float = 2.0,
    q: float = 3.0,
    weight: str = "one",
    corpus=None,
    windows=None,
    growth_tol: float = 0.15,
    adapted: bool = True,
    seed: int = 0,
    **op_params,
) -> InequalityReport:
    """``||V_q(f)||_{p,w} / ||f||_{p,w}`` per input and window."""
    t0 = time.perf_counter()
    _check_common(op, p, q)
    if q <= 2:
        op_params.setdefault("warnings", []).append("q <= 2: the variation inequalities need q > 2")
    corpus = corpus if corpus is not None else _default_corpus(op, seed)
    windows = windows or _default_windows(op)
    per_input, by_window = [], {}
    for win, iid, V, F, lwV, lwF in _fields(op, p, q, weight, corpus, windows, adapted, op_params):
        r = _ratio(_log_pnorm(V, lwV, p), _log_pnorm(F, lwF, p))
        if r is None:
            r = 0.0
        per_input.append({"input_id": iid, "window": list(win), "ratio": r})
        by_window[tuple(win)] = max(by_window.get(tuple(win), 0.0), r)
    ladder = [{"window": list(w), "constant": by_window.get(tuple(w), 0.0)} for w in windows]
    params = {"op": op, "p": p, "q": q, "weight": weight, "corpus": corpus, "adapted": adapted, "growth_tol": growth_tol}
    params.update(op_params)
    details = {}
    if op in ("hilbert", "cauchy") and weight != "one":
        # the unweighted type-(p, p) constant on the same inputs, measured
        # rather than assumed
        ref = strong_type_report(op, p, q, "one", corpus, windows, growth_tol, adapted, seed, **op_params)
        details["unweighted_sup"] = ref.sup_ratio
    return _finish(f"strong:{op}", params, seed, [list(w) for w in windows], per_input, ladder, t0, growth_tol, details)


def _weak_ratios(V, F, lwV, lwF, lambdas):
    den = _log_pnorm(F, lwF, 1.0)
    out = []
    for lam in lambdas:
        mask = V > lam
        if den == -math.inf:
            out.append((float(lam), 0.0))
            continue
        if not np.any(mask):
            out.append((float(lam), 0.0))
            continue
        lm = float(logsumexp(np.asarray(lwV)[mask]))
        out.append((float(lam), math.exp(math.log(lam) + lm - den)))
    return out


def weak_type_report(
    op: str = "avg_plus",
    q: float = 3.0,
    weight: str = "one",
    corpus=None,
    lambda_grid=None,
    windows=None,
    growth_tol: float = 0.15,
    seed: int = 0,
    lambda_fractions=None,
    **op_params,
) -> InequalityReport:
    """``lambda * w({V_q f > lambda}) / ||f||_{1,w}``, maximised over the
    lambda grid.  ``lambda_grid`` is absolute; otherwise lambdas are
    ``lambda_fractions`` (default 20 geometric points in [0.01, 1]) times the
    largest value of the field."""
    t0 = time.perf_counter()
    _check_common(op, None, q)
    corpus = corpus if corpus is not None else _default_corpus(op, seed)
    windows = windows or _default_windows(op)
    fracs = np.asarray(lambda_fractions if lambda_fractions is not None else np.geomspace(0.01, 1.0, 20))
    per_input, by_window, levels = [], {}, []
    for win, iid, V, F, lwV, lwF in _fields(op, 1.0 + 1e-9, q, weight, corpus, windows, False, op_params):
        top = float(np.max(V)) if V.size else 0.0
        lams = np.asarray(lambda_grid, dtype=float) if lambda_grid is not None else fracs * top
        lams = lams[lams > 0]
        rs = _weak_ratios(V, F, lwV, lwF, lams)
        best = max((r for _, r in rs), default=0.0)
        arg = next((lam for lam, r in rs if r == best), None)
        per_input.append({"input_id": iid, "window": list(win), "ratio": best, "lambda": arg})
        levels.append({"input_id": iid, "window": list(win), "levels": [[lam, r] for lam, r in rs]})
        by_window[tuple(win)] = max(by_window.get(tuple(win), 0.0), best)
    ladder = [{"window": list(w), "constant": by_window.get(tuple(w), 0.0)} for w in windows]
    params = {"op": op, "q": q, "weight": weight, "corpus": corpus, "growth_tol": growth_tol}
    if lambda_grid is not None:
        params["lambda_grid"] = [float(x) for x in lambda_grid]
    else:
        params["lambda_fractions"] = fracs.tolist()
    params.update(op_params)
    return _finish(f"weak:{op}", params, seed, [list(w) for w in windows], per_input, ladder, t0, growth_tol, {"levels": levels})


# ---------------------------------------------------------------------------
# sharp function domination and the Fefferman-Stein type comparison


def sharp_domination_report(
    kind: str = "one_sided",
    r: float = 1.5,
    q: float = 3.0,
    corpus=None,
    windows=None,
    seed: int = 0,
    growth_tol: float = 0.15,
    **params,
) -> InequalityReport:
    """``sup_n (V_q f)^sharp(n) / M_r f(n)`` per input, over points where the
    denominator exceeds 1e-12; the corpus sits on a fixed support while the
    evaluation window grows."""
    t0 = time.perf_counter()
    if not 1 < r < q:
        raise ParameterError("need 1 < r < q")
    per_input, by_window = [], {}
    if kind == "one_sided":
        corpus = corpus if corpus is not None else dict(STANDARD_CORPUS, seed=seed, support=[0, 31])
        windows = windows or [[-256, 256], [-1024, 1024]]
        for win in windows:
            lo, hi = int(win[0]), int(win[1])
            for iid, f in corpus_from_spec(corpus, (lo, hi)):
                V = vq_avg(f, q, "plus", (lo, hi))
                S = sharp_plus(V, (lo, hi)).values
                M = maximal(f, "plus", r, (lo, hi)).values
                ok = M > 1e-12
                ratio = float(np.max(S[ok] / M[ok])) if np.any(ok) else 0.0
                per_input.append({"input_id": iid, "window": list(win), "ratio": ratio})
                by_window[tuple(win)] = max(by_window.get(tuple(win), 0.0), ratio)
    elif kind == "symmetric_kernel":
        corpus = corpus if corpus is not None else {"kinds": ["gaussians", "bumps"], "count": 2, "seed": seed, "support": [-1.0, 1.0]}
        windows = windows or [[-2.0, 2.0], [-4.0, 4.0], [-8.0, 8.0]]
        density = float(params.get("density", 16.0))
        K = kernel_from_spec(params.get("kernel", "hilbert"))
        for win in windows:
            a, b = float(win[0]), float(win[1])
            n = int(round((b - a) * density)) + 1
            step = (b - a) / (n - 1)
            t_grid = ParamGrid.dyadic(math.log2(step), math.log2(b - a), 2)
            ev = np.linspace(a, b, n)
            for iid, f0 in sampled_corpus(corpus, a, b, int(round(2 * density)) * 8 + 1):
                V = vq_kernel(K, f0, q, t_grid, ev)
                S = sharp_sym(V).values
                fs = Sequence(0, np.abs(f0(ev)) ** r)
                M = maximal(fs, "both", 1.0, (0, n - 1)).values ** (1.0 / r)
                ok = M > 1e-12
                ratio = float(np.max(S[ok] / M[ok])) if np.any(ok) else 0.0
                per_input.append({"input_id": iid, "window": list(win), "ratio": ratio})
                by_window[tuple(win)] = max(by_window.get(tuple(win), 0.0), ratio)
    else:
        raise ParameterError("kind must be 'one_sided' or 'symmetric_kernel'")
    ladder = [{"window": list(w), "constant": by_window.get(tuple(w), 0.0)} for w in windows]
    first, last = ladder[0]["constant"], ladder[-1]["constant"]
    details = {"stability": (last / first) if first > 0 else None}
    p = {"kind": kind, "r": r, "q": q, "corpus": corpus, "growth_tol": growth_tol}
    p.update(params)
    return _finish(f"sharp:{kind}", p, seed, [list(w) for w in windows], per_input, ladder, t0, growth_tol, details,
                   verdict=ladder_verdict([e["constant"] for e in ladder], growth_tol, min_len=2))


def fs_domination_check(p: float = 2.0, weight: str = "one", corpus=None, windows=None, seed: int = 0, growth_tol: float = 0.15) -> InequalityReport:
    """``sum (M^+ f)^p w / sum (f^{+,sharp})^p w`` over each window; inputs
    whose right side vanishes are skipped.

    Inputs enter through ``|f|``: the comparison is only ever applied to
    nonnegative functions, and for signed ones the forward sharp function
    can vanish on a rising negative tail while ``M^+ f`` does not.
    """
    t0 = time.perf_counter()
    if not p > 1:
        raise ParameterError("p must be > 1")
    corpus = corpus if corpus is not None else dict(STANDARD_CORPUS, seed=seed, support=[0, 31])
    windows = windows or _dyadic_windows(6, 9)
    per_input, by_window, skipped = [], {}, []
    for win in windows:
        lo, hi = int(win[0]), int(win[1])
        lw = weight_from_spec(weight, lo, hi).log_window(lo, hi)
        for iid, f in corpus_from_spec(corpus, (lo, hi)):
            f = f.abs()
            M = maximal(f, "plus", 1.0, (lo, hi)).values
            S = sharp_plus(f, (lo, hi)).values
            r = _ratio(p * _log_pnorm(M, lw, p), p * _log_pnorm(S, lw, p))
            if r is None:
                skipped.append({"input_id": iid, "window": list(win)})
                continue
            per_input.append({"input_id": iid, "window": list(win), "ratio": r})
            by_window[tuple(win)] = max(by_window.get(tuple(win), 0.0), r)
    ladder = [{"window": list(w), "constant": by_window.get(tuple(w), 0.0)} for w in windows]
    params = {"p": p, "weight": weight, "corpus": corpus, "growth_tol": growth_tol}
    return _finish("fs", params, seed, [list(w) for w in windows], per_input, ladder, t0, growth_tol, {"skipped": skipped})


# ---------------------------------------------------------------------------
# increasing sequences


def _lemma_sum(t: np.ndarray, r: float) -> float:
    d = np.diff(t)
    terms = d**r / (t[1:] ** r * t[:-1] ** (r - 1))
    return float(math.fsum(terms.tolist()))


def lemma_increasing_seq_check(r: float = 2.0, grids=None, count: int = 1000, seed: int = 0, growth_tol: float = 0.15) -> InequalityReport:
    """``t_0^(r-1) * sum_j (t_{j+1}-t_j)^r / (t_{j+1}^r t_j^(r-1))`` per grid.

    Without explicit ``grids``, ``count`` random increasing grids are drawn
    (log-uniform start, multiplicative gaps of random size, 2 to 64 points).
    The ladder is the running sup over the first 1/8, 1/4, 1/2 and all grids.
    """
    t0 = time.perf_counter()
    if not r > 1:
        raise ParameterError("r must be > 1")
    if grids is None:
        rng = np.random.default_rng(seed)
        grids = []
        for _ in range(count):
            m = int(rng.integers(2, 65))
            start = math.exp(rng.uniform(-3, 3))
            gaps = np.exp(rng.normal(-1.0, 1.5, m - 1))
            grids.append(start * np.concatenate(([1.0], np.cumprod(1.0 + gaps))))
    per_input = []
    for i, g in enumerate(grids):
        t = np.asarray(g, dtype=float)
        if t.size < 2 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ParameterError(f"grid {i} is not an increasing sequence of positive numbers")
        per_input.append({"input_id": i, "ratio": float(_lemma_sum(t, r) * t[0] ** (r - 1))})
    n = len(per_input)
    cuts = sorted({max(1, n // 8), max(1, n // 4), max(1, n // 2), n})
    ladder = [{"window": [0, c], "constant": max(e["ratio"] for e in per_input[:c])} for c in cuts]
    dyadic = _lemma_sum(2.0 ** np.arange(64), r)
    details = {"dyadic_sum": dyadic, "dyadic_limit": 1.0 / (2**r - 2) if r > 1 else None}
    params = {"r": r, "count": n, "growth_tol": growth_tol}
    return _finish("lemma22", params, seed, [], per_input, ladder, t0, growth_tol, details,
                   verdict=ladder_verdict([e["constant"] for e in ladder], growth_tol, min_len=2))


# ---------------------------------------------------------------------------
# vector-valued extension


def _tuples(spec, lo, hi):
    if spec.get("kind") == "shifted_deltas":
        size = int(spec.get("size", 4))
        start = int(spec.get("start", 0))
        return [("shifted_deltas", [Sequence(start + j, [1.0]) for j in range(size)])]
    size = int(spec.get("size", 1))
    items = corpus_from_spec(spec.get("corpus"), (lo, hi))
    if size < 1:
        raise ParameterError("tuple size must be positive")
    out = []
    for i in range(0, len(items), size):
        chunk = items[i : i + size]
        out.append(("+".join(c[0] for c in chunk), [c[1] for c in chunk]))
    return out


def _rho_combine(arrays, rho):
    if len(arrays) == 1:
        return np.abs(arrays[0])
    stack = np.abs(np.vstack(arrays))
    return np.sum(stack**rho, axis=0) ** (1.0 / rho)


def vector_valued_report(
    rho: float = 2.0,
    mode: str = "strong",
    p: float = 2.0,
    q: float = 3.0,
    weight: str = "one",
    tuples=None,
    windows=None,
    op: str = "avg_plus",
    seed: int = 0,
    growth_tol: float = 0.15,
    lambda_fractions=None,
) -> InequalityReport:
    """Strong (``mode='strong'``) or weak ratio of
    ``(sum_k V_q(f_k)^rho)^(1/rho)`` against ``(sum_k |f_k|^rho)^(1/rho)``."""
    t0 = time.perf_counter()
    if not 1 < rho < math.inf:
        raise ParameterError("rho must lie in (1, inf)")
    if op not in DISCRETE_OPS:
        raise ParameterError("vector-valued reports run on the discrete averaging operators")
    tuples = tuples or {"corpus": dict(STANDARD_CORPUS, seed=seed), "size": 1}
    windows = windows or _dyadic_windows(4, 8)
    fracs = np.asarray(lambda_fractions if lambda_fractions is not None else np.geomspace(0.01, 1.0, 20))
    per_input, by_window = [], {}
    for win in windows:
        lo, hi = int(win[0]), int(win[1])
        lw = weight_from_spec(weight, lo, hi).log_window(lo, hi)
        for tid, fs in _tuples(tuples, lo, hi):
            if not fs:
                raise ParameterError("empty tuple")
            if len(fs) > 16:
                raise ParameterError("tuples hold at most 16 components")
            G = _rho_combine([vq_avg(f, q, DISCRETE_OPS[op], (lo, hi)).values for f in fs], rho)
            F = _rho_combine([f.window(lo, hi) for f in fs], rho)
            if mode == "strong":
                r = _ratio(_log_pnorm(G, lw, p), _log_pnorm(F, lw, p)) or 0.0
            elif mode == "weak":
                top = float(np.max(G))
                rs = _weak_ratios(G, F, lw, lw, fracs * top if top > 0 else [])
                r = max((x for _, x in rs), default=0.0)
            else:
                raise ParameterError("mode must be 'strong' or 'weak'")
            per_input.append({"input_id": tid, "window": list(win), "ratio": r})
            by_window[tuple(win)] = max(by_window.get(tuple(win), 0.0), r)
    ladder = [{"window": list(w), "constant": by_window.get(tuple(w), 0.0)} for w in windows]
    params = {"rho": rho, "mode": mode, "p": p, "q": q, "weight": weight, "tuples": tuples, "op": op, "growth_tol": growth_tol}
    return _finish("vector", params, seed, [list(w) for w in windows], per_input, ladder, t0, growth_tol)


# ---------------------------------------------------------------------------
# the block-function counterexample


def _block_sum(N: int) -> int:
    """``sum_{i <= N} f(i)`` for the indicator of the union over all k of
    ``(4^k, 2*4^k]`` (exact integer arithmetic)."""
    s = 0
    k = 0
    while (1 << (2 * k)) < N:
        a, b = (1 << (2 * k)) + 1, 1 << (2 * k + 1)
        s += max(0, min(b, N) - a + 1)
        k += 1
    return s


def counterexample_family(k_max: int):
    """``(N, A_N f(0))`` at ``N = 0`` and ``N = 2^j, j <= 2 k_max + 2``.

    Between consecutive powers of two the averages are monotone, so these
    points carry the whole q-variation over ``N <= 2^(2 k_max + 2)``.
    """
    if not 0 <= k_max <= 14:
        raise ParameterError("k_max must lie in [0, 14]")
    Ns = [0] + [1 << j for j in range(2 * k_max + 3)]
    vals = []
    for N in Ns:
        s = _block_sum(N) if N > 0 else 0
        # blocks beyond k_max are absent from the truncated function
        s = min(s, (4 ** (k_max + 1) - 1) // 3)
        vals.append(s / (N + 1))
    return np.array(Ns), np.array(vals)


def counterexample_report(k_max: int = 6, q: float = 3.0, dense_check: bool = True) -> InequalityReport:
    """Gaps ``|A_{4^{k+1}} f(0) - A_{2 4^k} f(0)|`` of the block function and
    the truncated ``V_q`` at 0 for each ``k <= k_max``."""
    t0 = time.perf_counter()
    Ns, vals = counterexample_family(k_max)
    pos = {int(N): i for i, N in enumerate(Ns)}
    gaps = []
    for k in range(k_max + 1):
        g = abs(vals[pos[1 << (2 * k + 2)]] - vals[pos[1 << (2 * k + 1)]])
        closed = ((4 ** (k + 1) - 1) / 3) * (1 / (2 ** (2 * k + 1) + 1) - 1 / (4 ** (k + 1) + 1))
        gaps.append({"k": k, "gap": float(g), "closed_form": closed})
    ladder = []
    for km in range(1, k_max + 1):
        Nk, vk = counterexample_family(km)
        ladder.append({"window": [0, 1 << (2 * km + 2)], "constant": variation_norm(vk, q).value})
    lower = sum(g["gap"] ** q for g in gaps) ** (1 / q)
    details = {
        "gaps": gaps,
        "limit_estimate": 1.0 / 3.0,
        "last_gap": gaps[-1]["gap"],
        "lower_bound": lower,
        "vq_truncated": ladder[-1]["constant"] if ladder else 0.0,
    }
    if dense_check and k_max <= 6:
        f = gen_block_function(k_max)
        top = 1 << (2 * k_max + 2)
        dense = np.cumsum(f.window(0, top)) / np.arange(1, top + 2)
        details["vq_dense"] = variation_norm(dense, q).value
    per_input = [{"input_id": f"k={g['k']}", "ratio": g["gap"]} for g in gaps]
    params = {"k_max": k_max, "q": q}
    verdict = ladder_verdict([e["constant"] for e in ladder], 0.0, min_len=2)
    return _finish("counterexample", params, None, [e["window"] for e in ladder], per_input, ladder, t0, 0.0, details, verdict)


# ---------------------------------------------------------------------------
# ergodic reports


def ergodic_dichotomy_report(
    h: float = 0.5,
    p: float = 2.0,
    corpus=None,
    N_grid=(8, 16, 32, 64),
    ladder_exps=(4, 5, 6, 7, 8),
    x: int = 0,
    seed: int = 0,
    growth_tol: float = 0.15,
) -> InequalityReport:
    """Mean boundedness of the ergodic averages against membership of the
    transference weight, for ``T f = h f(. + 1)`` with constant h."""
    t0 = time.perf_counter()
    sys = ErgodicSystem(h, p)
    corpus = corpus if corpus is not None else {"kinds": ["random_bounded", "random_sparse"], "count": 3, "seed": seed, "support": [0, 15]}
    seqs = [s for _, s in corpus_from_spec(corpus, (0, 15))]
    probe = mean_boundedness_probe(sys, p, seqs, list(N_grid))
    ladder = []
    for N in N_grid:
        c = max((e["ratio"] for e in probe["per_input"] if e["N"] == int(N)), default=0.0)
        ladder.append({"window": [0, int(N)], "constant": c})
    probe_verdict = ladder_verdict([e["constant"] for e in ladder], growth_tol)
    wl = [(x, x + (1 << k)) for k in ladder_exps]
    cl = classify(lambda lo, hi: transference_weight(sys, x, p, (lo, hi)), p, "plus", wl, growth_tol)
    per_input = [{"input_id": e["input_id"], "window": [0, e["N"]], "ratio": e["ratio"]} for e in probe["per_input"]]
    details = {
        "system": sys.describe(),
        "probe_verdict": probe_verdict,
        "argmax": probe["argmax"],
        "classify": cl.to_dict(),
        "agree": (probe_verdict == "bounded") == (cl.verdict == "member"),
        "x_samples": [x],
    }
    params = {"h": h, "p": p, "corpus": corpus, "N_grid": list(N_grid), "ladder_exps": list(ladder_exps), "x": x, "growth_tol": growth_tol}
    return _finish("5.2", params, seed, [e["window"] for e in ladder], per_input, ladder, t0, growth_tol, details, probe_verdict)


def pointwise_report(q: float = 3.0, corpus=None, N_grid=(0, 4, 16, 64, 256), lambda_fractions=None, seed: int = 0) -> InequalityReport:
    """Cauchy-type tail oscillation and weak-type ratio of the shift averages."""
    t0 = time.perf_counter()
    sys = ErgodicSystem(1.0)
    corpus = corpus if corpus is not None else {"kinds": ["random_sparse", "random_bounded"], "count": 2, "seed": seed, "support": [0, 15]}
    per_input, profiles = [], []
    fracs = np.asarray(lambda_fractions if lambda_fractions is not None else np.geomspace(0.02, 1.0, 20))
    for iid, f in corpus_from_spec(corpus, (0, 15)):
        top = float(np.max(np.abs(f.values)))
        if top == 0:
            per_input.append({"input_id": iid, "ratio": 0.0})
            continue
        res = pointwise_convergence_check(sys, f, list(N_grid), q, fracs * top)
        per_input.append({"input_id": iid, "ratio": res["sup_weak_ratio"]})
        profiles.append({"input_id": iid, "profile": res["profile"]})
    ladder = []
    for j, N0 in enumerate(N_grid):
        inc = max((pr["profile"][j]["max_increment"] for pr in profiles), default=0.0)
        ladder.append({"window": [int(N0), int(N_grid[-1])], "constant": inc})
    incs = [e["constant"] for e in ladder]
    verdict = "bounded" if all(b <= a + 1e-15 for a, b in zip(incs, incs[1:])) else "inconclusive"
    params = {"q": q, "corpus": corpus, "N_grid": list(N_grid), "lambda_fractions": fracs.tolist()}
    return _finish("5.3", params, seed, [e["window"] for e in ladder], per_input, ladder, t0, 0.15, {"profiles": profiles}, verdict)
