"""Weight and corpus specifications used by the experiment drivers.

Weight specs: ``one``, ``power:<alpha>`` for ``(|n|+1)^alpha``,
``exp:<base>`` for ``base^n`` and ``csv:<path>``.

Corpus specs are dicts::

    {"kinds": [...], "count": 2, "seed": 0, "support": null}
    {"explicit": [{"id": "delta0", "offset": 0, "values": [1.0]}]}

``support`` fixes where the corpus lives; ``null`` means "the window".
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..errors import ParameterError
from ..seqcore import (
    CORPUS_KINDS,
    SampledFunction,
    Sequence,
    Weight,
    gen_corpus,
    gen_exp_weight,
    gen_power_weight,
    read_weight_csv,
)

__all__ = [
    "STANDARD_CORPUS",
    "weight_from_spec",
    "log_weight_fn",
    "corpus_from_spec",
    "sampled_corpus",
]

STANDARD_CORPUS = {"kinds": list(CORPUS_KINDS), "count": 2, "seed": 0, "support": None}


def weight_from_spec(spec: str, lo: int, hi: int) -> Weight:
    if spec == "one":
        return Weight.ones(lo, hi)
    kind, _, arg = spec.partition(":")
    try:
        if kind == "power":
            return gen_power_weight(float(arg), lo, hi)
        if kind == "exp":
            return gen_exp_weight(float(arg), lo, hi)
    except ValueError:
        raise ParameterError(f"bad weight spec {spec!r}") from None
    if kind == "csv":
        w = read_weight_csv(Path(arg))
        if lo < w.lo or hi > w.hi:
            raise ParameterError(f"weight file covers [{w.lo}, {w.hi}], window is [{lo}, {hi}]")
        return w.restrict(lo, hi)
    raise ParameterError(f"unknown weight spec {spec!r}")


def log_weight_fn(spec: str):
    """``log w(x)`` on the real line for ``one``, ``power:<a>`` (``(|x|+1)^a``)
    and ``exp:<b>``."""
    if spec == "one":
        return lambda x: np.zeros_like(np.asarray(x, dtype=float))
    kind, _, arg = spec.partition(":")
    try:
        a = float(arg)
    except ValueError:
        raise ParameterError(f"bad weight spec {spec!r}") from None
    if kind == "power":
        return lambda x: a * np.log1p(np.abs(np.asarray(x, dtype=float)))
    if kind == "exp":
        if a <= 0:
            raise ParameterError("exp weight base must be positive")
        return lambda x: np.asarray(x, dtype=float) * math.log(a)
    raise ParameterError(f"weight spec {spec!r} has no continuous form")


def _spec(spec):
    if spec is None:
        return dict(STANDARD_CORPUS)
    if not isinstance(spec, dict):
        raise ParameterError("corpus spec must be a dict")
    return spec


def corpus_from_spec(spec, window) -> list[tuple[str, Sequence]]:
    """``(input_id, sequence)`` pairs, deterministic in the spec."""
    spec = _spec(spec)
    if "explicit" in spec:
        out = []
        for i, item in enumerate(spec["explicit"]):
            out.append((str(item.get("id", f"explicit{i}")), Sequence(int(item.get("offset", 0)), item["values"])))
        return out
    kinds = spec.get("kinds", STANDARD_CORPUS["kinds"])
    count = int(spec.get("count", 2))
    seed = int(spec.get("seed", 0))
    support = spec.get("support") or window
    out = []
    for j, kind in enumerate(kinds):
        seqs = gen_corpus(kind, count, seed + 1000 * j, (int(support[0]), int(support[1])))
        out.extend((f"{kind}{i}", s) for i, s in enumerate(seqs))
    return out


def sampled_corpus(spec, a: float, b: float, n: int) -> list[tuple[str, SampledFunction]]:
    """Corpus on ``n`` equally spaced samples of ``[a, b]`` (or of
    ``spec['support']`` when given).  Smooth kinds only: ``gaussians`` and
    ``bumps`` (compactly supported ``cos^2`` bumps)."""
    spec = _spec(spec)
    kinds = spec.get("kinds", ["gaussians", "bumps"])
    count = int(spec.get("count", 2))
    seed = int(spec.get("seed", 0))
    sa, sb = spec.get("support") or (a, b)
    x = np.linspace(sa, sb, n)
    out = []
    for j, kind in enumerate(kinds):
        rng = np.random.default_rng(seed + 1000 * j)
        for i in range(count):
            v = np.zeros(n)
            for _ in range(int(rng.integers(1, 4))):
                c = rng.uniform(sa + 0.2 * (sb - sa), sb - 0.2 * (sb - sa))
                s = rng.uniform(0.02, 0.1) * (sb - sa)
                amp = rng.uniform(-1.0, 1.0)
                if kind == "gaussians":
                    v += amp * np.exp(-0.5 * ((x - c) / s) ** 2)
                elif kind == "bumps":
                    u = np.clip((x - c) / (2 * s), -0.5, 0.5)
                    v += amp * np.cos(np.pi * u) ** 2 * (np.abs(x - c) < s)
                else:
                    raise ParameterError(f"unknown sampled corpus kind {kind!r}")
            # vanish at the grid ends so the interpolant is continuous on R
            v[0] = v[-1] = 0.0
            out.append((f"{kind}{i}", SampledFunction(sa, (sb - sa) / (n - 1), v)))
    return out
