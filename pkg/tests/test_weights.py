import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varineq.errors import ParameterError
from varineq.seqcore import Weight, gen_exp_weight, gen_power_weight
from varineq.weights import (
    ap_constant,
    ap_minus_constant,
    ap_plus_constant,
    characteristic,
    classify,
    evaluate_witness,
)


def brute_plus(w, p, lo, hi):
    v = {n: w(n) for n in range(lo, hi + 1)}
    best = 1.0
    found = False
    for n in range(lo, hi + 1):
        for k in range(0, hi - lo + 1):
            if p > 1:
                if n - k < lo or n + 2 * k > hi:
                    continue
                a = sum(v[n + i] for i in range(k + 1))
                b = sum(v[n + i] ** (-1 / (p - 1)) for i in range(k, 2 * k + 1))
                val = a * b ** (p - 1) / (k + 1) ** p
            else:
                if n - k < lo or n + k > hi:
                    continue
                val = sum(v[i] for i in range(n - k, n + 1)) / ((k + 1) * min(v[i] for i in range(n, n + k + 1)))
            best = val if not found else max(best, val)
            found = True
    return best


def brute_both(w, p, lo, hi):
    best = 0.0
    for a in range(lo, hi + 1):
        for b in range(a, hi + 1):
            seg = np.array([w(i) for i in range(a, b + 1)])
            if p > 1:
                val = seg.mean() * np.mean(seg ** (-1 / (p - 1))) ** (p - 1)
            else:
                val = seg.mean() / seg.min()
            best = max(best, val)
    return best


weights = st.lists(st.floats(0.05, 20), min_size=4, max_size=12).map(lambda v: Weight(-len(v) // 2, v))


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_unit_weight_constant_is_one(p):
    w = Weight.ones(-20, 20)
    for side in ("plus", "minus", "both"):
        assert characteristic(w, p, side).value == 1.0


def test_nondecreasing_weight_a1_plus():
    w = Weight(0, np.cumsum(np.arange(1, 30)))
    assert ap_plus_constant(w, 1).value <= 1.0 + 1e-12


def test_exponential_weight_stabilises():
    vals = [ap_plus_constant(gen_exp_weight(4, -L, L), 2).value for L in (5, 10, 20)]
    assert max(vals) / min(vals) < 1 + 1e-9


def test_power_weight_ladders():
    crit = [ap_constant(gen_power_weight(1.0, -L, L), 2).value for L in (16, 64, 256)]
    assert crit[0] < crit[1] < crit[2]
    sub = [ap_constant(gen_power_weight(0.5, -L, L), 2).value for L in (16, 64, 256)]
    assert sub[-1] / sub[0] < crit[-1] / crit[0]


def test_classify_examples():
    ladder = [(-(2**k), 2**k) for k in range(4, 9)]
    assert classify(lambda a, b: Weight.ones(a, b), 2, "both", ladder).verdict == "member"
    assert classify(lambda a, b: gen_power_weight(1.0, a, b), 2, "both", ladder).verdict == "diverging"
    assert classify(lambda a, b: gen_exp_weight(4, a, b), 2, "plus", ladder).verdict == "member"
    assert classify(lambda a, b: gen_exp_weight(4, a, b), 2, "minus", ladder).verdict == "diverging"


def test_errors_and_empty_set():
    w = Weight.ones(0, 3)
    with pytest.raises(ParameterError):
        characteristic(w, 0.5)
    with pytest.raises(ParameterError):
        characteristic(w, 2, "up")
    with pytest.raises(ParameterError):
        characteristic(w, 2, "plus", (-1, 3))
    # only k = 0 fits a two-point window, and it always gives 1
    c = characteristic(Weight(0, [1.0, 5.0]), 2, "plus")
    assert c.value == 1.0


@given(weights, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_one_sided_matches_brute_force(w, p):
    c = ap_plus_constant(w, p)
    assert c.value == pytest.approx(brute_plus(w, p, w.lo, w.hi), rel=1e-10)
    if c.witness is not None:
        assert evaluate_witness(w, p, "plus", c.witness) == pytest.approx(c.log_value, rel=1e-12, abs=1e-12)
    m = ap_minus_constant(w.reflect(), p)
    assert m.value == c.value


@given(weights, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_two_sided_matches_brute_force(w, p):
    c = ap_constant(w, p)
    assert c.value == pytest.approx(brute_both(w, p, w.lo, w.hi), rel=1e-10)
    assert evaluate_witness(w, p, "both", c.witness) == pytest.approx(c.log_value, rel=1e-12, abs=1e-12)


@given(weights, st.floats(1e-3, 1e3))
def test_scale_invariance(w, lam):
    for side in ("plus", "both"):
        a = characteristic(w, 2.0, side).value
        b = characteristic(w.scaled(lam), 2.0, side).value
        assert b == pytest.approx(a, rel=1e-12)


def test_one_sided_dominated_by_two_sided(rng):
    for _ in range(50):
        w = Weight(0, np.exp(rng.normal(size=24)))
        for p in (1.5, 2.0, 3.0):
            plus = ap_plus_constant(w, p).value
            both = ap_constant(w, p).value
            assert plus <= 2**p * both * (1 + 1e-12)


def test_membership_is_monotone_in_p():
    ladder = [(-(2**k), 2**k) for k in range(4, 9)]
    for alpha in (0.3, 0.8, 1.5):
        fn = lambda a, b: gen_power_weight(alpha, a, b)
        v = [classify(fn, p, "both", ladder).verdict for p in (1.5, 2.0, 3.0)]
        for lower, higher in zip(v, v[1:]):
            if lower == "member":
                assert higher == "member"
