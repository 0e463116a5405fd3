import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varineq.averaging import (
    AvgFamilySpec,
    avg_family,
    bound_factors,
    builtin_kernel,
    continuous_avg,
    convolve_dilated,
    tabulated_kernel,
    vq_avg,
    vq_avg_continuous,
    vq_avg_continuous_exact,
    vq_avg_point,
    vq_convolution,
)
from varineq.errors import KernelError, ParameterError
from varineq.seqcore import ParamGrid, SampledFunction, Sequence, delta, gen_block_function
from varineq.variation import variation_norm

seqs = st.builds(
    Sequence,
    st.integers(-5, 5),
    st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=7),
)


def long_family(f, n, side, top):
    # direct averages, no prefix sums
    out = []
    for N in range(top + 1):
        if side == "plus":
            out.append(sum(f(n + i) for i in range(N + 1)) / (N + 1))
        elif side == "minus":
            out.append(sum(f(n - i) for i in range(N + 1)) / (N + 1))
        else:
            out.append(sum(f(n + i) for i in range(-N, N + 1)) / (2 * N + 1))
    return np.array(out)


def test_family_examples():
    g = ParamGrid([0, 1, 2])
    assert np.allclose(avg_family(delta(0), 0, AvgFamilySpec("plus", "discrete", g)).values, [1, 1 / 2, 1 / 3])
    assert np.array_equal(avg_family(delta(0), 1, AvgFamilySpec("plus", "discrete", g)).values, [0, 0, 0])
    ones = Sequence(-10, np.ones(21))
    fam = avg_family(ones, 0, AvgFamilySpec("symmetric", "discrete", ParamGrid.integers(0, 10)))
    assert np.allclose(fam.values, 1.0)
    with pytest.raises(ParameterError):
        AvgFamilySpec("plus", "discrete", ParamGrid([0.5, 1.0]))


def test_vq_avg_examples():
    assert np.array_equal(vq_avg(Sequence.zeros(0, 3), 2, "plus", (-2, 2)).values, np.zeros(5))
    res, fam = vq_avg_point(delta(0), 0, 2)
    assert res.value == pytest.approx(1.0, rel=1e-15)
    assert fam.params[res.witness[0]] == 0 and math.isinf(fam.params[res.witness[-1]])
    # independent check: long truncation plus the limit 0
    trunc = np.append(1.0 / np.arange(1, 51), 0.0)
    assert variation_norm(trunc, 2).value == pytest.approx(1.0)


def test_block_function_lower_bound():
    f = gen_block_function(6)
    v = vq_avg(f, 3, "plus", (0, 0))(0)
    assert v >= (6 * (1 / 4) ** 3) ** (1 / 3)


@given(seqs, st.sampled_from(["plus", "minus", "symmetric"]), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_tail_closure_matches_long_truncation(f, side, q):
    lo, hi = f.lo - 4, f.hi + 4
    field = vq_avg(f, q, side, (lo, hi))
    for n in range(lo, hi + 1, 2):
        fam = long_family(f, n, side, 40)
        ref = variation_norm(np.append(fam, 0.0), q).value
        assert field(n) == pytest.approx(ref, rel=1e-9, abs=1e-12)
        # any finite truncation is a lower bound
        assert field(n) >= variation_norm(fam[:10], q).value - 1e-12


@given(seqs, st.sampled_from([2.0, 3.0]))
def test_side_reflection(f, q):
    lo, hi = f.lo - 3, f.hi + 3
    a = vq_avg(f, q, "minus", (lo, hi))
    b = vq_avg(f.reflect(), q, "plus", (-hi, -lo))
    assert np.array_equal(a.values, b.values[::-1])


@given(seqs, seqs, st.sampled_from(["plus", "symmetric"]))
def test_subadditive(f, g, side):
    lo, hi = min(f.lo, g.lo) - 3, max(f.hi, g.hi) + 3
    s = vq_avg(f + g, 3, side, (lo, hi)).values
    t = vq_avg(f, 3, side, (lo, hi)).values + vq_avg(g, 3, side, (lo, hi)).values
    assert np.all(s <= t + 1e-12 * (1 + t))


def test_continuous_examples():
    c = SampledFunction(-5.0, 0.05, np.full(201, 2.0))
    v = vq_avg_continuous(c, 3, "symmetric", ParamGrid.dyadic(-3, 1, 2), np.linspace(-1, 1, 5))
    assert np.allclose(v.values, 0.0, atol=1e-13)
    lin = SampledFunction(-1.0, 0.01, np.linspace(-1, 1, 201))
    v = vq_avg_continuous(lin, 3, "symmetric", ParamGrid.dyadic(-5, 0, 2), [0.0])
    assert v.values[0] == pytest.approx(0.0, abs=1e-13)
    coarse = vq_avg_continuous(lin, 3, "plus", ParamGrid([0.001, 0.1]), [0.0])
    assert coarse.meta["warnings"]


def test_hat_grid_refinement():
    hat = lambda x: np.maximum(0.0, 1 - np.abs(x))
    grid = ParamGrid.dyadic(-4, 2, 2)
    a = vq_avg_continuous(SampledFunction.from_callable(hat, -4, 4, 161), 3, "plus", grid, [0.0]).values[0]
    b = vq_avg_continuous(SampledFunction.from_callable(hat, -4, 4, 1601), 3, "plus", grid, [0.0]).values[0]
    assert a == pytest.approx(b, rel=1e-3)


def test_continuous_average_of_linear_interpolant():
    f = SampledFunction(0.0, 0.5, [0.0, 1.0, 0.0, 2.0])
    # integral of the interpolant over [0.25, 1.25] done by hand
    # trapezoids on [0.25, 0.5], [0.5, 1], [1, 1.25]
    exact = 0.25 * (0.5 + 1.0) / 2 + 0.5 * (1.0 + 0.0) / 2 + 0.25 * (0.0 + 1.0) / 2
    assert continuous_avg(f, 0.25, 1.0, "plus") == pytest.approx(exact, rel=1e-12)


def test_exact_continuous_dominates_dense_grid():
    x = np.linspace(-2, 2, 401)
    f = SampledFunction(-2.0, 0.01, np.maximum(0, 1 - np.abs(x)) + 0.3 * np.sin(5 * x) * (np.abs(x) < 1.5))
    ts = np.geomspace(1e-4, 50, 4000)
    for side in ("plus", "minus", "symmetric"):
        for xv in (-0.7, 0.0, 1.9):
            ex = vq_avg_continuous_exact(f, 2, side, xv).value
            dense = variation_norm(np.concatenate(([f(xv)], continuous_avg(f, xv, ts, side), [0.0])), 2).value
            assert ex >= dense - 1e-12
            assert ex <= dense * (1 + 1e-3)


def test_bound_factor_closed_form():
    # smoothstep on [a, b]: psi(b) = 1 and psi' >= 0, so the factor is
    # (a+b) + a*1 + integral z psi'(z) dz = (a+b) + a + (b - integral psi)
    a, b = 0.5, 1.5
    k = builtin_kernel("smoothstep", a, b)
    expected = (a + b) + a + (b - 0.5 * (b - a))
    assert bound_factors(k)["minus"] == pytest.approx(expected, abs=1e-8)
    assert bound_factors(builtin_kernel("zero", a, b)) == {"minus": 0.0, "plus": 0.0}
    refl = builtin_kernel("smoothstep", -b, -a)
    assert bound_factors(refl)["plus"] > 0 and bound_factors(refl)["minus"] == 0.0


def test_kernel_errors():
    with pytest.raises(KernelError):
        builtin_kernel("box", -1, 1)
    with pytest.raises(KernelError):
        builtin_kernel("nope", 0, 1)
    with pytest.raises(KernelError):
        tabulated_kernel([-1, 1], [0, 0], [0, 0])


def test_convolution_examples():
    c = SampledFunction(-20.0, 0.05, np.full(801, 3.0))
    psi = builtin_kernel("hat", 0.5, 1.5)
    v, factor = vq_convolution(c, psi, 3, ParamGrid.dyadic(-2, 1, 2), np.linspace(-1, 1, 3))
    assert np.allclose(v.values, 0.0, atol=1e-10)
    assert convolve_dilated(c, psi, 1.0, 0.0) == pytest.approx(3.0, rel=1e-12)
    z = builtin_kernel("zero", 0.5, 1.5)
    v, factor = vq_convolution(c, z, 3, ParamGrid([0.5, 1.0]), [0.0])
    assert factor == 0.0 and v.values[0] == 0.0


def test_tabulated_kernel_matches_polynomial():
    k = builtin_kernel("smoothstep", 0.5, 1.5)
    grid = np.linspace(0.5, 1.5, 9)
    P = k.pieces[0]
    tab = tabulated_kernel(grid, P.psi(grid), P.dpsi(grid))
    u = np.linspace(0.5, 1.5, 37)
    assert np.allclose(tab(u), k(u), atol=1e-12)


def test_convolution_dominated_by_backward_variation():
    x = np.linspace(-3, 3, 601)
    f = SampledFunction(-3.0, 0.01, np.exp(-4 * x**2) * np.cos(3 * x))
    psi = builtin_kernel("smoothstep", 0.5, 1.5)
    grid = ParamGrid.dyadic(-5, 3, 4)
    for xv in (-0.5, 0.0, 0.8):
        v, factor = vq_convolution(f, psi, 3, grid, [xv])
        rhs = vq_avg_continuous_exact(f, 3, "minus", xv).value
        assert v.values[0] <= factor * rhs * (1 + 1e-9)
