import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varineq.averaging import bound_factors, convolve_dilated, vq_avg_continuous_exact
from varineq.errors import KernelError, ParameterError
from varineq.seqcore import ParamGrid, SampledFunction
from varineq.singular import (
    GRAPHS,
    cauchy_kernel,
    hilbert_kernel,
    hphi_vq_check,
    kernel_from_spec,
    kernel_regularity_certify,
    psi_kernel,
    smooth_cutoff,
    smooth_cutoff_deriv,
    smooth_truncated_apply,
    truncated_apply,
    truncation_gap,
    vq_kernel,
)
from varineq.variation import total_variation

H = hilbert_kernel()


def gaussian(a=-8.0, b=8.0, n=2049, s=1.0):
    return SampledFunction.from_callable(lambda x: np.exp(-((x / s) ** 2)), a, b, n)


def test_log3():
    # indicator sampled on its own support: the interpolant is exact
    f = SampledFunction(-1.0, 2.0 / 4096, np.ones(4097))
    assert truncated_apply(H, f, 2.0, 0.1) == pytest.approx(math.log(3.0), abs=1e-3)


def test_against_closed_form_antiderivative():
    # H_t of a tent: integral of (1-|y|)/(x-y) done symbolically per side
    f = SampledFunction.from_callable(lambda y: np.maximum(0, 1 - np.abs(y)), -1, 1, 201)
    x = 3.0

    def prim(y):
        # antiderivative of (1 - |y|)/(x - y) for y of fixed sign
        sgn = np.sign(y) if y != 0 else 1.0
        return -(1 - sgn * x) * np.log(abs(x - y)) + sgn * y

    exact = (prim(0.0) - prim(-1.0)) + (prim(1.0) - prim(0.0 + 1e-300))
    left = -(1 + x) * (np.log(x) - np.log(x + 1)) - 1.0
    right = -(1 - x) * (np.log(x - 1) - np.log(x)) + 1.0
    exact = left + right
    assert truncated_apply(H, f, x, 0.5) == pytest.approx(exact, rel=1e-10)


def test_even_function_gives_zero():
    g = gaussian()
    for t in (0.1, 0.5, 2.0):
        assert abs(truncated_apply(H, g, 0.0, t)) <= 1e-9
        assert abs(smooth_truncated_apply(g, 0.0, t)) <= 1e-9
    z = SampledFunction(0.0, 0.1, np.zeros(11))
    assert truncated_apply(H, z, 0.5, 0.2) == 0.0


def test_errors():
    with pytest.raises(ParameterError):
        truncated_apply(H, gaussian(), 0.0, 0.0)
    with pytest.raises(KernelError):
        kernel_from_spec("cauchy:none")
    with pytest.raises(KernelError):
        kernel_from_spec("riesz")
    with pytest.raises(ParameterError):
        hphi_vq_check(0.0, 3, [1.0])


def test_cutoff_shape():
    assert smooth_cutoff(0.5) == 0.0 and smooth_cutoff(1.5) == 1.0
    assert smooth_cutoff(1.0) == pytest.approx(0.5)
    assert abs(smooth_cutoff_deriv(0.5)) < 1e-12 and abs(smooth_cutoff_deriv(1.5)) < 1e-12
    s = np.linspace(0.4, 1.6, 1201)
    d = np.gradient(smooth_cutoff(s), s)
    assert np.allclose(d, smooth_cutoff_deriv(s), atol=1e-4)


@pytest.mark.parametrize("t,x", [(0.5, 0.3), (1.0, -0.7), (0.25, 1.1), (2.0, 0.0)])
def test_truncation_gap_identity(t, x):
    g = SampledFunction.from_callable(lambda y: np.exp(-y * y) * (1 + 0.3 * y), -8, 8, 4097)
    lhs = truncation_gap(g, t, x)
    rhs = convolve_dilated(g, psi_kernel("plus"), t, x, 8) + convolve_dilated(g, psi_kernel("minus"), t, x, 8)
    assert lhs == pytest.approx(rhs, abs=1e-6)


def test_smooth_and_sharp_variations_close():
    g = SampledFunction.from_callable(lambda y: np.exp(-y * y) * np.cos(2 * y), -6, 6, 1201)
    grid = ParamGrid.dyadic(-3, 2, 2)
    fp, fm = bound_factors(psi_kernel("plus")), bound_factors(psi_kernel("minus"))
    for x in (-0.4, 0.0, 0.9):
        sharp = vq_kernel(H, g, 3, grid, [x]).values[0]
        smooth = vq_kernel(H, g, 3, grid, [x], smooth=True).values[0]
        bound = fp["minus"] * vq_avg_continuous_exact(g, 3, "minus", x).value
        bound += fm["plus"] * vq_avg_continuous_exact(g, 3, "plus", x).value
        assert abs(sharp - smooth) <= bound * (1 + 1e-9)


def test_vq_kernel_examples():
    z = SampledFunction(-1.0, 0.01, np.zeros(201))
    grid = ParamGrid.dyadic(-4, 0, 2)
    assert np.array_equal(vq_kernel(H, z, 3, grid, [0.0, 0.5]).values, [0.0, 0.0])
    g = gaussian(-6, 6, 1201)
    x = 0.37
    v = vq_kernel(H, g, 3, grid, [x]).values[0]
    trace = [truncated_apply(H, g, x, t) for t in grid.points]
    assert v <= total_variation(trace) * (1 + 1e-12)


def test_dilation_covariance():
    f = SampledFunction.from_callable(lambda y: np.exp(-y * y) * (1 + y), -6, 6, 2401)
    d = 2.0
    fd = SampledFunction.from_callable(lambda y: np.exp(-(d * y) ** 2) * (1 + d * y), -3, 3, 2401)
    grid = ParamGrid.dyadic(-3, 1, 2)
    gd = ParamGrid(grid.points / d)
    for x in (0.2, -0.35):
        a = vq_kernel(H, fd, 3, gd, [x]).values[0]
        b = vq_kernel(H, f, 3, grid, [d * x]).values[0]
        assert a == pytest.approx(b, rel=1e-3)


def test_hphi_check():
    grid = ParamGrid.dyadic(-10, 10, 8)
    r = hphi_vq_check(2.0, 3, grid)
    assert r["rhs"] == pytest.approx(0.5, rel=1e-12)
    assert r["lhs"] <= 0.5 * (1 + 1e-9)
    assert hphi_vq_check(-2.0, 3, grid)["lhs"] == r["lhs"]


def test_certification_constants():
    c = kernel_regularity_certify(H, (-4, 4), 4096, seed=0)
    assert c["C0"] == pytest.approx(1.0, abs=1e-9)
    assert c["C1"] <= 2 + 1e-9 and c["C2"] <= 2 + 1e-9
    flat = kernel_regularity_certify(cauchy_kernel(GRAPHS["flat"]), (-4, 4), 4096, seed=0)
    for k in ("C0", "C1", "C2"):
        assert flat[k] == pytest.approx(c[k], rel=1e-12)


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_certification_is_stable(name):
    K = cauchy_kernel(GRAPHS[name])
    a = kernel_regularity_certify(K, (-4, 4), 2000, seed=1)
    b = kernel_regularity_certify(K, (-4, 4), 8000, seed=2)
    assert a["C0"] <= 1 + 1e-12
    for k in ("C0", "C1", "C2"):
        assert math.isfinite(a[k])
        assert b[k] == pytest.approx(a[k], rel=0.05)


@given(st.floats(-5, 5), st.floats(-5, 5), st.sampled_from(sorted(GRAPHS)))
def test_cauchy_antisymmetric(x, y, name):
    if x == y:
        return
    K = cauchy_kernel(GRAPHS[name])
    assert K(y, x) == -K(x, y)
    assert abs(K(x, y)) <= 1 / abs(x - y) * (1 + 1e-12)


def test_lipschitz_bounds_hold_on_samples():
    x = np.linspace(-10, 10, 20001)
    for g in GRAPHS.values():
        q = np.abs(np.diff(g.phi(x))) / np.diff(x)
        assert np.all(q <= g.lip * (1 + 1e-9) + 1e-12)
