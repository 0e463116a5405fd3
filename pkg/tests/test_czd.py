import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varineq.czd import cz_decompose_plus, omega_plus, verify_cz
from varineq.errors import ParameterError
from varineq.seqcore import CORPUS_KINDS, Sequence, delta, gen_corpus


def brute_omega(f, lam):
    # M^+|f|(n) = max_{k>=0} mean |f| on [n, n+k], scanned directly
    s = f.support()
    if s is None:
        return ()
    a = np.abs(f.values)
    pad = int(np.ceil(a.sum() / lam)) + 2
    out = []
    for n in range(s[0] - pad, s[1] + 1):
        best = max(np.abs(f.window(n, n + k)).mean() for k in range(0, s[1] - n + 1))
        if best > lam:
            out.append(n)
    return tuple(out)


def test_delta_example():
    f = delta(0, 4.0)
    d = cz_decompose_plus(f, 1.0)
    assert d.omega == (-2, -1, 0)
    assert d.intervals == ((-2, 0),)
    assert np.allclose(d.good.window(-2, 0), [4 / 3] * 3)
    assert np.allclose(d.bad[0].values, [-4 / 3, -4 / 3, 8 / 3])
    assert verify_cz(d, f)["all_ok"]


def test_empty_omega():
    f = Sequence(0, np.array([0.2, -0.5, 0.3]))
    d = cz_decompose_plus(f, 1.0)
    assert d.omega == () and d.intervals == () and d.bad == ()
    assert np.allclose(d.good.window(0, 2), f.values)
    assert verify_cz(d, f)["all_ok"]
    z = Sequence.zeros(0, 5)
    assert verify_cz(cz_decompose_plus(z, 1.0), z)["all_ok"]


def test_tampered_good_part_is_caught():
    f = delta(0, 4.0)
    d = cz_decompose_plus(f, 1.0)
    g = d.good.values.copy()
    g[0] += 0.1
    bad = type(d)(d.lam, d.intervals, Sequence(d.good.offset, g), d.bad, d.omega)
    r = verify_cz(bad, f)
    assert not r["f_reconstruction"]["ok"] and not r["all_ok"]


def test_lambda_must_be_positive():
    with pytest.raises(ParameterError):
        cz_decompose_plus(delta(0), 0.0)


@pytest.mark.parametrize("kind", CORPUS_KINDS)
def test_omega_matches_brute_force(kind):
    for seed in range(6):
        f = gen_corpus(kind, 1, seed, (-10, 15))[0]
        top = float(np.abs(f.values).max())
        if top == 0:
            continue
        for c in (0.25, 1.0, 3.0):
            lam = c * top / 2
            assert tuple(int(x) for x in omega_plus(f, lam)) == brute_omega(f, lam)
            d = cz_decompose_plus(f, lam)
            assert verify_cz(d, f)["all_ok"], (kind, seed, c)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=25), st.floats(0.05, 4))
def test_properties_hold(vals, lam):
    f = Sequence(-3, np.array(vals))
    d = cz_decompose_plus(f, lam)
    assert verify_cz(d, f)["all_ok"]


def test_omega_shrinks_as_lambda_grows():
    f = gen_corpus("random_bounded", 1, 7, (0, 40))[0]
    prev = None
    for lam in np.geomspace(0.05, 2, 12):
        om = set(cz_decompose_plus(f, lam).omega)
        if prev is not None:
            assert om <= prev
        prev = om


def test_scaling_invariance():
    f = gen_corpus("gaussians", 1, 2, (0, 30))[0]
    d1 = cz_decompose_plus(f, 0.3)
    d2 = cz_decompose_plus(Sequence(f.offset, 5.0 * f.values), 1.5)
    assert d1.omega == d2.omega and d1.intervals == d2.intervals
    assert np.allclose(d2.good.values, 5 * d1.good.values)


def test_two_sided_mode():
    f = gen_corpus("random_bounded", 1, 3, (0, 30))[0]
    d = cz_decompose_plus(f, 0.3, mode="both")
    assert verify_cz(d, f)["all_ok"]
    assert len(d.tripled) == len(d.intervals)
    for (a, b), (ta, tb) in zip(d.intervals, d.tripled):
        assert tb - ta + 1 == 3 * (b - a + 1) and ta < a and tb > b
