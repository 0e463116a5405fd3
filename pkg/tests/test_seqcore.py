import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varineq.errors import ParameterError, SizeError
from varineq.seqcore import (
    FamilyTrace,
    ParamGrid,
    SampledFunction,
    Sequence,
    Weight,
    delta,
    gen_block_function,
    gen_corpus,
    gen_exp_weight,
    gen_power_weight,
    read_sequence_csv,
    read_weight_csv,
    write_csv,
)


def test_power_weight_examples():
    assert np.array_equal(gen_power_weight(0, -2, 2).values, np.ones(5))
    assert np.allclose(gen_power_weight(1, 0, 3).values, [1, 2, 3, 4], rtol=1e-15)
    assert np.allclose(gen_power_weight(-0.5, 0, 3).values, [1, 2**-0.5, 3**-0.5, 4**-0.5], rtol=1e-15)


def test_exp_weight_log_form_survives_large_windows():
    w = gen_exp_weight(4.0, -2000, 2000)
    assert w.log_values[-1] == pytest.approx(2000 * np.log(4.0))
    assert w(0) == 1.0


def test_block_function_blocks():
    f = gen_block_function(0)
    assert f.support() == (2, 2)
    g = gen_block_function(1)
    ones = [n for n in range(0, 20) if g(n) == 1.0]
    assert ones == [2, 5, 6, 7, 8]
    for k in range(5):
        assert gen_block_function(k)(0) == 0.0


def test_block_function_size_guard():
    with pytest.raises(SizeError):
        gen_block_function(40)
    with pytest.raises(ParameterError):
        gen_block_function(-1)


def test_corpus_determinism_and_kinds():
    a = gen_corpus("random_bounded", 3, 42, (-8, 8))
    b = gen_corpus("random_bounded", 3, 42, (-8, 8))
    assert all(x == y for x, y in zip(a, b))
    s = gen_corpus("random_sparse", 1, 7, (0, 15))[0]
    assert np.count_nonzero(s.values) <= 4
    k = 3
    blocks = gen_corpus("dyadic_blocks", 1, 0, (0, 2 ** (2 * k + 1)))[0]
    assert blocks == gen_block_function(k)
    with pytest.raises(ParameterError):
        gen_corpus("nope", 1, 0, (0, 3))


@given(st.integers(-50, 50), st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=10), st.integers(-100, 100))
def test_sequence_outside_window_is_zero(offset, vals, n):
    f = Sequence(offset, vals)
    if n < f.lo or n > f.hi:
        assert f(n) == 0.0
    else:
        assert f(n) == vals[n - offset]


def test_sequence_is_immutable():
    f = Sequence(0, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 3.0


def test_sequence_reflect_shift():
    f = Sequence(2, [1.0, 2.0, 3.0])
    r = f.reflect()
    assert [r(n) for n in (-4, -3, -2)] == [3.0, 2.0, 1.0]
    assert f.shift(2)(0) == 1.0


def test_weight_rejects_nonpositive():
    with pytest.raises(ParameterError):
        Weight(0, [1.0, 0.0])
    with pytest.raises(ParameterError):
        Weight(0, [1.0, -2.0])


def test_grids_validate():
    with pytest.raises(ParameterError):
        ParamGrid([1.0, 1.0])
    with pytest.raises(ParameterError):
        ParamGrid([0.0, 1.0]).require_positive()
    assert len(ParamGrid.dyadic(0, 3, 2)) == 7
    with pytest.raises(ParameterError):
        SampledFunction(0.0, 0.0, [1.0])
    with pytest.raises(ParameterError):
        FamilyTrace([0.0, 0.0], [1.0, 2.0])


def test_csv_round_trip(tmp_path):
    f = Sequence(-3, [0.5, 0.0, -1.25])
    p = tmp_path / "f.csv"
    write_csv(f, p)
    assert read_sequence_csv(p) == f
    w = Weight(1, [1.0, 2.0, 3.0])
    write_csv(w, tmp_path / "w.csv")
    assert np.allclose(read_weight_csv(tmp_path / "w.csv").values, w.values, rtol=1e-15)


def test_csv_gaps(tmp_path):
    p = tmp_path / "gap.csv"
    p.write_text("index,value\n0,1\n3,2\n")
    f = read_sequence_csv(p)
    assert list(f.values) == [1.0, 0.0, 0.0, 2.0]
    with pytest.raises(ParameterError):
        read_weight_csv(p)
    bad = tmp_path / "bad.csv"
    bad.write_text("i,v\n0,1\n")
    with pytest.raises(ParameterError):
        read_sequence_csv(bad)


def test_write_csv_to_stream():
    buf = io.StringIO()
    write_csv(delta(2, 1.5), buf)
    assert buf.getvalue() == "index,value\n2,1.5\n"
