import io
import json

import numpy as np
import pytest

from varineq.cli import main, run_theorem
from varineq.czd import cz_decompose_plus
from varineq.maximal import maximal
from varineq.seqcore import Sequence, Weight, gen_power_weight, write_csv
from varineq.variation import variation_norm
from varineq.weights import characteristic


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


@pytest.fixture
def seq_csv(tmp_path):
    f = Sequence(-2, np.array([0.5, -1.0, 2.0, 0.0, 1.5]))
    p = tmp_path / "f.csv"
    write_csv(f, p)
    return f, p


def test_variation_matches_library(capsys, seq_csv):
    f, p = seq_csv
    rc, out, _ = run(capsys, "variation", "--input", str(p), "--q", "3", "--oracle")
    assert rc == 0
    d = json.loads(out)
    assert d["value"] == variation_norm(f.values, 3).value
    assert d["oracle"]["agree"]


def test_maximal_csv_is_library_output(capsys, seq_csv):
    f, p = seq_csv
    rc, out, _ = run(capsys, "maximal", "--input", str(p), "--side", "plus", "--r", "1.5", "--window", "-4", "2")
    assert rc == 0
    buf = io.StringIO()
    write_csv(maximal(f, "plus", 1.5, (-4, 2)), buf)
    assert out == buf.getvalue()


def test_weights(capsys, tmp_path):
    w = gen_power_weight(1.5, -64, 64)
    p = tmp_path / "w.csv"
    write_csv(w, p)
    rc, out, _ = run(capsys, "weights", "--input", str(p), "--p", "2")
    assert rc == 0
    assert json.loads(out)["value"] == characteristic(w, 2, "both").value
    rc, out, _ = run(capsys, "weights", "--input", str(p), "--p", "2", "--ladder", "16,32,64,128")
    assert rc == 0 and json.loads(out)["verdict"] == "diverging"
    rc, _, err = run(capsys, "weights", "--input", str(p), "--p", "2", "--ladder", "1000")
    assert rc == 1 and "ladder width" in err


def test_decompose(capsys, tmp_path):
    p = tmp_path / "d.csv"
    write_csv(Sequence(0, [4.0]), p)
    rc, out, _ = run(capsys, "decompose", "--input", str(p), "--lambda", "1", "--verify")
    assert rc == 0
    d = json.loads(out)
    assert d["intervals"] == [[-2, 0]] and d["verify"]["all_ok"]
    assert d["omega"] == list(cz_decompose_plus(Sequence(0, [4.0]), 1.0).omega)


def test_verify_writes_report_and_csv(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"k_max": 4, "expect": "diverging"}))
    rc, out, _ = run(capsys, "verify", "--theorem", "counterexample", "--config", str(cfg))
    assert rc == 0
    d = json.loads(out)
    ref = run_theorem("counterexample", {"k_max": 4})
    d.pop("runtime_ms")
    assert d == ref.comparable()
    assert (tmp_path / "c.csv").read_text().startswith("input_id,window,ratio")


def test_verify_expectation_mismatch(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"k_max": 4, "expect": "bounded"}))
    rc, _, err = run(capsys, "verify", "--theorem", "counterexample", "--config", str(cfg))
    assert rc == 3 and "differs" in err


@pytest.mark.parametrize(
    "argv,code",
    [
        (["verify", "--theorem", "9.9"], 1),
        (["variation", "--q", "3"], 1),
        (["--threads", "0", "demo", "--name", "hilbert-log3"], 1),
        ([], 1),
    ],
)
def test_usage_errors(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(capsys, "verify", "--theorem", "lemma22", "--config", str(bad))[0] == 2
    unknown = tmp_path / "u.json"
    unknown.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "verify", "--theorem", "lemma22", "--config", str(unknown))[0] == 2
    missing = tmp_path / "nope.csv"
    assert run(capsys, "variation", "--input", str(missing), "--q", "2")[0] == 2
    garbage = tmp_path / "g.csv"
    garbage.write_text("index,value\n0,abc\n")
    assert run(capsys, "variation", "--input", str(garbage), "--q", "2")[0] == 2


def test_bad_parameter_is_usage_error(capsys, seq_csv):
    _, p = seq_csv
    rc, _, err = run(capsys, "variation", "--input", str(p), "--q", "0.5")
    assert rc == 1 and err


def test_numeric_failure(capsys, tmp_path):
    w = Weight(0, np.array([1.0, 2.0]))
    p = tmp_path / "h.csv"
    write_csv(w, p)
    cfg = tmp_path / "e.json"
    cfg.write_text(json.dumps({"h": 1e300, "ladder_exps": [4, 5], "N_grid": [8]}))
    rc, _, err = run(capsys, "verify", "--theorem", "5.2", "--config", str(cfg))
    assert rc == 4 and "numeric" in err


@pytest.mark.parametrize("name", ["hilbert-log3", "cauchy-lip", "ergodic-dichotomy"])
def test_demos(capsys, name):
    rc, out, _ = run(capsys, "--threads", "1", "demo", "--name", name)
    assert rc == 0 and json.loads(out)["ok"]
