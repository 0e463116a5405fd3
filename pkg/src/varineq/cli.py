"""Command-line entry point.

Each subcommand is a thin adapter over a library call.  JSON modes print a
single document on stdout; diagnostics go to stderr.

Exit codes: 0 success, 1 usage, 2 input parse, 3 verification failure,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import DecompositionError, KernelError, ParameterError, ReportParseError, SizeError
from .seqcore import read_sequence_csv, read_weight_csv, write_csv

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3, 4

THEOREMS = ("2.1s", "2.1w", "2.7", "3.1s", "3.1w", "4.1", "5.2", "5.3", "sharp", "fs", "lemma22", "counterexample")
DEMOS = ("hilbert-log3", "cauchy-lip", "ergodic-dichotomy")


class _InputError(Exception):
    """Raised while reading a user-supplied file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj) -> None:
    from .harness.report import _clean

    sys.stdout.write(json.dumps(_clean(obj), sort_keys=True, allow_nan=False) + "\n")


def _read(reader, path):
    try:
        return reader(path)
    except (OSError, ParameterError) as e:
        raise _InputError(str(e)) from None


def _read_config(path) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise _InputError(str(e)) from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise _InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(cfg, dict):
        raise _InputError(f"{path}: config must be a JSON object")
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def cmd_variation(args) -> int:
    from .variation import variation_norm, variation_oracle

    f = _read(read_sequence_csv, args.input)
    res = variation_norm(f.values, args.q)
    out = res.to_dict()
    rc = EXIT_OK
    if args.oracle:
        if len(f.values) > 20:
            raise ParameterError("--oracle needs a family of at most 20 points")
        ref = variation_oracle(f.values, args.q)
        agree = abs(ref - res.value) <= 1e-12 * max(1.0, abs(ref))
        out["oracle"] = {"value": ref, "agree": agree}
        rc = EXIT_OK if agree else EXIT_VERIFY
    _emit(out)
    return rc


def cmd_maximal(args) -> int:
    from .maximal import maximal

    f = _read(read_sequence_csv, args.input)
    window = tuple(args.window) if args.window else None
    write_csv(maximal(f, args.side, args.r, window), sys.stdout)
    return EXIT_OK


def _ladder_windows(w, sizes):
    # windows of the given widths, centred in the weight's domain
    mid = (w.lo + w.hi) // 2
    out = []
    for L in sizes:
        lo, hi = mid - L // 2, mid - L // 2 + L - 1
        if lo < w.lo or hi > w.hi:
            raise ParameterError(f"ladder width {L} does not fit the weight domain [{w.lo}, {w.hi}]")
        out.append((lo, hi))
    return out


def cmd_weights(args) -> int:
    from .weights import characteristic, classify

    w = _read(read_weight_csv, args.input)
    if args.ladder:
        sizes = [int(s) for s in args.ladder.split(",")]
        rep = classify(w, args.p, args.side, _ladder_windows(w, sizes), args.growth_tol)
        _emit(rep.to_dict())
    else:
        _emit(characteristic(w, args.p, args.side).to_dict())
    return EXIT_OK


def cmd_decompose(args) -> int:
    from .czd import cz_decompose_plus, verify_cz

    f = _read(read_sequence_csv, args.input)
    d = cz_decompose_plus(f, args.lam, args.mode)
    out = d.to_dict()
    rc = EXIT_OK
    if args.verify:
        chk = verify_cz(d, f)
        out["verify"] = chk
        if not chk["all_ok"]:
            rc = EXIT_VERIFY
    _emit(out)
    return rc


def run_theorem(theorem: str, cfg: dict):
    """Build the report for ``theorem`` from a config dict of report params."""
    from .harness import drivers as dr

    cfg = dict(cfg)
    cfg.pop("expect", None)
    cfg.pop("growth_tol_note", None)
    if theorem == "2.1s":
        return dr.strong_type_report(**{"op": "avg_plus", **cfg})
    if theorem == "2.1w":
        return dr.weak_type_report(**{"op": "avg_plus", **cfg})
    if theorem == "2.7":
        mode = cfg.pop("mode", "strong")
        fn = dr.strong_type_report if mode == "strong" else dr.weak_type_report
        return fn(**{"op": "avg_cont", **cfg})
    if theorem == "3.1s":
        return dr.strong_type_report(**{"op": "hilbert", **cfg})
    if theorem == "3.1w":
        return dr.weak_type_report(**{"op": "hilbert", **cfg})
    if theorem == "4.1":
        return dr.vector_valued_report(**cfg)
    if theorem == "5.2":
        return dr.ergodic_dichotomy_report(**cfg)
    if theorem == "5.3":
        return dr.pointwise_report(**cfg)
    if theorem == "sharp":
        return dr.sharp_domination_report(**cfg)
    if theorem == "fs":
        return dr.fs_domination_check(**cfg)
    if theorem == "lemma22":
        return dr.lemma_increasing_seq_check(**cfg)
    if theorem == "counterexample":
        return dr.counterexample_report(**cfg)
    raise ParameterError(f"unknown theorem {theorem!r}")


def cmd_verify(args) -> int:
    from .harness.report import write_plot_csv

    cfg = _read_config(args.config)
    expect = cfg.get("expect")
    try:
        rep = run_theorem(args.theorem, cfg)
    except TypeError as e:
        # unknown or missing config fields
        raise _InputError(f"config: {e}") from None
    csv_path = args.csv or (Path(args.config).with_suffix(".csv") if args.config else None)
    if csv_path is not None:
        write_plot_csv(rep, csv_path)
    print(rep.to_json())
    if expect is not None and rep.verdict != expect:
        print(f"verdict {rep.verdict!r} differs from expected {expect!r}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _demo_hilbert_log3():
    from .seqcore import SampledFunction
    from .singular import hilbert_kernel, truncated_apply

    # the indicator sampled on its own support is exact for the interpolant
    f = SampledFunction(-1.0, 2.0 / 4096, np.ones(4097))
    val = float(truncated_apply(hilbert_kernel(), f, 2.0, 1e-9))
    err = abs(val - math.log(3.0))
    return {"name": "hilbert-log3", "value": val, "expected": math.log(3.0), "error": err, "ok": err <= 1e-3}


def _demo_cauchy_lip():
    from .singular import GRAPHS, cauchy_kernel, kernel_regularity_certify

    out = {"name": "cauchy-lip", "graphs": {}}
    ok = True
    for name, g in GRAPHS.items():
        c = kernel_regularity_certify(cauchy_kernel(g), (-4.0, 4.0), 4096, seed=0)
        finite = all(math.isfinite(c[k]) for k in ("C0", "C1", "C2"))
        ok &= finite
        out["graphs"][name] = {k: c[k] for k in ("C0", "C1", "C2", "delta")} | {"lip": g.lip}
    out["ok"] = ok
    return out


def _demo_ergodic_dichotomy():
    from .harness.drivers import ergodic_dichotomy_report

    rows = []
    for h in (0.5, 1.0, 2.0):
        r = ergodic_dichotomy_report(h=h, seed=0)
        rows.append({"h": h, "probe": r.verdict, "classify": r.details["classify"]["verdict"], "agree": r.details["agree"]})
    return {"name": "ergodic-dichotomy", "rows": rows, "ok": all(r["agree"] for r in rows)}


def cmd_demo(args) -> int:
    fn = {
        "hilbert-log3": _demo_hilbert_log3,
        "cauchy-lip": _demo_cauchy_lip,
        "ergodic-dichotomy": _demo_ergodic_dichotomy,
    }[args.name]
    out = fn()
    _emit(out)
    return EXIT_OK if out["ok"] else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="varineq", description="Weighted q-variation workbench")
    p.add_argument("--threads", type=int, default=None, help="cap the number of numba worker threads")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("variation", help="q-variation of a CSV family")
    s.add_argument("--input", required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--oracle", action="store_true", help="cross-check by enumeration (length <= 20)")
    s.set_defaults(func=cmd_variation)

    s = sub.add_parser("maximal", help="maximal function as CSV")
    s.add_argument("--input", required=True)
    s.add_argument("--side", choices=("plus", "minus", "both"), default="plus")
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    s.set_defaults(func=cmd_maximal)

    s = sub.add_parser("weights", help="weight characteristic or ladder classification")
    s.add_argument("--input", required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--side", choices=("plus", "minus", "both"), default="both")
    s.add_argument("--ladder", help="comma-separated window widths, centred in the weight domain")
    s.add_argument("--growth-tol", type=float, default=0.15)
    s.set_defaults(func=cmd_weights)

    s = sub.add_parser("decompose", help="one-sided Calderon-Zygmund decomposition")
    s.add_argument("--input", required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--mode", choices=("plus", "both"), default="plus")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("verify", help="run an inequality experiment")
    s.add_argument("--theorem", required=True, choices=THEOREMS)
    s.add_argument("--config", help="JSON object of report parameters")
    s.add_argument("--csv", help="plot-data CSV path (default: config path with .csv)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("demo", help="curated runs with fixed seeds")
    s.add_argument("--name", required=True, choices=DEMOS)
    s.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.threads is not None:
        import numba

        if args.threads < 1:
            print("--threads must be positive", file=sys.stderr)
            return EXIT_USAGE
        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    try:
        return args.func(args)
    except (_InputError, ReportParseError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (SizeError, KernelError, DecompositionError, FloatingPointError, OverflowError, ZeroDivisionError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

if __name__ == "__main__":
    sys.exit(main())
