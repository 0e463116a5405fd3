"""Report type shared by every experiment driver, its JSON/CSV forms, the
ladder verdict rule and golden-file comparison."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ReportParseError

__all__ = [
    "InequalityReport",
    "ladder_verdict",
    "report_write",
    "report_read",
    "report_from_dict",
    "write_plot_csv",
    "golden_path",
    "compare_golden",
    "GOLDEN_DIR",
]

VERDICTS = ("bounded", "diverging", "inconclusive")
GOLDEN_DIR = Path(__file__).parent / "golden"
ANCHOR_NOTE = "constants are regression anchors measured by this tool, not proven values"


@dataclass
class InequalityReport:
    theorem_id: str
    params: dict
    seed: int | None
    windows: list
    per_input: list
    sup_ratio: float
    ladder: list
    verdict: str
    runtime_ms: float = 0.0
    details: dict = field(default_factory=dict)
    note: str = ANCHOR_NOTE

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "params": self.params,
            "seed": self.seed,
            "windows": self.windows,
            "per_input": self.per_input,
            "sup_ratio": self.sup_ratio,
            "ladder": self.ladder,
            "verdict": self.verdict,
            "runtime_ms": self.runtime_ms,
            "details": self.details,
            "note": self.note,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(_clean(self.to_dict()), sort_keys=True, allow_nan=False, **kw)

    def comparable(self) -> dict:
        """Everything except the wall-clock time."""
        d = json.loads(self.to_json())
        d.pop("runtime_ms")
        return d


def _clean(obj):
    # JSON has no inf/nan; encode them as strings so round-trips stay exact
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def _num(v, fld):
    if isinstance(v, bool):
        raise ReportParseError("expected a number", fld)
    if isinstance(v, (int, float)):
        return float(v)
    if v in ("inf", "-inf", "nan"):
        return float(v)
    raise ReportParseError(f"expected a number, got {v!r}", fld)


def ladder_verdict(constants, growth_tol: float = 0.15, min_len: int = 4) -> str:
    """``bounded`` if no ladder step grows by more than ``growth_tol``;
    ``diverging`` if the ladder is nondecreasing and its mean step growth
    exceeds ``growth_tol``; ``inconclusive`` otherwise (also for ladders
    shorter than ``min_len``)."""
    c = [float(x) for x in constants]
    if len(c) < min_len:
        return "inconclusive"
    if all(x == 0 for x in c):
        return "bounded"
    if any(x <= 0 for x in c):
        return "inconclusive"
    steps = [b / a for a, b in zip(c, c[1:])]
    if max(steps) <= 1 + growth_tol:
        return "bounded"
    mean = math.exp(math.log(c[-1] / c[0]) / len(steps))
    if min(steps) >= 1 and mean > 1 + growth_tol:
        return "diverging"
    return "inconclusive"


_REQUIRED = {
    "theorem_id": str,
    "params": dict,
    "windows": list,
    "per_input": list,
    "ladder": list,
    "verdict": str,
}


def report_from_dict(d) -> InequalityReport:
    if not isinstance(d, dict):
        raise ReportParseError("top level must be an object", "<root>")
    for key, typ in _REQUIRED.items():
        if key not in d:
            raise ReportParseError("missing field", key)
        if not isinstance(d[key], typ):
            raise ReportParseError(f"expected {typ.__name__}", key)
    for key in ("seed", "sup_ratio", "runtime_ms"):
        if key not in d:
            raise ReportParseError("missing field", key)
    if d["verdict"] not in VERDICTS:
        raise ReportParseError(f"must be one of {VERDICTS}", "verdict")
    seed = d["seed"]
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ReportParseError("expected an integer or null", "seed")
    for i, item in enumerate(d["per_input"]):
        where = f"per_input[{i}]"
        if not isinstance(item, dict) or "input_id" not in item or "ratio" not in item:
            raise ReportParseError("entries need input_id and ratio", where)
        _num(item["ratio"], where + ".ratio")
    for i, item in enumerate(d["ladder"]):
        where = f"ladder[{i}]"
        if not isinstance(item, dict) or "window" not in item or "constant" not in item:
            raise ReportParseError("entries need window and constant", where)
        _num(item["constant"], where + ".constant")
    details = d.get("details", {})
    if not isinstance(details, dict):
        raise ReportParseError("expected object", "details")
    return InequalityReport(
        theorem_id=d["theorem_id"],
        params=d["params"],
        seed=seed,
        windows=d["windows"],
        per_input=d["per_input"],
        sup_ratio=_num(d["sup_ratio"], "sup_ratio"),
        ladder=d["ladder"],
        verdict=d["verdict"],
        runtime_ms=_num(d["runtime_ms"], "runtime_ms"),
        details=details,
        note=d.get("note", ANCHOR_NOTE),
    )


def report_write(report: InequalityReport, path) -> None:
    Path(path).write_text(report.to_json(indent=2) + "\n")


def report_read(path) -> InequalityReport:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ReportParseError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", str(path)) from None
    return report_from_dict(d)


def write_plot_csv(report: InequalityReport, path_or_file) -> None:
    """One row per (input, window, ratio)."""
    rows = [(p.get("input_id"), json.dumps(p.get("window")), p["ratio"]) for p in report.per_input]
    if hasattr(path_or_file, "write"):
        _write_rows(path_or_file, rows)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write_rows(fh, rows)


def _write_rows(fh, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["input_id", "window", "ratio"])
    for r in rows:
        w.writerow([r[0], r[1], repr(float(r[2]))])


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.json"


def _close(a, b, tol, where, out):
    if isinstance(a, dict) and isinstance(b, dict):
        for k in set(a) | set(b):
            if k not in a or k not in b:
                out.append(f"{where}.{k}: missing on one side")
            else:
                _close(a[k], b[k], tol, f"{where}.{k}", out)
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append(f"{where}: length {len(a)} != {len(b)}")
        for i, (x, y) in enumerate(zip(a, b)):
            _close(x, y, tol, f"{where}[{i}]", out)
    elif isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool):
        if not abs(a - b) <= tol * max(1.0, abs(a), abs(b)):
            out.append(f"{where}: {a!r} != {b!r}")
    elif a != b:
        out.append(f"{where}: {a!r} != {b!r}")


def compare_golden(report: InequalityReport, name: str, tol: float = 1e-9, regenerate: bool = False) -> list:
    """Differences between ``report`` and the stored golden file (empty list
    when they agree within ``tol``).  ``regenerate`` (re)writes the file; a
    missing file is otherwise reported as a difference."""
    path = golden_path(name)
    if regenerate:
        path.parent.mkdir(parents=True, exist_ok=True)
        report_write(report, path)
        return []
    if not path.exists():
        return [f"{name}: missing golden file {path}"]
    ref = report_read(path).comparable()
    diffs: list = []
    _close(report.comparable(), ref, tol, name, diffs)
    return diffs
