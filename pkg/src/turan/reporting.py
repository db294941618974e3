"""Serialization of verdicts and scan reports to JSON, CSV and plain text.

JSON floats use Python's shortest round-trip representation, so re-parsing a
report gives back bit-identical values.  Non-finite floats are written as the
strings "inf", "-inf" and "nan" to keep the output strict JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict
from typing import Any, Iterable

import numpy as np

from .criteria import Criterion, CriterionVerdict, Failure
from .scanner import RemarkWindow, ScanRegion, TuranReport

__all__ = [
    "FORMATS",
    "encode_float",
    "decode_float",
    "region_to_dict",
    "region_from_dict",
    "report_to_dict",
    "report_from_dict",
    "verdict_to_dict",
    "verdict_from_dict",
    "remark_to_dict",
    "dumps",
    "loads",
    "scan_csv",
    "verdicts_csv",
    "eval_csv",
    "fmt",
    "render_report_text",
    "render_verdicts_text",
    "render_eval_text",
]

FORMATS = ("json", "csv", "text")


def encode_float(v: float) -> float | str:
    v = float(v)
    if math.isfinite(v):
        return v
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


def decode_float(v: float | str) -> float:
    return float(v)


def _clean(obj: Any) -> Any:
    """Recursively convert numpy scalars, tuples and non-finite floats to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_float(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def region_to_dict(region: ScanRegion) -> dict:
    return _clean(asdict(region))


def region_from_dict(d: dict) -> ScanRegion:
    return ScanRegion(
        lo=decode_float(d["lo"]),
        hi=decode_float(d["hi"]),
        points=int(d["points"]),
        n_min=int(d["n_min"]),
        n_max=int(d["n_max"]),
    )


def _triples(items) -> list:
    return [[int(n), encode_float(x), encode_float(v)] for n, x, v in items]


def _untriples(items) -> list[tuple[int, float, float]]:
    return [(int(n), decode_float(x), decode_float(v)) for n, x, v in items]


def report_to_dict(report: TuranReport) -> dict:
    return {
        "region": region_to_dict(report.region),
        "tol": encode_float(report.tol),
        "min_value": encode_float(report.min_value),
        "argmin_n": report.argmin_n,
        "argmin_x": encode_float(report.argmin_x),
        "violations": _triples(report.violations),
        "endpoint_zero_checks": _triples(report.endpoint_zero_checks),
        "cross_residual_max": encode_float(report.cross_residual_max),
        "sequence_name": report.sequence_name,
    }


def report_from_dict(d: dict) -> TuranReport:
    return TuranReport(
        region=region_from_dict(d["region"]),
        tol=decode_float(d["tol"]),
        min_value=decode_float(d["min_value"]),
        argmin_n=int(d["argmin_n"]),
        argmin_x=decode_float(d["argmin_x"]),
        violations=_untriples(d["violations"]),
        endpoint_zero_checks=_untriples(d["endpoint_zero_checks"]),
        cross_residual_max=decode_float(d["cross_residual_max"]),
        sequence_name=d.get("sequence_name", ""),
    )


def verdict_to_dict(v: CriterionVerdict) -> dict:
    failure = None
    if v.first_failure is not None:
        f = v.first_failure
        failure = {"n": f.n, "condition": f.condition, "margin": encode_float(f.margin)}
    return {
        "criterion": v.criterion.value,
        "holds": v.holds,
        "verified_to": v.verified_to,
        "first_failure": failure,
        "per_n_margins": _clean(v.per_n_margins),
        "details": _clean(v.details),
    }


def verdict_from_dict(d: dict) -> CriterionVerdict:
    f = d.get("first_failure")
    failure = None if f is None else Failure(int(f["n"]), f["condition"], decode_float(f["margin"]))
    return CriterionVerdict(
        criterion=Criterion(d["criterion"]),
        holds=bool(d["holds"]),
        verified_to=int(d["verified_to"]),
        first_failure=failure,
        per_n_margins=[decode_float(m) for m in d["per_n_margins"]],
        details=d.get("details", {}),
    )


def remark_to_dict(w: RemarkWindow) -> dict:
    return _clean(asdict(w))


def dumps(payload: Any) -> str:
    return json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n"


def loads(text: str) -> Any:
    return json.loads(text)


def fmt(v: float) -> str:
    """Six significant digits for human-readable output."""
    return f"{float(v):.6g}"


def _csv_text(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(list(header))
    writer.writerows(rows)
    return buf.getvalue()


def _num(v: float) -> str:
    return repr(float(v))


def scan_csv(report: TuranReport, x: np.ndarray, delta: np.ndarray) -> str:
    """One row per grid node: n, x, delta, flag (ok or violation), then endpoint rows."""
    rows = []
    for k in range(delta.shape[0]):
        n = report.region.n_min + k
        for xv, dv in zip(x, delta[k]):
            rows.append((n, _num(xv), _num(dv), "violation" if dv < -report.tol else "ok"))
    for n, xv, dv in report.endpoint_zero_checks:
        rows.append((n, _num(xv), _num(dv), "endpoint"))
    return _csv_text(("n", "x", "delta", "flag"), rows)


def verdicts_csv(verdicts: list[CriterionVerdict]) -> str:
    rows = []
    for v in verdicts:
        f = v.first_failure
        rows.append(
            (
                v.criterion.value,
                "true" if v.holds else "false",
                v.verified_to,
                "" if f is None else f.n,
                "" if f is None else f.condition,
                "" if f is None else _num(f.margin),
            )
        )
    return _csv_text(("criterion", "holds", "verified_to", "failure_n", "condition", "margin"), rows)


def eval_csv(ns: np.ndarray, x: np.ndarray, values: np.ndarray) -> str:
    rows = [(int(n), _num(xv), _num(values[i, j])) for i, n in enumerate(ns) for j, xv in enumerate(x)]
    return _csv_text(("n", "x", "value"), rows)


def render_report_text(report: TuranReport, remark: RemarkWindow | None = None) -> str:
    r = report.region
    lines = [
        f"scan of {report.sequence_name} on [{fmt(r.lo)}, {fmt(r.hi)}] with {r.points} points, "
        f"n = {r.n_min}..{r.n_max}, tol = {fmt(report.tol)}",
        f"  min Delta = {fmt(report.min_value)} at n = {report.argmin_n}, x = {fmt(report.argmin_x)}",
        f"  violations: {len(report.violations)}",
    ]
    for n, x, v in report.violations[:10]:
        lines.append(f"    n = {n}, x = {fmt(x)}, Delta = {fmt(v)}")
    if len(report.violations) > 10:
        lines.append(f"    ... {len(report.violations) - 10} more")
    if report.endpoint_zero_checks:
        lines.append(f"  max |Delta| at endpoints: {fmt(report.endpoint_max)}")
    lines.append(f"  identity cross-check residual: {fmt(report.cross_residual_max)}")
    if remark is not None and remark.applicable:
        lines.append(
            f"  Delta_2 negative window: r = {fmt(remark.r)}, root sqrt(r) = {fmt(remark.root)}, "
            f"confirmed on (1, sqrt(r)): {remark.confirmed}"
        )
    return "\n".join(lines) + "\n"


def render_verdicts_text(verdicts: list[CriterionVerdict], notes: list[str] = ()) -> str:
    lines = []
    for v in verdicts:
        status = "holds" if v.holds else "fails"
        line = f"{v.criterion.value}: {status} (verified to n = {v.verified_to})"
        if v.first_failure is not None:
            f = v.first_failure
            line += f"; first failure at n = {f.n}: {f.condition} (margin {fmt(f.margin)})"
        lines.append(line)
    lines.extend(f"note: {n}" for n in notes)
    return "\n".join(lines) + "\n"


def render_eval_text(ns: np.ndarray, x: np.ndarray, values: np.ndarray) -> str:
    header = "n".rjust(5) + "".join(f"{'x=' + fmt(xv):>16}" for xv in x)
    lines = [header]
    for i, n in enumerate(ns):
        lines.append(f"{int(n):5d}" + "".join(f"{fmt(v):>16}" for v in values[i]))
    return "\n".join(lines) + "\n"
