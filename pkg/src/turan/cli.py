"""Command-line interface: ``turan eval|check|scan``.

Exit codes: 0 all requested checks passed, 2 criterion failure,
3 scan violation, 4 input error.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np

from . import criteria as crit
from . import reporting
from .errors import TuranError
from .families import PolynomialFamily, build_family, family_from_spec, load_spec, working_sequence
from .recurrence import eval_polynomials, normalize_at_one
from .scanner import (
    DEFAULT_POINTS,
    DEFAULT_TOL,
    ScanRegion,
    remark_window,
    scan_sign,
    turan_grid,
)

EXIT_OK = 0
EXIT_CRITERION = 2
EXIT_SCAN = 3
EXIT_INPUT = 4

ENDPOINT_TOL = 1e-10


class _Group(click.Group):
    """Maps click usage errors to the input-error exit code."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise


@contextmanager
def _input_errors():
    try:
        yield
    except (TuranError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_INPUT) from None


def _parse_params(pairs: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected k=v, got {pair!r}", param_hint="--param")
        out[key.strip()] = value.strip()
    return out


def _family(family: str | None, params: tuple[str, ...], spec: str | None) -> PolynomialFamily:
    if (family is None) == (spec is None):
        raise click.UsageError("give exactly one of --family or --spec")
    if spec is not None:
        if params:
            raise click.UsageError("--param only applies together with --family")
        return family_from_spec(load_spec(spec))
    return build_family(family, _parse_params(params))


def _parse_region(text: str | None, family: PolynomialFamily, n_max: int) -> ScanRegion:
    if text is None:
        lo, hi = family.interval
        return ScanRegion(lo, hi, DEFAULT_POINTS, 1, n_max)
    parts = text.split(",")
    if len(parts) not in (2, 3):
        raise click.BadParameter("expected lo,hi or lo,hi,points", param_hint="--region")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        points = int(parts[2]) if len(parts) == 3 else DEFAULT_POINTS
    except ValueError:
        raise click.BadParameter(f"cannot parse {text!r}", param_hint="--region") from None
    return ScanRegion(lo, hi, points, 1, n_max)


def _parse_xs(values: tuple[str, ...]) -> np.ndarray:
    xs = []
    for v in values:
        for part in v.split(","):
            try:
                xs.append(float(part))
            except ValueError:
                raise click.BadParameter(f"not a number: {part!r}", param_hint="--x") from None
    if not xs:
        raise click.BadParameter("at least one abscissa is required", param_hint="--x")
    return np.array(xs)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    path = Path(out)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def _family_options(f):
    f = click.option("--out", type=click.Path(dir_okay=False), help="Write output to this file.")(f)
    f = click.option(
        "--format", "fmt", type=click.Choice(reporting.FORMATS), default="text", show_default=True
    )(f)
    f = click.option("--spec", help="Family spec as a JSON file path or inline JSON.")(f)
    f = click.option("--param", "params", multiple=True, metavar="K=V", help="Family parameter.")(f)
    f = click.option("--family", help="Built-in family name.")(f)
    return f


@click.group(cls=_Group)
@click.version_option(package_name="artifact")
def main():
    """Turan determinant checks for three-term recurrences."""


@main.command("eval")
@_family_options
@click.option("--n-max", type=click.IntRange(min=0), default=5, show_default=True)
@click.option("--x", "xs", multiple=True, required=True, help="Abscissa(e), comma separated or repeated.")
@click.option("--raw", is_flag=True, help="Use auxiliary coefficients without normalizing at 1.")
def cmd_eval(family, params, spec, fmt, out, n_max, xs, raw):
    """Tabulate p_0(x)..p_N(x)."""
    with _input_errors():
        fam = _family(family, params, spec)
        x = _parse_xs(xs)
        seq = fam.sequence if raw else working_sequence(fam, n_max)
        values = eval_polynomials(seq, x, n_max).values
        ns = np.arange(n_max + 1)
        if fmt == "json":
            text = reporting.dumps(
                {"kind": "eval", "sequence": seq.name, "n": ns, "x": x, "values": values}
            )
        elif fmt == "csv":
            text = reporting.eval_csv(ns, x, values)
        else:
            text = reporting.render_eval_text(ns, x, values)
        _emit(text, out)


def _positive(v: crit.CriterionVerdict) -> bool:
    if not v.holds:
        return False
    if v.criterion is crit.Criterion.PROP3_HYPOTHESIS:
        return bool(v.details.get("alpha_nondecreasing"))
    return v.criterion is not crit.Criterion.PROP2_SIGMA


def run_checks(fam: PolynomialFamily, N: int) -> tuple[list[crit.CriterionVerdict], list[str]]:
    """Every criterion that applies to the family, plus notes on those that do not."""
    seq = fam.sequence
    verdicts: list[crit.CriterionVerdict] = []
    notes: list[str] = []

    if seq.half_line:
        verdicts.extend(crit.check_thm5(seq, N))
        verdicts.append(crit.check_prop3_hypothesis(seq, N))
        notes.append("interval criteria do not apply to half-line sequences")
        return verdicts, notes

    if fam.auxiliary:
        if seq.symmetric and seq.declared_limits is not None:
            try:
                verdicts.append(crit.check_cor1(seq, N))
            except TuranError as exc:
                notes.append(f"Cor1 not applicable: {exc}")
        else:
            notes.append("Cor1 not applicable: needs a symmetric sequence with declared limits")
        seq, ledger = normalize_at_one(seq, N)
        notes.append(f"normalized at x = 1; endpoint ratio estimate {reporting.fmt(ledger.ratio_limit_estimate)}")

    if seq.symmetric:
        try:
            verdicts.extend(crit.check_thm1(seq, N))
        except TuranError as exc:
            notes.append(f"Thm1 not applicable: {exc}")
    else:
        notes.append("Thm1 not applicable: sequence is not symmetric")
    try:
        verdicts.append(crit.check_thm4(seq, N))
    except TuranError as exc:
        notes.append(f"Thm4 not applicable: {exc}")
    return verdicts, notes


@main.command("check")
@_family_options
@click.option("--n-max", type=click.IntRange(min=2), default=crit.DEFAULT_HORIZON, show_default=True)
def cmd_check(family, params, spec, fmt, out, n_max):
    """Run every applicable positivity criterion up to the horizon N."""
    with _input_errors():
        fam = _family(family, params, spec)
        if fam.sequence.horizon is not None:
            n_max = min(n_max, fam.sequence.horizon)
        verdicts, notes = run_checks(fam, n_max)
        if fmt == "json":
            text = reporting.dumps(
                {
                    "kind": "check",
                    "family": fam.name,
                    "params": dict(fam.params),
                    "verdicts": [reporting.verdict_to_dict(v) for v in verdicts],
                    "notes": notes,
                }
            )
        elif fmt == "csv":
            text = reporting.verdicts_csv(verdicts)
        else:
            text = reporting.render_verdicts_text(verdicts, notes)
        _emit(text, out)
    passed = any(_positive(v) for v in verdicts)
    sys.exit(EXIT_OK if passed else EXIT_CRITERION)


def _endpoints(seq) -> tuple[float, ...]:
    s = seq.effective_row_sum
    if s is None:
        return ()
    return (-s, s) if seq.symmetric and s != 0 else (s,)


@main.command("scan")
@_family_options
@click.option("--n-max", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--region", help="lo,hi[,points]; defaults to the family's interval with 401 points.")
@click.option("--tol", type=click.FloatRange(min=0), default=DEFAULT_TOL, show_default=True)
@click.option("--raw", is_flag=True, help="Scan auxiliary coefficients without normalizing at 1.")
def cmd_scan(family, params, spec, fmt, out, n_max, region, tol, raw):
    """Grid scan of Delta_n for n = 1..N."""
    with _input_errors():
        fam = _family(family, params, spec)
        reg = _parse_region(region, fam, n_max)
        seq = fam.sequence if raw else working_sequence(fam, n_max + 1)
        ends = _endpoints(seq)
        report = scan_sign(seq, reg, tol, endpoints=ends)
        remark = None
        if seq.symmetric and seq.row_sum_constant is not None and abs(seq.row_sum_constant - 1) <= 1e-12:
            remark = remark_window(seq)
            if not remark.applicable:
                remark = None
        if fmt == "json":
            payload = {"kind": "scan", "family": fam.name, "report": reporting.report_to_dict(report)}
            if remark is not None:
                payload["remark_window"] = reporting.remark_to_dict(remark)
            text = reporting.dumps(payload)
        elif fmt == "csv":
            x = reg.grid()
            text = reporting.scan_csv(report, x, turan_grid(seq, x, reg.n_min, reg.n_max))
        else:
            text = reporting.render_report_text(report, remark)
        _emit(text, out)
    failed = bool(report.violations) or report.endpoint_max > ENDPOINT_TOL
    sys.exit(EXIT_SCAN if failed else EXIT_OK)


__all__ = ["main", "run_checks"]
