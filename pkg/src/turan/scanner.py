"""Grid scans of Turan determinants.

Nothing here is a proof: every result is a statement about a finite grid of
abscissae and a finite range of degrees.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .determinants import identity_spread
from .errors import PreconditionError
from .recurrence import CoefficientSequence, eval_polynomials

__all__ = [
    "ScanRegion",
    "TuranReport",
    "RemarkWindow",
    "DEFAULT_TOL",
    "DEFAULT_POINTS",
    "turan_grid",
    "scan_sign",
    "endpoint_equality",
    "remark_window",
    "support_left_heuristic",
    "strict_interior_min",
    "thread_count",
]

DEFAULT_TOL = 1e-9
DEFAULT_POINTS = 401
SUBSAMPLE_FRACTION = 0.05
SUBSAMPLE_SEED = 0
_MIN_CHUNK = 64


@dataclass(frozen=True)
class ScanRegion:
    lo: float = -1.0
    hi: float = 1.0
    points: int = DEFAULT_POINTS
    n_min: int = 1
    n_max: int = 50

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"scan region needs finite lo < hi, got [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise ValueError("scan region needs at least 2 points")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"scan region needs 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


@dataclass
class TuranReport:
    """Result of a sign scan.

    ``violations`` lists (n, x, Delta_n(x)) for every node below -tol, and is
    nonempty exactly when ``min_value < -tol``.  ``endpoint_zero_checks``
    lists (n, x, |Delta_n(x)|) at the requested endpoints.
    """

    region: ScanRegion
    tol: float
    min_value: float
    argmin_n: int
    argmin_x: float
    violations: list[tuple[int, float, float]] = field(default_factory=list)
    endpoint_zero_checks: list[tuple[int, float, float]] = field(default_factory=list)
    cross_residual_max: float = 0.0
    sequence_name: str = ""

    def __post_init__(self):
        if bool(self.violations) != (self.min_value < -self.tol):
            raise ValueError("violations must be nonempty exactly when min_value < -tol")

    @property
    def clean(self) -> bool:
        return not self.violations

    @property
    def endpoint_max(self) -> float:
        return max((v for _, _, v in self.endpoint_zero_checks), default=0.0)


def thread_count() -> int:
    """Worker threads for scans: the CPU count, capped by TURAN_THREADS if set."""
    cpus = os.cpu_count() or 1
    raw = os.environ.get("TURAN_THREADS")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"TURAN_THREADS must be a positive integer, got {raw!r}") from None
        if cap < 1:
            raise ValueError(f"TURAN_THREADS must be a positive integer, got {raw!r}")
        return min(cpus, cap)
    return cpus


def turan_grid(seq: CoefficientSequence, x, n_min: int, n_max: int) -> np.ndarray:
    """Delta_n(x) for n = n_min..n_max; row k is n_min + k."""
    p = eval_polynomials(seq, x, n_max + 1).values
    n = slice(n_min, n_max + 1)
    return p[n] ** 2 - p[n_min - 1 : n_max] * p[n_min + 1 : n_max + 2]


def _chunked_grid(seq: CoefficientSequence, x: np.ndarray, n_min: int, n_max: int) -> np.ndarray:
    workers = min(thread_count(), max(1, x.size // _MIN_CHUNK))
    if workers <= 1:
        return turan_grid(seq, x, n_min, n_max)
    chunks = np.array_split(x, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: turan_grid(seq, c, n_min, n_max), chunks))
    return np.concatenate(parts, axis=1)


def _cross_residual(seq: CoefficientSequence, x: np.ndarray, region: ScanRegion) -> float:
    k = max(1, math.ceil(SUBSAMPLE_FRACTION * x.size))
    rng = np.random.default_rng(SUBSAMPLE_SEED)
    picks = np.sort(rng.choice(x.size, size=k, replace=False))
    table = eval_polynomials(seq, x[picks], region.n_max + 1)
    spread = identity_spread(table, seq)[region.n_min - 1 : region.n_max]
    return float(np.max(spread)) if spread.size else 0.0


def scan_sign(
    seq: CoefficientSequence,
    region: ScanRegion,
    tol: float = DEFAULT_TOL,
    endpoints: tuple[float, ...] = (),
) -> TuranReport:
    """Evaluate Delta_n on every grid node of ``region`` and report the minimum and violations.

    ``endpoints`` are abscissae where Delta_n should vanish; their absolute
    values are recorded in ``endpoint_zero_checks``.  Work is split over
    threads by abscissa; the result does not depend on the split.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    x = region.grid()
    delta = _chunked_grid(seq, x, region.n_min, region.n_max)
    flat = int(np.argmin(delta))
    i, j = np.unravel_index(flat, delta.shape)
    min_value = float(delta[i, j])

    rows, cols = np.nonzero(delta < -tol)
    violations = [
        (int(region.n_min + r), float(x[c]), float(delta[r, c])) for r, c in zip(rows, cols)
    ]
    checks = []
    if endpoints:
        ends = turan_grid(seq, np.asarray(endpoints, dtype=float), region.n_min, region.n_max)
        for r in range(ends.shape[0]):
            for c, e in enumerate(endpoints):
                checks.append((region.n_min + r, float(e), float(abs(ends[r, c]))))

    return TuranReport(
        region=region,
        tol=float(tol),
        min_value=min_value,
        argmin_n=int(region.n_min + i),
        argmin_x=float(x[j]),
        violations=violations,
        endpoint_zero_checks=checks,
        cross_residual_max=_cross_residual(seq, x, region),
        sequence_name=seq.name,
    )


def endpoint_equality(seq: CoefficientSequence, a: float, n_max: int) -> list[tuple[int, float, float]]:
    """(n, x, |Delta_n(x)|) for n = 1..n_max at x = a, and at x = -a for symmetric sequences.

    ``a`` must be the constant row sum of the interval-form recurrence
    (0 for half-line sequences, where the check sits at the origin).
    """
    s = seq.effective_row_sum
    if s is None or abs(s - a) > 1e-12 * max(1.0, abs(a)):
        raise PreconditionError(f"{seq.name}: row sums are not constantly {a!r}")
    xs = (a, -a) if seq.symmetric and a != 0 else (a,)
    vals = turan_grid(seq, np.asarray(xs, dtype=float), 1, n_max)
    return [(n + 1, float(xv), float(abs(vals[n, c]))) for n in range(n_max) for c, xv in enumerate(xs)]


@dataclass(frozen=True)
class RemarkWindow:
    """Localization of the negative window of Delta_2 just right of x = 1.

    With a = 1, gamma_1^2 gamma_2 Delta_2(x) = (x^2 - 1)[(gamma_2 - gamma_1) x^2 - alpha_1^2 gamma_2],
    so Delta_2 < 0 on (1, sqrt(r)) with r = alpha_1^2 gamma_2/(gamma_2 - gamma_1).
    ``confirmed`` checks that window and the sign change at sqrt(r);
    ``literal_window_negative`` records whether Delta_2 < 0 on all of (1, r).
    """

    applicable: bool
    r: float = math.nan
    root: float = math.nan
    confirmed: bool = False
    literal_window_negative: bool = False
    formula_residual: float = math.nan
    max_delta_on_window: float = math.nan


_WINDOW_POINTS = 200


def remark_window(seq: CoefficientSequence) -> RemarkWindow:
    if seq.half_line or not seq.symmetric or seq.row_sum_constant is None:
        raise PreconditionError("remark_window needs a symmetric sequence with constant row sums")
    if abs(seq.row_sum_constant - 1.0) > 1e-12:
        raise PreconditionError("remark_window needs row sums equal to 1")
    al, _, ga = seq.coefficients(3)
    a1, g1, g2 = float(al[1]), float(ga[1]), float(ga[2])
    if not g2 > g1:
        return RemarkWindow(applicable=False)

    r = a1**2 * g2 / (g2 - g1)
    root = math.sqrt(r)

    def factored(x):
        return (x**2 - 1) * ((g2 - g1) * x**2 - a1**2 * g2) / (g1**2 * g2)

    def delta2(x):
        return turan_grid(seq, x, 2, 2)[0]

    inner = np.linspace(1.0, root, _WINDOW_POINTS + 2)[1:-1]
    literal = np.linspace(1.0, r, _WINDOW_POINTS + 2)[1:-1]
    d_inner, d_literal = delta2(inner), delta2(literal)
    eps = 1e-3 * (root - 1.0)
    across = delta2(np.array([root - eps, root + eps]))
    residual = float(
        np.max(np.abs(d_literal - factored(literal)) / np.maximum(1.0, np.abs(factored(literal))))
    )
    return RemarkWindow(
        applicable=True,
        r=r,
        root=root,
        confirmed=bool(np.all(d_inner < 0) and across[0] < 0 < across[1]),
        literal_window_negative=bool(np.all(d_literal < 0)),
        formula_residual=residual,
        max_delta_on_window=float(np.max(d_inner)),
    )


def support_left_heuristic(seq: CoefficientSequence, n_max: int) -> bool:
    """True when c_n = (-1)^n p_n(-1) > 0 for all n <= n_max."""
    p = eval_polynomials(seq, -1.0, n_max).values
    c = p * (-1.0) ** np.arange(n_max + 1)
    return bool(np.all(c > 0))


def strict_interior_min(
    seq: CoefficientSequence,
    region: ScanRegion,
    zeros: tuple[float, ...],
    margin: float = 0.05,
) -> float:
    """Smallest Delta_n over grid nodes at distance >= margin from every point in ``zeros``."""
    x = region.grid()
    keep = np.ones(x.shape, dtype=bool)
    for z in zeros:
        keep &= np.abs(x - z) >= margin
    if not keep.any():
        raise ValueError("no grid node is far enough from the excluded points")
    return float(np.min(_chunked_grid(seq, x[keep], region.n_min, region.n_max)))
