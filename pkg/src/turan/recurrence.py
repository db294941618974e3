"""Coefficient sequences and forward evaluation of the three-term recurrence.

Two recurrence shapes are supported.  The interval form

    x p_n = gamma_n p_{n+1} + beta_n p_n + alpha_n p_{n-1},

used for polynomials orthogonal on a bounded interval, and the half-line form

    x p_n = -gamma_n p_{n+1} + (alpha_n + gamma_n) p_n - alpha_n p_{n-1},

used for polynomials orthogonal on [0, oo) and normalized by p_n(0) = 1.
Both start from p_{-1} = 0, p_0 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidSequenceError, NormalizationError, RecurrenceOverflowError

__all__ = [
    "DEFAULT_MAX_DEGREE",
    "CoefficientSequence",
    "zero_coefficient",
    "EvaluationTable",
    "NormalizationLedger",
    "NormalizationCheck",
    "eval_polynomials",
    "check_normalization",
    "normalize_at_one",
    "half_line_transform",
]

DEFAULT_MAX_DEGREE = 2000
ROW_SUM_TOL = 1e-12

Coefficient = Callable[[np.ndarray], np.ndarray]


def zero_coefficient(n):
    """beta_n = 0 for every n (symmetric and half-line sequences)."""
    return np.zeros(np.shape(n))


def _table_lookup(values: np.ndarray, label: str) -> Coefficient:
    horizon = len(values) - 1

    def lookup(n):
        idx = np.asarray(n)
        if np.any(idx < 0) or np.any(idx > horizon):
            raise InvalidSequenceError(
                f"{label}_n requested beyond the supplied horizon N={horizon}"
            )
        return values[idx]

    return lookup


@dataclass(frozen=True)
class CoefficientSequence:
    """Recurrence coefficients n -> (alpha_n, beta_n, gamma_n).

    The coefficient callables accept integer numpy arrays and return float
    arrays of the same shape.  ``alpha_step`` and ``gamma_step``, when given,
    return the increments alpha_n - alpha_{n-1} and gamma_n - gamma_{n-1}
    in closed form; monotonicity tests use them instead of differencing
    rounded values.

    ``horizon`` is the largest index with defined coefficients (None for
    closed-form sequences).  For ``half_line`` sequences ``beta`` is unused.
    """

    alpha: Coefficient
    beta: Coefficient
    gamma: Coefficient
    symmetric: bool = False
    row_sum_constant: float | None = None
    declared_limits: tuple[float, float] | None = None
    horizon: int | None = None
    half_line: bool = False
    alpha_step: Coefficient | None = None
    gamma_step: Coefficient | None = None
    name: str = "custom"

    @classmethod
    def from_arrays(
        cls,
        alpha: Sequence[float],
        beta: Sequence[float] | None,
        gamma: Sequence[float],
        *,
        symmetric: bool | None = None,
        row_sum_constant: float | None = None,
        declared_limits: tuple[float, float] | None = None,
        half_line: bool = False,
        name: str = "custom",
    ) -> "CoefficientSequence":
        """Build a finite sequence from explicit coefficient lists.

        ``symmetric`` and ``row_sum_constant`` are inferred when omitted.
        """
        al = np.array(alpha, dtype=float)
        ga = np.array(gamma, dtype=float)
        be = np.zeros_like(al) if beta is None else np.array(beta, dtype=float)
        if not (al.ndim == be.ndim == ga.ndim == 1) or not (len(al) == len(be) == len(ga)):
            raise InvalidSequenceError("alpha, beta and gamma must be 1-d lists of equal length")
        if len(al) == 0:
            raise InvalidSequenceError("at least one coefficient triple is required")
        for arr in (al, be, ga):
            arr.setflags(write=False)
        if half_line:
            symmetric = False
            row_sum_constant = None
        else:
            if symmetric is None:
                symmetric = bool(np.all(be == 0.0))
            if row_sum_constant is None:
                sums = al + be + ga
                if np.all(np.abs(sums - sums[0]) <= ROW_SUM_TOL * max(1.0, abs(sums[0]))):
                    row_sum_constant = float(sums[0])
        return cls(
            alpha=_table_lookup(al, "alpha"),
            beta=_table_lookup(be, "beta"),
            gamma=_table_lookup(ga, "gamma"),
            symmetric=bool(symmetric),
            row_sum_constant=row_sum_constant,
            declared_limits=declared_limits,
            horizon=len(al) - 1,
            half_line=half_line,
            name=name,
        )

    def _check_horizon(self, N: int) -> None:
        if N < 0:
            raise ValueError("index must be non-negative")
        if self.horizon is not None and N > self.horizon:
            raise InvalidSequenceError(
                f"{self.name}: coefficients requested up to n={N}, "
                f"but the sequence is only defined up to n={self.horizon}"
            )

    def coefficients(self, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays (alpha_n, beta_n, gamma_n) for n = 0..N as declared."""
        self._check_horizon(N)
        n = np.arange(N + 1)
        shape = n.shape
        al = np.broadcast_to(np.asarray(self.alpha(n), dtype=float), shape)
        ga = np.broadcast_to(np.asarray(self.gamma(n), dtype=float), shape)
        if self.half_line:
            be = np.zeros(shape)
        else:
            be = np.broadcast_to(np.asarray(self.beta(n), dtype=float), shape)
        return al, be, ga

    def increments(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Arrays of alpha_n - alpha_{n-1} and gamma_n - gamma_{n-1} for n = 1..N.

        Element k corresponds to n = k + 1.
        """
        if N < 1:
            return np.zeros(0), np.zeros(0)
        al, _, ga = self.coefficients(N)
        n = np.arange(1, N + 1)
        if self.alpha_step is not None:
            dal = np.broadcast_to(np.asarray(self.alpha_step(n), dtype=float), n.shape)
        else:
            dal = np.diff(al)
        if self.gamma_step is not None:
            dga = np.broadcast_to(np.asarray(self.gamma_step(n), dtype=float), n.shape)
        else:
            dga = np.diff(ga)
        return dal, dga

    def recurrence_arrays(self, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficients rewritten in interval form, for n = 0..N.

        Half-line sequences become (-alpha, alpha + gamma, -gamma), whose
        row sums vanish identically.
        """
        al, be, ga = self.coefficients(N)
        if self.half_line:
            return -al, al + ga, -ga
        return al, be, ga

    @property
    def effective_row_sum(self) -> float | None:
        """Constant value of the interval-form row sums, if any (0 for half-line)."""
        if self.half_line:
            return 0.0
        return self.row_sum_constant

    def validate(self, N: int) -> None:
        """Raise InvalidSequenceError unless the structural invariants hold for n <= N."""
        al, be, ga = self.coefficients(N)
        if al[0] != 0.0:
            raise InvalidSequenceError(f"{self.name}: alpha_0 must be 0, got {al[0]!r}")
        bad = np.flatnonzero(~(al[1:] > 0))
        if bad.size:
            n = int(bad[0]) + 1
            raise InvalidSequenceError(f"{self.name}: alpha_{n} = {al[n]!r} is not positive")
        bad = np.flatnonzero(~(ga > 0))
        if bad.size:
            n = int(bad[0])
            raise InvalidSequenceError(f"{self.name}: gamma_{n} = {ga[n]!r} is not positive")
        if self.half_line:
            return
        if self.symmetric:
            bad = np.flatnonzero(be != 0.0)
            if bad.size:
                n = int(bad[0])
                raise InvalidSequenceError(
                    f"{self.name}: declared symmetric but beta_{n} = {be[n]!r}"
                )
        if self.row_sum_constant is not None:
            c = self.row_sum_constant
            dev = np.abs(al + be + ga - c)
            bad = np.flatnonzero(dev > ROW_SUM_TOL * max(1.0, abs(c)))
            if bad.size:
                n = int(bad[0])
                raise InvalidSequenceError(
                    f"{self.name}: row sum at n={n} deviates from {c!r} by {dev[n]:.3g}"
                )


@dataclass(frozen=True, eq=False)
class EvaluationTable:
    """Values p_0(x)..p_N(x); ``values[n]`` has the shape of ``x``."""

    x: np.ndarray | float
    values: np.ndarray
    N: int
    max_residual: float


@dataclass(frozen=True, eq=False)
class NormalizationLedger:
    """Endpoint data gathered while normalizing at x = 1.

    With the convention p_{-1} = 0, ``ratios[n] = p_{n-1}(1)/p_n(1)`` and
    ``c[n] = p_n(1)^2 - p_{n-1}(1) p_{n+1}(1)`` for n = 0..N, while
    ``endpoint_values[n] = p_n(1)`` for n = 0..N+1.
    """

    endpoint_values: np.ndarray
    ratios: np.ndarray
    c: np.ndarray

    @property
    def ratio_limit_estimate(self) -> float:
        return float(self.ratios[-1])

    def ratios_nondecreasing(self, rel_slack: float = 1e-12) -> bool:
        r = self.ratios
        return bool(np.all(np.diff(r) >= -rel_slack * np.maximum(1.0, np.abs(r[1:]))))


class NormalizationCheck(NamedTuple):
    ok: bool
    max_deviation: float
    worst_n: int


def _first_bad_column(arr: np.ndarray) -> int:
    flat = np.atleast_1d(arr)
    return int(np.flatnonzero(~np.isfinite(flat))[0])


def eval_polynomials(seq: CoefficientSequence, x, N: int) -> EvaluationTable:
    """Evaluate p_0..p_N at ``x`` (scalar or array) by forward recurrence.

    Raises
    ------
    InvalidSequenceError
        if some gamma_n <= 0 is needed
    RecurrenceOverflowError
        on the first non-finite value
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    xs = np.asarray(x, dtype=float)
    values = np.empty((N + 1,) + xs.shape)
    values[0] = 1.0
    if N == 0:
        return EvaluationTable(x=x, values=values, N=0, max_residual=0.0)

    _, _, raw_gamma = seq.coefficients(N - 1)
    bad = np.flatnonzero(~(raw_gamma > 0))
    if bad.size:
        n = int(bad[0])
        raise InvalidSequenceError(f"{seq.name}: gamma_{n} = {raw_gamma[n]!r} is not positive")
    al, be, ga = seq.recurrence_arrays(N - 1)

    prev = np.zeros(xs.shape)
    cur = values[0]
    worst = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(N):
            nxt = ((xs - be[n]) * cur - al[n] * prev) / ga[n]
            if not np.all(np.isfinite(nxt)):
                k = _first_bad_column(nxt)
                raise RecurrenceOverflowError(n + 1, float(np.atleast_1d(xs)[k]))
            values[n + 1] = nxt
            t1, t2, t3 = np.abs(ga[n] * nxt), np.abs(be[n] * cur), np.abs(al[n] * prev)
            scale = np.maximum(np.maximum(t1, t2), np.maximum(t3, 1.0))
            res = np.abs(xs * cur - ga[n] * nxt - be[n] * cur - al[n] * prev) / scale
            worst = max(worst, float(np.max(res)))
            prev, cur = cur, nxt
    return EvaluationTable(x=x, values=values, N=N, max_residual=worst)


def check_normalization(seq: CoefficientSequence, N: int, tol: float = ROW_SUM_TOL) -> NormalizationCheck:
    """Whether alpha_n + beta_n + gamma_n = 1 for all n <= N, with the worst deviation."""
    al, be, ga = seq.coefficients(N)
    dev = np.abs(al + be + ga - 1.0)
    worst = int(np.argmax(dev))
    return NormalizationCheck(bool(dev[worst] <= tol), float(dev[worst]), worst)


def normalize_at_one(
    seq: CoefficientSequence, N: int
) -> tuple[CoefficientSequence, NormalizationLedger]:
    """Coefficients of p_n(x)/p_n(1), valid for n <= N, plus the endpoint ledger.

    Only the ratios p_{n+1}(1)/p_n(1) are propagated, so the transformed
    coefficients stay finite even when p_n(1) itself grows geometrically.
    """
    if seq.half_line:
        raise InvalidSequenceError("normalize_at_one expects an interval-form sequence")
    al, be, ga = seq.coefficients(N)
    rho = np.empty(N + 1)  # rho[n] = p_{n+1}(1) / p_n(1)
    back = 0.0  # p_{n-1}(1) / p_n(1)
    for n in range(N + 1):
        r = ((1.0 - be[n]) - al[n] * back) / ga[n]
        if not (np.isfinite(r) and r > 0):
            raise NormalizationError(n + 1, float(r))
        rho[n] = r
        back = 1.0 / r

    ratios = np.concatenate(([0.0], 1.0 / rho))
    with np.errstate(over="ignore", invalid="ignore"):
        endpoint = np.concatenate(([1.0], np.cumprod(rho)))
        c = endpoint[: N + 1] ** 2 * (1.0 - ratios[: N + 1] / ratios[1 : N + 2])
    alpha_t = al * ratios[: N + 1]
    gamma_t = ga * rho
    limits = (0.5, 0.5) if seq.declared_limits is not None else None
    normalized = CoefficientSequence.from_arrays(
        alpha_t,
        be,
        gamma_t,
        symmetric=seq.symmetric,
        row_sum_constant=1.0,
        declared_limits=limits,
        name=f"{seq.name}|normalized",
    )
    return normalized, NormalizationLedger(endpoint_values=endpoint, ratios=ratios, c=c)


def half_line_transform(seq_half: CoefficientSequence, *, strict: bool = False) -> CoefficientSequence:
    """Interval-form coefficients of q_n(x) = p_n(1 - x).

    alpha and gamma carry over unchanged and beta_n = 1 - alpha_n - gamma_n,
    so the result is normalized at x = 1.  ``strict`` additionally demands
    gamma_0 = 1.
    """
    if not seq_half.half_line:
        raise InvalidSequenceError("half_line_transform expects a half-line sequence")
    al, _, ga = seq_half.coefficients(0)
    if al[0] != 0.0:
        raise InvalidSequenceError(f"half-line normalization requires alpha_0 = 0, got {al[0]!r}")
    if strict and ga[0] != 1.0:
        raise InvalidSequenceError(f"half-line normalization requires gamma_0 = 1, got {ga[0]!r}")

    alpha, gamma = seq_half.alpha, seq_half.gamma

    def beta(n):
        return 1.0 - np.asarray(alpha(n), dtype=float) - np.asarray(gamma(n), dtype=float)

    return replace(
        seq_half,
        beta=beta,
        half_line=False,
        symmetric=False,
        row_sum_constant=1.0,
        declared_limits=None,
        name=f"{seq_half.name}|shifted",
    )
