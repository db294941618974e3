"""Turan determinants, computed directly and through the recurrence identities.

All values are the plain determinant p_n^2 - p_{n-1} p_{n+1}; identities that
produce gamma_n * Delta_n are divided back by gamma_n before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, WrongCriterionError
from .recurrence import CoefficientSequence, EvaluationTable, eval_polynomials

__all__ = [
    "DeterminantSample",
    "turan_direct",
    "turan_identity",
    "identity2_chain",
    "identity_spread",
    "sample_determinants",
    "prop3_sum",
    "INCREMENT_TOL",
]

INCREMENT_TOL = 1e-12
_LOG_PRODUCT_THRESHOLD = 60


@dataclass(frozen=True)
class DeterminantSample:
    n: int
    x: float
    delta_direct: float
    delta_id1: float
    delta_id2: float
    delta_id3: float
    max_cross_residual: float


def _check_index(table: EvaluationTable, n: int) -> None:
    if not 1 <= n <= table.N - 1:
        raise IndexError(f"Turan determinant index n={n} outside 1..{table.N - 1}")


def turan_direct(table: EvaluationTable, n: int):
    """p_n^2 - p_{n-1} p_{n+1} straight from the table."""
    _check_index(table, n)
    p = table.values
    return p[n] ** 2 - p[n - 1] * p[n + 1]


def _require_row_sum(seq: CoefficientSequence, which: int) -> float:
    s = seq.effective_row_sum
    if s is None:
        raise PreconditionError(
            f"identity {which} needs constant row sums alpha_n + beta_n + gamma_n"
        )
    return s


def identity2_chain(table: EvaluationTable, seq: CoefficientSequence, n_max: int) -> np.ndarray:
    """Delta_0..Delta_{n_max} accumulated with the second identity from Delta_0 = 1."""
    _require_row_sum(seq, 2)
    if n_max > table.N - 1:
        raise IndexError(f"n_max={n_max} needs p_{n_max + 1}, table stops at N={table.N}")
    al, _, ga = seq.recurrence_arrays(n_max)
    p = table.values
    out = np.empty((n_max + 1,) + np.shape(p[0]))
    out[0] = 1.0
    for k in range(1, n_max + 1):
        out[k] = (
            (p[k - 1] - p[k]) * ((ga[k - 1] - ga[k]) * p[k] + (al[k] - al[k - 1]) * p[k - 1])
            + al[k - 1] * out[k - 1]
        ) / ga[k]
    return out


def turan_identity(table: EvaluationTable, seq: CoefficientSequence, n: int, which: int):
    """Delta_n through one of the three recurrence identities.

    1: gamma_n Delta_n = gamma_n p_n^2 + alpha_n p_{n-1}^2 - (x - beta_n) p_{n-1} p_n
    2: gamma_n Delta_n = (p_{n-1} - p_n)[(gamma_{n-1} - gamma_n) p_n
                          + (alpha_n - alpha_{n-1}) p_{n-1}] + alpha_{n-1} Delta_{n-1}
    3: gamma_n Delta_n = (p_n - p_{n-1})(gamma_n p_n - alpha_n p_{n-1}) + (a - x) p_{n-1} p_n

    where a is the constant row sum (1 after normalization at x = 1).
    Identity 1 holds for any recurrence; 2 and 3 need constant row sums.
    """
    _check_index(table, n)
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    if which == 2:
        return identity2_chain(table, seq, n)[n]
    al, be, ga = seq.recurrence_arrays(n)
    p = table.values
    x = np.asarray(table.x, dtype=float)
    if which == 1:
        return (ga[n] * p[n] ** 2 + al[n] * p[n - 1] ** 2 - (x - be[n]) * p[n - 1] * p[n]) / ga[n]
    a = _require_row_sum(seq, 3)
    return (
        (p[n] - p[n - 1]) * (ga[n] * p[n] - al[n] * p[n - 1]) + (a - x) * p[n - 1] * p[n]
    ) / ga[n]


def identity_spread(table: EvaluationTable, seq: CoefficientSequence) -> np.ndarray:
    """Relative disagreement between all available formulas for n = 1..N-1.

    Entry [n-1] is (max - min) / max(1, |direct|) over the direct value and
    every identity that applies to ``seq``.
    """
    n_max = table.N - 1
    if n_max < 1:
        return np.zeros((0,) + np.shape(table.values[0]))
    p = table.values
    al, be, ga = seq.recurrence_arrays(n_max)
    x = np.asarray(table.x, dtype=float)
    shape = (n_max,) + (1,) * x.ndim
    pm, pn, pp = p[: n_max], p[1 : n_max + 1], p[2 : n_max + 2]
    a_n, b_n, g_n = (arr[1:].reshape(shape) for arr in (al, be, ga))

    direct = pn**2 - pm * pp
    candidates = [direct, (g_n * pn**2 + a_n * pm**2 - (x - b_n) * pm * pn) / g_n]
    s = seq.effective_row_sum
    if s is not None:
        candidates.append(((pn - pm) * (g_n * pn - a_n * pm) + (s - x) * pm * pn) / g_n)
        candidates.append(identity2_chain(table, seq, n_max)[1:])
    stack = np.stack(candidates)
    return (stack.max(axis=0) - stack.min(axis=0)) / np.maximum(1.0, np.abs(direct))


def sample_determinants(seq: CoefficientSequence, x: float, n: int) -> DeterminantSample:
    """All four formulas for Delta_n at a single abscissa."""
    table = eval_polynomials(seq, float(x), n + 1)
    direct = float(turan_direct(table, n))
    vals = [float(turan_identity(table, seq, n, w)) for w in (1, 2, 3)]
    spread = (max(direct, *vals) - min(direct, *vals)) / max(1.0, abs(direct))
    return DeterminantSample(n, float(x), direct, vals[0], vals[1], vals[2], spread)


def _first_increment_mismatch(seq: CoefficientSequence, n: int) -> int | None:
    dal, dga = seq.increments(n)
    al, _, ga = seq.coefficients(n)
    tol = INCREMENT_TOL * np.maximum(1.0, np.maximum(np.abs(al[1:]), np.abs(ga[1:])))
    bad = np.flatnonzero(np.abs(dal - dga) > tol)
    return int(bad[0]) + 1 if bad.size else None


def prop3_sum(seq_half: CoefficientSequence, x, n: int):
    """Turan determinant of a half-line sequence written as a weighted sum of squares.

    Requires alpha_k - alpha_{k-1} = gamma_k - gamma_{k-1} for k = 1..n.  Returns

        sum_{k=1}^{n} (alpha_k - alpha_{k-1}) * (alpha_k ... alpha_{n-1})
                      / (gamma_k ... gamma_n) * (p_k(x) - p_{k-1}(x))^2

    with the empty product equal to 1 when k = n.
    """
    if not seq_half.half_line:
        raise WrongCriterionError("prop3_sum applies to half-line sequences only")
    if n < 1:
        raise IndexError("prop3_sum needs n >= 1")
    bad = _first_increment_mismatch(seq_half, n)
    if bad is not None:
        raise PreconditionError(
            f"alpha_n - alpha_(n-1) != gamma_n - gamma_(n-1) first at n={bad}"
        )
    al, _, ga = seq_half.coefficients(n)
    dal, _ = seq_half.increments(n)
    p = eval_polynomials(seq_half, x, n).values

    if n > _LOG_PRODUCT_THRESHOLD:
        # suffix sums: log_al[k] = sum_{j=k}^{n-1} log alpha_j, log_ga[k] = sum_{j=k}^{n} log gamma_j
        log_al = np.concatenate((np.cumsum(np.log(al[1:n])[::-1])[::-1], [0.0]))
        log_ga = np.cumsum(np.log(ga[1 : n + 1])[::-1])[::-1]
        weights = dal * np.exp(log_al - log_ga)
    else:
        weights = np.array(
            [dal[k - 1] * np.prod(al[k:n]) / np.prod(ga[k : n + 1]) for k in range(1, n + 1)]
        )
    diffs = p[1 : n + 1] - p[:n]
    shape = (n,) + (1,) * (diffs.ndim - 1)
    return np.sum(weights.reshape(shape) * diffs**2, axis=0)
