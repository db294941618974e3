"""Sufficient conditions for Turan positivity, checked coefficient by coefficient.

Every check is a finite verification: it inspects indices up to a horizon N
and records that horizon in the verdict.  Comparisons allow a slack of
1e-12 * max(1, |lhs|, |rhs|) so that families sitting exactly on a boundary
(Chebyshev, Legendre) are not rejected by rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

import numpy as np

from .errors import PreconditionError, WrongCriterionError
from .recurrence import CoefficientSequence

__all__ = [
    "Criterion",
    "Failure",
    "CriterionVerdict",
    "ThmFourWitness",
    "InitCheck",
    "SigmaSequence",
    "check_thm1",
    "check_cor1",
    "check_thm4_init",
    "check_thm4_condition",
    "check_thm4",
    "check_thm5",
    "check_prop3_hypothesis",
    "check_sigma_transfer",
    "renormalize",
    "DEFAULT_HORIZON",
]

DEFAULT_HORIZON = 1000
SLACK = 1e-12


class Criterion(str, Enum):
    THM1_I = "Thm1_i"
    THM1_II = "Thm1_ii"
    COR1_I = "Cor1_i"
    COR1_II = "Cor1_ii"
    THM4 = "Thm4"
    THM5_I = "Thm5_i"
    THM5_II = "Thm5_ii"
    PROP3_HYPOTHESIS = "Prop3_hypothesis"
    PROP2_SIGMA = "Prop2_sigma"


@dataclass(frozen=True)
class Failure:
    n: int
    condition: str
    margin: float


@dataclass
class CriterionVerdict:
    """Outcome of one criterion over indices up to ``verified_to``.

    ``per_n_margins[k]`` is the smallest slack among the inequalities at the
    k-th checked index; negative means violated.
    """

    criterion: Criterion
    holds: bool
    verified_to: int
    first_failure: Failure | None = None
    per_n_margins: list[float] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.criterion = Criterion(self.criterion)
        if self.holds != (self.first_failure is None):
            raise ValueError("holds must be True exactly when first_failure is absent")


def _tol(*arrays) -> np.ndarray:
    scale = np.ones(np.broadcast(*arrays).shape)
    for a in arrays:
        scale = np.maximum(scale, np.abs(a))
    return SLACK * scale


class _Checks:
    """Named margin arrays over a common index range; margin >= -tol passes."""

    def __init__(self, ns: np.ndarray):
        self.ns = ns
        self.items: list[tuple[str, np.ndarray, np.ndarray]] = []

    def add(self, label: str, margin, tol) -> None:
        margin = np.broadcast_to(np.asarray(margin, dtype=float), self.ns.shape)
        tol = np.broadcast_to(np.asarray(tol, dtype=float), self.ns.shape)
        self.items.append((label, margin, tol))

    def first_failure(self) -> Failure | None:
        best = None
        for label, margin, tol in self.items:
            bad = np.flatnonzero(margin < -tol)
            if bad.size and (best is None or bad[0] < best[0]):
                best = (int(bad[0]), label, float(margin[bad[0]]))
        if best is None:
            return None
        i, label, m = best
        return Failure(int(self.ns[i]), label, m)

    def margins(self) -> list[float]:
        if not self.items or self.ns.size == 0:
            return []
        return np.min(np.stack([m for _, m, _ in self.items]), axis=0).tolist()

    def verdict(self, criterion: Criterion, verified_to: int, **details) -> CriterionVerdict:
        failure = self.first_failure()
        return CriterionVerdict(
            criterion=criterion,
            holds=failure is None,
            verified_to=verified_to,
            first_failure=failure,
            per_n_margins=self.margins(),
            details=details,
        )


def _constant_row_sum(seq: CoefficientSequence, al, be, ga) -> float:
    sums = al + be + ga
    a = float(sums[0])
    bad = np.flatnonzero(np.abs(sums - a) > SLACK * max(1.0, abs(a)))
    if bad.size:
        n = int(bad[0])
        raise PreconditionError(
            f"{seq.name}: alpha_n + gamma_n is not constant (n={n} gives {sums[n]!r}, n=0 gives {a!r})"
        )
    return a


def _require_symmetric(seq: CoefficientSequence, what: str) -> None:
    if seq.half_line or not seq.symmetric:
        raise WrongCriterionError(f"{what} applies to symmetric interval-form sequences only")


def check_thm1(
    seq: CoefficientSequence, N: int = DEFAULT_HORIZON
) -> tuple[CriterionVerdict, CriterionVerdict]:
    """Symmetric criterion with alpha_n + gamma_n = a; returns verdicts for (i) and (ii).

    (i)  alpha_n nondecreasing and alpha_n <= a/2 for n >= 1
    (ii) alpha_n nonincreasing and alpha_n >= a/2 for n >= 1
    """
    _require_symmetric(seq, "Theorem 1")
    al, be, ga = seq.coefficients(N)
    a = _constant_row_sum(seq, al, be, ga)
    if a <= 0:
        raise PreconditionError(f"row sum a={a!r} must be positive")
    dal, _ = seq.increments(N)
    ns = np.arange(1, N + 1)
    al_n = al[1:]
    from_two = ns >= 2  # alpha_0 = 0 is excluded from the monotonicity comparison
    step_tol = _tol(al_n)
    half = a / 2

    first = _Checks(ns)
    first.add("alpha nondecreasing", np.where(from_two, dal, np.inf), step_tol)
    first.add("alpha <= a/2", half - al_n, _tol(al_n, half))
    second = _Checks(ns)
    second.add("alpha nonincreasing", np.where(from_two, -dal, np.inf), step_tol)
    second.add("alpha >= a/2", al_n - half, _tol(al_n, half))
    return (
        first.verdict(Criterion.THM1_I, N, a=a),
        second.verdict(Criterion.THM1_II, N, a=a),
    )


def check_cor1(seq: CoefficientSequence, N: int = DEFAULT_HORIZON) -> CriterionVerdict:
    """Symmetric criterion for sequences not yet normalized at x = 1.

    Needs declared limits lim alpha_n = a/2 and lim gamma_n = 1/(2a) with
    0 < a <= 1 (a = 1 is accepted and flagged as the boundary case).  Checks
    that alpha_n and alpha_n + gamma_n are nondecreasing, that the tail moves
    toward the declared limits, and then sub-condition (i) gamma_n
    nondecreasing or (ii) gamma_0 >= 1.  The verdict's criterion names the
    sub-condition that fired.
    """
    _require_symmetric(seq, "Corollary 1")
    if seq.declared_limits is None:
        raise PreconditionError(f"{seq.name}: Corollary 1 needs declared limits of alpha_n and gamma_n")
    lim_al, lim_ga = map(float, seq.declared_limits)
    a = 2.0 * lim_al
    if not 0.0 < a <= 1.0 + SLACK:
        raise PreconditionError(f"declared lim alpha_n = {lim_al!r} gives a = {a!r} outside (0, 1]")
    if abs(lim_ga - 1.0 / (2.0 * a)) > SLACK * max(1.0, lim_ga):
        raise PreconditionError(
            f"declared lim gamma_n = {lim_ga!r} does not equal 1/(2a) = {1.0 / (2.0 * a)!r}"
        )
    boundary = abs(a - 1.0) <= SLACK

    al, _, ga = seq.coefficients(N)
    dal, dga = seq.increments(N)
    ns = np.arange(1, N + 1)
    common = _Checks(ns)
    common.add("alpha nondecreasing", dal, _tol(al[1:]))
    common.add("alpha+gamma nondecreasing", dal + dga, _tol(al[1:], ga[1:]))
    tail_start = N - max(1, N // 10)
    in_tail = ns > tail_start
    for label, vals, lim in (("alpha", al, lim_al), ("gamma", ga, lim_ga)):
        dist = np.abs(vals - lim)
        approach = np.where(in_tail, dist[:-1] - dist[1:], np.inf)
        common.add(f"|{label} - limit| nonincreasing in tail", approach, _tol(vals[1:], lim))

    gamma_up = _Checks(ns)
    gamma_up.add("i: gamma nondecreasing", dga, _tol(ga[1:]))
    sub_i = gamma_up.first_failure() is None
    sub_ii = bool(ga[0] >= 1.0 - SLACK)

    details = {"a": a, "boundary_a_equals_1": boundary, "sub_conditions": {"i": sub_i, "ii": sub_ii}}
    base = common.first_failure()
    margins = common.margins()
    if base is not None:
        return CriterionVerdict(Criterion.COR1_I, False, N, base, margins, details)
    if sub_i:
        return CriterionVerdict(Criterion.COR1_I, True, N, None, margins, details)
    if sub_ii:
        return CriterionVerdict(Criterion.COR1_II, True, N, None, margins, details)
    gfail = gamma_up.first_failure()
    failure = Failure(
        gfail.n,
        f"neither sub-condition: {gfail.condition}; ii: gamma_0 = {float(ga[0])!r} < 1",
        gfail.margin,
    )
    return CriterionVerdict(Criterion.COR1_I, False, N, failure, margins, details)


@dataclass(frozen=True)
class InitCheck:
    """Initial inequality of the nonsymmetric criterion.

    ``linear_factor_min`` is min over x in {-1, 1} of
    (gamma_0 - gamma_1)(x - beta_0) + alpha_1 gamma_0, the factor that
    multiplies (1 - x) in gamma_0^2 gamma_1 Delta_1(x); Delta_1 >= 0 on
    [-1, 1] exactly when it is nonnegative.
    """

    holds: bool
    margin: float
    linear_factor_min: float


def _require_unit_row_sums(seq: CoefficientSequence, N: int):
    if seq.half_line:
        raise WrongCriterionError("Theorem 4 applies to interval-form sequences")
    al, be, ga = seq.coefficients(N)
    dev = np.abs(al + be + ga - 1.0)
    bad = np.flatnonzero(dev > SLACK)
    if bad.size:
        raise PreconditionError(f"{seq.name}: row sum at n={int(bad[0])} is not 1")
    return al, be, ga


def check_thm4_init(seq: CoefficientSequence) -> InitCheck:
    """|gamma_0 - gamma_1| <= alpha_1 gamma_0 - (gamma_0 - gamma_1)(1 - gamma_0)."""
    al, be, ga = _require_unit_row_sums(seq, 1)
    g0, g1, a1, b0 = float(ga[0]), float(ga[1]), float(al[1]), float(be[0])
    lhs = abs(g0 - g1)
    rhs = a1 * g0 - (g0 - g1) * (1.0 - g0)
    margin = rhs - lhs
    factor = min((g0 - g1) * (x - b0) + a1 * g0 for x in (-1.0, 1.0))
    return InitCheck(margin >= -SLACK * max(1.0, lhs, abs(rhs)), margin, factor)


@dataclass(frozen=True)
class ThmFourWitness:
    """Per-index evidence for the nonsymmetric criterion.

    ``discriminant`` is (beta_n + 1)^2 - 4 alpha_n gamma_n and ``roots`` the
    roots r1 <= r2 of B(-1; t) = gamma_n t^2 - (beta_n + 1) t + alpha_n
    (None when the discriminant is negative).  ``roots_plus`` are the roots
    of B(1; t), which are -1 and -alpha_n/gamma_n under unit row sums.
    """

    n: int
    holds: bool
    condition_used: str | None
    branch: str | None
    satisfied: tuple[str, ...]
    discriminant: float
    roots: tuple[float, float] | None
    roots_plus: tuple[float, float] | None
    margins: dict[str, float]


def _ratio(num: float, den: float) -> float | None:
    """num/den, with None standing for 0/0 (A(t) vanishes identically)."""
    if den == 0.0:
        if num == 0.0:
            return None
        return math.copysign(math.inf, num)
    return num / den


def _le(lhs: float | None, rhs: float | None) -> tuple[bool, float]:
    if lhs is None or rhs is None:
        return True, math.inf
    if lhs == rhs:
        return True, 0.0
    margin = rhs - lhs
    scale = max(1.0, abs(lhs) if math.isfinite(lhs) else 1.0, abs(rhs) if math.isfinite(rhs) else 1.0)
    return margin >= -SLACK * scale, margin


def _all(*parts: tuple[bool, float]) -> tuple[bool, float]:
    return all(ok for ok, _ in parts), min(m for _, m in parts)


def _any(*parts: tuple[bool, float]) -> tuple[bool, float]:
    return any(ok for ok, _ in parts), max(m for _, m in parts)


def _negative(value: float) -> tuple[bool, float]:
    return value < 0.0, -value


def _roots(s: float, disc: float, a: float, g: float) -> tuple[float, float] | None:
    """Roots of g t^2 - s t + a, ordered, using the product a/g to avoid cancellation."""
    if disc < 0:
        return None
    big = (s + math.copysign(math.sqrt(disc), s)) / (2.0 * g)
    if big == 0.0:
        return 0.0, 0.0
    small = a / (g * big)
    return (small, big) if small <= big else (big, small)


def _thm4_at(n: int, al, be, ga, dal, dga) -> ThmFourWitness:
    a, b, g = float(al[n]), float(be[n]), float(ga[n])
    da, dg = float(dal[n - 1]), float(dga[n - 1])
    # with a + b + g = 1: (b + 1)^2 - 4ag = 4b + (a - g)^2 and (b - 1)^2 - 4ag = (a - g)^2
    disc = 4.0 * b + (a - g) ** 2
    roots = _roots(b + 1.0, disc, a, g)
    roots_plus = _roots(b - 1.0, (a - g) ** 2, a, g)

    up_a, down_a = _le(0.0, da), _le(da, 0.0)
    up_g, down_g = _le(0.0, dg), _le(dg, 0.0)
    no_roots = _negative(disc)

    # (i) alpha_{n-1} <= alpha_n <= gamma_n <= gamma_{n-1}, r2(-1) <= (da)/(-dg) or disc < 0
    root_i = _le(roots[1], _ratio(da, -dg)) if roots else (False, -math.inf)
    cond_i = _all(up_a, _le(a, g), down_g, _any(root_i, no_roots))
    branch_i = "root" if root_i[0] else "discriminant"

    # (ii) alpha_{n-1} >= alpha_n >= gamma_n >= gamma_{n-1}, r1(-1) >= (-da)/(dg) or disc < 0
    root_ii = _le(_ratio(-da, dg), roots[0]) if roots else (False, -math.inf)
    cond_ii = _all(down_a, _le(g, a), up_g, _any(root_ii, no_roots))
    branch_ii = "root" if root_ii[0] else "discriminant"

    # (iii) alpha_{n-1} >= alpha_n >= 1/2, gamma_{n-1} >= gamma_n >= 1/2,
    #       da/dg <= alpha_n/gamma_n <= 1  or  da/dg >= alpha_n/gamma_n >= 1
    rho, t = _ratio(da, dg), a / g
    below = _all(_le(rho, t), _le(t, 1.0))
    above = _all(_le(t, rho), _le(1.0, t))
    cond_iii = _all(down_a, _le(0.5, a), down_g, _le(0.5, g), _any(below, above))
    branch_iii = "ratio<=alpha/gamma<=1" if below[0] else "ratio>=alpha/gamma>=1"

    # (iv) alpha, gamma nondecreasing; (alpha_n <= gamma_n, da >= dg) or (alpha_n >= gamma_n, da <= dg)
    lower = _all(_le(a, g), _le(dg, da))
    upper = _all(_le(g, a), _le(da, dg))
    cond_iv = _all(up_a, up_g, _any(lower, upper))
    branch_iv = "alpha<=gamma" if lower[0] else "alpha>=gamma"

    results = {
        "i": (cond_i, branch_i),
        "ii": (cond_ii, branch_ii),
        "iii": (cond_iii, branch_iii),
        "iv": (cond_iv, branch_iv),
    }
    satisfied = tuple(k for k, ((ok, _), _) in results.items() if ok)
    used = satisfied[0] if satisfied else None
    return ThmFourWitness(
        n=n,
        holds=bool(satisfied),
        condition_used=used,
        branch=results[used][1] if used else None,
        satisfied=satisfied,
        discriminant=disc,
        roots=roots,
        roots_plus=roots_plus,
        margins={k: m for k, ((_, m), _) in results.items()},
    )


def check_thm4_condition(seq: CoefficientSequence, n: int) -> ThmFourWitness:
    """Evaluate the four alternative conditions of the nonsymmetric criterion at index n >= 2."""
    if n < 2:
        raise ValueError("the per-index conditions start at n = 2")
    al, be, ga = _require_unit_row_sums(seq, n)
    dal, dga = seq.increments(n)
    return _thm4_at(n, al, be, ga, dal, dga)


def check_thm4(seq: CoefficientSequence, N: int = DEFAULT_HORIZON) -> CriterionVerdict:
    """Initial inequality plus one of conditions (i)-(iv) at every 2 <= n <= N.

    Different indices may use different conditions.
    """
    init = check_thm4_init(seq)
    al, be, ga = _require_unit_row_sums(seq, N)
    dal, dga = seq.increments(N)
    usage: dict[str, int] = {}
    margins: list[float] = []
    failure = None if init.holds else Failure(1, "initial inequality", init.margin)
    for n in range(2, N + 1):
        w = _thm4_at(n, al, be, ga, dal, dga)
        margins.append(max(w.margins.values()))
        if w.holds:
            usage[w.condition_used] = usage.get(w.condition_used, 0) + 1
        elif failure is None:
            failure = Failure(n, "none of conditions i-iv", margins[-1])
    return CriterionVerdict(
        Criterion.THM4,
        failure is None,
        N,
        failure,
        margins,
        {"init_margin": init.margin, "condition_usage": usage},
    )


def _require_half_line(seq: CoefficientSequence, what: str) -> None:
    if not seq.half_line:
        raise WrongCriterionError(f"{what} applies to half-line sequences only")


def check_thm5(
    seq_half: CoefficientSequence, N: int = DEFAULT_HORIZON
) -> tuple[CriterionVerdict, CriterionVerdict]:
    """Half-line criterion; returns verdicts for (i) and (ii).

    Both require alpha_n and gamma_n nondecreasing, then
    (i)  alpha_n <= gamma_n and alpha_n - alpha_{n-1} >= gamma_n - gamma_{n-1}
    (ii) alpha_n >= gamma_n and alpha_n - alpha_{n-1} <= gamma_n - gamma_{n-1}
    for 1 <= n <= N.
    """
    _require_half_line(seq_half, "Theorem 5")
    al, _, ga = seq_half.coefficients(N)
    dal, dga = seq_half.increments(N)
    ns = np.arange(1, N + 1)
    a, g = al[1:], ga[1:]
    verdicts = []
    for criterion, sign in ((Criterion.THM5_I, 1.0), (Criterion.THM5_II, -1.0)):
        checks = _Checks(ns)
        checks.add("hypothesis: alpha nondecreasing", dal, _tol(a))
        checks.add("hypothesis: gamma nondecreasing", dga, _tol(g))
        rel = "<=" if sign > 0 else ">="
        checks.add(f"alpha {rel} gamma", sign * (g - a), _tol(a, g))
        checks.add(f"alpha step {'>=' if sign > 0 else '<='} gamma step", sign * (dal - dga), _tol(dal, dga))
        verdicts.append(checks.verdict(criterion, N))
    return verdicts[0], verdicts[1]


def check_prop3_hypothesis(seq_half: CoefficientSequence, N: int = DEFAULT_HORIZON) -> CriterionVerdict:
    """Equal increments alpha_n - alpha_{n-1} = gamma_n - gamma_{n-1} for 1 <= n <= N.

    ``details['alpha_nondecreasing']`` reports whether the sum-of-squares
    form is also guaranteed nonnegative.
    """
    _require_half_line(seq_half, "Proposition 3")
    al, _, ga = seq_half.coefficients(N)
    dal, dga = seq_half.increments(N)
    checks = _Checks(np.arange(1, N + 1))
    checks.add("alpha step == gamma step", -np.abs(dal - dga), _tol(al[1:], ga[1:]))
    nondecreasing = bool(np.all(dal >= -_tol(al[1:])))
    return checks.verdict(Criterion.PROP3_HYPOTHESIS, N, alpha_nondecreasing=nondecreasing)


@dataclass(frozen=True)
class SigmaSequence:
    """Positive renormalization constants sigma_n.

    ``log_sigma`` may be supplied for sequences that overflow in floating
    point, such as 2**(n**2).
    """

    sigma: Callable[[np.ndarray], np.ndarray]
    log_sigma: Callable[[np.ndarray], np.ndarray] | None = None

    def logs(self, N: int) -> np.ndarray:
        n = np.arange(N + 1)
        if self.log_sigma is not None:
            return np.broadcast_to(np.asarray(self.log_sigma(n), dtype=float), n.shape)
        s = np.broadcast_to(np.asarray(self.sigma(n), dtype=float), n.shape)
        bad = np.flatnonzero(~(s > 0))
        if bad.size:
            raise ValueError(f"sigma_{int(bad[0])} = {s[bad[0]]!r} is not positive")
        return np.log(s)


def check_sigma_transfer(sigma: SigmaSequence, N: int = DEFAULT_HORIZON) -> CriterionVerdict:
    """Log-concavity sigma_n^2 >= sigma_{n-1} sigma_{n+1} for 1 <= n <= N.

    Margins are 1 - sigma_{n-1} sigma_{n+1} / sigma_n^2.
    """
    logs = sigma.logs(N + 1)
    gap = 2.0 * logs[1:-1] - logs[:-2] - logs[2:]
    checks = _Checks(np.arange(1, N + 1))
    checks.add("sigma_n^2 >= sigma_(n-1) sigma_(n+1)", -np.expm1(-gap), _tol(2.0 * logs[1:-1]))
    return checks.verdict(Criterion.PROP2_SIGMA, N)


def renormalize(seq: CoefficientSequence, sigma: SigmaSequence) -> CoefficientSequence:
    """Recurrence for sigma_n p_n / sigma_0, so that the new p_0 is still 1."""
    from dataclasses import replace

    if seq.half_line:
        raise WrongCriterionError("renormalize expects an interval-form sequence")

    def log_s(n):
        n = np.asarray(n)
        if sigma.log_sigma is not None:
            return np.asarray(sigma.log_sigma(n), dtype=float)
        return np.log(np.asarray(sigma.sigma(n), dtype=float))

    alpha, gamma = seq.alpha, seq.gamma

    def new_alpha(n):
        n = np.asarray(n)
        prev = np.maximum(n - 1, 0)
        return np.asarray(alpha(n), dtype=float) * np.exp(log_s(n) - log_s(prev))

    def new_gamma(n):
        n = np.asarray(n)
        return np.asarray(gamma(n), dtype=float) * np.exp(log_s(n) - log_s(n + 1))

    return replace(
        seq,
        alpha=new_alpha,
        gamma=new_gamma,
        row_sum_constant=None,
        declared_limits=None,
        alpha_step=None,
        gamma_step=None,
        name=f"{seq.name}|renormalized",
    )
