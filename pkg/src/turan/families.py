"""Built-in coefficient sequences and independent closed-form oracles.

Families that cannot be written down directly in normalized form
(q-ultraspherical, Pollaczek) are returned as auxiliary sequences; use
``working_sequence`` to obtain the coefficients normalized at x = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import mpmath
import numpy as np

from .errors import FamilySpecError, InvalidSequenceError
from .recurrence import CoefficientSequence, normalize_at_one, zero_coefficient

__all__ = [
    "FAMILY_NAMES",
    "PolynomialFamily",
    "make_ultraspherical",
    "make_legendre",
    "make_chebyshev",
    "make_q_ultraspherical",
    "make_pollaczek",
    "make_laguerre",
    "make_sec6_example",
    "build_family",
    "family_from_spec",
    "load_spec",
    "working_sequence",
    "oracle_value",
]

FAMILY_NAMES = (
    "ultraspherical",
    "legendre",
    "chebyshev",
    "q_ultraspherical",
    "q_ultraspherical_pos",
    "q_ultraspherical_nonpos",
    "pollaczek",
    "laguerre",
    "sec6_example",
    "custom",
)


def _as_float(n) -> np.ndarray:
    return np.asarray(n, dtype=float)


def make_ultraspherical(lam: float) -> CoefficientSequence:
    """Ultraspherical polynomials normalized at x = 1.

    gamma_n = (n + 2 lam)/(2n + 2 lam) and alpha_n = n/(2n + 2 lam).  At
    lam = 0 the n = 0 coefficients are the Chebyshev limit alpha_0 = 0,
    gamma_0 = 1.
    """
    lam = float(lam)
    if not lam > -0.5:
        raise FamilySpecError(f"ultraspherical needs lambda > -1/2, got {lam!r}")

    def alpha(n):
        n = _as_float(n)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n == 0, 0.0, n / (2 * n + 2 * lam))

    def gamma(n):
        n = _as_float(n)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n == 0, 1.0, (n + 2 * lam) / (2 * n + 2 * lam))

    def alpha_step(n):
        n = _as_float(n)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n == 1, 1.0 / (2 * (1 + lam)), lam / (2 * (n + lam) * (n - 1 + lam)))

    def gamma_step(n):
        return -alpha_step(n)

    return CoefficientSequence(
        alpha=alpha,
        beta=zero_coefficient,
        gamma=gamma,
        symmetric=True,
        row_sum_constant=1.0,
        declared_limits=(0.5, 0.5),
        alpha_step=alpha_step,
        gamma_step=gamma_step,
        name=f"ultraspherical(lambda={lam!r})",
    )


def make_legendre() -> CoefficientSequence:
    return _renamed(make_ultraspherical(0.5), "legendre")


def make_chebyshev() -> CoefficientSequence:
    return _renamed(make_ultraspherical(0.0), "chebyshev")


def _renamed(seq: CoefficientSequence, name: str) -> CoefficientSequence:
    from dataclasses import replace

    return replace(seq, name=name)


def _check_q_domain(beta: float, q: float) -> None:
    if not 0.0 < q < 1.0:
        raise FamilySpecError(f"q-ultraspherical needs 0 < q < 1, got q={q!r}")
    if not abs(beta) < 1.0:
        raise FamilySpecError(f"q-ultraspherical needs |beta| < 1, got beta={beta!r}")


def make_q_ultraspherical(beta: float, q: float) -> CoefficientSequence:
    """Auxiliary symmetric sequence for C_n(x; beta | q).

    For 0 < beta < 1 the rescaled polynomials have
        alpha_n = sqrt(beta) (1 - q^n) / (2 (1 - beta q^n)),
        gamma_n = (1 - beta^2 q^n) / (2 sqrt(beta) (1 - beta q^n)),
    with constant row sum (sqrt(beta) + 1/sqrt(beta))/2.  For -1 < beta <= 0,
        alpha_n = (1 - q^n) / (2 (1 - beta q^n)),
        gamma_n = (1 - beta^2 q^n) / (2 (1 - beta q^n)),
    both increasing to 1/2.  In either case p_n is a positive multiple of
    C_n, so normalizing at x = 1 recovers C_n(x)/C_n(1).
    """
    beta, q = float(beta), float(q)
    _check_q_domain(beta, q)
    return _q_positive(beta, q) if beta > 0 else _q_nonpositive(beta, q)


def _q_powers(n, q):
    n = _as_float(n)
    return q**n, q ** (n - 1)


def _q_positive(beta: float, q: float) -> CoefficientSequence:
    s = math.sqrt(beta)

    def alpha(n):
        u, _ = _q_powers(n, q)
        return s * (1 - u) / (2 * (1 - beta * u))

    def gamma(n):
        u, _ = _q_powers(n, q)
        return (1 - beta**2 * u) / (2 * s * (1 - beta * u))

    def alpha_step(n):
        u, v = _q_powers(n, q)
        return s * (1 - beta) * (v - u) / (2 * (1 - beta * u) * (1 - beta * v))

    def gamma_step(n):
        return -alpha_step(n)

    return CoefficientSequence(
        alpha=alpha,
        beta=zero_coefficient,
        gamma=gamma,
        symmetric=True,
        row_sum_constant=(s + 1 / s) / 2,
        declared_limits=(s / 2, 1 / (2 * s)),
        alpha_step=alpha_step,
        gamma_step=gamma_step,
        name=f"q_ultraspherical_pos(beta={beta!r}, q={q!r})",
    )


def _q_nonpositive(beta: float, q: float) -> CoefficientSequence:
    def alpha(n):
        u, _ = _q_powers(n, q)
        return (1 - u) / (2 * (1 - beta * u))

    def gamma(n):
        u, _ = _q_powers(n, q)
        return (1 - beta**2 * u) / (2 * (1 - beta * u))

    def alpha_step(n):
        u, v = _q_powers(n, q)
        return (1 - beta) * (v - u) / (2 * (1 - beta * u) * (1 - beta * v))

    def gamma_step(n):
        return -beta * alpha_step(n)

    return CoefficientSequence(
        alpha=alpha,
        beta=zero_coefficient,
        gamma=gamma,
        symmetric=True,
        row_sum_constant=None,
        declared_limits=(0.5, 0.5),
        alpha_step=alpha_step,
        gamma_step=gamma_step,
        name=f"q_ultraspherical_nonpos(beta={beta!r}, q={q!r})",
    )


def make_pollaczek(lam: float, a: float) -> CoefficientSequence:
    """Auxiliary sequence n!/(2 lam)_n P_n^lam(x; a).

    gamma_n = (n + 2 lam)/(2(n + lam + a)), alpha_n = n/(2(n + lam + a)).
    """
    lam, a = float(lam), float(a)
    if not (lam > 0 and a > 0):
        raise FamilySpecError(f"pollaczek needs lambda > 0 and a > 0, got lambda={lam!r}, a={a!r}")
    c = lam + a

    def alpha(n):
        n = _as_float(n)
        return n / (2 * (n + c))

    def gamma(n):
        n = _as_float(n)
        return (n + 2 * lam) / (2 * (n + c))

    def alpha_step(n):
        n = _as_float(n)
        return c / (2 * (n + c) * (n - 1 + c))

    def gamma_step(n):
        n = _as_float(n)
        return (a - lam) / (2 * (n + c) * (n - 1 + c))

    return CoefficientSequence(
        alpha=alpha,
        beta=zero_coefficient,
        gamma=gamma,
        symmetric=True,
        declared_limits=(0.5, 0.5),
        alpha_step=alpha_step,
        gamma_step=gamma_step,
        name=f"pollaczek(lambda={lam!r}, a={a!r})",
    )


def make_laguerre(order: float) -> CoefficientSequence:
    """Half-line sequence of L_n^order(x)/L_n^order(0): alpha_n = n, gamma_n = n + order + 1."""
    order = float(order)
    if not order > -1:
        raise FamilySpecError(f"laguerre needs alpha > -1, got {order!r}")

    def alpha(n):
        return _as_float(n)

    def gamma(n):
        return _as_float(n) + order + 1

    def unit_step(n):
        return np.ones(np.shape(n))

    return CoefficientSequence(
        alpha=alpha,
        beta=zero_coefficient,
        gamma=gamma,
        half_line=True,
        alpha_step=unit_step,
        gamma_step=unit_step,
        name=f"laguerre(alpha={order!r})",
    )


def make_sec6_example() -> CoefficientSequence:
    """Nonsymmetric sequence alpha_n = 1/2 - 1/(n+2), gamma_n = 1/2 + 1/(2(n+2)), beta_n = 1/(2(n+2))."""

    def alpha(n):
        return 0.5 - 1.0 / (_as_float(n) + 2)

    def beta(n):
        return 0.5 / (_as_float(n) + 2)

    def gamma(n):
        return 0.5 + 0.5 / (_as_float(n) + 2)

    def alpha_step(n):
        n = _as_float(n)
        return 1.0 / ((n + 1) * (n + 2))

    def gamma_step(n):
        return -0.5 * alpha_step(n)

    return CoefficientSequence(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        row_sum_constant=1.0,
        alpha_step=alpha_step,
        gamma_step=gamma_step,
        name="sec6_example",
    )


@dataclass(frozen=True)
class PolynomialFamily:
    """A named family with its parameters and coefficient sequence.

    ``auxiliary`` marks sequences that still need ``normalize_at_one``.
    ``interval`` is the natural scan region: [-1, 1] for interval families
    and a window of [0, inf) for half-line ones.
    """

    name: str
    params: Mapping[str, float]
    sequence: CoefficientSequence
    auxiliary: bool = False
    interval: tuple[float, float] = (-1.0, 1.0)
    oracle: Callable[[int, Any], Any] | None = field(default=None, compare=False, repr=False)


_PARAM_NAMES = {
    "ultraspherical": ("lambda",),
    "legendre": (),
    "chebyshev": (),
    "q_ultraspherical": ("beta", "q"),
    "q_ultraspherical_pos": ("beta", "q"),
    "q_ultraspherical_nonpos": ("beta", "q"),
    "pollaczek": ("lambda", "a"),
    "laguerre": ("alpha",),
    "sec6_example": (),
}


def _read_params(name: str, params: Mapping[str, Any]) -> dict[str, float]:
    expected = _PARAM_NAMES[name]
    unknown = sorted(set(params) - set(expected))
    if unknown:
        raise FamilySpecError(f"{name}: unknown parameter(s) {', '.join(unknown)}; expected {list(expected)}")
    missing = [k for k in expected if k not in params]
    if missing:
        raise FamilySpecError(f"{name}: missing parameter(s) {', '.join(missing)}")
    out = {}
    for k in expected:
        try:
            out[k] = float(params[k])
        except (TypeError, ValueError):
            raise FamilySpecError(f"{name}: parameter {k}={params[k]!r} is not a number") from None
        if not math.isfinite(out[k]):
            raise FamilySpecError(f"{name}: parameter {k} must be finite")
    return out


def build_family(name: str, params: Mapping[str, Any] | None = None) -> PolynomialFamily:
    """Construct a built-in family by name."""
    params = dict(params or {})
    if name not in _PARAM_NAMES:
        raise FamilySpecError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}")
    p = _read_params(name, params)

    if name == "ultraspherical":
        lam = p["lambda"]
        seq = make_ultraspherical(lam)
        if lam == 0.0:
            oracle = _chebyshev_oracle
        elif lam == 0.5:
            oracle = _legendre_oracle
        else:
            oracle = _gegenbauer_oracle(lam)
        return PolynomialFamily(name, p, seq, oracle=oracle)
    if name == "legendre":
        return PolynomialFamily(name, p, make_legendre(), oracle=_legendre_oracle)
    if name == "chebyshev":
        return PolynomialFamily(name, p, make_chebyshev(), oracle=_chebyshev_oracle)
    if name.startswith("q_ultraspherical"):
        beta, q = p["beta"], p["q"]
        _check_q_domain(beta, q)
        if name == "q_ultraspherical_pos" and not beta > 0:
            raise FamilySpecError(f"q_ultraspherical_pos needs 0 < beta < 1, got {beta!r}")
        if name == "q_ultraspherical_nonpos" and beta > 0:
            raise FamilySpecError(f"q_ultraspherical_nonpos needs -1 < beta <= 0, got {beta!r}")
        seq = make_q_ultraspherical(beta, q)
        resolved = "q_ultraspherical_pos" if beta > 0 else "q_ultraspherical_nonpos"
        return PolynomialFamily(resolved, p, seq, auxiliary=True, oracle=_q_ultraspherical_oracle(beta, q))
    if name == "pollaczek":
        lam, a = p["lambda"], p["a"]
        return PolynomialFamily(
            name, p, make_pollaczek(lam, a), auxiliary=True, oracle=_pollaczek_oracle(lam, a)
        )
    if name == "laguerre":
        order = p["alpha"]
        return PolynomialFamily(
            name, p, make_laguerre(order), interval=(0.0, 50.0), oracle=_laguerre_oracle(order)
        )
    return PolynomialFamily(name, p, make_sec6_example())


def _float_list(spec: Mapping[str, Any], key: str, required: bool) -> list[float] | None:
    if key not in spec or spec[key] is None:
        if required:
            raise FamilySpecError(f"custom family: field '{key}' is required")
        return None
    raw = spec[key]
    if not isinstance(raw, list):
        raise FamilySpecError(f"custom family: field '{key}' must be a list of numbers")
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FamilySpecError(f"custom family: {key}[{i}] = {v!r} is not a number")
        out.append(float(v))
    return out


def family_from_spec(spec: Mapping[str, Any]) -> PolynomialFamily:
    """Build a family from its JSON description.

    Either {"family": name, "params": {...}} or
    {"family": "custom", "alpha": [...], "beta": [...], "gamma": [...],
     "limits": [la, lg], "symmetric": bool, "half_line": bool}.
    """
    if not isinstance(spec, Mapping):
        raise FamilySpecError("family spec must be a JSON object")
    name = spec.get("family")
    if not isinstance(name, str):
        raise FamilySpecError("family spec: field 'family' must be a string")
    if name != "custom":
        params = spec.get("params", {})
        if not isinstance(params, Mapping):
            raise FamilySpecError("family spec: field 'params' must be an object")
        return build_family(name, params)

    alpha = _float_list(spec, "alpha", True)
    gamma = _float_list(spec, "gamma", True)
    beta = _float_list(spec, "beta", False)
    half_line = bool(spec.get("half_line", False))
    limits = spec.get("limits")
    if limits is not None:
        limits = _float_list({"limits": limits}, "limits", True)
        if len(limits) != 2:
            raise FamilySpecError("custom family: 'limits' must have two entries [lim alpha, lim gamma]")
        limits = (limits[0], limits[1])
    symmetric = spec.get("symmetric")
    if symmetric is not None and not isinstance(symmetric, bool):
        raise FamilySpecError("custom family: 'symmetric' must be true or false")
    try:
        seq = CoefficientSequence.from_arrays(
            alpha,
            beta,
            gamma,
            symmetric=symmetric,
            declared_limits=limits,
            half_line=half_line,
            name=str(spec.get("name", "custom")),
        )
        seq.validate(seq.horizon)
    except InvalidSequenceError as exc:
        raise FamilySpecError(f"custom family: {exc}") from None
    interval = (0.0, 50.0) if half_line else (-1.0, 1.0)
    auxiliary = (not half_line) and seq.row_sum_constant != 1.0
    params = {}
    return PolynomialFamily("custom", params, seq, auxiliary=auxiliary, interval=interval)


def load_spec(source: str) -> dict:
    """Parse a family spec given inline as JSON or as a path to a JSON file."""
    text = source
    origin = "inline spec"
    stripped = source.lstrip()
    if not stripped.startswith("{"):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise FamilySpecError(f"cannot read spec file {path}: {exc.strerror}") from None
        origin = str(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilySpecError(f"{origin}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def working_sequence(family: PolynomialFamily, N: int) -> CoefficientSequence:
    """Coefficients to evaluate and scan, valid at least up to index N.

    Auxiliary families are normalized at x = 1; others are returned as is.
    """
    if family.auxiliary:
        return normalize_at_one(family.sequence, N)[0]
    return family.sequence


def oracle_value(family: PolynomialFamily, n: int, x):
    """Value of p_n(x) from an implementation independent of the recurrence engine.

    Returns None when the family has no oracle.
    """
    if family.oracle is None:
        return None
    if n < 0:
        raise ValueError("n must be non-negative")
    return family.oracle(int(n), x)


def _chebyshev_oracle(n: int, x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inside = np.cos(n * np.arccos(np.clip(x, -1.0, 1.0)))
    with np.errstate(invalid="ignore"):
        outside = np.cosh(n * np.arccosh(np.maximum(ax, 1.0))) * np.where(x < 0, (-1.0) ** n, 1.0)
    out = np.where(ax <= 1.0, inside, outside)
    return float(out) if out.ndim == 0 else out


def _legendre_oracle(n: int, x):
    # Bonnet: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    return float(cur) if cur.ndim == 0 else cur


def _ratio_oracle(step: Callable[[int], tuple[float, float, float]]):
    """Oracle for P_n(x)/P_n(1) where (k+1-term, x-term, (k-1)-term) come from ``step``.

    ``step(k)`` returns (A_k, B_k) in x P_k = A_k P_{k+1} + B_k P_{k-1}.
    Both P_n(x) and P_n(1) are run in extended precision.
    """

    def oracle(n: int, x):
        xs = np.asarray(x, dtype=float)
        flat = xs.reshape(-1)
        out = np.empty(flat.shape)
        with mpmath.workdps(40):
            coeffs = [step(k) for k in range(n)]
            for i, xv in enumerate(flat.tolist() + [1.0]):
                xm = mpmath.mpf(xv)
                prev, cur = mpmath.mpf(0), mpmath.mpf(1)
                for a_k, b_k in coeffs:
                    prev, cur = cur, (xm * cur - b_k * prev) / a_k
                if i < flat.size:
                    out[i] = cur
                else:
                    at_one = cur
        out = out / float(at_one) if n else out
        out = out.reshape(xs.shape)
        return float(out) if out.ndim == 0 else out

    return oracle


def _gegenbauer_oracle(lam: float):
    # (k+1) C_{k+1} = 2(k+lam) x C_k - (k+2lam-1) C_{k-1}
    def step(k):
        k = mpmath.mpf(k)
        return (k + 1) / (2 * (k + lam)), (k + 2 * lam - 1) / (2 * (k + lam))

    return _ratio_oracle(step)


def _q_ultraspherical_oracle(beta: float, q: float):
    # 2x C_k = (1-q^{k+1})/(1-beta q^k) C_{k+1} + (1-beta^2 q^{k-1})/(1-beta q^k) C_{k-1}
    def step(k):
        b, qq = mpmath.mpf(beta), mpmath.mpf(q)
        d = 2 * (1 - b * qq**k)
        return (1 - qq ** (k + 1)) / d, (1 - b**2 * qq ** (k - 1)) / d

    return _ratio_oracle(step)


def _pollaczek_oracle(lam: float, a: float):
    # x P_k = (k+1)/(2(k+lam+a)) P_{k+1} + (k+2lam-1)/(2(k+lam+a)) P_{k-1}
    def step(k):
        k = mpmath.mpf(k)
        d = 2 * (k + lam + a)
        return (k + 1) / d, (k + 2 * lam - 1) / d

    return _ratio_oracle(step)


def _laguerre_oracle(order: float):
    # L_n^a(x)/L_n^a(0) = sum_k (-n)_k / ((a+1)_k k!) x^k
    def oracle(n: int, x):
        xs = np.asarray(x, dtype=float)
        flat = xs.reshape(-1)
        out = np.empty(flat.shape)
        with mpmath.workdps(30 + 2 * n):
            a1 = mpmath.mpf(order) + 1
            terms = []
            c = mpmath.mpf(1)
            for k in range(n + 1):
                terms.append(c)
                c = c * (k - n) / ((a1 + k) * (k + 1))
            for i, xv in enumerate(flat.tolist()):
                out[i] = float(mpmath.polyval(terms[::-1], mpmath.mpf(xv)))
        out = out.reshape(xs.shape)
        return float(out) if out.ndim == 0 else out

    return oracle
