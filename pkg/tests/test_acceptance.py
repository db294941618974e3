"""Acceptance criteria 1-10, each at its stated tolerance.

Every test carries a ``criterion`` marker; conftest prints one pass/fail
line per criterion at the end of the run.
"""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from turan import reporting
from turan.criteria import (
    Criterion,
    SigmaSequence,
    check_cor1,
    check_sigma_transfer,
    check_thm1,
    check_thm4,
    check_thm4_condition,
    check_thm4_init,
    renormalize,
)
from turan.determinants import identity2_chain, identity_spread, prop3_sum
from turan.families import (
    build_family,
    make_laguerre,
    make_legendre,
    make_pollaczek,
    make_q_ultraspherical,
    make_sec6_example,
    make_ultraspherical,
    working_sequence,
)
from turan.recurrence import CoefficientSequence, eval_polynomials, normalize_at_one
from turan.scanner import (
    ScanRegion,
    endpoint_equality,
    remark_window,
    scan_sign,
    strict_interior_min,
    support_left_heuristic,
    turan_grid,
)

LAMBDAS = [-0.45, -0.25, 0.0, 0.5, 1.0, 3.0]
BETAS = [-0.9, -0.5, 0.0, 0.25, 0.5, 0.9]
QS = [0.1, 0.3, 0.5, 0.7, 0.9]
Q_PAIRS = [(b, q) for b in BETAS for q in QS]
POLLACZEK = [(lam, a) for lam in (0.5, 1.0, 2.0) for a in (0.5, 1.0, 2.0)]
ORDERS = [-0.9, -0.5, 0.0, 1.0, 2.5]

SCAN_TOL = 1e-9
ENDPOINT_TOL = 1e-10
HORIZON = 500


def lattice():
    out = [("ultraspherical", {"lambda": lam}) for lam in LAMBDAS]
    out += [("q_ultraspherical", {"beta": b, "q": q}) for b, q in Q_PAIRS]
    out += [("pollaczek", {"lambda": lam, "a": a}) for lam, a in POLLACZEK]
    out += [("laguerre", {"alpha": o}) for o in ORDERS]
    out += [("sec6_example", {}), ("chebyshev", {}), ("legendre", {})]
    return out


def lattice_id(item):
    name, params = item
    return name + "".join(f"-{k}={v}" for k, v in params.items())


def remark_sequence():
    al = [0.0, 0.7, 0.6] + [0.55] * 40
    ga = [1.0] + [1 - a for a in al[1:]]
    return CoefficientSequence.from_arrays(al, None, ga)


# 1. identity agreement


@pytest.mark.criterion("1")
@pytest.mark.parametrize("item", lattice(), ids=lattice_id)
def test_c1_identity_agreement(item):
    fam = build_family(*item)
    seq = working_sequence(fam, 102)
    x = np.linspace(*fam.interval, 401)
    table = eval_polynomials(seq, x, 101)
    spread = identity_spread(table, seq)
    assert spread.shape[0] == 100
    assert spread.max() <= 1e-10


# 2. ultraspherical Turan inequality


@pytest.mark.criterion("2")
@pytest.mark.parametrize("lam", LAMBDAS)
def test_c2_nonnegative_on_interval(lam):
    seq = make_ultraspherical(lam)
    rep = scan_sign(seq, ScanRegion(-1, 1, 401, 1, 50), SCAN_TOL, endpoints=(-1.0, 1.0))
    assert rep.clean, rep.violations[:3]
    assert rep.endpoint_max <= ENDPOINT_TOL
    assert max(v for _, _, v in endpoint_equality(seq, 1.0, 50)) <= ENDPOINT_TOL


@pytest.mark.criterion("2")
@pytest.mark.parametrize("lam", [lam for lam in LAMBDAS if lam >= 0])
def test_c2_negative_outside(lam):
    seq = make_ultraspherical(lam)
    x = np.concatenate([np.linspace(-2, -1.05, 96), np.linspace(1.05, 2, 96)])
    if lam == 0:
        # p_n^2 reaches 1e22 at |x| = 2, so the direct difference for 1 - x^2 is all rounding;
        # identity 2 has exactly zero increments for this family
        delta = identity2_chain(eval_polynomials(seq, x, 21), seq, 20)[1:]
    else:
        delta = turan_grid(seq, x, 1, 20)
    assert delta.shape == (20, 192)
    assert np.all(delta < 0)


# 3. Chebyshev oracle


@pytest.mark.criterion("3")
def test_c3_chebyshev_delta():
    x = np.linspace(-1, 1, 401)
    delta = turan_grid(make_ultraspherical(0.0), x, 1, 50)
    np.testing.assert_allclose(delta, np.broadcast_to(1 - x**2, delta.shape), rtol=0, atol=1e-10)


@pytest.mark.criterion("3")
def test_c3_trig_oracle_matches():
    fam = build_family("ultraspherical", {"lambda": 0})
    x = np.linspace(-1, 1, 401)
    p = np.array([fam.oracle(n, x) for n in range(52)])
    delta = p[1:51] ** 2 - p[:50] * p[2:52]
    np.testing.assert_allclose(delta, np.broadcast_to(1 - x**2, delta.shape), rtol=0, atol=1e-10)


# 4. q-ultraspherical through the Corollary 1 pipeline


@pytest.mark.criterion("4")
@pytest.mark.parametrize("beta,q", Q_PAIRS)
def test_c4_q_ultraspherical_pipeline(beta, q):
    aux = make_q_ultraspherical(beta, q)
    cor = check_cor1(aux, HORIZON)
    assert cor.holds, cor.first_failure
    seq, _ = normalize_at_one(aux, HORIZON + 1)
    first, _ = check_thm1(seq, HORIZON)
    assert first.holds, first.first_failure
    assert first.verified_to >= HORIZON
    rep = scan_sign(seq, ScanRegion(-1, 1, 401, 1, 50), SCAN_TOL, endpoints=(-1.0, 1.0))
    assert rep.clean
    assert rep.endpoint_max <= ENDPOINT_TOL


# 5. Pollaczek


@pytest.mark.criterion("5")
@pytest.mark.parametrize("lam,a", POLLACZEK)
def test_c5_pollaczek_pipeline(lam, a):
    seq, _ = normalize_at_one(make_pollaczek(lam, a), HORIZON + 1)
    first, _ = check_thm1(seq, HORIZON)
    assert first.holds, first.first_failure
    assert first.verified_to >= HORIZON
    rep = scan_sign(seq, ScanRegion(-1, 1, 401, 1, 50), SCAN_TOL, endpoints=(-1.0, 1.0))
    assert rep.clean
    assert rep.endpoint_max <= ENDPOINT_TOL


@pytest.mark.criterion("5")
@pytest.mark.parametrize("lam,a", POLLACZEK)
def test_c5_cor1_subcase_follows_sign(lam, a):
    verdict = check_cor1(make_pollaczek(lam, a), HORIZON)
    expected = Criterion.COR1_I if lam <= a else Criterion.COR1_II
    assert verdict.holds, verdict.first_failure
    assert verdict.criterion is expected


@pytest.mark.criterion("5")
@pytest.mark.parametrize("lam,a", POLLACZEK)
def test_c5_ratio_limit(lam, a):
    aux = make_pollaczek(lam, a)
    _, ledger = normalize_at_one(aux, HORIZON)
    # the Corollary 1 constant of the auxiliary sequence: limits a/2 and 1/(2a)
    a_cor = 2.0 * aux.declared_limits[0]
    assert ledger.ratios_nondecreasing()
    assert abs(ledger.ratio_limit_estimate - 1.0 / a_cor) <= 1e-6


# 6. Theorem 4 on the nonsymmetric example


@pytest.mark.criterion("6")
def test_c6_thm4_example():
    seq = make_sec6_example()
    assert check_thm4_init(seq).holds
    verdict = check_thm4(seq, 1000)
    assert verdict.holds and verdict.verified_to == 1000
    dal, dga = seq.increments(1000)
    np.testing.assert_allclose(dal / -dga, 2.0, rtol=0, atol=1e-12)
    rep = scan_sign(seq, ScanRegion(-1, 1, 401, 1, 50), SCAN_TOL, endpoints=(1.0,))
    assert rep.clean and rep.endpoint_max <= ENDPOINT_TOL
    assert support_left_heuristic(seq, 200)


@pytest.mark.criterion("6")
def test_c6_condition_iii_every_index():
    seq = make_sec6_example()
    missing = [n for n in range(2, 1001) if "iii" not in check_thm4_condition(seq, n).satisfied]
    assert not missing, f"condition (iii) fails at {len(missing)} indices, first n={missing[0]}"


# 7. Laguerre


@pytest.mark.criterion("7")
@pytest.mark.parametrize("order", ORDERS)
def test_c7_laguerre(order):
    seq = make_laguerre(order)
    x = np.linspace(-10, 50, 301)
    delta = turan_grid(seq, x, 1, 50)
    for n in range(1, 51):
        diff = np.abs(prop3_sum(seq, x, n) - delta[n - 1])
        assert np.all(diff <= 1e-9 * np.maximum(1.0, np.abs(delta[n - 1]))), n
    assert delta.min() >= -1e-9
    assert np.abs(turan_grid(seq, np.array([0.0]), 1, 50)).max() <= 1e-12
    assert strict_interior_min(seq, ScanRegion(-10, 50, 301, 1, 50), (0.0,), margin=0.1) > 0


# 8. Remark counterexample


@pytest.mark.criterion("8")
def test_c8_remark_window():
    w = remark_window(remark_sequence())
    assert w.applicable
    assert abs(w.r - 1.96) <= 1e-12
    assert w.confirmed
    assert w.formula_residual <= 1e-12


@pytest.mark.criterion("8")
def test_c8_negative_on_whole_literal_window():
    seq = remark_sequence()
    x = np.linspace(1.0, 1.96, 202)[1:-1]
    delta2 = turan_grid(seq, x, 2, 2)[0]
    assert np.all(delta2 < 0), f"Delta_2 >= 0 from x = {x[np.argmax(delta2 >= 0)]:.4f}"


# 9. Proposition 2


def _factorials(n):
    return np.vectorize(math.factorial, otypes=[float])(n)


SIGMAS = {
    "geometric": SigmaSequence(lambda n: 0.5 ** np.asarray(n, dtype=float)),
    "inverse_factorial": SigmaSequence(lambda n: 1.0 / _factorials(n)),
    "two_pow_n_squared": SigmaSequence(
        lambda n: 2.0 ** (np.asarray(n, dtype=float) ** 2),
        log_sigma=lambda n: math.log(2.0) * np.asarray(n, dtype=float) ** 2,
    ),
}


@pytest.mark.criterion("9")
@pytest.mark.parametrize("name", list(SIGMAS))
def test_c9_renormalized_delta_at_one(name):
    sigma = SIGMAS[name]
    seq = renormalize(make_legendre(), sigma)
    n = np.arange(1, 21)
    s = np.exp(sigma.logs(21))
    expected = s[n] ** 2 - s[n - 1] * s[n + 1]
    got = turan_grid(seq, np.array([1.0]), 1, 20)[:, 0]
    np.testing.assert_array_less(np.abs(got - expected), 1e-12 * np.maximum(1.0, np.abs(expected)) + 1e-300)

    rep = scan_sign(seq, ScanRegion(-1, 1, 401, 1, 20), SCAN_TOL)
    log_concave = check_sigma_transfer(sigma, 20).holds
    if name == "two_pow_n_squared":
        assert not log_concave
        assert any(x == 1.0 for _, x, _ in rep.violations)
    else:
        assert log_concave
        assert rep.clean


# 10. CLI contract


def _cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "turan", *map(str, args)], capture_output=True, text=True, timeout=120
    )


@pytest.mark.criterion("10")
def test_c10_json_round_trip():
    res = _cli("scan", "--family", "legendre", "--format", "json")
    assert res.returncode == 0, res.stderr
    parsed = reporting.report_from_dict(json.loads(res.stdout)["report"])
    direct = scan_sign(make_legendre(), ScanRegion(), SCAN_TOL, endpoints=(-1.0, 1.0))
    assert parsed == direct


@pytest.mark.criterion("10")
def test_c10_exit_codes():
    ok = _cli("check", "--family", "ultraspherical", "--param", "lambda=2")
    assert ok.returncode == 0, ok.stderr
    bad = json.dumps({"family": "custom", "alpha": [0, 0.9, 0.2, 0.9, 0.2], "gamma": [1, 0.1, 0.8, 0.1, 0.8]})
    fail = _cli("check", "--spec", bad)
    assert fail.returncode == 2, fail.stdout + fail.stderr
    spec = json.dumps({"family": "custom", "alpha": [0, 0.7, 0.6] + [0.55] * 60, "gamma": [1, 0.3, 0.4] + [0.45] * 60})
    viol = _cli("scan", "--spec", spec, "--region", "0.9,2,111", "--n-max", 5)
    assert viol.returncode == 3, viol.stdout + viol.stderr
    bad_input = _cli("scan", "--family", "nope")
    assert bad_input.returncode == 4
