import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetarho.functions import (
    BUILTIN_RHOS,
    BUILTIN_THETAS,
    RhoSpec,
    ThetaSpec,
    aitken_limit,
    check_rho_axioms,
    check_theta1,
    check_theta2,
    check_theta3,
    lemma_l1_property,
    lemma_l2_property,
    log_grid,
    rho_eval,
    sampled_theta,
    texp_criterion,
    theta_report,
)
from thetarho.metric import DomainError, PreconditionError

AXIOM_RHOS = [r for r in BUILTIN_RHOS if check_rho_axioms(r).all_pass]


def test_theta_values():
    assert ThetaSpec("exp-sqrt")(1.0) == pytest.approx(math.e)
    assert ThetaSpec("exp-sqrt-shift")(1e-12) == pytest.approx(math.e, rel=1e-9)
    assert ThetaSpec("log-shift", a=2)(1e-4) == pytest.approx(2 + math.log(math.sqrt(1.0001)), rel=1e-14)
    with pytest.raises(DomainError):
        ThetaSpec("exp-sqrt")(0.0)
    with pytest.raises(ValueError):
        ThetaSpec("log-shift", a=1.0)


def test_texp_log_eval_does_not_overflow():
    th = ThetaSpec("exp-sqrt-texp")
    assert th.log_eval(100.0) == pytest.approx(math.sqrt(100 * math.exp(100)))
    assert th(100.0) == math.inf
    assert math.isfinite(th.log_eval(700.0))


def test_theta1():
    for th in BUILTIN_THETAS:
        assert check_theta1(th, log_grid())
    assert check_theta1(ThetaSpec("log-shift", a=3), log_grid())
    ts = np.linspace(0.1, 10, 200)
    wavy = sampled_theta(ts, 2 + np.sin(ts))
    assert not check_theta1(wavy, ts)
    with pytest.raises(PreconditionError):
        check_theta1(ThetaSpec("exp-sqrt"), [1.0, 0.5])


def test_theta2():
    assert check_theta2(ThetaSpec("exp-sqrt"), lambda n: 1.0 / n)
    assert check_theta2(ThetaSpec("exp-sqrt-texp"), lambda n: 1.0 / n)
    assert not check_theta2(ThetaSpec("exp-sqrt-shift"), lambda n: 1.0 / n)
    assert not check_theta2(ThetaSpec("log-shift", a=2), lambda n: 1.0 / n)


def test_theta3_exp_sqrt_matches_high_precision_series():
    est = check_theta3(ThetaSpec("exp-sqrt"), 0.5)
    with mpmath.workdps(40):
        t = mpmath.mpf("1e-12")
        oracle = (mpmath.exp(mpmath.sqrt(t)) - 1) / mpmath.sqrt(t)
    assert est.passed
    assert est.lam == pytest.approx(float(oracle), abs=1e-5)
    assert est.lam == pytest.approx(1.0, abs=1e-5)


def test_theta3_divergent_and_vanishing():
    for r in (0.1, 0.5, 0.9):
        est = check_theta3(ThetaSpec("exp-sqrt-shift"), r)
        assert est.lam == math.inf and est.passed
    linear = ThetaSpec("custom", fn=lambda t: 1 + t)
    est = check_theta3(linear, 0.5)
    assert not est.passed
    assert est.lam == 0.0
    with pytest.raises(DomainError):
        check_theta3(linear, 1.0)


def test_theta_report_for_builtins():
    rep = theta_report(ThetaSpec("exp-sqrt"))
    assert rep.theta1_pass and rep.theta2_pass and rep.theta3.passed
    rep = theta_report(ThetaSpec("exp-sqrt-shift"))
    assert rep.theta1_pass and not rep.theta2_pass and rep.theta3.lam == math.inf


def test_rho_eval_examples():
    assert rho_eval(RhoSpec("ciric-2"), (1, 1, 1, 2, 0)) == 2
    assert rho_eval(RhoSpec("nadler"), (3, 7, 9, 2, 5)) == 3
    assert rho_eval(RhoSpec("ciric-1"), (1, 1, 1, 2, 0)) == 1
    with pytest.raises(DomainError):
        rho_eval(RhoSpec("nadler"), (1, -1, 0, 0, 0))
    with pytest.raises(ValueError):
        RhoSpec("reich", (0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        RhoSpec("hardy-rogers", (0.2, 0.2, 0.2, 0.3, 0))


def test_rho_axioms_of_builtins():
    reports = {r.kind: check_rho_axioms(r) for r in BUILTIN_RHOS}
    for kind in ("nadler", "ciric-1", "zamfirescu", "reich"):
        assert reports[kind].all_pass
    assert reports["ciric-1"].rho1_values == [1, 1, 1]
    assert not reports["kannan"].rho1_pass
    assert reports["kannan"].rho1_values[0] == 2
    assert not reports["chatterjea"].rho1_pass
    assert not reports["ciric-2"].rho1_pass
    for rep in reports.values():
        assert rep.rho2_pass and rep.rho3_pass


def test_strict_monotonicity_clause():
    assert check_rho_axioms(RhoSpec("custom-coefficients", (1, 0, 0, 0, 0))).all_pass
    # only the fifth slot counts, and the strict clause pins it to 0
    last_only = check_rho_axioms(RhoSpec("custom-coefficients", (0, 0, 0, 0, 1)))
    assert last_only.rho3_pass
    assert not last_only.rho3_strict_pass
    assert "rho3-strict" in last_only.witnesses
    assert last_only.rho3_shifted_pass
    fourth_only = check_rho_axioms(RhoSpec("custom-coefficients", (0, 0, 0, 1, 0)))
    assert fourth_only.rho3_strict_pass and not fourth_only.rho3_shifted_pass


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 100), st.floats(0, 100), st.floats(0, 10))
def test_builtin_rhos_are_positively_homogeneous(u, v, a):
    vec = np.array([u, v, u + v, v, u])
    for rho in BUILTIN_RHOS:
        assert rho_eval(rho, a * vec) == pytest.approx(a * rho_eval(rho, vec), rel=1e-12, abs=1e-12)


def test_lemma_u_less_than_v_examples():
    assert lemma_l2_property(RhoSpec("ciric-1"), 1, 2) == (True, True)
    assert lemma_l2_property(RhoSpec("nadler"), 0.5, 1) == (True, True)
    for rho in AXIOM_RHOS:
        assert lemma_l2_property(rho, 1, 1)[0] is False


def test_lemma_u_less_than_v_random():
    rng = np.random.default_rng(7)
    for rho in AXIOM_RHOS:
        for u, v in rng.uniform(0, 100, (2000, 2)):
            hyp, concl = lemma_l2_property(rho, u, v)
            assert not hyp or concl, (rho.name, u, v)


def test_lemma_null_sequence():
    th = ThetaSpec("exp-sqrt")
    seq = [0.5**n for n in range(1, 90)]
    assert lemma_l1_property(th, seq) == (True, True)
    shifted = [1 + 0.5**n for n in range(1, 60)]
    assert lemma_l1_property(th, shifted) == (False, False)
    with pytest.raises(PreconditionError):
        lemma_l1_property(th, [1, 2, 3])


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 100), st.floats(1e-3, 100), st.floats(0.01, 0.99))
def test_texp_criterion_equivalence(H, u, k):
    th = ThetaSpec("exp-sqrt-texp")
    lhs, rhs = th.log_eval(H), k * th.log_eval(u)
    crit = texp_criterion(H, u)
    # theta(H) <= theta(u)^k  <=>  (H/u) e^{H-u} <= k^2 ; compare in log form away from the boundary
    log_gap_direct = 2 * (math.log(lhs) - math.log(rhs))
    log_gap_crit = math.log(crit) - 2 * math.log(k)
    assert log_gap_direct == pytest.approx(log_gap_crit, rel=1e-10, abs=1e-10)
    if abs(log_gap_crit) > 1e-9:
        assert (lhs <= rhs) == (crit <= k**2)


def test_aitken_limit():
    seq = [1 + 0.5**n for n in range(10)]
    assert aitken_limit(seq) == pytest.approx(1.0, abs=1e-14)
    assert aitken_limit([3.0]) == 3.0


def test_theta_minus_one_saturates():
    assert ThetaSpec("exp-sqrt-texp").minus_one(50.0) == math.inf
    assert ThetaSpec("exp-sqrt").minus_one(1e-12) == pytest.approx(1e-6, rel=1e-6)
