import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from tchar.decision import parse_descriptor
from tchar.membership import MEMBER, NON_MEMBER, member
from tchar.models import CharSequence, metric_d_bounds
from tchar.rules import Arithmetic, Geometric, PowerIndex, Quadratic, Squares, Triangular
from tchar.suites import EPSILON_GRID
from tchar.witnesses import (WitnessError, torus_witnesses, torus_depth, torus_witness, padic_witnesses,
                             padic_parameters, padic_witness, product_witnesses, product_depth,
                             product_witness, unbounded_witnesses)

EPS = F(2, 25)


def test_derived_parameters():
    assert torus_depth(Arithmetic(100, 100), EPS) == 2
    assert padic_parameters(2, Squares(), EPS) == (8, 9)
    assert product_depth(EPS) == 6


def _min_s(eps):
    # the metric weights digits by powers of 2 whatever the prime
    s = 0
    while F(1, 2 ** s) >= eps / 20:
        s += 1
    return s


@pytest.mark.parametrize("eps", EPSILON_GRID)
@pytest.mark.parametrize("p", [2, 3, 5])
def test_padic_parameters_are_minimal(eps, p):
    s, l = padic_parameters(p, Squares(), eps)
    assert s == _min_s(eps)
    assert l > s and Squares().gap(l) > s
    assert l == s + 1 or Squares().gap(l - 1) <= s


@pytest.mark.parametrize("eps", EPSILON_GRID)
def test_all_budgets_hold_on_grid(eps):
    for report in (torus_witnesses(Arithmetic(100, 100), eps, 40),
                   padic_witnesses(2, Squares(), eps, 40),
                   product_witnesses(Geometric(2, 2), eps, 40)):
        assert report.passed, [c.to_dict() for c in report.failures()]
        assert report.limit_verdict.outcome == NON_MEMBER
        assert all(w.verdict.outcome == MEMBER for w in report.witnesses)


@pytest.mark.parametrize("bases", [Arithmetic(2, 1), Geometric(3, 3), Arithmetic(5, 3)])
def test_torus_budgets_other_bases(bases):
    report = torus_witnesses(bases, F(1, 20), 30)
    assert report.passed, [c.to_dict() for c in report.failures()]


@pytest.mark.parametrize("bases", [Arithmetic(3, 2), Geometric(3, 3), Arithmetic(10, 7)])
def test_product_budgets_other_bases(bases):
    report = product_witnesses(bases, F(1, 20), 30)
    assert report.passed, [c.to_dict() for c in report.failures()]


@pytest.mark.parametrize("p,rule", [(3, Squares()), (2, Triangular()), (5, Quadratic(1, 1, 0))])
def test_padic_budgets_other_rules(p, rule):
    report = padic_witnesses(p, rule, F(1, 20), 25)
    assert report.passed, [c.to_dict() for c in report.failures()]


def test_torus_witnesses_converge_to_limit():
    a = Arithmetic(100, 100)
    l = torus_depth(a, EPS)
    report = torus_witnesses(a, EPS, 30)
    # the limit has an infinite tail, so only an upper bound is exact
    dists = [metric_d_bounds(torus_witness(a, EPS, l, k), report.limit)[1]
             for k in range(l + 1, 30)]
    assert all(d1 <= d0 for d0, d1 in zip(dists, dists[1:]))
    assert dists[-1] < F(1, 10 ** 40)


def test_padic_witness_is_finite_truncation():
    s, l = padic_parameters(2, Squares(), EPS)
    w = padic_witness(2, Squares(), s, l, 3)
    assert member(CharSequence(w.model), w).outcome == MEMBER


def test_product_witness_small_orders_are_zero():
    # floor(eps b/20) vanishes while b < 20/eps
    b = Geometric(2, 2)
    l = product_depth(EPS)
    w = product_witness(b, EPS, l, 12)
    digits = w.digits(13)
    for n, c in enumerate(digits):
        if b.term(n) * EPS < 20:
            assert c == 0


@pytest.mark.parametrize("eps", [0, F(1, 10), F(1, 2), -F(1, 100), 1])
def test_epsilon_out_of_range(eps):
    with pytest.raises(WitnessError):
        torus_witnesses(Arithmetic(100, 100), eps, 5)
    with pytest.raises(WitnessError):
        product_witnesses(Geometric(2, 2), eps, 5)


def test_bad_rules_rejected():
    with pytest.raises(WitnessError):
        torus_witnesses(Arithmetic(1, 0), EPS, 5)
    with pytest.raises(WitnessError):
        product_witnesses(Arithmetic(5, 0), EPS, 5)
    with pytest.raises(WitnessError):
        padic_witnesses(4, Squares(), EPS, 5)


@pytest.mark.parametrize("text,family", [("Z:1 + Z(2):omega", "A"),
                                          ("Zp(3,inf):1 + Zp(2,inf):2", "B"),
                                          ("Zfam(geom(2,2)):1 + Z(6):1", "C")])
def test_dispatch_by_descriptor(text, family):
    report = unbounded_witnesses(parse_descriptor(text), EPS, 20)
    assert report.family == family
    assert report.passed
    if family == "B":
        assert report.limit.model.p == 2


def test_dispatch_rejects_bounded():
    with pytest.raises(ValueError):
        unbounded_witnesses(parse_descriptor("Z(4):omega"), EPS, 10)


def test_jsonl_shape():
    report = product_witnesses(Geometric(2, 2), EPS, 10)
    lines = [json.loads(line) for line in report.jsonl()]
    assert len(lines) == len(report.budget_checks) + 1
    for row in lines[:-1]:
        assert set(row) == {"check", "index", "relation", "bound", "enclosure", "pass"}
        assert row["relation"] in ("<", "<=", "=")
    assert lines[-1]["summary"] is True and lines[-1]["pass"] is True


@given(st.fractions(min_value=F(1, 1000), max_value=F(99, 1000)))
def test_product_budgets_random_epsilon(eps):
    assert product_witnesses(Geometric(2, 2), eps, 12).passed


def test_padic_rule_outgrowing_digit_budget():
    with pytest.raises(WitnessError):
        padic_witnesses(2, PowerIndex(1, 2), EPS, 40)
