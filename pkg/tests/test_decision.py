from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tchar.decision import (INFINITY, OMEGA, Cyclic, CyclicFamily, Factor, GroupDescriptor,
                            InfiniteCyclic, Prufer, all_gdelta_tchar, connected_dual,
                            embeds_brute, exponent, has_omega_socle, minap_admissible,
                            parse_descriptor, select_unbounded_witness, socle_growth_oracle,
                            socle_rank, socle_rank_oracle, tchar_decide, torsion_witness)
from tchar.rules import Geometric
from tchar.syntax import ParseError

D = parse_descriptor


def test_parse_full_grammar():
    d = D("Z:1 + Z(2):omega + Zp(3,inf):1 + Zfam(geom(2,2)):1")
    assert d.factors == (
        Factor(InfiniteCyclic(), 1), Factor(Cyclic(2), OMEGA),
        Factor(Prufer(3), 1), Factor(CyclicFamily(Geometric(2, 2)), 1))
    assert D(str(d)) == d
    assert D("Z(2):w") == D("Z(2) : ω") == D(" Z(2):omega # comment")


@pytest.mark.parametrize("text,col", [
    ("Z(2):0", None), ("Z(1):1", None), ("Zp(4,inf):1", None), ("Q:1", None),
    ("Z(2):1 + ", None), ("Z(2)", None), ("", None), ("Zfam(arith(3,0)):1", None),
])
def test_parse_errors(text, col):
    with pytest.raises(ParseError):
        D(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        D("Z:1 + Z(2):x")
    assert "column" in str(exc.value)


@pytest.mark.parametrize("text,e", [("Z(6):1 + Z(4):2", 12), ("Z:1", INFINITY),
                                    ("Zp(2,inf):1", INFINITY), ("Zfam(geom(2,2)):1", INFINITY),
                                    ("Z(5):omega", 5)])
def test_exponent(text, e):
    assert exponent(D(text)) == e


@pytest.mark.parametrize("text,e,k,rank", [
    ("Z(4):2 + Z(2):1", 2, 1, 3),
    ("Z(4):2 + Z(2):1", 4, 1, 2),
    ("Z(2):omega", 2, 7, 7),
    ("Z(2):omega + Z(3):omega", 6, 4, 4),
])
def test_socle_rank_examples(text, e, k, rank):
    assert socle_rank(D(text), e, k).rank == rank
    d = D(text)
    orders = [f.kind.n for f in d.factors for _ in range(f.count(k))]
    assert socle_rank_oracle(orders, e) == rank


def test_socle_rank_flags_omega():
    assert socle_rank(D("Z(2):omega"), 2, 3).unbounded
    assert not socle_rank(D("Z(2):omega + Z(4):1"), 4, 3).unbounded


small_groups = st.lists(st.sampled_from([2, 3, 4, 6, 8, 9]), min_size=1, max_size=3)


@given(small_groups, st.sampled_from([2, 3, 4, 6]))
def test_socle_rank_matches_brute_force(orders, e):
    from math import prod
    if prod(orders) > 200:
        orders = orders[:2]
    d = GroupDescriptor(tuple(Factor(Cyclic(n)) for n in orders))
    r = socle_rank(d, e, 1).rank
    assert embeds_brute(orders, e, r)
    assert not embeds_brute(orders, e, r + 1) if e ** (r + 1) <= 10 ** 4 else True


def test_brute_force_oracle_agrees_with_counting_oracle():
    for orders in ([4, 4, 2], [6, 3], [2, 3], [8, 4], [9, 3, 3]):
        for e in (2, 3, 4, 6):
            r = socle_rank_oracle(orders, e)
            assert embeds_brute(orders, e, r)
            assert not embeds_brute(orders, e, r + 1)


def test_composite_exponent_counterexample():
    # no single Z(6) factor has multiplicity omega, yet Z(6)^(omega) embeds
    d = D("Z(2):omega + Z(3):omega")
    assert has_omega_socle(d)
    assert socle_growth_oracle(d)
    assert tchar_decide(d, True, True).answer


def test_oracle_needs_truncation_past_finite_part():
    d = D("Z(2):3 + Z(6):3 + Z(10):3 + Z(15):omega")
    ranks = [socle_rank_oracle([(f.kind.n, f.count(k)) for f in d.factors], 30) for k in range(1, 6)]
    assert ranks == sorted(ranks) and ranks[-1] > ranks[0]   # still growing at k = 5
    assert not socle_growth_oracle(d)
    assert not has_omega_socle(d)


def test_small_sweep_closed_form_equals_oracle():
    for orders in ((2,), (4,), (2, 4), (6, 9), (2, 3, 5), (4, 6, 8, 12)):
        for ms in product((1, 2, OMEGA), repeat=len(orders)):
            d = GroupDescriptor(tuple(Factor(Cyclic(n), m) for n, m in zip(orders, ms)))
            assert has_omega_socle(d) == socle_growth_oracle(d), str(d)


# -- decision table -------------------------------------------------------------------------------

@pytest.mark.parametrize("text,answer,branch", [
    ("Z:1", True, "infinite-exponent"),
    ("Z(2):1", False, "bounded-no-omega-socle"),
    ("Z(2):omega", True, "bounded-omega-socle"),
    ("Z(2):omega + Z(4):1", False, "bounded-no-omega-socle"),
    ("Zp(2,inf):1", True, "infinite-exponent"),
])
def test_tchar_decide_table(text, answer, branch):
    dec = tchar_decide(D(text), is_gdelta=True, is_proper=True)
    assert (dec.answer, dec.branch) == (answer, branch)


def test_tchar_decide_preconditions():
    assert not tchar_decide(D("Z:1"), is_gdelta=False, is_proper=True).answer
    assert tchar_decide(GroupDescriptor(()), is_gdelta=False, is_proper=False).branch == "whole-group"
    with pytest.raises(ValueError):
        tchar_decide(GroupDescriptor(()), True, True)


def test_decision_json():
    assert tchar_decide(D("Z:1"), True, True).to_dict()["answer"] == "yes"


@pytest.mark.parametrize("text,answer", [("Z:1", True), ("Z(2):omega", True),
                                         ("Z(2):1 + Z(4):1", False), ("Z(2):omega + Z(4):1", False)])
def test_minap(text, answer):
    assert minap_admissible(D(text)).answer == answer


def test_minap_finite_reason():
    assert "discrete" in minap_admissible(D("Z(2):1 + Z(4):1")).reason


@pytest.mark.parametrize("text,connected", [
    ("Z:1", True), ("Z:omega", True), ("Z(2):1 + Z:1", False), ("Z(2):1", False),
    ("Zp(3,inf):1", False),
])
def test_connectivity(text, connected):
    d = D(text)
    assert connected_dual(d) == connected == all_gdelta_tchar(d)


@pytest.mark.parametrize("text", ["Z(2):1 + Z:1", "Zp(3,inf):1", "Zfam(geom(2,2)):1", "Z(6):omega"])
def test_disconnected_dual_has_a_rejected_subgroup(text):
    witness = torsion_witness(D(text))
    assert witness is not None
    assert not tchar_decide(witness, True, True).answer


def test_torsion_free_has_no_torsion_witness():
    assert torsion_witness(D("Z:3")) is None


@pytest.mark.parametrize("text,case", [
    ("Z:1 + Z(3):5", "A"), ("Zp(2,inf):1 + Z(9):omega", "B(2)"),
    ("Zp(5,inf):1 + Zp(3,inf):1", "B(3)"), ("Zfam(geom(2,2)):1", "C(geom(2,2))"),
])
def test_select_unbounded_witness(text, case):
    assert str(select_unbounded_witness(D(text))) == case


def test_select_requires_unbounded():
    with pytest.raises(ValueError):
        select_unbounded_witness(D("Z(4):omega"))
