import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tchar.arith import (PI_HI, PI_LO, ZERO, Angle, BoundInterval, chord_of_distance, hull,
                         nearest_int_dist, pi_bracket, ratio_norm, round_down, round_up, sandwich_holds,
                         unit_norm)

mpmath.mp.dps = 60

angles = st.builds(lambda q, n: Angle.from_ratio(n, q),
                   st.integers(1, 10 ** 4), st.integers(-10 ** 6, 10 ** 6))


def mp_chord(q: Fraction):
    return 2 * mpmath.sin(mpmath.pi * mpmath.mpf(q.numerator) / q.denominator)


def _inside(enc, true) -> bool:
    # mpmath at 60 digits is off by ~1e-59; exact points (e.g. 2 sin(pi/6) = 1) need that slack
    slack = mpmath.mpf(10) ** -50 * max(1, abs(true))
    return mpmath.mpf(enc.lo) - slack <= true <= mpmath.mpf(enc.hi) + slack


def _mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def test_pi_bracket():
    assert _mp(PI_LO) < mpmath.pi < _mp(PI_HI)
    assert PI_HI - PI_LO < Fraction(1, 10 ** 15)


@pytest.mark.parametrize("bits", [10, 64, 150])
def test_machin_bracket(bits):
    lo, hi = pi_bracket(bits)
    assert _mp(lo) < mpmath.pi < _mp(hi)
    assert hi - lo <= Fraction(1, 2 ** bits)


@pytest.mark.parametrize("text,dist", [("3/8", "3/8"), ("7/8", "1/8"), ("1/2", "1/2"), ("0", "0")])
def test_nearest_int_dist(text, dist):
    assert nearest_int_dist(Angle.parse(text)) == Fraction(dist)


def test_angle_normalises():
    a = Angle.of(Fraction(-3, 8))
    assert (a.num, a.den) == (5, 8)
    assert Angle.from_ratio(6, 4) == Angle(1, 2)
    assert Angle.from_prime_power(12, 2, 4) == Angle(3, 4)
    with pytest.raises(ValueError):
        Angle(2, 4 - 2)


def test_angle_text_round_trip():
    for a in (Angle(0, 1), Angle(3, 8), Angle(999, 1000)):
        assert Angle.parse(str(a)) == a
    assert str(Angle(3, 8)) == "3/8"


@given(angles, angles, angles)
def test_angle_group_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + (-a) == ZERO
    assert a - b == a + (-b)
    assert a * 3 == a + a + a


@given(angles)
def test_nearest_int_dist_symmetric(a):
    assert nearest_int_dist(a) == nearest_int_dist(-a)
    assert 0 <= nearest_int_dist(a) <= Fraction(1, 2)


def test_unit_norm_examples():
    assert unit_norm(Angle(0, 1)) == BoundInterval(0.0, 0.0, True)
    half = unit_norm(Angle(1, 2))
    assert half.lo == half.hi == 2.0
    quarter = unit_norm(Angle(1, 4))
    assert quarter.lo <= math.sqrt(2) <= quarter.hi
    assert math.pi / 4 <= quarter.hi and quarter.lo <= math.pi / 2


@given(angles)
def test_unit_norm_encloses_high_precision_value(a):
    enc = unit_norm(a)
    true = mp_chord(nearest_int_dist(a))
    assert _inside(enc, true)
    assert enc.hi - enc.lo <= 1e-13 * max(enc.hi, 1e-300) + 1e-300


@pytest.mark.parametrize("q", [Fraction(1, 6), Fraction(5, 6), Fraction(1, 2), Fraction(1, 4)])
def test_unit_norm_special_angles_are_exact_or_enclosed(q):
    assert _inside(unit_norm(Angle.of(q)), mp_chord(nearest_int_dist(Angle.of(q))))


@given(st.integers(1, 10 ** 40), st.integers(2, 10 ** 40))
def test_unit_norm_huge_denominators(n, d):
    a = Angle.from_ratio(n, d)
    enc = unit_norm(a)
    assert _inside(enc, mp_chord(nearest_int_dist(a)))


@given(angles, st.fractions(min_value=0, max_value=Fraction(1, 100)))
def test_widened_norm_covers_neighbourhood(a, r):
    enc = unit_norm(a, r)
    for shift in (r, -r, r / 2):
        b = Angle.of(a.value + shift)
        assert _inside(enc, mp_chord(nearest_int_dist(b)))


def test_ratio_norm_ignores_reduction():
    assert ratio_norm(3, 12) == unit_norm(Angle(1, 4))
    assert ratio_norm(6, 12) == unit_norm(Angle(1, 2))


@given(angles)
def test_sandwich(a):
    assert sandwich_holds(a)


def test_sandwich_at_extremes():
    for a in (Angle(0, 1), Angle(1, 2), Angle(1, 10 ** 30), Angle(10 ** 30 - 1, 2 * 10 ** 30),
              Angle(1, 3 ** 200)):
        assert sandwich_holds(a)


@given(st.integers(1, 10 ** 6), st.integers(10 ** 8, 10 ** 60))
def test_sandwich_tiny_angles(n, d):
    assert sandwich_holds(Angle.from_ratio(n, d * n + 1))


def test_chord_of_distance_caps():
    assert chord_of_distance(Fraction(3, 4)).hi == 2.0
    enc = chord_of_distance(Fraction(1, 6))
    assert enc.lo == enc.hi == 1.0


@given(st.fractions())
def test_directed_rounding(q):
    assert Fraction(round_down(q)) <= q <= Fraction(round_up(q))


def test_interval_text_and_sum():
    i = BoundInterval(0.1, 0.2)
    assert BoundInterval.parse(str(i)) == i
    s = i + BoundInterval(0.2, 0.3)
    assert Fraction(s.lo) <= Fraction(0.1) + Fraction(0.2)
    assert Fraction(s.hi) >= Fraction(0.2) + Fraction(0.3)
    with pytest.raises(ValueError):
        BoundInterval(1.0, 0.5)


def test_hull_takes_max_enclosure():
    h = hull(BoundInterval(0.1, 0.2), BoundInterval(0.15, 0.4))
    assert h.lo == 0.15 and h.hi == 0.4
    assert BoundInterval(0.0, math.inf).lower_only
