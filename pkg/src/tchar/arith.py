"""Exact residues mod 1 and certified enclosures of ``|1 - exp(2*pi*i*phi)|``."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

# math.pi is a double strictly below pi; its successor is strictly above.
PI_LO = Fraction(math.pi)
PI_HI = Fraction(math.nextafter(math.pi, math.inf))

# sin, the product pi*x and the float conversion of x each contribute at most
# ~1 ulp of relative error; 2**-50 (~4 ulp) covers their sum.
_REL_SLACK = 2.0 ** -50
_TINY = 2.0 ** -1000


def _fraction(num: int, den: int) -> Fraction:
    """Build a Fraction from an already reduced pair without paying for gcd."""
    return Fraction(num, den, _normalize=False)


@dataclass(frozen=True)
class Angle:
    """A point of R/Z stored as a reduced fraction ``num/den`` in [0, 1)."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0 or not 0 <= self.num < self.den:
            raise ValueError(f"not a normalized angle: {self.num}/{self.den}")

    @classmethod
    def of(cls, value) -> Angle:
        q = Fraction(value)
        n, d = q.numerator % q.denominator, q.denominator
        return cls(n, d)

    @classmethod
    def from_ratio(cls, num: int, den: int) -> Angle:
        """Reduce ``num/den`` mod 1 using a full gcd."""
        num %= den
        g = gcd(num, den)
        return cls(num // g, den // g)

    @classmethod
    def from_prime_power(cls, num: int, p: int, e: int) -> Angle:
        """``num / p**e`` mod 1, reduced by stripping factors of p only."""
        den = p ** e
        num %= den
        if num == 0:
            return cls(0, 1)
        while e > 0 and num % p == 0:
            num //= p
            e -= 1
        return cls(num, p ** e)

    @property
    def value(self) -> Fraction:
        return _fraction(self.num, self.den)

    def __add__(self, other: Angle) -> Angle:
        return Angle.from_ratio(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    def __neg__(self) -> Angle:
        return Angle((-self.num) % self.den, self.den) if self.num else self

    def __sub__(self, other: Angle) -> Angle:
        return self + (-other)

    def __mul__(self, k: int) -> Angle:
        if not isinstance(k, int):
            return NotImplemented
        return Angle.from_ratio(self.num * k, self.den)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"

    @classmethod
    def parse(cls, text: str) -> Angle:
        return cls.of(Fraction(text.strip()))


ZERO = Angle(0, 1)


def nearest_int_dist(a: Angle) -> Fraction:
    """Distance from ``a`` to the nearest integer, in [0, 1/2]."""
    n = min(a.num, a.den - a.num)
    return _fraction(n, a.den) if n else Fraction(0)


@dataclass(frozen=True)
class BoundInterval:
    """Closed float enclosure ``[lo, hi]``; ``hi = inf`` means lower bound only."""

    lo: float
    hi: float
    exact: bool = False

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        if self.exact and self.lo != self.hi:
            raise ValueError("exact interval must be degenerate")

    @classmethod
    def point(cls, x: float) -> BoundInterval:
        return cls(x, x, True)

    @property
    def lower_only(self) -> bool:
        return math.isinf(self.hi)

    def contains(self, x) -> bool:
        return Fraction(self.lo) <= Fraction(x) <= (
            Fraction(self.hi) if not self.lower_only else Fraction(x))

    def __add__(self, other: BoundInterval) -> BoundInterval:
        lo = round_down(Fraction(self.lo) + Fraction(other.lo))
        if self.lower_only or other.lower_only:
            return BoundInterval(lo, math.inf)
        hi = round_up(Fraction(self.hi) + Fraction(other.hi))
        exact = self.exact and other.exact and lo == hi
        return BoundInterval(lo, hi, exact)

    def __str__(self) -> str:
        return f"[{self.lo:.17g},{self.hi:.17g}]"

    @classmethod
    def parse(cls, text: str) -> BoundInterval:
        lo, hi = text.strip().strip("[]").split(",")
        lo, hi = float(lo), float(hi)
        return cls(lo, hi, lo == hi)


def round_up(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


def round_down(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) > q:
        f = math.nextafter(f, -math.inf)
    return f


def hull(*intervals: BoundInterval) -> BoundInterval:
    """Enclosure of the maximum of the enclosed quantities."""
    lo = max(i.lo for i in intervals)
    hi = max(i.hi for i in intervals)
    exact = all(i.exact for i in intervals) and lo == hi
    return BoundInterval(lo, hi, exact)


def _chord(num: int, den: int) -> BoundInterval:
    """Enclosure of ``2*sin(pi*num/den)`` for ``0 <= num/den <= 1/2``."""
    if num == 0:
        return BoundInterval.point(0.0)
    if 2 * num == den:
        return BoundInterval.point(2.0)
    if 6 * num == den:
        return BoundInterval.point(1.0)
    x = num / den  # int true division is correctly rounded
    if x < _TINY:
        # sin(pi*x) < pi*x < 4*x; stay clear of subnormal rounding.
        return BoundInterval(0.0, 8.0 * x + 5e-324)
    s = 2.0 * math.sin(math.pi * x)
    lo = math.nextafter(s * (1.0 - _REL_SLACK), 0.0)
    hi = math.nextafter(s * (1.0 + _REL_SLACK), math.inf)
    return BoundInterval(max(lo, 0.0), min(hi, 2.0))


def unit_norm(a: Angle, radius: Fraction = Fraction(0)) -> BoundInterval:
    """Enclose ``|1 - e^{2 pi i phi}| = 2 sin(pi ||phi||)``.

    With a nonzero ``radius`` the true angle is only known to lie within
    ``radius`` of ``a``; the chord is 2*pi-Lipschitz in the angle.
    """
    return ratio_norm(a.num, a.den, radius)


def ratio_norm(num: int, den: int, radius: Fraction = Fraction(0)) -> BoundInterval:
    """``unit_norm`` for the angle ``num/den`` with ``0 <= num < den``, not necessarily reduced."""
    base = _chord(min(num, den - num), den)
    if not radius:
        return base
    widen = PI_HI * 2 * radius
    lo = round_down(max(Fraction(base.lo) - widen, Fraction(0)))
    hi = min(round_up(Fraction(base.hi) + widen), 2.0)
    return BoundInterval(lo, hi)


def chord_of_distance(x: Fraction) -> BoundInterval:
    """``2 sin(pi x)`` for an exact distance ``0 <= x``; capped at 2 beyond 1/2."""
    if x >= Fraction(1, 2):
        return BoundInterval.point(2.0)
    return _chord(x.numerator, x.denominator)


def _atan_inv(n: int, scale: int) -> int:
    """``atan(1/n) * scale`` by its alternating series, truncated toward zero."""
    total, term, k, sign = 0, scale // n, 1, 1
    n2 = n * n
    while term:
        total += sign * (term // k)
        term //= n2
        k += 2
        sign = -sign
    return total


@lru_cache(maxsize=64)
def pi_bracket(bits: int) -> tuple[Fraction, Fraction]:
    """Rationals ``lo < pi < hi`` with ``hi - lo <= 2^-bits`` (Machin's formula)."""
    guard = bits + 32
    scale = 1 << guard
    approx = 16 * _atan_inv(5, scale) - 4 * _atan_inv(239, scale)
    # every series term is off by < 2 units: about guard/4.6 terms weighted
    # 16 and guard/15.8 terms weighted 4
    err = 8 * guard + 64
    return Fraction(approx - err, scale), Fraction(approx + err, scale)


def _sandwich_rational(x: Fraction) -> bool:
    """Sandwich for small ``0 < x`` from ``t - t^3/6 <= sin t <= t - t^3/6 + t^5/120``."""
    bits = 2 * max(x.denominator.bit_length() - x.numerator.bit_length(), 0) + 24
    lo_pi, hi_pi = pi_bracket(bits)
    t_lo, t_hi = lo_pi * x, hi_pi * x
    chord_lo = 2 * (t_lo - t_lo ** 3 / 6)
    chord_hi = 2 * (t_hi - t_hi ** 3 / 6 + t_hi ** 5 / 120)
    return hi_pi * x <= chord_lo and chord_hi <= 2 * lo_pi * x


def sandwich_holds(a: Angle) -> bool:
    """Certify ``pi*||a|| <= |1 - e^{2 pi i a}| <= 2*pi*||a||`` from an enclosure.

    The float enclosure must sit inside the rational bounds built from a
    lower/upper rational bracket of pi, so a True answer is a proof.  Below
    float resolution the upper inequality is tight to third order, and a
    rational Taylor enclosure with a finer pi bracket is used instead.
    """
    x = nearest_int_dist(a)
    enc = unit_norm(a)
    if PI_HI * x <= Fraction(enc.lo) and Fraction(enc.hi) <= 2 * PI_LO * x:
        return True
    return 0 < x < Fraction(1, 64) and _sandwich_rational(x)
