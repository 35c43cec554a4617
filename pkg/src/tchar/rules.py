"""Integer sequence rules: base sequences (radices / cyclic orders) and the
strictly increasing index rules ``n_k`` that select p-adic characters."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .syntax import ParseError, Term, fmt_list, parse_term


class RuleError(ValueError):
    pass


class BaseSequence:
    """A sequence of positive integers ``a_0, a_1, ...`` given by a rule."""

    def term(self, n: int) -> int:
        raise NotImplementedError

    def min_from(self, n: int) -> int:
        """Minimum of ``a_m`` over ``m >= n``."""
        raise NotImplementedError

    def tends_to_infinity(self) -> bool:
        raise NotImplementedError

    def strictly_increasing(self) -> bool:
        raise NotImplementedError

    def terms(self, n: int) -> list[int]:
        return [self.term(i) for i in range(n)]

    def check_radices(self):
        """Radix sequence of the torus model: ``a_n >= 2`` and ``a_n -> oo``."""
        if self.min_from(0) < 2:
            raise RuleError(f"{self}: every radix must be >= 2")
        if not self.tends_to_infinity():
            raise RuleError(f"{self}: radices must tend to infinity")

    def check_orders(self):
        """Cyclic orders of the product model: ``1 < b_0 < b_1 < ...``."""
        if self.term(0) <= 1:
            raise RuleError(f"{self}: b_0 must exceed 1")
        if not self.strictly_increasing():
            raise RuleError(f"{self}: orders must be strictly increasing")


@dataclass(frozen=True)
class Arithmetic(BaseSequence):
    start: int
    step: int

    def __post_init__(self):
        if self.start < 1 or self.step < 0:
            raise RuleError(f"{self}: terms must stay positive")

    def term(self, n):
        return self.start + self.step * n

    def min_from(self, n):
        return self.term(n)

    def tends_to_infinity(self):
        return self.step > 0

    def strictly_increasing(self):
        return self.step > 0

    def __str__(self):
        return f"arith({self.start},{self.step})"


@dataclass(frozen=True)
class Geometric(BaseSequence):
    start: int
    ratio: int

    def __post_init__(self):
        if self.start < 1 or self.ratio < 1:
            raise RuleError(f"{self}: terms must stay positive")

    def term(self, n):
        return self.start * self.ratio ** n

    def min_from(self, n):
        return self.term(n)

    def tends_to_infinity(self):
        return self.ratio > 1

    def strictly_increasing(self):
        return self.ratio > 1

    def __str__(self):
        return f"geom({self.start},{self.ratio})"


@dataclass(frozen=True)
class FactorialProduct(BaseSequence):
    """Running product ``prod_{k <= n} inner_k``."""

    inner: BaseSequence

    def term(self, n):
        out = 1
        for k in range(n + 1):
            out *= self.inner.term(k)
        return out

    def min_from(self, n):
        # inner terms are >= 1, so the running product is nondecreasing
        return self.term(n)

    def tends_to_infinity(self):
        return self.inner.tends_to_infinity() or self.inner.min_from(0) >= 2

    def strictly_increasing(self):
        return self.inner.min_from(1) >= 2

    def __str__(self):
        return f"prod({self.inner})"


@dataclass(frozen=True)
class Explicit(BaseSequence):
    """Listed terms, then ``then`` (indexed absolutely) from ``len(terms)`` on."""

    terms_: tuple[int, ...]
    then: BaseSequence

    def __post_init__(self):
        if any(t < 1 for t in self.terms_):
            raise RuleError(f"{self}: terms must be positive")

    def term(self, n):
        return self.terms_[n] if n < len(self.terms_) else self.then.term(n)

    def min_from(self, n):
        m = self.then.min_from(max(n, len(self.terms_)))
        return min([m, *self.terms_[n:]])

    def tends_to_infinity(self):
        return self.then.tends_to_infinity()

    def strictly_increasing(self):
        seq = [*self.terms_, self.then.term(len(self.terms_))]
        return all(a < b for a, b in zip(seq, seq[1:])) and self.then.strictly_increasing()

    def __str__(self):
        return f"explicit({fmt_list(self.terms_)},{self.then})"


def base_from_term(t: Term) -> BaseSequence:
    try:
        if t.name == "arith" and len(t.args) == 2:
            return Arithmetic(*map(_int, t.args))
        if t.name == "geom" and len(t.args) == 2:
            return Geometric(*map(_int, t.args))
        if t.name == "prod" and len(t.args) == 1 and isinstance(t.args[0], Term):
            return FactorialProduct(base_from_term(t.args[0]))
        if t.name == "explicit" and len(t.args) == 2 and isinstance(t.args[1], Term):
            return Explicit(tuple(map(_int, t.args[0])), base_from_term(t.args[1]))
    except (TypeError, RuleError) as exc:
        raise ParseError(f"bad base sequence {t.name}: {exc}")
    raise ParseError(f"unknown base sequence {t.name!r}")


def parse_base(text: str) -> BaseSequence:
    return base_from_term(parse_term(text))


def _int(x) -> int:
    if isinstance(x, Fraction) or not isinstance(x, int):
        raise TypeError(f"expected an integer, got {x!r}")
    return x


class IndexRule:
    """A strictly increasing sequence of naturals ``n_0 < n_1 < ...``.

    All concrete rules have nondecreasing gaps, which makes "gap > s for
    every w >= w0" decidable by locating the first such w.
    """

    def term(self, k: int) -> int:
        raise NotImplementedError

    def gap(self, k: int) -> int:
        return self.term(k + 1) - self.term(k)

    def gaps_diverge(self) -> bool:
        raise NotImplementedError

    def first_gap_above(self, s: int) -> int:
        """Least w with ``gap(v) > s`` for every ``v >= w``."""
        if self.gap(0) > s:
            return 0
        if not self.gaps_diverge():
            raise RuleError(f"{self}: gaps never exceed {s}")
        lo, hi = 0, 1
        while self.gap(hi) <= s:
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.gap(mid) > s:
                hi = mid
            else:
                lo = mid
        return hi

    def find(self, value: int) -> int | None:
        """Index k with ``n_k == value``, or None."""
        if value < self.term(0):
            return None
        lo, hi = 0, 1
        while self.term(hi) < value:
            lo, hi = hi, hi * 2
        while lo <= hi:
            mid = (lo + hi) // 2
            t = self.term(mid)
            if t == value:
                return mid
            if t < value:
                lo = mid + 1
            else:
                hi = mid - 1
        return None

    def last_below(self, value: int) -> int:
        """Largest k with ``n_k <= value`` (-1 if none)."""
        if value < self.term(0):
            return -1
        lo, hi = 0, 1
        while self.term(hi) <= value:
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.term(mid) <= value:
                lo = mid
            else:
                hi = mid
        return lo


@dataclass(frozen=True)
class Squares(IndexRule):
    def term(self, k):
        return k * k

    def gaps_diverge(self):
        return True

    def find(self, value):
        r = isqrt(value) if value >= 0 else -1
        return r if r >= 0 and r * r == value else None

    def __str__(self):
        return "squares"


@dataclass(frozen=True)
class Triangular(IndexRule):
    """``n_k = (k+1)(k+2)/2``: 1, 3, 6, 10, ..."""

    def term(self, k):
        return (k + 1) * (k + 2) // 2

    def gaps_diverge(self):
        return True

    def __str__(self):
        return "triangular"


@dataclass(frozen=True)
class Quadratic(IndexRule):
    """``n_k = a k^2 + b k + c``."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a < 0 or self.c < 0 or self.a + self.b <= 0:
            raise RuleError(f"{self}: not a strictly increasing rule on naturals")

    def term(self, k):
        return self.a * k * k + self.b * k + self.c

    def gaps_diverge(self):
        return self.a > 0

    def __str__(self):
        return f"quad({self.a},{self.b},{self.c})"


@dataclass(frozen=True)
class PowerIndex(IndexRule):
    """``n_k = c * r^k``."""

    c: int
    r: int

    def __post_init__(self):
        if self.c < 1 or self.r < 2:
            raise RuleError(f"{self}: need c >= 1 and r >= 2")

    def term(self, k):
        return self.c * self.r ** k

    def gaps_diverge(self):
        return True

    def __str__(self):
        return f"pow({self.c},{self.r})"


def index_from_term(t: Term) -> IndexRule:
    try:
        if t.name == "squares" and not t.args:
            return Squares()
        if t.name == "triangular" and not t.args:
            return Triangular()
        if t.name == "quad" and len(t.args) == 3:
            return Quadratic(*map(_int, t.args))
        if t.name == "pow" and len(t.args) == 2:
            return PowerIndex(*map(_int, t.args))
    except (TypeError, RuleError) as exc:
        raise ParseError(f"bad index rule {t.name}: {exc}")
    raise ParseError(f"unknown index rule {t.name!r}")


def parse_index(text: str) -> IndexRule:
    return index_from_term(parse_term(text))
