"""Compact group models with exact character pairings.

Three models are supported:

* ``Torus(bases)``: the circle R/Z with points written in the mixed radix
  ``x = sum c_n / u_n``, ``u_n = a_0 a_1 ... a_n``; characters are integers.
* ``PAdic(p, nk)``: the p-adic integers as digit streams; characters are
  fractions ``m / p^t`` of the Pruefer group.
* ``Product(bases)``: ``prod Z(b_n)``; characters are finitely supported
  integer tuples.

Points are a finite digit prefix followed by a symbolic tail rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import math

from .arith import (Angle, BoundInterval, ZERO, chord_of_distance, hull, ratio_norm,
                    nearest_int_dist, round_down, round_up, unit_norm)
from .rules import BaseSequence, IndexRule, RuleError, base_from_term, index_from_term
from .syntax import (ParseError, Term, fmt_list, fmt_number, parse_list, parse_number,
                     parse_term, split_fields)

DEFAULT_HORIZON = 256


class ModelError(ValueError):
    """Operands live on different models, or a value is out of range."""


class HorizonError(ValueError):
    pass


class NonTerminating(ValueError):
    def __init__(self, horizon: int):
        self.horizon = horizon
        super().__init__(f"expansion does not terminate within {horizon} digits")


class IncomparableTails(ValueError):
    pass


# -- models -----------------------------------------------------------------

@dataclass(frozen=True)
class Torus:
    bases: BaseSequence

    def __post_init__(self):
        self.bases.check_radices()

    def __str__(self):
        return f"model=torus bases={self.bases}"


@dataclass(frozen=True)
class PAdic:
    p: int
    nk: IndexRule | None = None

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, math.isqrt(self.p) + 1)):
            raise ModelError(f"p = {self.p} is not prime")

    def __str__(self):
        return f"model=padic p={self.p}" + (f" nk={self.nk}" if self.nk else "")


@dataclass(frozen=True)
class Product:
    bases: BaseSequence

    def __post_init__(self):
        if self.bases.min_from(0) < 2:
            raise RuleError(f"{self.bases}: cyclic orders must be >= 2")

    def __str__(self):
        return f"model=product bases={self.bases}"


Model = Torus | PAdic | Product


def radix(model: Model, n: int) -> int:
    """Number of admissible digits at index n."""
    if isinstance(model, PAdic):
        return model.p
    return model.bases.term(n)


def _min_radix_from(model: Model, n: int) -> int:
    if isinstance(model, PAdic):
        return model.p
    return model.bases.min_from(n)


# -- tail rules ---------------------------------------------------------------

class TailRule:
    """Digits at every index past the prefix, as a function of the index."""

    def digit(self, n: int, model: Model) -> int:
        raise NotImplementedError

    def check(self, model: Model, start: int):
        """Raise ModelError unless every digit from ``start`` on is legal."""

    def ratio_bound(self, model: Model, start: int) -> Fraction:
        """Upper bound on ``digit_n / (radix_n - 1)`` over ``n >= start``."""
        raise NotImplementedError

    def digits(self, model: Model, start: int, stop: int) -> list[int]:
        return [self.digit(n, model) for n in range(start, stop)]


@dataclass(frozen=True)
class Zero(TailRule):
    def digit(self, n, model):
        return 0

    def digits(self, model, start, stop):
        return [0] * max(stop - start, 0)

    def ratio_bound(self, model, start):
        return Fraction(0)

    def __str__(self):
        return "zero"


@dataclass(frozen=True)
class ConstantDigit(TailRule):
    c: int

    def digit(self, n, model):
        return self.c

    def check(self, model, start):
        if self.c < 0 or self.c >= _min_radix_from(model, start):
            raise ModelError(f"constant digit {self.c} out of range")

    def ratio_bound(self, model, start):
        return min(Fraction(self.c, _min_radix_from(model, start) - 1), Fraction(1))

    def __str__(self):
        return f"const({self.c})"


@dataclass(frozen=True)
class Periodic(TailRule):
    """``digit_n = pattern[n mod len(pattern)]`` (absolute index)."""

    pattern: tuple[int, ...]

    def __post_init__(self):
        if not self.pattern:
            raise ModelError("empty periodic pattern")

    def digit(self, n, model):
        return self.pattern[n % len(self.pattern)]

    def check(self, model, start):
        if min(self.pattern) < 0 or max(self.pattern) >= _min_radix_from(model, start):
            raise ModelError(f"periodic digits {self.pattern} out of range")

    def ratio_bound(self, model, start):
        return min(Fraction(max(self.pattern), _min_radix_from(model, start) - 1), Fraction(1))

    def __str__(self):
        return f"periodic({fmt_list(self.pattern)})"


@dataclass(frozen=True)
class ScaledFloor(TailRule):
    """Digits tracking a fixed fraction ``t`` of the radix.

    Torus: ``floor((a_n - 1) t)``; product: ``floor(b_n t)``.  Both digit
    ratios tend to ``t``.
    """

    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if not 0 <= self.t < 1:
            raise ModelError(f"scaled-floor fraction {self.t} outside [0, 1)")

    def digit(self, n, model):
        if isinstance(model, Torus):
            return math.floor((model.bases.term(n) - 1) * self.t)
        if isinstance(model, Product):
            return math.floor(model.bases.term(n) * self.t)
        raise ModelError("scaledfloor tails are defined on torus and product models")

    def check(self, model, start):
        if isinstance(model, PAdic):
            raise ModelError("scaledfloor tails are defined on torus and product models")

    def ratio_bound(self, model, start):
        if isinstance(model, Product):
            # floor(b t) / (b - 1) <= t b / (b - 1)
            b = model.bases.min_from(start)
            return min(self.t * b / (b - 1), Fraction(1))
        return self.t

    def __str__(self):
        return f"scaledfloor({fmt_number(self.t)})"


@dataclass(frozen=True)
class SpacedOnes(TailRule):
    """Ones exactly at ``n_{l+i} - s`` for ``i >= 1`` (p-adic model only)."""

    l: int
    s: int

    def __post_init__(self):
        if self.l < 0 or self.s < 1:
            raise ModelError("spacedones needs l >= 0 and s >= 1")

    def _rule(self, model) -> IndexRule:
        if not isinstance(model, PAdic) or model.nk is None:
            raise ModelError("spacedones tails need a p-adic model with an nk rule")
        return model.nk

    def positions(self, model, stop: int):
        nk = self._rule(model)
        i = 1
        while True:
            pos = nk.term(self.l + i) - self.s
            if pos >= stop:
                return
            if pos >= 0:
                yield pos
            i += 1

    def digit(self, n, model):
        k = self._rule(model).find(n + self.s)
        return 1 if k is not None and k > self.l else 0

    def digits(self, model, start, stop):
        out = [0] * max(stop - start, 0)
        for pos in self.positions(model, stop):
            if pos >= start:
                out[pos - start] = 1
        return out

    def check(self, model, start):
        self._rule(model)

    def ratio_bound(self, model, start):
        return Fraction(1, model.p - 1)

    def __str__(self):
        return f"spacedones({self.l},{self.s})"


def tail_from_term(t: Term) -> TailRule:
    try:
        if t.name == "zero" and not t.args:
            return Zero()
        if t.name == "const" and len(t.args) == 1 and isinstance(t.args[0], int):
            return ConstantDigit(t.args[0])
        if t.name == "periodic" and len(t.args) == 1 and isinstance(t.args[0], tuple):
            return Periodic(tuple(int(x) for x in t.args[0]))
        if t.name == "scaledfloor" and len(t.args) == 1 and not isinstance(t.args[0], (Term, tuple)):
            return ScaledFloor(Fraction(t.args[0]))
        if t.name == "spacedones" and len(t.args) == 2:
            return SpacedOnes(int(t.args[0]), int(t.args[1]))
    except ModelError as exc:
        raise ParseError(f"bad tail {t.name}: {exc}")
    raise ParseError(f"unknown tail rule {t.name!r}")


# -- elements -----------------------------------------------------------------

@dataclass(frozen=True)
class Element:
    model: Model
    prefix: tuple[int, ...] = ()
    tail: TailRule = field(default_factory=Zero)

    def __post_init__(self):
        prefix = tuple(int(c) for c in self.prefix)
        if isinstance(self.tail, Zero):
            # trailing zeros before a zero tail carry no information
            while prefix and prefix[-1] == 0:
                prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        for n, c in enumerate(self.prefix):
            if not 0 <= c < radix(self.model, n):
                raise ModelError(f"digit {c} at index {n} out of range [0, {radix(self.model, n)})")
        self.tail.check(self.model, len(self.prefix))

    def digit(self, n: int) -> int:
        return self.prefix[n] if n < len(self.prefix) else self.tail.digit(n, self.model)

    def digits(self, h: int) -> tuple[int, ...]:
        return _digits(self, h)

    @property
    def finite(self) -> bool:
        return isinstance(self.tail, Zero)

    def support_end(self) -> int:
        """One past the last nonzero digit of a Zero-tail element."""
        for n in range(len(self.prefix) - 1, -1, -1):
            if self.prefix[n]:
                return n + 1
        return 0

    def __str__(self):
        return f"{self.model} prefix={fmt_list(self.prefix)} tail={self.tail}"


@lru_cache(maxsize=4096)
def _digits(x: Element, h: int) -> tuple[int, ...]:
    if h <= len(x.prefix):
        return x.prefix[:h]
    return x.prefix + tuple(x.tail.digits(x.model, len(x.prefix), h))


def zero(model: Model) -> Element:
    return Element(model)


# -- characters and sequences ---------------------------------------------------

def check_character(model: Model, chi):
    if isinstance(model, Torus):
        if not isinstance(chi, int):
            raise ModelError("torus characters are integers")
    elif isinstance(model, PAdic):
        if not isinstance(chi, Fraction) or not 0 <= chi < 1:
            raise ModelError("p-adic characters are fractions m/p^t in [0, 1)")
        d = chi.denominator
        while d % model.p == 0:
            d //= model.p
        if d != 1:
            raise ModelError(f"{chi} is not in the Pruefer {model.p}-group")
    else:
        if not isinstance(chi, tuple):
            raise ModelError("product characters are finite integer tuples")
        for n, v in enumerate(chi):
            if not 0 <= v < model.bases.term(n):
                raise ModelError(f"character coordinate {v} at {n} out of range")


@dataclass(frozen=True)
class CharSequence:
    """The characterizing sequence attached to a model.

    Torus: ``u_n = a_0 ... a_n``; p-adic: ``u_k = 1/p^(n_k + 1)``;
    product: ``u_n`` = the generator of the n-th factor.
    """

    model: Model

    def __post_init__(self):
        m = self.model
        if isinstance(m, PAdic):
            if m.nk is None:
                raise ModelError("a p-adic sequence needs an nk rule")
            if not m.nk.gaps_diverge():
                raise RuleError(f"{m.nk}: gaps n_(k+1) - n_k must tend to infinity")
        elif isinstance(m, Product):
            m.bases.check_orders()

    def __call__(self, n: int):
        m = self.model
        if isinstance(m, Torus):
            return partial_product(m.bases, n)
        if isinstance(m, PAdic):
            return _fraction_pow(m.p, m.nk.term(n) + 1)
        return (0,) * n + (1,)

    def __str__(self):
        return str(self.model)


def _fraction_pow(p: int, e: int) -> Fraction:
    return Fraction(1, p ** e, _normalize=False)


_PRODUCTS: dict[BaseSequence, list[int]] = {}


def partial_product(bases: BaseSequence, n: int) -> int:
    """``a_0 a_1 ... a_n``; 1 for ``n = -1``."""
    if n < 0:
        return 1
    cache = _PRODUCTS.setdefault(bases, [])
    while len(cache) <= n:
        prev = cache[-1] if cache else 1
        cache.append(prev * bases.term(len(cache)))
    return cache[n]


# -- pairing --------------------------------------------------------------------

@dataclass(frozen=True)
class Pairing:
    """``(chi, x)`` as an angle: exact when ``radius == 0``, else the true
    angle lies within ``radius`` of ``angle`` on the circle."""

    angle: Angle
    radius: Fraction = Fraction(0)

    @property
    def exact(self) -> bool:
        return self.radius == 0

    def norm(self) -> BoundInterval:
        return unit_norm(self.angle, self.radius)

    def __sub__(self, other: Pairing) -> Pairing:
        return Pairing(self.angle - other.angle, self.radius + other.radius)


@lru_cache(maxsize=1024)
def _torus_truncation(x: Element, h: int) -> tuple[int, int]:
    """``(N, U)`` with ``sum_{n<h} c_n/u_n = N/U`` and ``U = u_(h-1)``."""
    bases = x.model.bases
    num = 0
    for n, c in enumerate(x.digits(h)):
        num = num * bases.term(n) + c
    return num, partial_product(bases, h - 1)


@lru_cache(maxsize=1024)
def _padic_value(x: Element, t: int) -> int:
    return _digits_value(x.digits(t), x.model.p)


def _digits_value(digits, p: int) -> int:
    """``sum d_i p^i``, split in halves so long digit strings stay subquadratic."""
    if len(digits) <= 64:
        num = 0
        for d in reversed(digits):
            num = num * p + d
        return num
    mid = len(digits) // 2
    return _digits_value(digits[:mid], p) + p ** mid * _digits_value(digits[mid:], p)



def pair(chi, x: Element, horizon: int = DEFAULT_HORIZON) -> Pairing:
    check_character(x.model, chi)
    m = x.model
    if isinstance(m, PAdic):
        if chi == 0:
            return Pairing(ZERO)
        t = _valuation_den(chi.denominator, m.p)
        if horizon < t - 1:
            raise HorizonError(f"character reads digit {t - 1} beyond horizon {horizon}")
        return Pairing(Angle.from_prime_power(chi.numerator * _padic_value(x, t), m.p, t))
    if isinstance(m, Product):
        last = max((n for n, v in enumerate(chi) if v), default=-1)
        if horizon < last:
            raise HorizonError(f"character reads index {last} beyond horizon {horizon}")
        num, den = 0, 1
        for n, v in enumerate(chi):
            if v:
                b = m.bases.term(n)
                num, den = num * b + v * x.digit(n) * den, den * b
        return Pairing(Angle.from_ratio(num, den))
    # torus
    if chi == 0:
        return Pairing(ZERO)
    h = max(horizon, len(x.prefix))
    if x.finite:
        h = len(x.prefix)
    num, den = _torus_truncation(x, h)
    radius = abs(chi) * x.tail.ratio_bound(m, h) / den if not x.finite else Fraction(0)
    return Pairing(Angle.from_ratio(chi * num, den), radius)


def _valuation_den(den: int, p: int) -> int:
    t = 0
    while den > 1:
        den //= p
        t += 1
    return t


def pair_sequence(u: CharSequence, n: int, x: Element, horizon: int = DEFAULT_HORIZON) -> Pairing:
    """``(u_n, x)`` with the cheapest exact route for each model."""
    m = x.model
    if m != u.model:
        raise ModelError("sequence and element live on different models")
    if isinstance(m, Product):
        b = m.bases.term(n)
        return Pairing(Angle.from_ratio(x.digit(n), b))
    if isinstance(m, PAdic):
        t = m.nk.term(n) + 1
        return Pairing(Angle.from_prime_power(_padic_value(x, t), m.p, t))
    # torus: u_n x = sum_{j>n} c_j / (a_{n+1} ... a_j)
    h = len(x.prefix) if x.finite else max(horizon, len(x.prefix), n + 1)
    if n + 1 >= h and x.finite:
        return Pairing(ZERO)
    num, den = _torus_truncation(x, h)
    un = partial_product(m.bases, n)
    q = den // un
    radius = Fraction(0) if x.finite else x.tail.ratio_bound(m, h) / q
    return Pairing(Angle.from_ratio(num % q, q), radius)


# p-adic traces stop at the last index whose digit position fits this budget
MAX_PADIC_DIGITS = 1 << 20


def padic_reach(nk, count: int) -> int:
    """How many of the first ``count`` indices have ``n_k < MAX_PADIC_DIGITS``."""
    return min(count, nk.last_below(MAX_PADIC_DIGITS - 1) + 1)


def pair_trace(u: CharSequence, x: Element, count: int, horizon: int = DEFAULT_HORIZON):
    """``(u_n, x)`` for ``n < count``; p-adic values are accumulated incrementally."""
    m = x.model
    if not isinstance(m, PAdic):
        for n in range(count):
            yield pair_sequence(u, n, x, horizon)
        return
    if m != u.model:
        raise ModelError("sequence and element live on different models")
    count = padic_reach(m.nk, count)
    if count <= 0:
        return
    digits = x.digits(m.nk.term(count - 1) + 1)
    p = m.p
    value, done, scale, strip = 0, 0, 1, None
    for n in range(count):
        t = m.nk.term(n) + 1
        value += scale * _digits_value(digits[done:t], p)
        scale *= p ** (t - done)
        done = t
        if not value:
            yield Pairing(ZERO)
            continue
        if strip is None:
            # later digits sit above the lowest nonzero one, so the p-power is fixed
            tz, rest = 0, value
            while rest % p == 0:
                rest //= p
                tz += 1
            strip = p ** tz
        yield Pairing(Angle(value // strip, scale // strip))


def norm_trace(u: CharSequence, x: Element, count: int, horizon: int = DEFAULT_HORIZON):
    """Enclosures of ``|1 - (u_n, x)|`` for ``n < count`` without reducing angles."""
    m = x.model
    if not isinstance(m, Torus):
        for pr in pair_trace(u, x, count, horizon):
            yield pr.norm()
        return
    if m != u.model:
        raise ModelError("sequence and element live on different models")
    h = len(x.prefix) if x.finite else max(horizon, len(x.prefix), count)
    num, den = _torus_truncation(x, h) if h else (0, 1)
    slack = Fraction(0) if x.finite else x.tail.ratio_bound(m, h)
    for n in range(count):
        if n + 1 >= h and x.finite:
            yield ratio_norm(0, 1)
            continue
        q = den // partial_product(m.bases, n)
        yield ratio_norm(num % q, q, slack / q)


# -- mixed radix encoding ---------------------------------------------------------

def encode_torus(q, bases: BaseSequence, horizon: int = DEFAULT_HORIZON) -> Element:
    """Greedy mixed-radix digits of a rational ``q`` in [0, 1)."""
    q = Fraction(q)
    if not 0 <= q < 1:
        raise ValueError(f"{q} is not in [0, 1)")
    model = Torus(bases)
    digits = []
    r = q
    n = 0
    while r:
        if n >= horizon:
            raise NonTerminating(horizon)
        r *= bases.term(n)
        c = math.floor(r)
        digits.append(c)
        r -= c
        n += 1
    return Element(model, tuple(digits))


def torus_value(x: Element) -> Fraction:
    if not isinstance(x.model, Torus) or not x.finite:
        raise ModelError("only Zero-tail torus points have an exact value")
    num, den = _torus_truncation(x, len(x.prefix))
    return Fraction(num, den)


def add(x: Element, y: Element) -> Element:
    """Group sum of two Zero-tail elements."""
    if x.model != y.model:
        raise ModelError("cannot add points of different models")
    if not (x.finite and y.finite):
        raise ModelError("addition is implemented for Zero-tail elements")
    m = x.model
    if isinstance(m, Torus):
        h = max(len(x.prefix), len(y.prefix))
        return encode_torus((torus_value(x) + torus_value(y)) % 1, m.bases, h + 1)
    if isinstance(m, Product):
        h = max(len(x.prefix), len(y.prefix))
        return Element(m, tuple((x.digit(n) + y.digit(n)) % m.bases.term(n) for n in range(h)))
    total = _padic_value(x, len(x.prefix)) + _padic_value(y, len(y.prefix))
    digits = []
    while total:
        total, d = divmod(total, m.p)
        digits.append(d)
    return Element(m, tuple(digits))


# -- metrics ----------------------------------------------------------------------

def _dist_range(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    """Range of the nearest-integer distance over ``[a, b]``."""
    ends = [nearest_int_dist(Angle.of(a)), nearest_int_dist(Angle.of(b))]
    half = Fraction(1, 2)
    lo = Fraction(0) if math.ceil(a) <= b else min(ends)
    hi = half if math.ceil(a - half) <= b - half else max(ends)
    return lo, hi


def metric_d_bounds(x: Element, y: Element, horizon: int = DEFAULT_HORIZON) -> tuple[Fraction, Fraction]:
    """Enclosure ``(lo, hi)`` of the ambient distance ``d(x, y)``."""
    if x.model != y.model:
        raise ModelError("points live on different models")
    m = x.model
    L = max(len(x.prefix), len(y.prefix))
    same_tail = x.tail == y.tail
    if isinstance(m, Torus):
        h = L if same_tail else max(horizon, L)
        nx, den = _torus_truncation(x, h)
        ny, _ = _torus_truncation(y, h)
        delta = Fraction(nx - ny, den)
        if same_tail:
            d = nearest_int_dist(Angle.of(delta))
            return d, d
        rx = x.tail.ratio_bound(m, h) / den
        ry = y.tail.ratio_bound(m, h) / den
        return _dist_range(delta - ry, delta + rx)
    h = L if same_tail else max(horizon, L)
    dx, dy = x.digits(h), y.digits(h)
    for n in range(h):
        if dx[n] != dy[n]:
            d = Fraction(1, 2 ** n)
            return d, d
    if same_tail:
        return Fraction(0), Fraction(0)
    return Fraction(0), Fraction(1, 2 ** h)


def metric_d(x: Element, y: Element, horizon: int = DEFAULT_HORIZON) -> Fraction:
    """Exact ambient distance; torus ``||x - y||``, otherwise ``2^-(first differing index)``."""
    lo, hi = metric_d_bounds(x, y, horizon)
    if lo != hi:
        raise IncomparableTails(f"distance between tails {x.tail} and {y.tail} is not exact")
    return lo


# -- rho ------------------------------------------------------------------------------

def _angle_tail_bound(u: CharSequence, x: Element, start: int) -> Fraction | None:
    """Bound on ``||(u_n, x)||`` (as an upper bound on the angle in [0, 1)
    measured from 0 in the positive direction) valid for every ``n >= start``;
    None when the tail rule admits no useful bound."""
    m = x.model
    if isinstance(m, Torus):
        # u_n x = sum_{j>n} c_j / (a_{n+1}...a_j) <= ratio bound
        if x.finite and start + 1 >= len(x.prefix):
            return Fraction(0)
        if start + 1 < len(x.prefix):
            return None
        return x.tail.ratio_bound(m, start + 1)
    if isinstance(m, Product):
        if start < len(x.prefix):
            return None
        if isinstance(x.tail, ScaledFloor):
            return x.tail.t
        b = m.bases.min_from(start)
        if isinstance(x.tail, Zero):
            return Fraction(0)
        if isinstance(x.tail, ConstantDigit):
            return Fraction(x.tail.c, b)
        if isinstance(x.tail, Periodic):
            return Fraction(max(x.tail.pattern), b)
        return None
    nk = m.nk
    if x.finite:
        # A < p^L, so the angle is below p^(L - n_k - 1), decreasing in k
        L = x.support_end()
        return min(Fraction(m.p ** L, m.p ** (nk.term(start) + 1)), Fraction(1))
    if isinstance(x.tail, SpacedOnes):
        s = x.tail.s
        # on (n_k - s, n_k] all digits vanish once gaps exceed s and the
        # prefix has been passed; then A_k < p^(n_k - s + 1)
        ok = (start >= nk.first_gap_above(s) and start >= x.tail.l
              and nk.term(start) - s + 1 >= len(x.prefix))
        return Fraction(1, m.p ** s) if ok else None
    return None


def rho_start(u: CharSequence, x: Element, y: Element, horizon: int) -> int:
    """Index from which the analytic tail bound of ``rho`` takes over."""
    m = x.model
    N = horizon
    if isinstance(m, (Torus, Product)):
        N = max(N, len(x.prefix), len(y.prefix))
    elif isinstance(m, PAdic):
        for e in (x, y):
            if isinstance(e.tail, SpacedOnes):
                N = max(N, e.tail.l, m.nk.first_gap_above(e.tail.s))
            N = max(N, m.nk.last_below(len(e.prefix)) + 1)
    return N


def rho(u: CharSequence, x: Element, y: Element, horizon: int = DEFAULT_HORIZON) -> BoundInterval:
    """Enclosure of ``d(x, y) + sup_n |(u_n, x) - (u_n, y)|``.

    Pairings are evaluated exactly below the start index; beyond it an
    analytic tail bound closes the supremum.  Without one the result is
    lower-bound-only (``hi = inf``).
    """
    if not (u.model == x.model == y.model):
        raise ModelError("rho needs a shared model")
    horizon = max(horizon, 1)
    dlo, dhi = metric_d_bounds(x, y, horizon)
    d = BoundInterval(round_down(dlo), round_up(dhi), dlo == dhi and Fraction(float(dlo)) == dlo)
    N = rho_start(u, x, y, horizon)
    sup = BoundInterval.point(0.0)
    for n in range(N):
        diff = pair_sequence(u, n, x, N + 64) - pair_sequence(u, n, y, N + 64)
        sup = hull(sup, diff.norm())
    bx = _angle_tail_bound(u, x, N)
    by = _angle_tail_bound(u, y, N)
    if bx is None or by is None:
        return BoundInterval(round_down(Fraction(d.lo) + Fraction(sup.lo)), math.inf)
    tail_hi = chord_of_distance(max(bx, by)).hi
    tail = BoundInterval(0.0, tail_hi, tail_hi == 0.0)
    return d + hull(sup, tail)


# -- textual format ------------------------------------------------------------------

def model_from_fields(fields: dict[str, tuple[str, int]]) -> Model:
    if "model" not in fields:
        raise ParseError("missing field 'model'")
    kind, col = fields["model"]
    needed = {"torus": "bases", "product": "bases", "padic": "p"}
    if kind not in needed:
        raise ParseError(f"unknown model {kind!r}", "", col)
    if needed[kind] not in fields:
        raise ParseError(f"missing field {needed[kind]!r} for model {kind}")
    try:
        if kind == "padic":
            text, col = fields["p"]
            p = parse_number(text, col)
            if not isinstance(p, int):
                raise ParseError("p must be an integer", text, col)
            nk = index_from_term(parse_term(*fields["nk"])) if "nk" in fields else None
            return PAdic(p, nk)
        bases = base_from_term(parse_term(*fields["bases"]))
        return Torus(bases) if kind == "torus" else Product(bases)
    except (RuleError, ModelError) as exc:
        raise ParseError(str(exc)) from None


def _fields(line: str) -> dict[str, tuple[str, int]]:
    out = {}
    for key, value, col in split_fields(line.strip()):
        if key in out:
            raise ParseError(f"duplicate field {key!r}", line, col)
        out[key] = (value, col)
    return out


_MODEL_KEYS = {"model", "bases", "p", "nk"}


def parse_element(line: str) -> Element:
    """Parse ``model=... [bases=|p= nk=] prefix=[...] tail=...``."""
    fields = _fields(line)
    unknown = set(fields) - _MODEL_KEYS - {"prefix", "tail"}
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}", line)
    model = model_from_fields(fields)
    prefix = ()
    if "prefix" in fields:
        prefix = parse_list(*fields["prefix"])
        if any(not isinstance(c, int) for c in prefix):
            raise ParseError("prefix digits must be integers", line)
    tail = Zero()
    if "tail" in fields:
        tail = tail_from_term(parse_term(*fields["tail"]))
    try:
        return Element(model, prefix, tail)
    except (ModelError, RuleError) as exc:
        raise ParseError(str(exc), line)


def parse_sequence(line: str) -> CharSequence:
    """Parse a model line as its characterizing sequence (prefix/tail ignored)."""
    fields = _fields(line)
    model = model_from_fields(fields)
    try:
        return CharSequence(model)
    except (ModelError, RuleError) as exc:
        raise ParseError(str(exc), line)


def format_element(x: Element) -> str:
    return str(x)


def format_sequence(u: CharSequence) -> str:
    return str(u)
