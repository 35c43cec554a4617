"""Decision procedures on symbolic countable abelian groups.

A descriptor is a finite direct sum of factors

    Z:m            infinite cyclic
    Z(n):m         cyclic of order n >= 2
    Zp(p,inf):m    Pruefer p-group
    Zfam(b):m      one copy of Z(b_n) for every n, b a strictly increasing rule

with multiplicities ``m`` in ``{1, 2, ...}`` or ``omega``.  Descriptors
stand for discrete (dual) groups: the annihilator of a closed subgroup, or
the dual of a compact group.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product as cartesian

from .rules import BaseSequence, RuleError, base_from_term
from .syntax import ParseError, Term, parse_term

INFINITY = math.inf


class _Omega:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "omega"

    __str__ = __repr__


OMEGA = _Omega()


@dataclass(frozen=True)
class InfiniteCyclic:
    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class Cyclic:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"cyclic order {self.n} must be >= 2")

    def __str__(self):
        return f"Z({self.n})"


@dataclass(frozen=True)
class Prufer:
    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __str__(self):
        return f"Zp({self.p},inf)"


@dataclass(frozen=True)
class CyclicFamily:
    bases: BaseSequence

    def __post_init__(self):
        self.bases.check_orders()

    def __str__(self):
        return f"Zfam({self.bases})"


Kind = InfiniteCyclic | Cyclic | Prufer | CyclicFamily


@dataclass(frozen=True)
class Factor:
    kind: Kind
    mult: int | _Omega = 1

    def __post_init__(self):
        if self.mult is not OMEGA and (not isinstance(self.mult, int) or self.mult < 1):
            raise ValueError(f"multiplicity {self.mult!r} must be a positive integer or omega")

    def __str__(self):
        return f"{self.kind}:{self.mult}"

    def count(self, k: int) -> int:
        """Multiplicity with omega truncated at k."""
        return k if self.mult is OMEGA else self.mult


@dataclass(frozen=True)
class GroupDescriptor:
    factors: tuple[Factor, ...]

    def __str__(self):
        return " + ".join(str(f) for f in self.factors)

    @property
    def is_finite(self) -> bool:
        return all(isinstance(f.kind, Cyclic) and f.mult is not OMEGA for f in self.factors)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, math.isqrt(n) + 1))


@lru_cache(maxsize=4096)
def _prime_powers(n: int) -> tuple[tuple[int, int], ...]:
    out = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return tuple(out.items())


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# -- parsing --------------------------------------------------------------------------------

def _kind_from_term(t: Term) -> Kind:
    if t.name == "Z" and not t.args:
        return InfiniteCyclic()
    if t.name == "Z" and len(t.args) == 1 and isinstance(t.args[0], int):
        return Cyclic(t.args[0])
    if (t.name == "Zp" and len(t.args) == 2 and isinstance(t.args[0], int)
            and t.args[1] == Term("inf")):
        return Prufer(t.args[0])
    if t.name == "Zfam" and len(t.args) == 1 and isinstance(t.args[0], Term):
        return CyclicFamily(base_from_term(t.args[0]))
    raise ParseError(f"unknown factor kind {t.name!r}")


def _split_top(text: str, sep: str) -> list[tuple[str, int]]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    return parts


def parse_descriptor(text: str) -> GroupDescriptor:
    """Parse ``Z:1 + Z(2):omega + Zp(3,inf):1 + Zfam(geom(2,2)):1``."""
    source = text
    text = " ".join(line.split("#", 1)[0] for line in text.splitlines())
    if not text.strip():
        raise ParseError("empty descriptor", source)
    factors = []
    for chunk, col in _split_top(text, "+"):
        if not chunk.strip():
            raise ParseError("empty summand", text, col)
        pieces = _split_top(chunk, ":")
        if len(pieces) != 2:
            raise ParseError("expected kind:multiplicity", text, col)
        (kind_text, kcol), (mult_text, mcol) = pieces
        mult_text = mult_text.strip()
        if mult_text in ("omega", "w", "ω"):
            mult = OMEGA
        elif mult_text.isdigit() and int(mult_text) >= 1:
            mult = int(mult_text)
        else:
            raise ParseError(f"bad multiplicity {mult_text!r}", text, col + mcol)
        try:
            kind = _kind_from_term(parse_term(kind_text, col + kcol))
        except (ValueError, RuleError) as exc:
            if isinstance(exc, ParseError) and exc.pos is not None:
                raise
            raise ParseError(str(exc), text, col + kcol) from None
        factors.append(Factor(kind, mult))
    return GroupDescriptor(tuple(factors))


# -- invariants ---------------------------------------------------------------------------------

def exponent(d: GroupDescriptor) -> int | float:
    """Least n killing the group, or INFINITY."""
    if any(not isinstance(f.kind, Cyclic) for f in d.factors):
        return INFINITY
    return reduce(math.lcm, (f.kind.n for f in d.factors), 1)


@dataclass(frozen=True)
class SocleRank:
    rank: int
    unbounded: bool


def socle_rank(d: GroupDescriptor, e: int, k: int) -> SocleRank:
    """Largest r with ``Z(e)^r`` embedded in d, omega truncated at k.

    For each prime power ``p^a || e`` the copies of ``Z(p^a)`` come from
    cyclic factors whose order is divisible by ``p^a``; the rank is the
    minimum over the primes of e.  It is unbounded in k exactly when every
    prime has a contributing omega factor.
    """
    if exponent(d) == INFINITY:
        raise ValueError("socle rank needs a descriptor of finite exponent")
    if e < 2:
        raise ValueError("e must be >= 2")
    ranks, unbounded = [], True
    for p, a in _prime_powers(e):
        contributing = [f for f in d.factors if _valuation(f.kind.n, p) >= a]
        ranks.append(sum(f.count(k) for f in contributing))
        unbounded &= any(f.mult is OMEGA for f in contributing)
    return SocleRank(min(ranks), unbounded)


def has_omega_socle(d: GroupDescriptor) -> bool:
    """Finite exponent e and a subgroup isomorphic to ``Z(e)^(omega)``."""
    e = exponent(d)
    if e == INFINITY or e == 1:
        return False
    return socle_rank(d, e, 1).unbounded


# -- independent socle oracle ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _layer_rank(n: int, p: int, a: int) -> int:
    """Rank of ``p^(a-1) Z(n) intersected with Z(n)[p]``, by enumerating Z(n)."""
    image = {(p ** (a - 1) * y) % n for y in range(n)}
    size = sum(1 for x in range(n) if x in image and (p * x) % n == 0)
    return round(math.log(size, p))


def socle_rank_oracle(orders, e: int) -> int:
    """Embedding rank of ``Z(e)^r`` into ``sum Z(n)`` via counted layers.

    ``orders`` holds ``(n, copies)`` pairs or bare orders.  The rank of
    ``p^(a-1) G[p]`` equals the number of cyclic summands of order at least
    ``p^a``; the layer is enumerated factor by factor.
    """
    pairs = [o if isinstance(o, tuple) else (o, 1) for o in orders]
    ranks = [sum(c * _layer_rank(n, p, a) for n, c in pairs)
             for p, a in _prime_powers(e)]
    return min(ranks) if ranks else 0


def socle_growth_oracle(d: GroupDescriptor, ks=range(1, 6)) -> bool:
    """True iff the embedding rank of ``Z(exp d)`` grows without bound as the
    omega multiplicities are truncated at larger k.

    Ranks are computed at every k in ``ks`` and at ``K, K + 1`` with K past
    the total finite multiplicity, where growth can no longer stall.
    """
    e = exponent(d)
    if e == INFINITY:
        raise ValueError("oracle needs a descriptor of finite exponent")
    if e == 1:
        return False
    K = 1 + sum(f.mult for f in d.factors if f.mult is not OMEGA)

    def rank(k):
        return socle_rank_oracle([(f.kind.n, f.count(k)) for f in d.factors], e)

    ranks = [rank(k) for k in ks]
    if any(b < a for a, b in zip(ranks, ranks[1:])):
        raise AssertionError("embedding rank decreased under truncation growth")
    return rank(K + 1) > rank(K)


def embeds_brute(orders: list[int], e: int, r: int) -> bool:
    """Search for an injective ``Z(e)^r -> sum Z(n)``; tiny groups only.

    Depth-first over subgroups: extend a copy of ``Z(e)^i`` by one element of
    order ``e`` whose cyclic span meets it trivially.
    """
    if r == 0:
        return True
    zero = tuple(0 for _ in orders)

    def shift(g, h):
        return tuple((a + b) % n for a, b, n in zip(g, h, orders))

    def span(g):
        out, cur = [zero], g
        while cur != zero:
            out.append(cur)
            cur = shift(cur, g)
        return out

    full = [g for g in cartesian(*(range(n) for n in orders))
            if len(span(g)) == e]
    seen = set()

    def extend(sub: frozenset, depth: int) -> bool:
        if depth == r:
            return True
        if sub in seen:
            return False
        seen.add(sub)
        for g in full:
            if g in sub:
                continue
            cyc = span(g)
            if any(c in sub for c in cyc[1:]):
                continue
            bigger = frozenset(shift(h, c) for h in sub for c in cyc)
            if extend(bigger, depth + 1):
                return True
        return False

    return extend(frozenset([zero]), 0)


# -- decisions --------------------------------------------------------------------------------------

@dataclass(frozen=True)
class Decision:
    answer: bool
    branch: str
    reason: str

    def to_dict(self) -> dict:
        return {"answer": "yes" if self.answer else "no", "branch": self.branch, "reason": self.reason}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _minap_clause(d: GroupDescriptor) -> Decision:
    e = exponent(d)
    if e == INFINITY:
        return Decision(True, "infinite-exponent", "the annihilator has infinite exponent")
    if has_omega_socle(d):
        return Decision(True, "bounded-omega-socle",
                        f"the annihilator has exponent {e} and contains Z({e})^(omega)")
    return Decision(False, "bounded-no-omega-socle",
                    f"the annihilator has exponent {e} but no subgroup Z({e})^(omega)")


def tchar_decide(annihilator: GroupDescriptor, is_gdelta: bool, is_proper: bool) -> Decision:
    """Is the closed subgroup H with ``H^perp = annihilator`` T-characterized?"""
    if not is_proper:
        return Decision(True, "whole-group", "X itself is characterized by the zero sequence")
    if not annihilator.factors:
        raise ValueError("a proper subgroup has a nontrivial annihilator")
    if not is_gdelta:
        return Decision(False, "not-gdelta",
                        "a closed subgroup is characterized only when it is a G_delta-subgroup")
    return _minap_clause(annihilator)


def minap_admissible(d: GroupDescriptor) -> Decision:
    """Does the countable group d carry a Hausdorff minimally almost periodic topology?"""
    if not d.factors:
        raise ValueError("the trivial group is outside the scope of this test")
    if d.is_finite:
        return Decision(False, "finite-group", "finite groups admit only the discrete topology")
    return _minap_clause(d)


def connected_dual(d: GroupDescriptor) -> bool:
    """Compact X is connected iff its dual d is torsion-free (within the grammar: only Z)."""
    return all(isinstance(f.kind, InfiniteCyclic) for f in d.factors)


def all_gdelta_tchar(d: GroupDescriptor) -> bool:
    """All closed G_delta-subgroups of X are T-characterized iff X is connected."""
    return connected_dual(d)


def torsion_witness(d: GroupDescriptor) -> GroupDescriptor | None:
    """Annihilator ``<g>`` of an open proper subgroup, g of finite order in d."""
    for f in d.factors:
        if isinstance(f.kind, Cyclic):
            return GroupDescriptor((Factor(Cyclic(f.kind.n)),))
        if isinstance(f.kind, Prufer):
            return GroupDescriptor((Factor(Cyclic(f.kind.p)),))
        if isinstance(f.kind, CyclicFamily):
            return GroupDescriptor((Factor(Cyclic(f.kind.bases.term(0))),))
    return None


@dataclass(frozen=True)
class WitnessFamily:
    case: str                      # "A": Z, "B": Z(p^inf), "C": sum Z(b_n)
    p: int | None = None
    bases: BaseSequence | None = None

    def __str__(self):
        if self.case == "B":
            return f"B({self.p})"
        if self.case == "C":
            return f"C({self.bases})"
        return "A"


def select_unbounded_witness(d: GroupDescriptor) -> WitnessFamily:
    """A countable subgroup of an unbounded group: Z, a Pruefer group, or a
    sum of cyclic groups of strictly increasing orders (preferred in that order)."""
    if exponent(d) != INFINITY:
        raise ValueError("descriptor has finite exponent")
    kinds = [f.kind for f in d.factors]
    if any(isinstance(k, InfiniteCyclic) for k in kinds):
        return WitnessFamily("A")
    primes = sorted(k.p for k in kinds if isinstance(k, Prufer))
    if primes:
        return WitnessFamily("B", p=primes[0])
    fam = next(k for k in kinds if isinstance(k, CyclicFamily))
    return WitnessFamily("C", bases=fam.bases)
