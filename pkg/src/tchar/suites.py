"""Verification sweeps shared by ``tchar verify`` and the acceptance tests.

Each suite returns a ``SuiteResult`` carrying the number of cases checked and
a list of human-readable failures.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .arith import Angle, sandwich_holds
from .decision import OMEGA, Cyclic, Factor, GroupDescriptor, socle_growth_oracle, tchar_decide
from .membership import UNDETERMINED, contradictions, member, numeric_oracle
from .models import (CharSequence, ConstantDigit, Element, PAdic, Periodic, Product,
                     ScaledFloor, SpacedOnes, Torus, Zero, radix)
from .rules import Arithmetic, Geometric, Quadratic, Squares, Triangular
from .witnesses import torus_witnesses, padic_witnesses, product_witnesses

EPSILON_GRID = (Fraction(1, 100), Fraction(1, 50), Fraction(2, 25), Fraction(9, 100))


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"suite": self.name, "cases": self.cases, "failed": len(self.failures),
                "pass": self.passed, "counts": self.counts, "failures": self.failures[:20]}


# -- sandwich -------------------------------------------------------------------------

def sample_rationals(count: int, max_den: int, seed: int = 0) -> list[Fraction]:
    """``count`` rationals with denominator <= max_den, reduced into [-1/2, 1/2)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        q = rng.randint(1, max_den)
        phi = Fraction(rng.randrange(q), q)
        out.append(phi - 1 if phi >= Fraction(1, 2) else phi)
    return out


def sandwich_suite(samples: int = 10_000, max_den: int = 10_000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("sandwich")
    for phi in sample_rationals(samples, max_den, seed):
        res.cases += 1
        if not sandwich_holds(Angle.of(phi)):
            res.failures.append(f"sandwich fails at {phi}")
    return res


# -- witness budgets ----------------------------------------------------------------------

def budgets_suite(scale: int = 40, grid=EPSILON_GRID) -> SuiteResult:
    res = SuiteResult("budgets")
    for eps in grid:
        for report in (torus_witnesses(Arithmetic(100, 100), eps, scale),
                       padic_witnesses(2, Squares(), eps, scale),
                       product_witnesses(Geometric(2, 2), eps, scale)):
            res.cases += len(report.budget_checks)
            res.failures += [f"{report.family} eps={eps} {c.name} index={c.index}"
                             for c in report.failures()]
    return res


# -- decision sweep -------------------------------------------------------------------------

def bounded_descriptors(orders=range(2, 17), mults=(1, 2, 3, OMEGA), max_kinds: int = 4):
    for j in range(1, max_kinds + 1):
        for chosen in combinations(orders, j):
            for ms in product(mults, repeat=j):
                yield GroupDescriptor(tuple(Factor(Cyclic(n), m) for n, m in zip(chosen, ms)))


def _sweep(orders, mults, j: int, first: int | None = None) -> tuple[int, list[str]]:
    """Descriptors with exactly j kinds (smallest order ``orders[first]`` if given)."""
    if first is None:
        choices = combinations(orders, j)
    else:
        choices = ((orders[first], *rest) for rest in combinations(orders[first + 1:], j - 1))
    count, bad = 0, []
    for chosen in choices:
        for ms in product(mults, repeat=j):
            d = GroupDescriptor(tuple(Factor(Cyclic(n), m) for n, m in zip(chosen, ms)))
            count += 1
            if tchar_decide(d, is_gdelta=True, is_proper=True).answer != socle_growth_oracle(d):
                bad.append(str(d))
    return count, bad


def decision_suite(orders=range(2, 17), mults=(1, 2, 3, OMEGA), max_kinds: int = 4,
                   workers: int | None = None) -> SuiteResult:
    """The decision for proper G_delta subgroups against the counting oracle, exhaustively."""
    res = SuiteResult("decision")
    orders, mults = tuple(orders), tuple(mults)
    # the largest layer is split by its smallest order so a pool stays busy
    jobs = [(orders, mults, j) for j in range(1, max_kinds)]
    jobs += [(orders, mults, max_kinds, i) for i in range(len(orders))]
    if workers == 1:
        results = [_sweep(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_star, jobs))
    for count, bad in results:
        res.cases += count
        res.failures += [f"closed form and oracle disagree on {d}" for d in bad]
    return res


def _sweep_star(job):
    return _sweep(*job)


# -- membership consistency ------------------------------------------------------------------

TORUS_BASES = (Arithmetic(2, 1), Arithmetic(100, 100), Geometric(2, 2), Arithmetic(5, 3))
PRODUCT_BASES = (Geometric(2, 2), Arithmetic(3, 2), Arithmetic(10, 7), Geometric(3, 3))
INDEX_RULES = (Squares(), Triangular(), Quadratic(1, 1, 0))


def _random_fraction(rng: random.Random) -> Fraction:
    q = rng.choice((2, 3, 5, 7, 10, 250, 1000))
    return Fraction(rng.randrange(q), q)


def random_element(model, rng: random.Random) -> Element:
    """An element with a random short prefix and a tail from the supported grammar."""
    plen = rng.randint(0, 6)
    if isinstance(model, PAdic):
        p = model.p
        choice = rng.choice(("zero", "const", "const-edge", "spaced", "spaced"))
        if choice == "zero":
            tail = Zero()
        elif choice == "const":
            tail = ConstantDigit(rng.randrange(p))
        elif choice == "const-edge":
            tail = ConstantDigit(rng.choice((0, p - 1)))
        else:
            s = rng.randint(1, 4)
            tail = SpacedOnes(max(s + 1, model.nk.first_gap_above(s)) + rng.randint(0, 3), s)
            plen = min(plen, model.nk.term(tail.l + 1) - s)
    else:
        choice = rng.choice(("zero", "const", "periodic", "scaled", "scaled"))
        low = min(radix(model, n) for n in range(plen, plen + 64))
        if choice == "zero":
            tail = Zero()
        elif choice == "const":
            tail = ConstantDigit(rng.randrange(low))
        elif choice == "periodic":
            tail = Periodic(tuple(rng.randrange(low) for _ in range(rng.randint(1, 4))))
        else:
            tail = ScaledFloor(_random_fraction(rng))
    prefix = tuple(rng.randrange(radix(model, n)) for n in range(plen))
    return Element(model, prefix, tail)


def random_models(kind: str, rng: random.Random):
    if kind == "torus":
        return Torus(rng.choice(TORUS_BASES))
    if kind == "product":
        return Product(rng.choice(PRODUCT_BASES))
    return PAdic(rng.choice((2, 3, 5)), rng.choice(INDEX_RULES))


def consistency_suite(per_model: int = 100, horizon: int = 256, seed: int = 0,
                      tol: float = 1e-6) -> SuiteResult:
    res = SuiteResult("consistency")
    rng = random.Random(seed)
    for kind in ("torus", "padic", "product"):
        for _ in range(per_model):
            model = random_models(kind, rng)
            x = random_element(model, rng)
            u = CharSequence(model)
            verdict = member(u, x, horizon)
            res.cases += 1
            key = f"{kind}:{verdict.outcome}"
            res.counts[key] = res.counts.get(key, 0) + 1
            if verdict.outcome == UNDETERMINED:
                continue
            oracle = numeric_oracle(u, x, horizon, tol, verdict.norm_limit)
            for problem in contradictions(verdict, u, x, oracle):
                res.failures.append(f"{x}: {verdict.outcome}: {problem}")
    return res


SUITES = {
    "sandwich": sandwich_suite,
    "budgets": budgets_suite,
    "decision": decision_suite,
    "consistency": consistency_suite,
}
