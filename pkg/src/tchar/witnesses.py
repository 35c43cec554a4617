"""Dense non-F_sigma T-characterized subgroups: explicit witness sequences.

For each unbounded model the Baire-category argument produces elements of
small rho-norm that lie in ``s_u`` and converge to a point outside it.  The
functions below rebuild those elements for concrete parameters and certify
every estimate the argument relies on, recording one ``BudgetCheck`` per
inequality and index.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import PI_HI, PI_LO, BoundInterval
from .decision import GroupDescriptor, select_unbounded_witness
from .membership import (MEMBER, NON_MEMBER, Verdict, compute_mk, member_padic,
                         member_product, member_torus)
from .models import (MAX_PADIC_DIGITS, CharSequence, Element, PAdic, Product, ScaledFloor,
                     SpacedOnes, Torus, metric_d, metric_d_bounds, pair_sequence, partial_product,
                     rho, torus_value)
from .rules import Arithmetic, BaseSequence, IndexRule, RuleError, Squares
from .syntax import fmt_number


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class BudgetCheck:
    name: str
    index: int | None
    relation: str            # "<", "<=" or "="
    bound: Fraction
    lo: Fraction
    hi: Fraction

    @property
    def passed(self) -> bool:
        if self.relation == "=":
            return self.lo == self.hi == self.bound
        if self.relation == "<=":
            return self.hi <= self.bound
        return self.hi < self.bound

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "index": self.index,
            "relation": self.relation,
            "bound": _num(self.bound),
            "enclosure": f"[{float(self.lo):.17g},{float(self.hi):.17g}]",
            "pass": self.passed,
        }


def _num(q: Fraction) -> str:
    return fmt_number(q) if q.denominator < 10 ** 12 else f"{float(q):.17g}"


def _exact(name, index, relation, bound, value) -> BudgetCheck:
    value = Fraction(value)
    return BudgetCheck(name, index, relation, Fraction(bound), value, value)


def _enclosed(name, index, relation, bound, enc: BoundInterval) -> BudgetCheck:
    return BudgetCheck(name, index, relation, Fraction(bound), Fraction(enc.lo), Fraction(enc.hi))


@dataclass(frozen=True)
class Witness:
    index: int
    element: Element
    rho: BoundInterval
    verdict: Verdict


@dataclass
class WitnessReport:
    family: str
    parameters: dict
    sequence: CharSequence
    witnesses: list[Witness] = field(default_factory=list)
    limit: Element | None = None
    limit_verdict: Verdict | None = None
    budget_checks: list[BudgetCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.budget_checks)

    def failures(self) -> list[BudgetCheck]:
        return [c for c in self.budget_checks if not c.passed]

    def summary(self) -> dict:
        return {
            "summary": True,
            "family": self.family,
            "parameters": {k: _num(Fraction(v)) for k, v in self.parameters.items()},
            "sequence": str(self.sequence),
            "witnesses": len(self.witnesses),
            "max_rho_hi": max((w.rho.hi for w in self.witnesses), default=0.0),
            "limit": str(self.limit),
            "limit_verdict": self.limit_verdict.to_dict() if self.limit_verdict else None,
            "checks": len(self.budget_checks),
            "failed": len(self.failures()),
            "pass": self.passed,
        }

    def jsonl(self) -> list[str]:
        lines = [json.dumps(c.to_dict()) for c in self.budget_checks]
        lines.append(json.dumps(self.summary()))
        return lines


def _check_epsilon(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 10):
        raise WitnessError(f"epsilon {eps} must lie in (0, 1/10)")
    return eps


def _convergence_checks(report: WitnessReport, distances: list[tuple[int, Fraction]]):
    for (k0, d0), (k1, d1) in zip(distances, distances[1:]):
        report.budget_checks.append(_exact("distance to limit non-increasing", k1, "<=", d0, d1))


# -- circle ---------------------------------------------------------------------------

def torus_witness(a: BaseSequence, eps: Fraction, l: int, k: int) -> Element:
    """``x_k = sum_{n=l}^{k} floor((a_n - 1) eps/20) / u_n`` (zero when k < l)."""
    model = Torus(a)
    if k < l:
        return Element(model)
    digits = [0] * l + [math.floor((a.term(n) - 1) * eps / 20) for n in range(l, k + 1)]
    return Element(model, tuple(digits))


def torus_depth(a: BaseSequence, eps: Fraction) -> int:
    """Least ``l >= 1`` with ``2 / u_(l-1) < eps/20``."""
    l = 1
    while Fraction(2, partial_product(a, l - 1)) >= eps / 20:
        l += 1
    return l


def torus_witnesses(a: BaseSequence, eps, k_max: int) -> WitnessReport:
    """Circle group with ``u_n = a_0 ... a_n``."""
    eps = _check_epsilon(eps)
    try:
        model = Torus(a)
    except RuleError as exc:
        raise WitnessError(str(exc)) from None
    u = CharSequence(model)
    l = torus_depth(a, eps)
    report = WitnessReport("A", {"epsilon": eps, "l": l, "k_max": k_max}, u)
    checks = report.budget_checks
    checks.append(_exact("2/u_(l-1) < eps/20", None, "<", eps / 20, Fraction(2, partial_product(a, l - 1))))
    origin = Element(model)
    rho_bound = eps / 20 + 2 * eps / 3
    limit = Element(model, (0,) * l, ScaledFloor(eps / 20))
    distances = []
    for k in range(l + 1, k_max + 1):
        x = torus_witness(a, eps, l, k)
        value = torus_value(x)
        checks.append(_exact("x_k < 2/u_(l-1)", k, "<", Fraction(2, partial_product(a, l - 1)), value))
        checks.append(_exact("d(0,x_k) < eps/20", k, "<", eps / 20, metric_d(origin, x)))
        worst_angle, worst = Fraction(0), BoundInterval.point(0.0)
        for s in range(k):
            pr = pair_sequence(u, s, x)
            worst_angle = max(worst_angle, pr.angle.value)
            enc = pr.norm()
            if enc.hi > worst.hi:
                worst = enc
        checks.append(_exact("angle(u_s,x_k) < eps/10 for s<k", k, "<", eps / 10, worst_angle))
        checks.append(_enclosed("|1-(u_s,x_k)| < 2eps/3 for s<k", k, "<", 2 * eps / 3, worst))
        tail_zero = all(pair_sequence(u, s, x).angle.num == 0 for s in range(k, k + 8))
        checks.append(_exact("|1-(u_s,x_k)| = 0 for s>=k", k, "=", 0, 0 if tail_zero else 1))
        r = rho(u, origin, x, 1)
        checks.append(_enclosed("rho(0,x_k) < eps/20 + 2eps/3", k, "<", rho_bound, r))
        checks.append(_enclosed("rho(0,x_k) < eps", k, "<", eps, r))
        report.witnesses.append(Witness(k, x, r, member_torus(u, x)))
        distances.append((k, metric_d_bounds(x, limit)[1]))
    _convergence_checks(report, distances)
    report.limit = limit
    report.limit_verdict = member_torus(u, limit)
    _limit_check(report, eps / 20)
    return report


def _limit_check(report: WitnessReport, expected: Fraction):
    v = report.limit_verdict
    ok = v.outcome == NON_MEMBER and v.limit == expected
    report.budget_checks.append(_exact("limit is NonMember with exact limit", None, "=", expected,
                                       v.limit if ok else -1))
    for w in report.witnesses:
        report.budget_checks.append(_exact("witness is Member", w.index, "=", 1,
                                           1 if w.verdict.outcome == MEMBER else 0))


# -- p-adic integers ---------------------------------------------------------------------

def padic_parameters(p: int, nk: IndexRule, eps: Fraction) -> tuple[int, int]:
    """Least ``s`` with ``2^-s < eps/20``, then least ``l > s`` with gaps above s from l on."""
    s = 1
    while Fraction(1, 2 ** s) >= eps / 20:
        s += 1
    l = max(s + 1, nk.first_gap_above(s))
    return s, l


def padic_witness(p: int, nk: IndexRule, s: int, l: int, r: int) -> Element:
    """Ones exactly at ``n_(l+i) - s`` for ``1 <= i <= r``."""
    model = PAdic(p, nk)
    if r < 1:
        return Element(model)
    digits = [0] * (nk.term(l + r) - s + 1)
    for i in range(1, r + 1):
        digits[nk.term(l + i) - s] = 1
    return Element(model, tuple(digits))


def padic_witnesses(p: int, nk: IndexRule, eps, r_max: int, mk_upto: int | None = None) -> WitnessReport:
    """p-adic integers with ``u_k = 1/p^(n_k + 1)``."""
    eps = _check_epsilon(eps)
    try:
        model = PAdic(p, nk)
        u = CharSequence(model)
    except (RuleError, ValueError) as exc:
        raise WitnessError(str(exc)) from None
    s, l = padic_parameters(p, nk, eps)
    upto = mk_upto if mk_upto is not None else max(40, l + r_max + 1)
    reach = max(upto, l + r_max + 1)
    if nk.term(reach) >= MAX_PADIC_DIGITS:
        raise WitnessError(f"{nk} reaches digit {nk.term(reach)} by k = {reach}; "
                           f"the limit is {MAX_PADIC_DIGITS}")
    report = WitnessReport("B", {"epsilon": eps, "p": p, "s": s, "l": l, "r_max": r_max}, u)
    checks = report.budget_checks
    checks.append(_exact("2^-s < eps/20", None, "<", eps / 20, Fraction(1, 2 ** s)))
    checks.append(_exact("l > s", None, "<", l, s))
    for w in range(l, l + r_max + 2):
        checks.append(_exact("n_(w+1) - n_w > s", w, "<", nk.gap(w), s))
    origin = Element(model)
    half_eps = eps / 2
    limit = Element(model, (), SpacedOnes(l, s))
    distances = []
    for r in range(1, r_max + 1):
        w = padic_witness(p, nk, s, l, r)
        d = metric_d(origin, w)
        checks.append(_exact("d(0,w_r) = 2^-(n_(l+1)-s)", r, "=", Fraction(1, 2 ** (nk.term(l + 1) - s)), d))
        checks.append(_exact("d(0,w_r) < eps/20", r, "<", eps / 20, d))
        case1 = all(pair_sequence(u, k, w).angle.num == 0 for k in range(l + 1))
        checks.append(_exact("|1-(u_k,w_r)| = 0 for k<=l", r, "=", 0, 0 if case1 else 1))
        top = l + r + 3
        for lo_k, hi_k, label in ((l + 1, l + r + 1, "l<k<=l+r"), (l + r + 1, top, "k>l+r")):
            worst_angle, worst = Fraction(0), BoundInterval.point(0.0)
            for k in range(lo_k, hi_k):
                pr = pair_sequence(u, k, w)
                worst_angle = max(worst_angle, pr.angle.value)
                enc = pr.norm()
                if enc.hi > worst.hi:
                    worst = enc
                if label == "k>l+r":
                    decay = 2 * PI_HI * Fraction(p ** (nk.term(l + r) - s + 1), p ** (nk.term(k) + 1))
                    checks.append(_enclosed("|1-(u_k,w_r)| below vanishing tail bound", k, "<=",
                                            decay, enc))
            checks.append(_exact(f"angle(u_k,w_r) < p^-s for {label}", r, "<", Fraction(1, p ** s), worst_angle))
            checks.append(_enclosed(f"|1-(u_k,w_r)| < eps/2 for {label}", r, "<", half_eps, worst))
        rr = rho(u, origin, w, l + r + 2)
        checks.append(_enclosed("rho(0,w_r) < eps/20 + eps/2", r, "<", eps / 20 + half_eps, rr))
        checks.append(_enclosed("rho(0,w_r) < eps", r, "<", eps, rr))
        report.witnesses.append(Witness(r, w, rr, member_padic(u, w, 2)))
        h = nk.term(l + r + 1) - s + 1
        distances.append((r, metric_d_bounds(w, limit, h)[1]))
    _convergence_checks(report, distances)
    report.limit = limit
    report.limit_verdict = member_padic(u, limit)
    _limit_check(report, Fraction(s))
    digits = limit.digits(nk.term(upto) + 1)
    for k in range(l + 1, upto + 1):
        checks.append(_exact("m_k(limit) = n_k - s", k, "=", nk.term(k) - s, compute_mk(p, nk, digits, k)))
    return report


# -- products of cyclic groups ---------------------------------------------------------------

def product_depth(eps: Fraction) -> int:
    l = 0
    while Fraction(1, 2 ** l) >= eps / 3:
        l += 1
    return l


def product_witness(b: BaseSequence, eps: Fraction, l: int, k: int) -> Element:
    model = Product(b)
    digits = [0] * l + [math.floor(eps * b.term(n) / 20) for n in range(l, k + 1)]
    return Element(model, tuple(digits))


def product_witnesses(b: BaseSequence, eps, k_max: int) -> WitnessReport:
    """``prod Z(b_n)`` with ``u_n`` the generator of the n-th factor's dual."""
    eps = _check_epsilon(eps)
    try:
        model = Product(b)
        u = CharSequence(model)
    except (RuleError, ValueError) as exc:
        raise WitnessError(str(exc)) from None
    l = product_depth(eps)
    report = WitnessReport("C", {"epsilon": eps, "l": l, "k_max": k_max}, u)
    checks = report.budget_checks
    checks.append(_exact("2^-l < eps/3", None, "<", eps / 3, Fraction(1, 2 ** l)))
    two_pi_eps_20 = 2 * PI_LO * eps / 20   # rational lower bound of 2*pi*eps/20
    origin = Element(model)
    limit = Element(model, (0,) * l, ScaledFloor(eps / 20))
    distances = []
    for k in range(l + 1, k_max + 1):
        w = product_witness(b, eps, l, k)
        d = metric_d(origin, w)
        checks.append(_exact("d(0,w_k) <= 2^-l", k, "<=", Fraction(1, 2 ** l), d))
        worst_ratio, worst = Fraction(0), BoundInterval.point(0.0)
        for n in range(l, k + 1):
            pr = pair_sequence(u, n, w)
            worst_ratio = max(worst_ratio, pr.angle.value)
            enc = pr.norm()
            if enc.hi > worst.hi:
                worst = enc
        checks.append(_exact("floor(eps b_n/20)/b_n <= eps/20", k, "<=", eps / 20, worst_ratio))
        checks.append(_enclosed("|1-(u_n,w_k)| < 2pi eps/20", k, "<", two_pi_eps_20, worst))
        outside = all(pair_sequence(u, n, w).angle.num == 0
                      for n in [*range(l), *range(k + 1, k + 9)])
        checks.append(_exact("|1-(u_n,w_k)| = 0 outside [l,k]", k, "=", 0, 0 if outside else 1))
        r = rho(u, origin, w, 1)
        checks.append(_enclosed("rho(0,w_k) < eps/3 + 2pi eps/20", k, "<", eps / 3 + two_pi_eps_20, r))
        checks.append(_enclosed("rho(0,w_k) < eps", k, "<", eps, r))
        report.witnesses.append(Witness(k, w, r, member_product(u, w)))
        distances.append((k, metric_d_bounds(w, limit)[1]))
    _convergence_checks(report, distances)
    report.limit = limit
    report.limit_verdict = member_product(u, limit)
    _limit_check(report, eps / 20)
    return report


# -- dispatch -----------------------------------------------------------------------------------

DEFAULT_TORUS_BASES = Arithmetic(100, 100)
DEFAULT_INDEX_RULE = Squares()


def unbounded_witnesses(d: GroupDescriptor, eps, scale: int,
                  torus_bases: BaseSequence = DEFAULT_TORUS_BASES,
                  index_rule: IndexRule = DEFAULT_INDEX_RULE) -> WitnessReport:
    """Pick the countable subgroup family of an unbounded dual and run its construction."""
    family = select_unbounded_witness(d)
    if family.case == "A":
        return torus_witnesses(torus_bases, eps, scale)
    if family.case == "B":
        return padic_witnesses(family.p, index_rule, eps, scale)
    return product_witnesses(family.bases, eps, scale)
