"""Membership in ``s_u(X) = {x : (u_n, x) -> 1}`` for the three models.

Each model has a digit criterion that is decided symbolically from the tail
rule; ``numeric_oracle`` evaluates the raw pairings independently and
``contradictions`` compares the two.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import PI_HI, PI_LO, Angle, BoundInterval, nearest_int_dist
from .models import (DEFAULT_HORIZON, CharSequence, ConstantDigit, Element, ModelError,
                     PAdic, Periodic, Product, ScaledFloor, SpacedOnes, Torus, Zero,
                     norm_trace, padic_reach)
from .rules import IndexRule

MEMBER = "Member"
NON_MEMBER = "NonMember"
UNDETERMINED = "Undetermined"

TORUS_CRITERION = "torus-digit-ratio"
PADIC_CRITERION = "padic-run-length"
PRODUCT_CRITERION = "product-digit-ratio"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a membership test.

    ``limit`` is the limit (or a limit point) of the criterion quantity for
    NonMember; ``norm_limit`` is the matching limit point of
    ``||(u_n, x)||``, used to cross-check against raw pairings.
    """

    outcome: str
    criterion: str
    horizon: int
    limit: Fraction | None = None
    norm_limit: Fraction | None = None
    trace: tuple = field(default=(), repr=False)
    note: str = ""

    def to_dict(self) -> dict:
        out = {"outcome": self.outcome}
        if self.limit is not None:
            out["limit"] = _fmt(self.limit)
        out["criterion"] = self.criterion
        out["trace_len"] = len(self.trace)
        if self.outcome == UNDETERMINED:
            out["horizon"] = self.horizon
        if self.note:
            out["note"] = self.note
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _fmt(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _check(u: CharSequence, x: Element, kind):
    if not isinstance(u.model, kind) or u.model != x.model:
        raise ModelError(f"expected a {kind.__name__} sequence and element on the same model")


def _ratio_trace(x: Element, horizon: int) -> tuple:
    digits = x.digits(horizon)
    return tuple(nearest_int_dist(Angle.from_ratio(c, x.model.bases.term(n)))
                 for n, c in enumerate(digits))


def _ratio_verdict(x: Element, criterion: str, horizon: int) -> Verdict:
    trace = _ratio_trace(x, horizon)
    tail = x.tail
    if isinstance(tail, (Zero, ConstantDigit, Periodic)):
        # bounded digits over radices tending to infinity
        return Verdict(MEMBER, criterion, horizon, trace=trace)
    if isinstance(tail, ScaledFloor):
        if tail.t == 0:
            return Verdict(MEMBER, criterion, horizon, trace=trace)
        L = min(tail.t, 1 - tail.t)
        return Verdict(NON_MEMBER, criterion, horizon, L, L, trace=trace)
    return Verdict(UNDETERMINED, criterion, horizon, trace=trace)


def member_torus(u: CharSequence, x: Element, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """x is in s_u(T) iff ``||c_n / a_n|| -> 0`` for its canonical digits."""
    _check(u, x, Torus)
    return _ratio_verdict(x, TORUS_CRITERION, horizon)


def member_product(u: CharSequence, x: Element, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """x is in s_u(prod Z(b_n)) iff ``||a_n / b_n|| -> 0``."""
    _check(u, x, Product)
    return _ratio_verdict(x, PRODUCT_CRITERION, horizon)


# -- p-adic run statistic ------------------------------------------------------------

def _run_starts(digits) -> list[int]:
    starts = [0] * len(digits)
    for i in range(1, len(digits)):
        starts[i] = starts[i - 1] if digits[i] == digits[i - 1] else i
    return starts


def _mk(p: int, nk: IndexRule, digits, starts, k: int) -> int:
    n = nk.term(k)
    a = digits[n]
    if 0 < a < p - 1:
        j = n
    else:
        # least j >= 0 with a_s == a on (j, n]
        j = max(starts[n] - 1, 0)
    return max(j, nk.term(k - 1))


def compute_mk(p: int, nk: IndexRule, digits, k: int) -> int:
    """``m_k = max(j_k, n_(k-1))`` for the digit prefix ``digits`` (k >= 2).

    ``j_k = n_k`` when ``0 < a_(n_k) < p - 1``; otherwise the least ``j``
    such that the digits on ``(j, n_k]`` are all 0 or all ``p - 1``.
    """
    if k < 2:
        raise ValueError("m_k is defined for k >= 2")
    n = nk.term(k)
    if len(digits) <= n:
        raise ValueError(f"prefix of length {len(digits)} does not reach n_k = {n}")
    digits = list(digits[: n + 1])
    if any(not 0 <= a < p for a in digits):
        raise ModelError("digit out of range")
    return _mk(p, nk, digits, _run_starts(digits), k)


def defect_trace(x: Element, horizon: int) -> tuple:
    """``(k, n_k - m_k)`` for ``2 <= k < horizon`` (fewer if ``n_k`` outgrows the digit budget)."""
    m = x.model
    horizon = padic_reach(m.nk, horizon)
    if horizon <= 2:
        return ()
    digits = x.digits(m.nk.term(horizon - 1) + 1)
    starts = _run_starts(digits)
    return tuple((k, m.nk.term(k) - _mk(m.p, m.nk, digits, starts, k)) for k in range(2, horizon))


def member_padic(u: CharSequence, x: Element, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """x is in s_u(Delta_p) iff ``n_k - m_k -> oo``."""
    _check(u, x, PAdic)
    p = x.model.p
    trace = defect_trace(x, horizon)
    tail = x.tail
    if isinstance(tail, Periodic) and len(set(tail.pattern)) == 1:
        tail = ConstantDigit(tail.pattern[0])
    if isinstance(tail, Zero):
        # eventually zero: m_k = n_(k-1) for large k, and the gaps diverge
        return Verdict(MEMBER, PADIC_CRITERION, horizon, trace=trace)
    if isinstance(tail, ConstantDigit):
        if tail.c in (0, p - 1):
            return Verdict(MEMBER, PADIC_CRITERION, horizon, trace=trace)
        # j_k = n_k for every large k
        q = Fraction(tail.c, p - 1)
        return Verdict(NON_MEMBER, PADIC_CRITERION, horizon, Fraction(0), min(q, 1 - q), trace=trace)
    if isinstance(tail, SpacedOnes):
        # once gaps exceed s, the zero run behind n_k stops exactly at n_k - s
        return Verdict(NON_MEMBER, PADIC_CRITERION, horizon, Fraction(tail.s),
                       Fraction(1, p ** (tail.s + 1)), trace=trace)
    return Verdict(UNDETERMINED, PADIC_CRITERION, horizon, trace=trace,
                   note=f"no symbolic rule for tail {tail}")


def member(u: CharSequence, x: Element, horizon: int = DEFAULT_HORIZON) -> Verdict:
    if isinstance(x.model, Torus):
        return member_torus(u, x, horizon)
    if isinstance(x.model, PAdic):
        return member_padic(u, x, horizon)
    return member_product(u, x, horizon)


# -- numeric oracle ---------------------------------------------------------------------

MEMBER_CONSISTENT = "Member-consistent"
NON_MEMBER_CONSISTENT = "NonMember-consistent"
DELTA = Fraction(1, 100)
# float enclosures of tiny chords carry an absolute floor of this size
FLOAT_FLOOR = Fraction(2) ** -1000


@dataclass(frozen=True)
class OracleResult:
    outcome: str
    trace: tuple[BoundInterval, ...]

    @property
    def tail(self) -> tuple[BoundInterval, ...]:
        return self.trace[len(self.trace) - max(len(self.trace) // 4, 1):]


def oracle_trace(u: CharSequence, x: Element, horizon: int) -> tuple[BoundInterval, ...]:
    return tuple(norm_trace(u, x, horizon, horizon + 64))


def numeric_oracle(u: CharSequence, x: Element, horizon: int = DEFAULT_HORIZON,
                   tol: float = 1e-6, limit_hint: Fraction | None = None) -> OracleResult:
    """Evaluate ``|1 - (u_n, x)|`` for ``n < horizon`` directly.

    Member-consistent when the last quarter of the trace stays below
    ``tol``; NonMember-consistent when the last quarter reaches
    ``pi * L * (1 - delta)`` for the hinted norm limit ``L`` (or
    ``sqrt(tol)`` without a hint).  Never more than consistency.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if u.model != x.model:
        raise ModelError("sequence and element live on different models")
    trace = oracle_trace(u, x, horizon)
    result = OracleResult(UNDETERMINED, trace)
    if not trace:
        return result
    tail = result.tail
    if max(i.hi for i in tail) < tol:
        return OracleResult(MEMBER_CONSISTENT, trace)
    floor = float(PI_HI * limit_hint * (1 - DELTA)) if limit_hint else math.sqrt(tol)
    if any(i.lo >= floor for i in tail):
        return OracleResult(NON_MEMBER_CONSISTENT, trace)
    return result


def _member_bound(u: CharSequence, x: Element, n: int, defects: dict) -> Fraction:
    """Upper bound on ``||(u_n, x)||`` implied by the criterion quantity."""
    m = x.model
    if isinstance(m, Torus):
        a = m.bases.term(n + 1)
        return nearest_int_dist(Angle.from_ratio(x.digit(n + 1), a)) + Fraction(1, a)
    if isinstance(m, Product):
        return nearest_int_dist(Angle.from_ratio(x.digit(n), m.bases.term(n)))
    d = defects.get(n)
    return Fraction(1) if d is None else Fraction(1, m.p ** d)


def _criterion_quantity(x: Element, n: int, defects: dict) -> Fraction:
    """``||c_n/a_n||`` (torus, product) or ``p^-(n_k - m_k)`` (p-adic)."""
    m = x.model
    if isinstance(m, PAdic):
        d = defects.get(n)
        return Fraction(1) if d is None else Fraction(1, m.p ** d)
    return nearest_int_dist(Angle.from_ratio(x.digit(n), m.bases.term(n)))


def contradictions(verdict: Verdict, u: CharSequence, x: Element,
                   oracle: OracleResult) -> list[str]:
    """Disagreements between a symbolic verdict and an oracle trace.

    Member: every tail entry stays below ``2*pi`` times the criterion bound,
    and that bound shrinks from the first half of the window to the second.
    NonMember(L): both halves of the tail window reach ``pi*L*(1 - delta)``.
    """
    problems = []
    trace = oracle.trace
    start = len(trace) - len(oracle.tail)
    if verdict.outcome == MEMBER:
        defects = {}
        if isinstance(x.model, PAdic):
            defects = dict(defect_trace(x, len(trace)))
        quantity = {}
        for n in range(start, len(trace)):
            bound = _member_bound(u, x, n, defects)
            quantity[n] = _criterion_quantity(x, n, defects)
            limit = 2 * PI_HI * bound * (1 + Fraction(1, 10 ** 9)) + FLOAT_FLOOR
            if Fraction(trace[n].hi) > limit:
                problems.append(f"index {n}: {trace[n]} exceeds 2*pi*{float(bound):.6g}")
        # the quantity must also be on its way to zero across the window
        mid = (start + len(trace)) // 2
        early = max((quantity[n] for n in range(start, mid)), default=0)
        late = max((quantity[n] for n in range(mid, len(trace))), default=0)
        if late and not late < early:
            problems.append(f"criterion quantity does not decay: {float(late):.6g} late vs {float(early):.6g} early")
    elif verdict.outcome == NON_MEMBER:
        floor = PI_LO * verdict.norm_limit * (1 - DELTA)
        mid = (start + len(trace)) // 2
        for lo_i, hi_i in ((start, mid), (mid, len(trace))):
            if not any(Fraction(trace[n].lo) >= floor for n in range(lo_i, hi_i)):
                problems.append(f"no entry in [{lo_i}, {hi_i}) reaches {float(floor):.6g}")
        if oracle.outcome == MEMBER_CONSISTENT:
            problems.append("oracle trace vanishes for a NonMember verdict")
    return problems
