"""Command-line front end: ``tchar {decide,member,witness,pair,verify,encode}``.

Data goes to stdout (or ``--out``), diagnostics to stderr.  Exit status:
0 yes/Member/pass, 1 no/NonMember/fail, 2 input error, 3 Undetermined.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .arith import Angle
from .decision import (connected_dual, minap_admissible, parse_descriptor, tchar_decide)
from .membership import MEMBER, NON_MEMBER, member, numeric_oracle
from .models import (DEFAULT_HORIZON, CharSequence, Element, HorizonError, ModelError,
                     NonTerminating, PAdic, Product, Torus, encode_torus, pair,
                     parse_element, parse_sequence, tail_from_term)
from .rules import RuleError, parse_base, parse_index
from .suites import SUITES
from .syntax import ParseError, fmt_number, parse_list, parse_number, parse_term
from .witnesses import WitnessError, torus_witnesses, padic_witnesses, product_witnesses, unbounded_witnesses

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_UNDETERMINED = 0, 1, 2, 3
HORIZON_ENV = "TCHAR_HORIZON"


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    horizon: int = DEFAULT_HORIZON
    tolerance: Fraction = Fraction(1, 10 ** 6)
    epsilon: Fraction | None = None
    fmt: str = "jsonl"

    @classmethod
    def from_args(cls, args, environ=os.environ) -> RunConfig:
        horizon = args.horizon
        if horizon is None:
            raw = environ.get(HORIZON_ENV)
            horizon = _positive_int(raw, HORIZON_ENV) if raw else DEFAULT_HORIZON
        tol = _rational(args.tol, "--tol") if args.tol is not None else cls.tolerance
        if tol <= 0:
            raise InputError("--tol must be positive")
        eps = getattr(args, "epsilon", None)
        eps = _rational(eps, "--epsilon") if eps is not None else None
        return cls(horizon, tol, eps, args.format)


def _positive_int(text: str, what: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise InputError(f"{what}: expected a positive integer, got {text!r}") from None
    if n <= 0:
        raise InputError(f"{what}: expected a positive integer, got {text!r}")
    return n


def _rational(text: str, what: str) -> Fraction:
    try:
        return Fraction(parse_number(text.strip()))
    except ParseError as exc:
        raise InputError(f"{what}: {exc}") from None


def read_source(text: str) -> str:
    """Inline text, or the contents of a file if ``text`` names one."""
    path = Path(text)
    try:
        if path.is_file():
            return path.read_text(encoding="utf-8")
    except OSError:
        pass
    return text


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in read_source(text).splitlines()
            if ln.strip() and not ln.strip().startswith("#")]


def _single_line(text: str, what: str) -> str:
    lines = _content_lines(text)
    if len(lines) != 1:
        raise InputError(f"{what}: expected exactly one line, got {len(lines)}")
    return lines[0]


# -- output ---------------------------------------------------------------------------

def _flatten(rec: dict) -> dict:
    return {k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in rec.items()}


def render(records: list[dict], fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps(r) + "\n" for r in records)
    if fmt == "csv":
        keys = list(dict.fromkeys(k for r in records for k in r))
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(_flatten(r) for r in records)
        return buf.getvalue()
    out = []
    for r in records:
        width = max((len(k) for k in r), default=0)
        out += [f"{k.ljust(width)}  {v}" for k, v in r.items()]
        out.append("")
    return "\n".join(out)


def emit(records: list[dict], cfg: RunConfig, out: str | None = None):
    text = render(records, cfg.fmt)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands --------------------------------------------------------------------------------

def cmd_decide(args, cfg: RunConfig) -> int:
    d = parse_descriptor(read_source(args.annihilator))
    if args.mode == "connected":
        yes = connected_dual(d)
        emit([{"answer": "yes" if yes else "no", "connected": yes, "descriptor": str(d)}], cfg)
        return EXIT_OK if yes else EXIT_NO
    decision = minap_admissible(d) if args.mode == "minap" else tchar_decide(d, args.gdelta, args.proper)
    emit([decision.to_dict()], cfg)
    return EXIT_OK if decision.answer else EXIT_NO


def cmd_member(args, cfg: RunConfig) -> int:
    x = parse_element(_single_line(args.element, "--element"))
    u = CharSequence(x.model)
    if args.sequence is not None:
        u = parse_sequence(_single_line(args.sequence, "--sequence"))
        if u.model != x.model:
            raise InputError(f"element model ({x.model}) and sequence model ({u.model}) differ")
    verdict = member(u, x, cfg.horizon)
    rec = verdict.to_dict()
    if args.oracle:
        rec["oracle"] = numeric_oracle(u, x, cfg.horizon, float(cfg.tolerance),
                                       verdict.norm_limit).outcome
    emit([rec], cfg)
    return {MEMBER: EXIT_OK, NON_MEMBER: EXIT_NO}.get(verdict.outcome, EXIT_UNDETERMINED)


def cmd_witness(args, cfg: RunConfig) -> int:
    eps = cfg.epsilon if cfg.epsilon is not None else Fraction(2, 25)
    family = args.family
    if family == "auto":
        if args.descriptor is None:
            raise InputError("--family auto needs --descriptor")
        kwargs = {}
        if args.bases:
            kwargs["torus_bases"] = parse_base(args.bases)
        if args.nk:
            kwargs["index_rule"] = parse_index(args.nk)
        report = unbounded_witnesses(parse_descriptor(read_source(args.descriptor)), eps, args.scale, **kwargs)
    elif family == "A":
        report = torus_witnesses(parse_base(args.bases or "arith(100,100)"), eps, args.scale)
    elif family == "B":
        report = padic_witnesses(args.p or 2, parse_index(args.nk or "squares"), eps, args.scale)
    else:
        report = product_witnesses(parse_base(args.bases or "geom(2,2)"), eps, args.scale)
    records = [c.to_dict() for c in report.budget_checks]
    summary = report.summary()
    if cfg.fmt == "csv":
        emit(records, cfg, args.out)
        print(json.dumps(summary), file=sys.stderr)
    else:
        emit(records + [summary], cfg, args.out)
    if not report.passed:
        print(f"{len(report.failures())} budget check(s) failed", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_NO


def _pair_model(args):
    if args.model == "padic":
        if args.p is None:
            raise InputError("--model padic needs --p")
        return PAdic(args.p, parse_index(args.nk) if args.nk else None)
    if not args.bases:
        raise InputError(f"--model {args.model} needs --bases")
    bases = parse_base(args.bases)
    return Torus(bases) if args.model == "torus" else Product(bases)


def cmd_pair(args, cfg: RunConfig) -> int:
    model = _pair_model(args)
    prefix = parse_list(read_source(args.element).strip())
    tail = tail_from_term(parse_term(args.tail)) if args.tail else None
    x = Element(model, prefix, tail) if tail is not None else Element(model, prefix)
    if isinstance(model, Product):
        chi = tuple(parse_list(args.char))
    elif isinstance(model, PAdic):
        chi = Angle.of(parse_number(args.char)).value
    else:
        chi = parse_number(args.char)
    pr = pair(chi, x, cfg.horizon)
    value = str(pr.angle)
    if cfg.fmt == "pretty" or pr.exact:
        rec = {"angle": value, "norm": str(pr.norm())}
    else:
        rec = {"angle": value, "radius": fmt_number(pr.radius), "norm": str(pr.norm())}
    if cfg.fmt == "pretty":
        print(value)
    else:
        emit([rec], cfg)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    records, ok = [], True
    for name in names:
        if name == "sandwich":
            res = SUITES[name](samples=args.samples or 10_000, seed=args.seed)
        elif name == "budgets":
            res = SUITES[name](scale=args.scale)
        elif name == "consistency":
            res = SUITES[name](per_model=args.samples or 100, horizon=cfg.horizon,
                               seed=args.seed, tol=float(cfg.tolerance))
        else:
            res = SUITES[name]()
        records.append(res.to_dict())
        ok &= res.passed
        print(f"{name}: {'pass' if res.passed else 'FAIL'} ({res.cases} cases)", file=sys.stderr)
    emit(records, cfg)
    return EXIT_OK if ok else EXIT_NO


def cmd_encode(args, cfg: RunConfig) -> int:
    q = _rational(args.value, "--value")
    x = encode_torus(q, parse_base(args.bases), cfg.horizon)
    if cfg.fmt == "pretty":
        print(str(x))
    else:
        emit([{"value": fmt_number(q), "element": str(x), "digits": list(x.prefix)}], cfg)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, default=None,
                        help=f"index horizon (default ${HORIZON_ENV} or {DEFAULT_HORIZON})")
    common.add_argument("--tol", default=None, help="oracle tolerance as a rational (default 1/1000000)")
    common.add_argument("--format", choices=("jsonl", "csv", "pretty"), default="jsonl")

    parser = argparse.ArgumentParser(prog="tchar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", parents=[common], help="is a closed subgroup T-characterized")
    p.add_argument("--annihilator", required=True, help="descriptor text or file")
    p.add_argument("--gdelta", action="store_true", help="H is a G_delta-subgroup")
    p.add_argument("--proper", action="store_true", help="H is a proper subgroup")
    p.add_argument("--mode", choices=("tchar", "minap", "connected"), default="tchar")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("member", parents=[common], help="membership in s_u(X)")
    p.add_argument("--element", required=True, help="element line or file")
    p.add_argument("--sequence", default=None, help="sequence line or file (defaults to the element's model)")
    p.add_argument("--oracle", action="store_true", help="also run the numeric oracle")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("witness", parents=[common], help="rebuild a witness construction")
    p.add_argument("--family", choices=("auto", "A", "B", "C"), default="auto")
    p.add_argument("--descriptor", default=None, help="descriptor text or file (family auto)")
    p.add_argument("--epsilon", default=None, help="rational in (0, 1/10), default 2/25")
    p.add_argument("--scale", type=int, default=40, help="k_max / r_max")
    p.add_argument("--bases", default=None, help="base rule for families A and C")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--nk", default=None, help="index rule for family B")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("pair", parents=[common], help="evaluate one character on one element")
    p.add_argument("--model", choices=("torus", "padic", "product"), required=True)
    p.add_argument("--bases", default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--nk", default=None)
    p.add_argument("--char", required=True, help="int (torus), m/p^t (padic) or list (product)")
    p.add_argument("--element", required=True, help="digit prefix, e.g. [1,1,0]")
    p.add_argument("--tail", default=None)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=int, default=40)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", parents=[common], help="mixed-radix digits of a rational")
    p.add_argument("--bases", required=True)
    p.add_argument("--value", required=True)
    p.set_defaults(func=cmd_encode)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        if cfg.horizon <= 0:
            raise InputError("--horizon must be positive")
        return args.func(args, cfg)
    except (InputError, ParseError, ModelError, RuleError, WitnessError, HorizonError,
            NonTerminating, ValueError) as exc:
        print(f"tchar {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
