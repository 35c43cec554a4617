"""Tokenizer and recursive-descent reader for the small term language used by
element lines, rule specs and group descriptors.

    term := NAME [ "(" arg ("," arg)* ")" ]
    arg  := term | list | number
    list := "[" [number ("," number)*] "]"
    number := INT | INT "/" INT
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.text = text
        self.pos = pos
        where = f" at column {pos + 1}" if pos is not None else ""
        super().__init__(f"{message}{where}" + (f": {text!r}" if text else ""))


@dataclass(frozen=True)
class Term:
    name: str
    args: tuple = ()


_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<sym>[()\[\],]))")


class _Reader:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = 0
        self.offset = offset

    def error(self, message: str):
        raise ParseError(message, self.text, self.offset + self.pos)

    def peek(self):
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            return None, None
        kind = m.lastgroup
        return kind, m.group(kind)

    def take(self):
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            self.error("unexpected character")
        self.pos = m.end()
        return m.lastgroup, m.group(m.lastgroup)

    def expect(self, sym: str):
        kind, val = self.take()
        if val != sym:
            self.pos -= len(val)
            self.error(f"expected {sym!r}")

    def at_end(self) -> bool:
        return self.text[self.pos:].strip() == ""

    def number(self):
        kind, val = self.take()
        if kind != "num":
            self.error("expected a number")
        q = Fraction(val)
        return int(q) if q.denominator == 1 and "/" not in val else q

    def list_(self):
        self.expect("[")
        items = []
        if self.peek()[1] == "]":
            self.take()
            return tuple(items)
        while True:
            items.append(self.number())
            kind, val = self.take()
            if val == "]":
                return tuple(items)
            if val != ",":
                self.pos -= len(val)
                self.error("expected ',' or ']'")

    def arg(self):
        kind, val = self.peek()
        if val == "[":
            return self.list_()
        if kind == "num":
            return self.number()
        if kind == "name":
            return self.term()
        self.error("expected an argument")

    def term(self) -> Term:
        kind, val = self.take()
        if kind != "name":
            self.pos -= len(val or "")
            self.error("expected a name")
        if self.peek()[1] != "(":
            return Term(val)
        self.take()
        args = [self.arg()]
        while True:
            kind, sym = self.take()
            if sym == ")":
                return Term(val, tuple(args))
            if sym != ",":
                self.pos -= len(sym)
                self.error("expected ',' or ')'")
            args.append(self.arg())


def parse_term(text: str, offset: int = 0) -> Term:
    r = _Reader(text, offset)
    t = r.term()
    if not r.at_end():
        r.error("trailing input")
    return t


def parse_list(text: str, offset: int = 0) -> tuple:
    r = _Reader(text, offset)
    items = r.list_()
    if not r.at_end():
        r.error("trailing input")
    return items


def parse_number(text: str, offset: int = 0):
    r = _Reader(text, offset)
    n = r.number()
    if not r.at_end():
        r.error("trailing input")
    return n


def split_fields(line: str) -> list[tuple[str, str, int]]:
    """Split ``key=value`` fields on whitespace outside brackets.

    Returns (key, value, column-of-value) triples.
    """
    fields = []
    depth = 0
    start = None
    for i, ch in enumerate(line + " "):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch.isspace() and depth == 0:
            if start is not None:
                fields.append((start, i))
                start = None
        elif start is None:
            start = i
    if depth != 0:
        raise ParseError("unbalanced brackets", line)
    out = []
    for a, b in fields:
        chunk = line[a:b]
        if "=" not in chunk:
            raise ParseError("expected key=value", line, a)
        key, _, value = chunk.partition("=")
        out.append((key, value, a + len(key) + 1))
    return out


def fmt_number(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_list(items) -> str:
    return "[" + ",".join(fmt_number(i) for i in items) + "]"
