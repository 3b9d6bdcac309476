"""Reader for the plain-text system format.

::

    vars: x y
    f1 = x^3/3 + y^2*x + x^2 + 2*x*y + y^2
    f2 = x^2*y - y^2*x + x^2 + 2*x*y + y^2

Grammar of an expression (whitespace is insignificant)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' integer))*
    factor := number | var | var '^' posint | '(' number ['+'|'-' number] ')'

Numbers are decimals with optional exponent and an optional ``i`` suffix
for imaginary literals.  Rational literals such as ``x^3/3`` are rounded to
the nearest double at parse time.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .poly import PolySystem, Terms, canonical


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int) -> List[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


def _number(text: str, line: int, col: int) -> complex:
    imag = text.endswith("i")
    body = text[:-1] if imag else text
    try:
        value = float(body)
    except ValueError:
        raise ParseError(f"malformed coefficient {text!r}", line, col) from None
    return complex(0, value) if imag else complex(value)


class _ExprParser:
    def __init__(self, toks: List[_Tok], names: List[str], line: int):
        self.toks = toks
        self.i = 0
        self.names = names
        self.line = line
        self.n = len(names)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def expect_op(self, op: str) -> _Tok:
        tok = self.take()
        if tok.kind != "op" or tok.text != op:
            self.fail(f"expected {op!r}, found {tok.text or 'end of line'!r}", tok)
        return tok

    def parse(self) -> Terms:
        out: Terms = {}
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            sign = -1 if tok.text == "-" else 1
            self.take()
        while True:
            coef, exps = self.term()
            out[exps] = out.get(exps, 0) + sign * coef
            tok = self.peek()
            if tok.kind == "end":
                break
            if tok.kind == "op" and tok.text in "+-":
                sign = -1 if tok.text == "-" else 1
                self.take()
                continue
            self.fail(f"unexpected {tok.text!r}")
        return canonical(out)

    def term(self):
        coef = 1 + 0j
        exps = [0] * self.n
        coef, exps = self.factor(coef, exps)
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.take()
                coef, exps = self.factor(coef, exps)
            elif tok.kind == "op" and tok.text == "/":
                self.take()
                den = self.take()
                if den.kind != "num" or not den.text.isdigit():
                    self.fail("division is only allowed by an integer literal", den)
                d = int(den.text)
                if d == 0:
                    self.fail("division by zero", den)
                coef = coef / d
            else:
                return coef, tuple(exps)

    def factor(self, coef: complex, exps: List[int]):
        tok = self.take()
        if tok.kind == "num":
            return coef * _number(tok.text, self.line, tok.col), exps
        if tok.kind == "name":
            if tok.text not in self.names:
                self.fail(f"unknown variable {tok.text!r}", tok)
            j = self.names.index(tok.text)
            power = 1
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "^":
                self.take()
                ptok = self.take()
                if ptok.kind != "num" or not ptok.text.isdigit() or int(ptok.text) < 1:
                    self.fail("exponent must be a positive integer", ptok)
                power = int(ptok.text)
            exps[j] += power
            return coef, exps
        if tok.kind == "op" and tok.text == "(":
            return coef * self.paren_number(), exps
        self.fail(f"expected a number or variable, found {tok.text or 'end of line'!r}", tok)

    def paren_number(self) -> complex:
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            sign = -1 if tok.text == "-" else 1
            self.take()
        first = self.take()
        if first.kind != "num":
            self.fail("expected a number inside parentheses", first)
        value = sign * _number(first.text, self.line, first.col)
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            sign = -1 if tok.text == "-" else 1
            self.take()
            second = self.take()
            if second.kind != "num":
                self.fail("expected a number inside parentheses", second)
            value += sign * _number(second.text, self.line, second.col)
        self.expect_op(")")
        return value


def parse_system(text: str) -> PolySystem:
    """Parse the text format into a canonical :class:`PolySystem`."""
    lines = text.splitlines()
    names: Optional[List[str]] = None
    polys = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if names is None:
            head, sep, rest = line.partition(":")
            if head.strip() != "vars" or not sep:
                raise ParseError("first line must be 'vars: <id> <id> ...'", lineno, 1)
            names = rest.split()
            if not names:
                raise ParseError("no variables declared", lineno, len(line) + 1)
            for nm in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm):
                    raise ParseError(f"invalid variable name {nm!r}", lineno, line.find(nm) + 1)
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable name", lineno, 1)
            continue
        lhs, sep, rhs = line.partition("=")
        if not sep:
            raise ParseError("expected '<name> = <expr>'", lineno, 1)
        if not re.fullmatch(r"\s*[A-Za-z_][A-Za-z_0-9]*\s*", lhs):
            raise ParseError("invalid equation name", lineno, 1)
        offset = len(lhs) + 1
        toks = _tokenize(rhs, lineno)
        for t in toks:
            t.col += offset
        if toks[0].kind == "end":
            raise ParseError("empty expression", lineno, offset + 1)
        polys.append(_ExprParser(toks, names, lineno).parse())
    if names is None:
        raise ParseError("missing 'vars:' line", 1, 1)
    if not polys:
        raise ParseError("no equations", len(lines) or 1, 1)
    return PolySystem(len(names), tuple(polys), tuple(names))


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re+imi`` or ``imi`` (``j`` is accepted as well)."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if s.endswith("i"):
        body = s[:-1]
        if body in ("", "+", "-"):
            body += "1"
        elif body[-1] in "+-":
            body += "1"
        s = body + "j"
    return complex(s)
