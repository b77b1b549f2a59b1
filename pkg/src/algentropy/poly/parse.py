"""Polynomial text grammar.

    expr   := expr ('+' | '-') expr | expr '*' expr | '-' expr | base '^' INT
    base   := INT | NAME | '(' expr ')'

Parsed by precedence climbing.  Implicit multiplication is rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import PolySyntaxError
from .polynomial import Polynomial
from .ring import ZZ, CoefficientRing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))?", re.S)

_BINARY = {"+": 1, "-": 1, "*": 2}
_UNARY_PREC = 3


@dataclass
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    line: int
    column: int


def tokenize(text: str, source: str | None = None) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        # account for newlines in the skipped whitespace
        ws_end = m.start(m.lastindex) if m.lastindex else m.end()
        for i in range(pos, ws_end):
            if text[i] == "\n":
                line += 1
                line_start = i + 1
        if m.lastindex is None:
            pos = m.end()
            break
        col = ws_end - line_start + 1
        num, name, other = m.group(1), m.group(2), m.group(3)
        if num is not None:
            tokens.append(Token("int", num, line, col))
        elif name is not None:
            tokens.append(Token("name", name, line, col))
        elif other in "+-*^()":
            tokens.append(Token("op", other, line, col))
        else:
            raise PolySyntaxError(f"unexpected character {other!r}", line, col, source)
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text, variables, ring, params, source):
        self.tokens = tokenize(text, source)
        self.i = 0
        self.variables = tuple(variables)
        self.ring = ring
        self.params = dict(params or {})
        self.source = source

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, tok.line, tok.column, self.source)

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if self.peek().kind == "end":
            self.error("empty expression")
        value = self.expr(0)
        tok = self.peek()
        if tok.kind != "end":
            if tok.kind in ("int", "name") or tok.text == "(":
                self.error("implicit multiplication is not allowed; use '*'")
            self.error(f"unexpected {tok.text!r}")
        return value

    def expr(self, min_prec: int) -> Polynomial:
        lhs = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in _BINARY:
                prec = _BINARY[tok.text]
                if prec < min_prec:
                    break
                self.advance()
                rhs = self.expr(prec + 1)
                if tok.text == "+":
                    lhs = lhs + rhs
                elif tok.text == "-":
                    lhs = lhs - rhs
                else:
                    lhs = lhs * rhs
            elif tok.kind in ("int", "name") or (tok.kind == "op" and tok.text == "("):
                self.error("implicit multiplication is not allowed; use '*'")
            else:
                break
        return lhs

    def unary(self) -> Polynomial:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return -self.expr(_UNARY_PREC)
        if tok.kind == "op" and tok.text == "+":
            self.advance()
            return self.expr(_UNARY_PREC)
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            etok = self.advance()
            if etok.kind != "int":
                if etok.kind == "op" and etok.text == "-":
                    self.error("negative exponents are not allowed", etok)
                self.error("exponent must be a nonnegative integer literal", etok)
            e = int(etok.text)
            if e >= 1 << 16:
                self.error("exponent too large", etok)
            if self.peek().kind == "op" and self.peek().text == "^":
                self.error("chained exponents are ambiguous; use parentheses")
            return base**e
        return base

    def atom(self) -> Polynomial:
        tok = self.advance()
        if tok.kind == "int":
            return Polynomial.constant(self.ring, self.variables, int(tok.text))
        if tok.kind == "name":
            if tok.text in self.variables:
                return Polynomial.gen(self.ring, self.variables, tok.text)
            if tok.text in self.params:
                val = self.params[tok.text]
                if isinstance(val, Polynomial):
                    return val
                return Polynomial.constant(self.ring, self.variables, int(val))
            hint = ""
            if len(tok.text) > 1 and all(ch in self.variables for ch in tok.text):
                hint = f" (implicit multiplication is not allowed; write {'*'.join(tok.text)})"
            self.error(f"unknown identifier {tok.text!r}{hint}", tok)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr(0)
            close = self.advance()
            if close.kind != "op" or close.text != ")":
                self.error("expected ')'", close)
            return inner
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected {tok.text!r}", tok)


def parse_polynomial(
    text: str,
    variables: Sequence[str],
    ring: CoefficientRing = ZZ,
    params: Mapping[str, int] | None = None,
    source: str | None = None,
) -> Polynomial:
    """Parse ``text`` into a Polynomial; parameters are substituted by their bound values."""
    return _Parser(text, variables, ring, params, source).parse()
