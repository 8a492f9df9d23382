"""
Infix F3 expressions for the compile command.

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" integer)?
    atom   := "0" | "1" | "2" | identifier | "(" expr ")"

Subtraction lowers to addition of a negation and x^k to squarings and
multiplications, so the result only uses the gate AST nodes.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError
from .f3_circuits import Add, Const, F3Element, GateExpr, Mul, Neg, Square, Var

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"(?P<space>\s+)|(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()])")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup != "space":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


def power(base: GateExpr, k: int) -> GateExpr:
    """base^k for k >= 1 by repeated squaring."""
    if k == 1:
        return base
    if k % 2 == 0:
        return Square(power(base, k // 2))
    return Mul(base, power(base, k - 1))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def _peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _error(self, message: str, tok: Optional[Token]) -> ParseError:
        return ParseError(message, len(self.text) if tok is None else tok.start, self.text)

    def _take(self, text: str) -> bool:
        tok = self._peek()
        if tok is not None and tok.kind == "op" and tok.text == text:
            self.pos += 1
            return True
        return False

    def parse(self) -> GateExpr:
        if not self.tokens:
            raise self._error("empty expression", None)
        e = self._expr()
        tok = self._peek()
        if tok is not None:
            raise self._error(f"unexpected {tok.text!r}", tok)
        return e

    def _expr(self) -> GateExpr:
        e = self._term()
        while True:
            if self._take("+"):
                e = Add(e, self._term())
            elif self._take("-"):
                e = Add(e, Neg(self._term()))
            else:
                return e

    def _term(self) -> GateExpr:
        e = self._unary()
        while self._take("*"):
            e = Mul(e, self._unary())
        return e

    def _unary(self) -> GateExpr:
        if self._take("-"):
            return Neg(self._unary())
        return self._power()

    def _power(self) -> GateExpr:
        base = self._atom()
        if not self._take("^"):
            return base
        tok = self._peek()
        if tok is None or tok.kind != "number":
            raise self._error("expected an integer exponent", tok)
        self.pos += 1
        k = int(tok.text)
        if k < 1:
            raise self._error("exponents must be at least 1", tok)
        return power(base, k)

    def _atom(self) -> GateExpr:
        tok = self._peek()
        if tok is None:
            raise self._error("expected a value, reached end of input", None)
        self.pos += 1
        if tok.kind == "number":
            if tok.text not in ("0", "1", "2"):
                raise self._error(f"constants are 0, 1 or 2, got {tok.text}", tok)
            return Const(F3Element(int(tok.text)))
        if tok.kind == "name":
            return Var(tok.text)
        if tok.text == "(":
            e = self._expr()
            if not self._take(")"):
                raise self._error("expected ')'", self._peek())
            return e
        raise self._error(f"unexpected {tok.text!r}", tok)


def parse_expression(text: str) -> GateExpr:
    """Parse infix F3 text; errors carry the 0-based position of the offending token."""
    return _Parser(text).parse()
