"""Tokenizer and recursive-descent parser for the expression grammar.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | base ('^' int)?
    base   := number | 'hbar' | 'i' | 'sqrt' '(' expr ')' | var | '(' expr ')'
    var    := name index?            index := positive integer, default 1

The parser produces a small AST; evaluation is delegated to an algebra object
so the same grammar serves commutative symbols and ladder-operator words.
Division is only allowed by constants, and ``sqrt`` only of constants whose
square root is exact in the coefficient ring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .coeff import Coeff, HBAR, I, ONE
from .errors import ParseError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_]+)(?P<idx>\d+)?|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num' | 'name' | 'op' | 'end'
    text: str
    pos: int
    index: int | None = None


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        start = m.start(m.lastgroup)
        if m.group("num") is not None:
            tokens.append(Token("num", m.group("num"), start))
        elif m.group("name") is not None:
            idx = m.group("idx")
            tokens.append(Token("name", m.group("name"), start, int(idx) if idx else None))
        else:
            tokens.append(Token("op", m.group("op"), start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: Coeff
    pos: int


@dataclass(frozen=True)
class Var:
    name: str
    index: int
    pos: int
    explicit_index: bool


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any
    pos: int


@dataclass(frozen=True)
class Neg:
    operand: Any
    pos: int


@dataclass(frozen=True)
class Pow:
    base: Any
    exponent: int
    pos: int


@dataclass(frozen=True)
class Sqrt:
    operand: Any
    pos: int


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def eat(self, text: str) -> Token:
        tok = self.tok
        if tok.kind != "op" or tok.text != text:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {text!r}, found {found}", tok.pos)
        self.i += 1
        return tok

    def at(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self):
        if self.tok.kind == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.at("+", "-"):
            op = self.eat(self.tok.text)
            node = BinOp(op.text, node, self.term(), op.pos)
        return node

    def term(self):
        node = self.factor()
        while self.at("*", "/"):
            op = self.eat(self.tok.text)
            node = BinOp(op.text, node, self.factor(), op.pos)
        return node

    def factor(self):
        if self.at("-"):
            op = self.eat("-")
            return Neg(self.factor(), op.pos)
        node = self.base()
        if self.at("^"):
            op = self.eat("^")
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                raise ParseError("exponent must be a nonnegative integer", tok.pos)
            self.i += 1
            node = Pow(node, int(tok.text), op.pos)
        return node

    def base(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(Coeff.rational(Fraction(tok.text)), tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            self.eat(")")
            return node
        if tok.kind == "name":
            self.i += 1
            if tok.index is None and tok.text == "hbar":
                return Const(HBAR, tok.pos)
            if tok.index is None and tok.text == "i":
                return Const(I, tok.pos)
            if tok.index is None and tok.text == "sqrt":
                self.eat("(")
                inner = self.expr()
                self.eat(")")
                return Sqrt(inner, tok.pos)
            if tok.index == 0:
                raise ParseError("variable index must be a positive integer", tok.pos)
            return Var(tok.text, tok.index or 1, tok.pos, tok.index is not None)
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.pos)


def parse_ast(text: str):
    return _Parser(text).parse()


# -- constant folding helpers -------------------------------------------------

def exact_sqrt(c: Coeff, pos: int) -> Coeff:
    """Square root of a positive constant q*s**k when it is exact."""
    if not c.is_monomial() or not c.is_real():
        raise ParseError("sqrt argument must be a single positive term", pos)
    (k, (re, _)), = c.terms.items()
    if re <= 0 or k % 2:
        raise ParseError("sqrt argument must be positive with an even power of sqrt(hbar/2)", pos)
    num, den = re.numerator, re.denominator
    rn, rd = _isqrt_exact(num), _isqrt_exact(den)
    if rn is None or rd is None:
        raise ParseError(f"sqrt of {re} is not exact", pos)
    return Coeff.rational(Fraction(rn, rd), 0, k // 2)


def _isqrt_exact(n: int) -> int | None:
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


class Algebra:
    """Evaluation hooks; subclasses supply variables and the ring operations."""

    def const(self, c: Coeff) -> Any:
        raise NotImplementedError

    def var(self, node: Var) -> Any:
        raise NotImplementedError

    def as_constant(self, value) -> Coeff | None:
        raise NotImplementedError

    def check(self, value, pos: int) -> None:
        """Hook for degree-cap enforcement after each product."""

    def pow_precheck(self, value, exponent: int, pos: int) -> None:
        pass


def evaluate_ast(node, algebra: Algebra):
    ev: Callable = lambda n: evaluate_ast(n, algebra)
    if isinstance(node, Const):
        return algebra.const(node.value)
    if isinstance(node, Var):
        return algebra.var(node)
    if isinstance(node, Neg):
        return -ev(node.operand)
    if isinstance(node, Sqrt):
        inner = algebra.as_constant(ev(node.operand))
        if inner is None:
            raise ParseError("sqrt argument must be constant", node.pos)
        return algebra.const(exact_sqrt(inner, node.pos))
    if isinstance(node, Pow):
        base = ev(node.base)
        algebra.pow_precheck(base, node.exponent, node.pos)
        result = algebra.const(ONE)
        for _ in range(node.exponent):
            result = result * base
        algebra.check(result, node.pos)
        return result
    if isinstance(node, BinOp):
        left, right = ev(node.left), ev(node.right)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            out = left * right
            algebra.check(out, node.pos)
            return out
        divisor = algebra.as_constant(right)
        if divisor is None or divisor.is_zero():
            raise ParseError("can only divide by a nonzero constant", node.pos)
        try:
            inv = divisor.inverse()
        except ZeroDivisionError:
            raise ParseError("divisor is not invertible (mixed powers of hbar)", node.pos) from None
        return left * algebra.const(inv)
    raise TypeError(f"unknown node {node!r}")
