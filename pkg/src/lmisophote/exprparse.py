"""Recursive-descent parser for parametric surface components in ``u`` and ``v``.

Grammar::

    surface := expr ',' expr ',' expr
    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | 'u' | 'v' | CONST | FUNC '(' expr ')' | '(' expr ')'

Each expression compiles to a closure over numpy arrays.
"""

from __future__ import annotations

import math
import re
from typing import Callable, NamedTuple

import numpy as np

from .errors import ExprDomainError, ExprSyntaxError, UnknownIdentifier

FUNCS: dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
}
CONSTS = {"pi": math.pi, "e": math.e}
VARS = ("u", "v")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


class Token(NamedTuple):
    kind: str  # 'num' | 'id' | 'op' | 'end'
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(src, pos)
        if m is None:
            rest = src[pos:]
            if rest.strip() == "":
                break
            off = pos + (len(rest) - len(rest.lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[off]!r}", off)
        kind = m.lastgroup
        toks.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(Token("end", "", len(src)))
    return toks


def _guarded(name, fn):
    def call(x):
        if name == "log" and np.any(np.asarray(x) <= 0):
            raise ExprDomainError("log of a non-positive value")
        if name == "sqrt" and np.any(np.asarray(x) < 0):
            raise ExprDomainError("sqrt of a negative value")
        with np.errstate(all="ignore"):
            return fn(x)
    return call


def _div(a, b):
    if np.any(np.asarray(b) == 0):
        raise ExprDomainError("division by zero")
    return a / b


def _pow(a, b):
    with np.errstate(all="ignore"):
        r = np.power(np.asarray(a, dtype=float), b)
    if np.any(np.isnan(r)):
        raise ExprDomainError("power of a negative base with non-integer exponent")
    return r


class Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.text != text or t.kind == "end":
            raise ExprSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, repr(text))
        return self.advance()

    def parse_surface(self):
        comps = [self.expr()]
        commas = []
        while self.tok.text == "," and self.tok.kind == "op":
            commas.append(self.advance().pos)
            comps.append(self.expr())
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos, "',' or end of input")
        if len(comps) > 3:
            raise ExprSyntaxError(f"expected 3 components, got {len(comps)}", commas[2], "end of input")
        if len(comps) < 3:
            raise ExprSyntaxError(f"expected 3 components, got {len(comps)}", len(self.src), "','")
        return comps

    def parse_single(self):
        e = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos, "end of input")
        return e

    def expr(self):
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            right = self.term()
            left = (lambda a, b: lambda u, v: a(u, v) + b(u, v))(left, right) if op == "+" \
                else (lambda a, b: lambda u, v: a(u, v) - b(u, v))(left, right)
        return left

    def term(self):
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            right = self.unary()
            left = (lambda a, b: lambda u, v: a(u, v) * b(u, v))(left, right) if op == "*" \
                else (lambda a, b: lambda u, v: _div(a(u, v), b(u, v)))(left, right)
        return left

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            inner = self.unary()
            return inner if op == "+" else (lambda a: lambda u, v: -a(u, v))(inner)
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            exp = self.unary()
            return lambda u, v: _pow(base(u, v), exp(u, v))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            val = float(t.text)
            return lambda u, v: val
        if t.kind == "id":
            self.advance()
            if t.text == "u":
                return lambda u, v: u
            if t.text == "v":
                return lambda u, v: v
            if t.text in CONSTS:
                val = CONSTS[t.text]
                return lambda u, v: val
            if t.text in FUNCS:
                fn = _guarded(t.text, FUNCS[t.text])
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return lambda u, v: fn(arg(u, v))
            raise UnknownIdentifier(t.text, t.pos)
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos,
                              "number, identifier or '('")


def compile_components(src: str):
    """Compile ``"x1, x2, x3"`` into three callables ``(u, v) -> array``."""
    return Parser(src).parse_surface()


def compile_expr(src: str):
    return Parser(src).parse_single()
