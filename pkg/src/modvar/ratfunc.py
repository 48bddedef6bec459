"""Univariate rational functions of one parameter, with integer coefficients.

These are the entries of one-parameter module families.  The public file
grammar (versioned, part of the family JSON contract) is

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | INT | 'L' | '(' expr ')'

where ``L`` is the parameter.  No exponent operator; write ``L*L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import InputError, PoleError
from .exactla import Field

GRAMMAR_VERSION = 1

Poly = tuple[int, ...]  # coefficients, constant term first; () is the zero polynomial


def _ptrim(c: list[int]) -> Poly:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


def _peval_int(a: Poly, lam: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * lam + c) % p
    return acc


def _peval_frac(a: Poly, lam) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * lam + c
    return acc


@dataclass(frozen=True)
class RatFunc:
    """Quotient num/den of integer polynomials; den is never identically 0."""

    num: Poly
    den: Poly = (1,)

    def __post_init__(self):
        if not self.den:
            raise InputError("rational function with zero denominator")
        if self.num:
            g = 0
            for c in self.num + self.den:
                g = gcd(g, c)
            if g > 1 or self.den[-1] < 0:
                if self.den[-1] < 0:
                    g = -g if g else -1
                object.__setattr__(self, "num", tuple(c // g for c in self.num))
                object.__setattr__(self, "den", tuple(c // g for c in self.den))

    @staticmethod
    def const(c: int) -> "RatFunc":
        return RatFunc((int(c),) if c else ())

    @staticmethod
    def param() -> "RatFunc":
        return RatFunc((0, 1))

    def is_zero(self) -> bool:
        return not self.num

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(_padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
                       _pmul(self.den, other.den))

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(_padd(_pmul(self.num, other.den), _pneg(_pmul(other.num, self.den))),
                       _pmul(self.den, other.den))

    def __neg__(self) -> "RatFunc":
        return RatFunc(_pneg(self.num), self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(_pmul(self.num, other.num), _pmul(self.den, other.den))

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            raise InputError("division by the zero rational function")
        return RatFunc(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def evaluate(self, field: Field, lam):
        """Value at ``lam`` as a canonical field element; PoleError at poles."""
        if field.mode == "prime":
            d = _peval_int(self.den, int(lam) % field.p, field.p)
            if d == 0:
                raise PoleError(f"denominator vanishes at parameter {lam}")
            return _peval_int(self.num, int(lam) % field.p, field.p) * pow(d, field.p - 2, field.p) % field.p
        d = _peval_frac(self.den, lam)
        if d == 0:
            raise PoleError(f"denominator vanishes at parameter {lam}")
        return _peval_frac(self.num, lam) / d

    def __str__(self) -> str:
        n = _poly_str(self.num)
        if self.den == (1,):
            return n
        return f"({n})/({_poly_str(self.den)})"


def _poly_str(a: Poly) -> str:
    if not a:
        return "0"
    parts = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        mono = "*".join(["L"] * i)
        if mono:
            body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        parts.append(("-" if c < 0 else "+", body))
    out = ""
    for k, (sign, body) in enumerate(parts):
        if k == 0:
            out = ("-" if sign == "-" else "") + body
        else:
            out += f" {sign} {body}"
    return out


# -- parser -------------------------------------------------------------


def _tokenize(text: str) -> list[str]:
    toks: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(text[i:j])
            i = j
        elif c in "L+-*/()":
            toks.append(c)
            i += 1
        else:
            raise InputError(f"bad character {c!r} in rational-function expression {text!r}")
    return toks


class _Parser:
    def __init__(self, toks: list[str], text: str):
        self.toks = toks
        self.pos = 0
        self.text = text

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise InputError(f"unexpected end of expression in {self.text!r}")
        self.pos += 1
        return tok

    def expr(self) -> RatFunc:
        out = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> RatFunc:
        out = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            out = out * rhs if op == "*" else out / rhs
        return out

    def factor(self) -> RatFunc:
        tok = self.take()
        if tok == "-":
            return -self.factor()
        if tok == "L":
            return RatFunc.param()
        if tok == "(":
            out = self.expr()
            if self.take() != ")":
                raise InputError(f"unbalanced parentheses in {self.text!r}")
            return out
        if tok.isdigit():
            return RatFunc.const(int(tok))
        raise InputError(f"unexpected token {tok!r} in {self.text!r}")


def parse(text: str) -> RatFunc:
    """Parse one expression of the family grammar."""
    parser = _Parser(_tokenize(text), text)
    out = parser.expr()
    if parser.peek() is not None:
        raise InputError(f"trailing input after expression in {text!r}")
    return out
