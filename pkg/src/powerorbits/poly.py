"""Univariate polynomials with rational coefficients, plus a small parser."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BitsizeExceeded
from .exactnum import as_rational, coprime_fraction, format_rational

DEFAULT_BIT_BUDGET = 10**6


@dataclass(frozen=True)
class Poly:
    """c_0 + c_1 X + ... + c_d X^d, stored low degree first with c_d != 0.

    The zero polynomial has an empty coefficient tuple and degree -1; it only
    shows up as an intermediate value of the arithmetic below.
    """

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # -- construction
    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def X(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def parse(cls, text: str) -> "Poly":
        """Accept ``"c0,c1,...,cd"`` or a symbolic string like ``"X^3-X^2+1"``."""
        text = text.strip()
        if re.fullmatch(r"[\s\d+\-/,]+", text) and "," in text:
            return cls([as_rational(t.strip()) for t in text.split(",")])
        return _Parser(text).parse()

    # -- accessors
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """(a_0..a_d, L) with L the lcm of the denominators and a_i = L*c_i."""
        L = 1
        for c in self.coeffs:
            L = L * c.denominator // math.gcd(L, c.denominator)
        return tuple(int(c * L) for c in self.coeffs), L

    # -- evaluation
    def __call__(self, alpha) -> Fraction:
        alpha = as_rational(alpha)
        if not self.coeffs:
            return Fraction(0)
        a, L = self._int_form
        p, q = alpha.numerator, alpha.denominator
        d = len(a) - 1
        if q == 1:
            n = a[d]
            for i in range(d - 1, -1, -1):
                n = n * p + a[i]
            return Fraction(n, L)
        n = a[d]
        qp = 1
        for i in range(d - 1, -1, -1):
            qp *= q
            n = n * p + a[i] * qp
        if math.gcd(a[d], q) == 1:
            # n = a_d p^d mod q is prime to q, so only L can cancel
            g = math.gcd(n, L)
            return coprime_fraction(n // g, L // g * qp)
        return Fraction(n, L * qp)

    @property
    def _int_form(self):
        try:
            return self.__dict__["_cached_int_form"]
        except KeyError:
            v = self.integer_form()
            object.__setattr__(self, "_cached_int_form", v)
            return v

    # -- arithmetic
    def __add__(self, other) -> "Poly":
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out, base = Poly([1]), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def compose(self, inner: "Poly") -> "Poly":
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * inner + Poly([c])
        return out

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quo = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / other.leading
            if c:
                quo[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return Poly(quo), Poly(rem[:dq])

    # -- printing
    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = format_rational(mag)
            else:
                mono = "X" if i == 1 else f"X^{i}"
                if mag == 1:
                    body = mono
                elif mag.denominator == 1:
                    body = f"{mag.numerator}*{mono}"
                else:
                    body = f"({format_rational(mag)})*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


def _lift(x) -> Poly:
    return x if isinstance(x, Poly) else Poly([x])


def iterate_eval(f: Poly, alpha, n: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> Fraction:
    """f^(n)(alpha) computed pointwise; raises BitsizeExceeded past the budget."""
    if n < 0:
        raise ValueError("iterate count must be >= 0")
    x = as_rational(alpha)
    for step in range(1, n + 1):
        x = f(x)
        _check_bits(x, bit_budget, step)
    return x


def orbit(f: Poly, alpha, n: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> list[Fraction]:
    """[alpha, f(alpha), ..., f^(n)(alpha)]."""
    x = as_rational(alpha)
    out = [x]
    for step in range(1, n + 1):
        x = f(x)
        _check_bits(x, bit_budget, step)
        out.append(x)
    return out


def _check_bits(x: Fraction, budget: int, step: int):
    bits = max(x.numerator.bit_length(), x.denominator.bit_length())
    if bits > budget:
        raise BitsizeExceeded(bits, budget, step)


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([xX])|(\*\*|[-+*/^()]))")


class _Parser:
    # grammar:  expr := ['+'|'-'] term (('+'|'-') term)*
    #           term := power (['*'|'/' number] power)*   (implicit product allowed)
    #           power := atom ['^' int]
    #           atom := int | X | '(' expr ')'
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial {self.text!r} at {text[pos:]!r}")
            if m.group(1):
                self.toks.append(("num", int(m.group(1))))
            elif m.group(2):
                self.toks.append(("x", None))
            else:
                op = m.group(3)
                self.toks.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def _fail(self, what):
        raise ValueError(f"cannot parse polynomial {self.text!r}: {what}")

    def parse(self) -> Poly:
        if not self.toks:
            self._fail("empty input")
        p = self._expr()
        if self.i != len(self.toks):
            self._fail(f"unexpected token {self._peek()[1]!r}")
        return p

    def _expr(self) -> Poly:
        kind, val = self._peek()
        neg = False
        if kind == "op" and val in "+-":
            self._take()
            neg = val == "-"
        out = self._term()
        if neg:
            out = -out
        while True:
            kind, val = self._peek()
            if kind == "op" and val in "+-":
                self._take()
                t = self._term()
                out = out + t if val == "+" else out - t
            else:
                return out

    def _term(self) -> Poly:
        out = self._power()
        while True:
            kind, val = self._peek()
            if kind == "op" and val == "*":
                self._take()
                out = out * self._power()
            elif kind == "op" and val == "/":
                self._take()
                k2, v2 = self._take()
                if k2 != "num" or v2 == 0:
                    self._fail("division only by a nonzero integer")
                out = out * Poly([Fraction(1, v2)])
            elif kind in ("num", "x") or (kind == "op" and val == "("):
                out = out * self._power()
            else:
                return out

    def _power(self) -> Poly:
        base = self._atom()
        kind, val = self._peek()
        if kind == "op" and val == "^":
            self._take()
            k2, v2 = self._take()
            if k2 != "num":
                self._fail("exponent must be a nonnegative integer")
            base = base**v2
        return base

    def _atom(self) -> Poly:
        kind, val = self._take()
        if kind == "num":
            return Poly([val])
        if kind == "x":
            return Poly.X()
        if kind == "op" and val == "(":
            inner = self._expr()
            k2, v2 = self._take()
            if (k2, v2) != ("op", ")"):
                self._fail("missing ')'")
            return inner
        self._fail(f"unexpected token {val!r}")
