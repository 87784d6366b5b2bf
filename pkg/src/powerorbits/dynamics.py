"""Polynomial dynamics over Q: reduction, discriminants, orbit classification,
the two preperiodic-zero families, rational preimages and theorem checks."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import DegreeTooSmall, InvalidParameters
from .exactnum import PrimeSet, as_primeset, as_rational, factor_int, format_rational, prime_divisors
from .heights import height_bounds, naive_height
from .poly import DEFAULT_BIT_BUDGET, Poly, _check_bits, iterate_eval, orbit

__all__ = [
    "Poly", "iterate_eval", "orbit", "evaluate", "bad_reduction_primes", "s_f",
    "resultant", "discriminant", "has_simple_roots", "OrbitKind", "ZeroClassification",
    "classify_orbit", "classify_zero", "family_a", "family_b", "rational_preimages",
    "Hypothesis", "PreconditionReport", "precondition_report", "iterate_poly",
]


def evaluate(f: Poly, alpha) -> Fraction:
    return f(alpha)


def iterate_poly(f: Poly, m: int) -> Poly:
    """f^(m) expanded symbolically. Coefficients blow up fast; tests only."""
    out = Poly.X()
    for _ in range(m):
        out = f.compose(out)
    return out


# ---------------------------------------------------------------- reduction

def bad_reduction_primes(f: Poly) -> PrimeSet:
    """Primes p with v_p(c_i) < 0 for some i, or v_p(c_d) > 0."""
    if f.degree < 1:
        raise DegreeTooSmall("reduction type needs degree >= 1")
    _, L = f.integer_form()
    return PrimeSet.of(set(prime_divisors(L)) | set(prime_divisors(f.leading.numerator)))


def s_f(f: Poly, S) -> PrimeSet:
    return as_primeset(S) | bad_reduction_primes(f)


# ---------------------------------------------------------------- discriminants

def _det(rows: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                k = m[r][c] / m[c][c]
                for j in range(c, n):
                    m[r][j] -= k * m[c][j]
    return det


def resultant(f: Poly, g: Poly) -> Fraction:
    """Determinant of the Sylvester matrix."""
    m, n = f.degree, g.degree
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0:
        return f.leading**n
    if n == 0:
        return g.leading**m
    a = list(reversed(f.coeffs))
    b = list(reversed(g.coeffs))
    size = m + n
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + a + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + b + [Fraction(0)] * (size - n - 1 - i))
    return _det(rows)


def discriminant(f: Poly) -> Fraction:
    d = f.degree
    if d < 1:
        raise DegreeTooSmall("discriminant needs degree >= 1")
    if d == 1:
        return Fraction(1)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.leading


class SimpleRoots(NamedTuple):
    ok: bool
    discriminant: Fraction

    def __bool__(self):
        return self.ok


def has_simple_roots(f: Poly) -> SimpleRoots:
    disc = discriminant(f)
    return SimpleRoots(disc != 0, disc)


# ---------------------------------------------------------------- orbits

class OrbitKind(str, enum.Enum):
    PERIODIC = "Periodic"
    STRICTLY_PREPERIODIC = "StrictlyPreperiodic"
    WANDERING = "Wandering"


@dataclass(frozen=True)
class ZeroClassification:
    kind: OrbitKind
    tail: tuple[Fraction, ...]
    cycle_start: int | None = None
    witness_height: float | None = None
    threshold: float = 0.0

    @property
    def period(self) -> int | None:
        if self.cycle_start is None:
            return None
        return len(self.tail) - self.cycle_start

    def describe(self) -> str:
        path = " -> ".join(format_rational(x) for x in self.tail)
        if self.kind is OrbitKind.WANDERING:
            return f"{path} -> ... escapes (height {self.witness_height:.6g} > {self.threshold:.6g})"
        return f"{path} -> {format_rational(self.tail[self.cycle_start])} (cycle of length {self.period})"


def classify_orbit(f: Poly, alpha, bit_budget: int = DEFAULT_BIT_BUDGET) -> ZeroClassification:
    """Decide whether alpha is periodic, strictly preperiodic or wandering.

    Iterates exactly until a value repeats or the orbit height passes the
    escape threshold; past it heights strictly increase, so no repeat can
    follow.  Only finitely many rationals lie below the threshold, so the
    loop ends.
    """
    if f.degree < 2:
        raise DegreeTooSmall("orbit classification needs degree >= 2")
    T = height_bounds(f).escape_threshold
    x = as_rational(alpha)
    seen: dict[Fraction, int] = {}
    tail: list[Fraction] = []
    for step in itertools.count():
        if x in seen:
            start = seen[x]
            kind = OrbitKind.PERIODIC if start == 0 else OrbitKind.STRICTLY_PREPERIODIC
            return ZeroClassification(kind, tuple(tail), start, threshold=T)
        h = naive_height(x)
        if h > T:
            tail.append(x)
            return ZeroClassification(OrbitKind.WANDERING, tuple(tail), None, h, T)
        seen[x] = step
        tail.append(x)
        x = f(x)
        _check_bits(x, bit_budget, step + 1)
    raise AssertionError("unreachable")


def classify_zero(f: Poly, bit_budget: int = DEFAULT_BIT_BUDGET) -> ZeroClassification:
    return classify_orbit(f, 0, bit_budget)


def is_preperiodic(f: Poly, alpha, bit_budget: int = DEFAULT_BIT_BUDGET) -> bool:
    return classify_orbit(f, alpha, bit_budget).kind is not OrbitKind.WANDERING


# ---------------------------------------------------------------- families

def family_a(n: int, m: int, zeta: int) -> Poly:
    """X^n (X^m - 1) + zeta for a rational root of unity zeta of order dividing m."""
    if n < 1 or m < 1 or n + m < 3:
        raise InvalidParameters(f"need n, m >= 1 and n + m >= 3, got n={n}, m={m}")
    if zeta == 1:
        pass
    elif zeta == -1:
        if m % 2:
            raise InvalidParameters("zeta = -1 has order 2, which must divide m")
    else:
        raise InvalidParameters("the rational roots of unity are 1 and -1")
    X = Poly.X()
    return X**n * (X**m - 1) + zeta


def family_b_excluded(k: int, b) -> bool:
    """True when b^k k^k == (k+1)^(k+1), the value where roots collide."""
    b = as_rational(b)
    return b**k * k**k == (k + 1) ** (k + 1)


def family_b(k: int, b) -> Poly:
    """X^k (X - b) + b."""
    b = as_rational(b)
    if k < 2:
        raise InvalidParameters(f"need k >= 2, got {k}")
    if b == 0:
        raise InvalidParameters("b must be nonzero")
    if family_b_excluded(k, b):
        raise InvalidParameters(f"b^k k^k = (k+1)^(k+1) for k={k}, b={b}")
    X = Poly.X()
    return X**k * (X - b) + b


# ---------------------------------------------------------------- preimages

def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factor_int(n).items():
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


def rational_preimages(f: Poly, beta) -> list[Fraction]:
    """All rational roots of f(X) - beta, sorted."""
    if f.degree < 1:
        raise DegreeTooSmall("preimages need degree >= 1")
    g = f - as_rational(beta)
    a, _ = g.integer_form()
    roots = set()
    low = 0
    while a[low] == 0:
        low += 1
    if low:
        roots.add(Fraction(0))
    a = a[low:]
    if len(a) > 1:
        for p in _divisors(abs(a[0])):
            for q in _divisors(abs(a[-1])):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if g(cand) == 0:
                        roots.add(cand)
    return sorted(roots)


# ---------------------------------------------------------------- hypotheses

class Hypothesis(str, enum.Enum):
    U = "U"
    VM = "Vm"
    V0 = "V0"
    ABC = "abc"

    @classmethod
    def parse(cls, text: str) -> "Hypothesis":
        key = text.strip().lower().removesuffix("-thm")
        for h in cls:
            if h.value.lower() == key:
                return h
        raise ValueError(f"unknown theorem {text!r}; expected one of U, Vm, V0, abc")


@dataclass(frozen=True)
class PreconditionReport:
    hypothesis: Hypothesis
    degree_ok: bool
    simple_roots_ok: bool
    zero_condition_ok: bool
    zero_condition_kind: str
    details: list[str] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return self.degree_ok and self.simple_roots_ok and self.zero_condition_ok

    def as_dict(self) -> dict:
        return {
            "hypothesis": self.hypothesis.value,
            "degree_ok": self.degree_ok,
            "simple_roots_ok": self.simple_roots_ok,
            "zero_condition_ok": self.zero_condition_ok,
            "zero_condition_kind": self.zero_condition_kind,
            "all_ok": self.all_ok,
            "details": list(self.details),
        }


def precondition_report(f: Poly, hypothesis, m: int | None = None,
                        bit_budget: int = DEFAULT_BIT_BUDGET) -> PreconditionReport:
    hyp = hypothesis if isinstance(hypothesis, Hypothesis) else Hypothesis.parse(str(hypothesis))
    details = [f"f = {f}", f"degree {f.degree}"]
    degree_ok = f.degree >= 3
    sr = has_simple_roots(f) if f.degree >= 1 else SimpleRoots(False, Fraction(0))
    details.append(f"discriminant {format_rational(sr.discriminant)}")

    if hyp is Hypothesis.U:
        kind, ok = "none", True
    elif hyp is Hypothesis.VM:
        if m is None or m < 1:
            raise InvalidParameters("the V_m theorem needs m >= 1")
        kind = f"f^(k)(0) != 0 for k = 1..{m}"
        vals = orbit(f, 0, m, bit_budget)[1:]
        ok = all(v != 0 for v in vals)
        details.append("orbit of 0: " + " -> ".join(format_rational(v) for v in [Fraction(0)] + vals))
    else:
        if f.degree < 2:
            kind, ok = "0 orbit (undefined below degree 2)", False
        else:
            cz = classify_zero(f, bit_budget)
            details.append(f"orbit of 0: {cz.describe()}")
            if hyp is Hypothesis.V0:
                kind = "0 in PrePer(f) \\ Per(f)"
                ok = cz.kind is OrbitKind.STRICTLY_PREPERIODIC
            else:
                kind = "0 not in Per(f)"
                ok = cz.kind is not OrbitKind.PERIODIC
    return PreconditionReport(hyp, degree_ok, sr.ok, ok, kind, details)
