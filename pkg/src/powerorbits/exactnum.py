"""Exact rationals, factorization, p-adic valuations and S-integer predicates over Q.

Rationals are :class:`fractions.Fraction`, which already keeps the
numerator/denominator pair reduced with a positive denominator.
"""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .errors import ZeroInput

Rational = Fraction

TRIAL_DIVISION_BOUND = 10**6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class _Infinity:
    """The valuation of zero. Compares above every integer; refuses arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    __str__ = __repr__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("valuation-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def _no_arith(self, *_):
        raise TypeError("arithmetic on the valuation of zero is undefined")

    __add__ = __radd__ = __sub__ = __rsub__ = __mul__ = __rmul__ = _no_arith
    __neg__ = __int__ = __index__ = _no_arith


INF = _Infinity()


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def coprime_fraction(num: int, den: int) -> Fraction:
    """Build num/den without the gcd; caller guarantees den > 0 and gcd(num, den) = 1.

    Fraction always normalises, and on million-bit orbit values that gcd is
    the whole cost of an iteration step.
    """
    x = object.__new__(Fraction)
    x._numerator = num
    x._denominator = den
    return x


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational number: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- primality

def is_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 prime bases.

    Deterministic for n < 3.3e24; beyond that a composite passing all 13
    bases is not known to exist.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    # returns a nontrivial factor of composite odd n
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _trial_divide(n: int, bound: int, out: dict[int, int]) -> int:
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p, step = 5, 2
    while p <= bound and p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = out.get(p, 0) + e
        p += step
        step = 6 - step
    if 1 < n and (n < 25 or math.isqrt(n) < p):
        # everything below sqrt(n) was tried, so n is prime
        out[n] = out.get(n, 0) + 1
        n = 1
    return n


@lru_cache(maxsize=65536)
def _factor_int_cached(n: int, bound: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    rest = _trial_divide(n, bound, out)
    if rest > 1:
        rng = random.Random(rest)
        stack = [rest]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if is_prime(m):
                out[m] = out.get(m, 0) + 1
                continue
            r = integer_root(m, 2)
            if r * r == m:
                stack += [r, r]
                continue
            g = _pollard_brent(m, rng)
            stack += [g, m // g]
    return tuple(sorted(out.items()))


def factor_int(n: int, bound: int = TRIAL_DIVISION_BOUND) -> dict[int, int]:
    """Prime factorization of a positive integer as ``{p: e}``."""
    if n < 1:
        raise ValueError("factor_int needs a positive integer")
    return dict(_factor_int_cached(n, bound))


def prime_divisors(n: int) -> list[int]:
    return sorted(factor_int(abs(n))) if n not in (0, 1, -1) else []


# ---------------------------------------------------------------- roots

def integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("integer_root of a negative number")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    bits = n.bit_length()
    if k >= bits:
        return 1
    x = 1 << (-(-bits // k))  # an upper bound
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    return x


def exact_root(n: int, k: int) -> int | None:
    """The integer r >= 0 with r**k == n, or None."""
    r = integer_root(n, k)
    return r if r**k == n else None


def perfect_power_exponent(n: int) -> int:
    """Largest g with n = r**g for an integer r; 0 when n == 1 (every g works).

    Equals the gcd of the exponents in the factorization of n, computed
    without factoring.
    """
    if n < 1:
        raise ValueError("perfect_power_exponent needs n >= 1")
    if n == 1:
        return 0
    g = 1
    q = 2
    while (1 << q) <= n:
        r = exact_root(n, q)
        if r is not None:
            n = r
            g *= q
            continue
        q += 1
        while not is_prime(q):
            q += 1
    return g


# ---------------------------------------------------------------- prime sets

@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...] = ()

    def __post_init__(self):
        ps = tuple(sorted(set(int(p) for p in self.primes)))
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "primes", ps)

    @classmethod
    def of(cls, primes: Iterable[int] = ()) -> "PrimeSet":
        return cls(tuple(primes))

    @classmethod
    def parse(cls, text: str) -> "PrimeSet":
        """Comma-separated list such as ``"2,3,7"``; empty string is the empty set."""
        text = text.strip().strip("{}")
        if not text:
            return cls()
        try:
            return cls(tuple(int(t) for t in text.split(",") if t.strip()))
        except ValueError as exc:
            raise ValueError(f"bad prime set {text!r}: {exc}") from None

    def __contains__(self, p) -> bool:
        return p in self.primes

    def __iter__(self) -> Iterator[int]:
        return iter(self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def __or__(self, other: "PrimeSet") -> "PrimeSet":
        return PrimeSet(self.primes + tuple(other))

    def __le__(self, other: "PrimeSet") -> bool:
        return set(self.primes) <= set(other.primes)

    def __str__(self) -> str:
        return ",".join(map(str, self.primes))


def as_primeset(s) -> PrimeSet:
    if isinstance(s, PrimeSet):
        return s
    if isinstance(s, str):
        return PrimeSet.parse(s)
    return PrimeSet.of(s)


# ---------------------------------------------------------------- valuations

def _vp_int(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def valuation(alpha, p: int):
    """v_p(alpha); the tagged value INF for alpha == 0."""
    alpha = as_rational(alpha)
    if alpha == 0:
        return INF
    if alpha.numerator % p == 0:
        return _vp_int(alpha.numerator, p)
    return -_vp_int(alpha.denominator, p)


def strip_primes(n: int, primes: Iterable[int]) -> tuple[int, dict[int, int]]:
    """Split n > 0 into its part coprime to ``primes`` and the removed exponents."""
    exps = {}
    for p in primes:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            exps[p] = e
    return n, exps


@dataclass(frozen=True)
class FactoredRational:
    sign: int
    factors: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if any(e == 0 for e in self.factors.values()):
            raise ValueError("zero exponent in factorization")

    def value(self) -> Fraction:
        x = Fraction(self.sign)
        for p, e in self.factors.items():
            x *= Fraction(p) ** e
        return x


def factor(alpha) -> FactoredRational:
    alpha = as_rational(alpha)
    if alpha == 0:
        raise ZeroInput("cannot factor 0")
    facs = dict(factor_int(abs(alpha.numerator)))
    for p, e in factor_int(alpha.denominator).items():
        facs[p] = -e
    return FactoredRational(1 if alpha > 0 else -1, dict(sorted(facs.items())))


def is_s_integer(alpha, S) -> bool:
    alpha = as_rational(alpha)
    S = as_primeset(S)
    rest, _ = strip_primes(alpha.denominator, S)
    return rest == 1


def is_s_unit(alpha, S) -> bool:
    alpha = as_rational(alpha)
    if alpha == 0:
        return False
    S = as_primeset(S)
    return (strip_primes(alpha.denominator, S)[0] == 1
            and strip_primes(abs(alpha.numerator), S)[0] == 1)


def radical_log_outside(alpha, S, positive_only: bool = True) -> float:
    """Sum of log p over primes p outside S with v_p(alpha) > 0 (or != 0)."""
    alpha = as_rational(alpha)
    if alpha == 0:
        raise ZeroInput("radical of 0 is undefined")
    S = as_primeset(S)
    primes = set(prime_divisors(alpha.numerator))
    if not positive_only:
        primes |= set(prime_divisors(alpha.denominator))
    return math.fsum(math.log(p) for p in sorted(primes) if p not in S)
