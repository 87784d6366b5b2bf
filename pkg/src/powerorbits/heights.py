"""Weil heights, one-step height constants for polynomial maps, canonical heights.

For beta = x/y in lowest terms, f(beta) = F(x, y) / (L y^d) with F the
homogenised integer form of L*f.  Writing
``lambda_v = log max(|F(x,y)|_v, |y^d|_v) - d log max(|x|_v, |y|_v)`` for each
place, the product formula gives ``h(f(beta)) - d h(beta) = sum_v lambda_v``,
so bounding every local term bounds the global difference.  Good-reduction
primes contribute exactly zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DegreeTooSmall
from .exactnum import as_rational, prime_divisors, valuation
from .poly import DEFAULT_BIT_BUDGET, Poly, _check_bits

CERT_SLACK = 1e-12
CANONICAL_BIT_BUDGET = 16 * DEFAULT_BIT_BUDGET


def log_plus(t: float) -> float:
    if t < 0:
        raise ValueError("log_plus is defined for t >= 0")
    return math.log(t) if t > 1 else 0.0


def naive_height(alpha) -> float:
    """log max(|p|, q) for alpha = p/q in lowest terms."""
    alpha = as_rational(alpha)
    m = max(abs(alpha.numerator), alpha.denominator)
    return math.log(m) if m > 1 else 0.0


@dataclass(frozen=True)
class HeightBound:
    """d h(b) - c_low <= h(f(b)) <= d h(b) + c_up for every rational b."""

    degree: int
    c_up: float
    c_low: float

    @property
    def c1(self) -> float:
        # iterating the one-step bounds gives the k-step sandwich with
        # constant max(c_up, c_low) * (d^k - 1)/(d - 1) <= d^k * max(c_up, c_low)
        return max(self.c_up, self.c_low)

    @property
    def escape_threshold(self) -> float:
        """Above this height every orbit is strictly height-increasing."""
        d = self.degree
        return d * self.c_low / (d - 1) + 1e-9


def _archimedean_lower(cs: tuple[Fraction, ...]) -> float:
    """Lower bound for lambda_inf (a nonpositive number).

    With M = max(|x|, |y|): if |y| >= delta*M then lambda >= d log delta; else
    |x| = M and |F| >= (|c_d| - g(delta)) M^d, g(t) = sum_{i<d} |c_i| t^(d-i).
    Pick delta with delta^d + g(delta) <= |c_d| so both cases give d log delta.
    """
    d = len(cs) - 1
    lead = abs(cs[-1])
    lower = [abs(c) for c in cs[:-1]]

    def excess(t: Fraction) -> Fraction:
        return t**d + sum(c * t ** (d - i) for i, c in enumerate(lower)) - lead

    if excess(Fraction(1)) <= 0:
        return 0.0
    lo, hi = Fraction(0), Fraction(1)
    for _ in range(40):
        mid = (lo + hi) / 2
        # keep the bisection points short
        mid = Fraction(round(mid * 2**48), 2**48)
        if excess(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return d * math.log(lo)


def _nonarchimedean_lower(cs: tuple[Fraction, ...], p: int) -> float:
    """Lower bound for lambda_p at a prime of bad reduction.

    With r = |y|_p / M in {p^-j}: r >= p^-k gives lambda >= -d k log p; if
    r <= p^-(k+1) and v(c_i) + (d-i)(k+1) > v(c_d) for all i < d, the leading
    term dominates and lambda = log |c_d|_p.
    """
    d = len(cs) - 1
    vd = valuation(cs[-1], p)
    k = 0
    for i, c in enumerate(cs[:-1]):
        if c == 0:
            continue
        vi = valuation(c, p)
        # need (k+1)(d-i) > vd - vi
        need = (vd - vi) // (d - i)  # smallest k+1 exceeding the ratio is need+1
        k = max(k, need)
    return min(-d * k * math.log(p), -vd * math.log(p))


@lru_cache(maxsize=256)
def height_bounds(f: Poly) -> HeightBound:
    d = f.degree
    if d < 2:
        raise DegreeTooSmall(f"height constants need degree >= 2, got {d}")
    cs = f.coeffs
    _, L = f.integer_form()
    c_up = math.log(L) + log_plus(float(sum(abs(c) for c in cs)))

    low = _archimedean_lower(cs)
    bad = set(prime_divisors(L)) | set(prime_divisors(cs[-1].numerator))
    for p in sorted(bad):
        low += _nonarchimedean_lower(cs, p)
    return HeightBound(d, c_up, max(0.0, -low))


@dataclass(frozen=True)
class HeightEstimate:
    value: float
    error: float
    iterations: int = 0

    def __post_init__(self):
        if self.error < 0:
            raise ValueError("negative error bound")

    @property
    def interval(self) -> tuple[float, float]:
        return self.value - self.error, self.value + self.error


def canonical_height(f: Poly, alpha, tol: float, bit_budget: int = CANONICAL_BIT_BUDGET) -> HeightEstimate:
    """Estimate lim h(f^n(alpha))/d^n to within tol.

    Telescoping the one-step bounds gives
    |h(f^n(a))/d^n - hhat(a)| <= C / ((d-1) d^n) with C = max(c_up, c_low).
    A repeated orbit value proves alpha preperiodic, so hhat = 0 exactly.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    hb = height_bounds(f)
    d = hb.degree
    C = max(hb.c_up, hb.c_low)
    n = 0
    while C / ((d - 1) * d**n) > tol:
        n += 1
    x = as_rational(alpha)
    seen = {x}
    for step in range(1, n + 1):
        x = f(x)
        _check_bits(x, bit_budget, step)
        if x in seen:
            return HeightEstimate(0.0, 0.0, step)
        seen.add(x)
    return HeightEstimate(naive_height(x) / d**n, C / ((d - 1) * d**n), n)
