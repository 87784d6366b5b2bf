"""abc diagnostics over Q: triple quality, conductor readings for V-hits, Granville scans."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .dynamics import Poly, has_simple_roots, s_f
from .errors import InvalidParameters, InvalidTriple, WrongHitKind
from .exactnum import as_primeset, format_rational, prime_divisors, valuation
from .heights import height_bounds, naive_height
from .poly import DEFAULT_BIT_BUDGET, orbit
from .powerrel import RelationHit
from .search import enumerate_rationals

COMPARE_SLACK = 1e-9


@dataclass(frozen=True)
class AbcTriple:
    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if min(a, b, c) < 1:
            raise InvalidTriple(f"entries must be positive: {(a, b, c)}")
        if a + b != c:
            raise InvalidTriple(f"{a} + {b} != {c}")
        if math.gcd(a, b) != 1 or math.gcd(b, c) != 1 or math.gcd(a, c) != 1:
            raise InvalidTriple(f"{(a, b, c)} is not pairwise coprime")


def radical(n: int) -> int:
    return math.prod(prime_divisors(n)) if abs(n) > 1 else 1


def abc_quality(t: AbcTriple) -> float:
    """log c / log rad(abc)."""
    rad = radical(t.a) * radical(t.b) * radical(t.c)  # pairwise coprime
    return math.log(t.c) / math.log(rad)


@dataclass(frozen=True)
class ConductorReading:
    radical_sum: float
    rhs_chain: float
    rhs_bound: float
    granville_lhs: float
    eps: float
    primes: tuple[int, ...] = ()

    @property
    def chain_ok(self) -> bool:
        return self.radical_sum <= self.rhs_chain + COMPARE_SLACK

    @property
    def bound_ok(self) -> bool:
        return self.rhs_chain <= self.rhs_bound + COMPARE_SLACK

    @property
    def holds(self) -> bool:
        return self.chain_ok and self.bound_ok

    @property
    def granville_gap(self) -> float:
        return self.granville_lhs - self.radical_sum

    def as_dict(self) -> dict:
        return {
            "radical_sum": self.radical_sum,
            "rhs_chain": self.rhs_chain,
            "rhs_bound": self.rhs_bound,
            "chain_slack": self.rhs_chain - self.radical_sum,
            "bound_slack": self.rhs_bound - self.rhs_chain,
            "granville_lhs": self.granville_lhs,
            "granville_gap": self.granville_gap,
            "eps": self.eps,
            "primes": list(self.primes),
        }


def conductor_reading(f: Poly, S, hit: RelationHit, eps: float,
                      bit_budget: int = DEFAULT_BIT_BUDGET) -> ConductorReading:
    """Both sides of the unconditional conductor-versus-height chain for a V-hit.

    For f^n(alpha) = a^l alpha with l >= 2, every prime outside S_f dividing
    f^n(alpha) divides a*alpha, so only a and alpha get factored.
    """
    if hit.kind != "V" or hit.witness.ell < 2 or hit.alpha == 0:
        raise WrongHitKind(f"need a V-hit with ell >= 2 and alpha != 0, got kind={hit.kind} ell={hit.witness.ell}")
    Sf = s_f(f, S)
    d, n, alpha = f.degree, hit.n, hit.alpha
    vals = orbit(f, alpha, n, bit_budget)
    top = vals[n]
    if top == 0:
        raise WrongHitKind("orbit value vanishes")
    candidates = set(prime_divisors(alpha.numerator)) | set(prime_divisors(hit.witness.a.numerator))
    primes = tuple(sorted(p for p in candidates if p not in Sf and valuation(top, p) > 0))
    rad = math.fsum(math.log(p) for p in primes)
    h_alpha = naive_height(alpha)
    c1 = height_bounds(f).c1
    return ConductorReading(
        radical_sum=rad,
        rhs_chain=0.5 * naive_height(top) + h_alpha,
        rhs_bound=(d**n / 2 + 1) * h_alpha + (d**n / 2) * c1,
        granville_lhs=(d - 1 - eps) * naive_height(vals[n - 1]),
        eps=eps,
        primes=primes,
    )


@dataclass
class GranvilleRow:
    alpha: Fraction
    height: float
    radical_sum: float
    lhs: float
    gap: float
    envelope: float


@dataclass
class GranvilleTable:
    polynomial: str
    eps: float
    homogenization: str
    rows: list[GranvilleRow] = field(default_factory=list)
    roots_skipped: list[Fraction] = field(default_factory=list)

    @property
    def max_gap(self) -> float:
        return max((r.gap for r in self.rows), default=float("-inf"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "height", "radical_sum", "lhs", "gap"])
        for r in self.rows:
            w.writerow([format_rational(r.alpha), repr(r.height), repr(r.radical_sum), repr(r.lhs), repr(r.gap)])
        return buf.getvalue()


def granville_scan(f: Poly, S, B: int, eps: float, homogenization: str = "d-1") -> GranvilleTable:
    """(coef - eps) h(alpha) against the radical of f(alpha) outside S_f, for all alpha up to B.

    ``coef`` is d-1 (homogenising with Y^(d+1)) or d-2 (with Y^d).  The running
    maximum of the gap is an empirical lower envelope for the unknown constant.
    Roots of f are skipped since every prime divides 0.
    """
    if homogenization not in ("d-1", "d-2"):
        raise InvalidParameters("homogenization must be 'd-1' or 'd-2'")
    d = f.degree
    if d < 3 or not has_simple_roots(f):
        raise InvalidParameters("granville_scan needs degree >= 3 and simple roots")
    coef = d - 1 if homogenization == "d-1" else d - 2
    Sf = s_f(f, as_primeset(S))
    table = GranvilleTable(str(f), eps, homogenization)
    env = float("-inf")
    for alpha in enumerate_rationals(B):
        val = f(alpha)
        if val == 0:
            table.roots_skipped.append(alpha)
            continue
        rad = math.fsum(math.log(p) for p in prime_divisors(val.numerator) if p not in Sf)
        h = naive_height(alpha)
        lhs = (coef - eps) * h
        gap = lhs - rad
        env = max(env, gap)
        table.rows.append(GranvilleRow(alpha, h, rad, lhs, gap, env))
    return table
