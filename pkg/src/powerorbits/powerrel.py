"""Deciding beta = a^l with a an S-integer and l not in {0, 1}; U / V / V-tilde membership.

Over Q, beta = a^l with a in R_S exactly when
  (i)   l divides v_p(beta) for every prime p,
  (ii)  beta > 0 if l is even,
  (iii) l > 0 needs v_p(beta) >= 0 outside S; l < 0 needs v_p(beta) <= 0 outside S.
Condition (iii) is checked by stripping the S-primes; condition (i) then only
needs the perfect-power exponent of the remaining S-free part, so nothing
large is ever factored.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .dynamics import Poly, is_preperiodic
from .errors import BitsizeExceeded, ZeroAlpha
from .exactnum import (as_primeset, as_rational, exact_root, format_rational,
                       perfect_power_exponent, strip_primes)
from .poly import DEFAULT_BIT_BUDGET, orbit

KINDS = ("U", "V", "TildeV")


@dataclass(frozen=True)
class PowerWitness:
    ell: int
    a: Fraction

    def __post_init__(self):
        if self.ell in (0, 1):
            raise ValueError("exponent must not be 0 or 1")

    @property
    def trivial(self) -> bool:
        return self.a in (0, 1, -1)

    def value(self) -> Fraction:
        return self.a**self.ell

    def sort_key(self):
        return (self.ell == -1, abs(self.ell), self.ell < 0)


def _divisors_of(g: int) -> list[int]:
    out = []
    for k in range(1, math.isqrt(g) + 1):
        if g % k == 0:
            out.append(k)
            if k * k != g:
                out.append(g // k)
    return sorted(out)


def could_be_power(beta: Fraction, S) -> bool:
    """Cheap necessary condition: after removing S-primes, numerator or denominator is 1."""
    if beta == 0:
        return True
    S = as_primeset(S)
    return (strip_primes(beta.denominator, S)[0] == 1
            or strip_primes(abs(beta.numerator), S)[0] == 1)


def power_representations(beta, S) -> list[PowerWitness]:
    """Every admissible exponent l with one canonical base each.

    beta in {0, 1, -1} admits infinitely many exponents; those return the
    single conventional witness (2, 0), (2, 1), (3, -1).
    """
    beta = as_rational(beta)
    S = as_primeset(S)
    if beta == 0:
        return [PowerWitness(2, Fraction(0))]
    if beta == 1:
        return [PowerWitness(2, Fraction(1))]
    if beta == -1:
        return [PowerWitness(3, Fraction(-1))]

    num_rest, num_s = strip_primes(abs(beta.numerator), S)
    den_rest, den_s = strip_primes(beta.denominator, S)
    pos_ok = den_rest == 1
    neg_ok = num_rest == 1
    if not (pos_ok or neg_ok):
        return []

    g = 0
    for e in num_s.values():
        g = math.gcd(g, e)
    for e in den_s.values():
        g = math.gcd(g, e)
    rest = num_rest if pos_ok else den_rest
    if rest > 1:
        g = math.gcd(g, perfect_power_exponent(rest))

    out = []
    for k in _divisors_of(g):
        for ell in (k, -k):
            if ell == 1:
                continue
            if ell > 0 and not pos_ok or ell < 0 and not neg_ok:
                continue
            if ell % 2 == 0 and beta < 0:
                continue
            r_num = exact_root(abs(beta.numerator), k)
            r_den = exact_root(beta.denominator, k)
            base = Fraction(r_num, r_den)
            if beta < 0:
                base = -base
            if ell < 0:
                base = 1 / base
            out.append(PowerWitness(ell, base))
    out.sort(key=PowerWitness.sort_key)
    return out


@dataclass
class RelationHit:
    kind: str
    alpha: Fraction
    n: int
    k: int
    witness: PowerWitness
    preperiodic: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def trivial(self) -> bool:
        return self.witness.trivial

    @property
    def nontrivial(self) -> bool:
        return not (self.trivial or self.preperiodic)

    def replay(self, f: Poly, bit_budget: int = DEFAULT_BIT_BUDGET) -> bool:
        """Re-check the defining equation exactly."""
        vals = orbit(f, self.alpha, self.n + self.k, bit_budget)
        power = self.witness.value()
        if self.kind == "U":
            return vals[1] == power
        if self.kind == "V":
            return vals[self.n] == power * self.alpha
        return vals[self.n + self.k] == power * vals[self.k]

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": format_rational(self.alpha),
            "n": self.n,
            "k": self.k,
            "ell": self.witness.ell,
            "a": format_rational(self.witness.a),
            "trivial": self.trivial,
            "preperiodic": self.preperiodic,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "RelationHit":
        return cls(d["kind"], as_rational(d["alpha"]), int(d["n"]), int(d["k"]),
                   PowerWitness(int(d["ell"]), as_rational(d["a"])),
                   bool(d.get("preperiodic", False)), dict(d.get("diagnostics", {})))


def _pick(reps: list[PowerWitness]) -> PowerWitness:
    return reps[0]


def _flag(f: Poly, alpha: Fraction, bit_budget: int) -> bool:
    try:
        return is_preperiodic(f, alpha, bit_budget)
    except BitsizeExceeded:
        return False


def u_membership(f: Poly, S, alpha, bit_budget: int = DEFAULT_BIT_BUDGET) -> RelationHit | None:
    alpha = as_rational(alpha)
    reps = power_representations(f(alpha), S)
    if not reps:
        return None
    return RelationHit("U", alpha, 1, 0, _pick(reps), _flag(f, alpha, bit_budget))


def _first_in_grid(f, S, alpha, cells, vals, kind, bit_budget):
    # cells in priority order; a nontrivial witness anywhere beats an earlier trivial one
    first_trivial = None
    for n, k in cells:
        base = vals[k]
        if base == 0:
            continue
        reps = power_representations(vals[n + k] / base, S)
        if not reps:
            continue
        w = _pick(reps)
        if not w.trivial:
            return RelationHit(kind, alpha, n, k, w, _flag(f, alpha, bit_budget))
        if first_trivial is None:
            first_trivial = (n, k, w)
    if first_trivial is not None:
        n, k, w = first_trivial
        return RelationHit(kind, alpha, n, k, w, _flag(f, alpha, bit_budget))
    return None


def v_membership(f: Poly, S, alpha, n_max: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> RelationHit | None:
    """First n in 1..n_max with f^(n)(alpha)/alpha an S-integral power."""
    alpha = as_rational(alpha)
    if alpha == 0:
        raise ZeroAlpha("f^(n)(0)/0 is undefined")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    vals = orbit(f, alpha, n_max, bit_budget)
    return _first_in_grid(f, S, alpha, [(n, 0) for n in range(1, n_max + 1)], vals, "V", bit_budget)


def tilde_v_membership(f: Poly, S, alpha, n_max: int, k_max: int,
                       bit_budget: int = DEFAULT_BIT_BUDGET) -> RelationHit | None:
    """Scan f^(n+k)(alpha) = a^l f^(k)(alpha) in (k, n) order; zero orbit values are skipped."""
    alpha = as_rational(alpha)
    if n_max < 1 or k_max < 0:
        raise ValueError("need n_max >= 1 and k_max >= 0")
    vals = orbit(f, alpha, n_max + k_max, bit_budget)
    cells = [(n, k) for k in range(k_max + 1) for n in range(1, n_max + 1)]
    hit = _first_in_grid(f, S, alpha, cells, vals, "TildeV", bit_budget)
    zeros = [k for k in range(k_max + 1) if vals[k] == 0]
    if hit is not None and zeros:
        hit.diagnostics["zero_k_skipped"] = zeros
    return hit
