"""Bounded-height searches for U, V and V-tilde hits, and the Pell families."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

from . import kernels
from .dynamics import Hypothesis, Poly, precondition_report, s_f
from .errors import BitsizeExceeded
from .exactnum import PrimeSet, as_primeset, format_rational, prime_divisors, valuation
from .poly import DEFAULT_BIT_BUDGET, iterate_eval
from .powerrel import PowerWitness, RelationHit, tilde_v_membership, u_membership, v_membership

log = logging.getLogger(__name__)

N_MAX_CAP = 12
WORKERS_ENV = "POWERORBITS_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def enumerate_rationals(B: int, q_lo: int = 1, q_hi: int | None = None) -> Iterator[Fraction]:
    """p/q in lowest terms with |p| <= B and 1 <= q <= B, ordered by q then p."""
    if B < 1:
        raise ValueError("B must be >= 1")
    q_hi = B + 1 if q_hi is None else q_hi
    for q in range(q_lo, q_hi):
        for p in range(-B, B + 1):
            if math.gcd(p, q) == 1 or q == 1:
                yield Fraction(p, q)


def _chunks(B: int) -> list[tuple[int, int]]:
    # fixed partition of 1..B into q-ranges, independent of the worker count
    n = min(B, 64)
    edges = sorted({1 + (B * i) // n for i in range(n)} | {B + 1})
    return list(zip(edges[:-1], edges[1:]))


def _enum_key(x: Fraction) -> tuple[int, int]:
    return (x.denominator, x.numerator)


def _bound_steps(B: int) -> list[int]:
    return sorted({max(1, math.ceil(B * j / 10)) for j in range(1, 11)})


@dataclass
class SearchReport:
    kind: str
    polynomial: str
    S: PrimeSet
    B: int
    params: dict = field(default_factory=dict)
    hits: list[RelationHit] = field(default_factory=list)
    skipped: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def counts(self) -> list[tuple[int, int]]:
        """Cumulative nontrivial hit counts at the bound steps B/10, 2B/10, ..., B."""
        sizes = sorted(max(abs(h.alpha.numerator), h.alpha.denominator) for h in self.hits if h.nontrivial)
        out = []
        for b in _bound_steps(self.B):
            out.append((b, sum(1 for s in sizes if s <= b)))
        return out

    def tally(self) -> dict:
        nontrivial = [h for h in self.hits if h.nontrivial]
        return {
            "hits": len(self.hits),
            "nontrivial": len(nontrivial),
            "nontrivial_ell_minus_one": sum(1 for h in nontrivial if h.witness.ell == -1),
            "trivial": sum(1 for h in self.hits if h.trivial),
            "preperiodic": sum(1 for h in self.hits if h.preperiodic),
            "skipped": self.skipped,
        }

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "polynomial": self.polynomial,
            "S": list(self.S),
            "B": self.B,
            "params": self.params,
            "tally": self.tally(),
            "counts": [{"bound": b, "cumulative_nontrivial_hits": c} for b, c in self.counts],
            "counts_note": "empirical stabilization evidence, not a proof of finiteness",
            "warnings": self.warnings,
            "hits": [h.as_dict() for h in self.hits],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def hits_jsonl(self) -> str:
        return "".join(h.to_json() + "\n" for h in self.hits)

    def stabilization_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bound", "cumulative_nontrivial_hits"])
        w.writerows(self.counts)
        return buf.getvalue()


def _warn_preconditions(f: Poly, hyp: Hypothesis, m: int | None = None) -> list[str]:
    try:
        rep = precondition_report(f, hyp, m)
    except Exception as exc:  # degree-1 input and similar
        return [f"precondition check failed: {exc}"]
    if rep.all_ok:
        return []
    msg = (f"{hyp.value} theorem hypotheses fail (degree_ok={rep.degree_ok}, "
           f"simple_roots_ok={rep.simple_roots_ok}, zero_condition_ok={rep.zero_condition_ok}); "
           "hits need not be finite")
    log.warning(msg)
    return [msg]


# ---- workers (module level so they pickle)

def _u_worker(args):
    f, S, B, q_lo, q_hi, budget = args
    coeffs, L = f.integer_form()
    hits, skipped = [], 0
    for p, q in kernels.scan_u_chunk(coeffs, L, list(S), q_lo, q_hi, B):
        try:
            hit = u_membership(f, S, Fraction(p, q), budget)
        except BitsizeExceeded:
            skipped += 1
            continue
        if hit is not None:
            hits.append(hit)
    return hits, skipped


def _v_worker(args):
    f, S, B, q_lo, q_hi, n_max, k_max, budget = args
    hits, skipped = [], 0
    for alpha in enumerate_rationals(B, q_lo, q_hi):
        try:
            if k_max is None:
                if alpha == 0:
                    continue
                hit = v_membership(f, S, alpha, n_max, budget)
            else:
                hit = tilde_v_membership(f, S, alpha, n_max, k_max, budget)
        except BitsizeExceeded:
            skipped += 1
            continue
        if hit is not None:
            hits.append(hit)
    return hits, skipped


def _run(worker, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        results = [worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(worker, tasks))
    hits, skipped = [], 0
    for h, s in results:
        hits += h
        skipped += s
    hits.sort(key=lambda h: _enum_key(h.alpha))
    return hits, skipped


def search_u(f: Poly, S, B: int, workers: int | None = None,
             bit_budget: int = DEFAULT_BIT_BUDGET) -> SearchReport:
    S = as_primeset(S)
    workers = default_workers() if workers is None else workers
    report = SearchReport("U", str(f), S, B, {"bit_budget": bit_budget})
    report.warnings = _warn_preconditions(f, Hypothesis.U)
    tasks = [(f, S, B, lo, hi, bit_budget) for lo, hi in _chunks(B)]
    report.hits, report.skipped = _run(_u_worker, tasks, workers)
    return report


def search_v(f: Poly, S, B: int, m: int, workers: int | None = None,
             bit_budget: int = DEFAULT_BIT_BUDGET, n_cap: int = N_MAX_CAP) -> SearchReport:
    if m < 1:
        raise ValueError("m must be >= 1")
    S = as_primeset(S)
    workers = default_workers() if workers is None else workers
    n_max = min(m, n_cap)
    report = SearchReport("V", str(f), S, B, {"m": m, "n_max": n_max, "bit_budget": bit_budget})
    report.warnings = _warn_preconditions(f, Hypothesis.VM, m)
    if n_max < m:
        report.warnings.append(f"n_max capped at {n_max}")
    tasks = [(f, S, B, lo, hi, n_max, None, bit_budget) for lo, hi in _chunks(B)]
    report.hits, report.skipped = _run(_v_worker, tasks, workers)
    return report


def search_tilde_v(f: Poly, S, B: int, n_max: int, k_max: int, workers: int | None = None,
                   bit_budget: int = DEFAULT_BIT_BUDGET, n_cap: int = N_MAX_CAP) -> SearchReport:
    if n_max < 1 or k_max < 0:
        raise ValueError("need n_max >= 1 and k_max >= 0")
    S = as_primeset(S)
    workers = default_workers() if workers is None else workers
    n_eff = min(n_max, n_cap)
    report = SearchReport("TildeV", str(f), S, B,
                          {"n_max": n_eff, "k_max": k_max, "bit_budget": bit_budget})
    report.warnings = _warn_preconditions(f, Hypothesis.ABC)
    tasks = [(f, S, B, lo, hi, n_eff, k_max, bit_budget) for lo, hi in _chunks(B)]
    report.hits, report.skipped = _run(_v_worker, tasks, workers)
    return report


# ---------------------------------------------------------------- invariants on hits

def constant_term_chain_violations(f: Poly, S, hit: RelationHit,
                                   bit_budget: int = DEFAULT_BIT_BUDGET) -> list[int]:
    """Primes p outside S_f with v_p(alpha) > 0 and v_p(f^n(alpha)) > 0 but v_p(f^n(0)) <= 0.

    Good reduction forces f^n(alpha) == f^n(0) mod p when p | alpha, so the
    list is always empty for a correct implementation.
    """
    Sf = s_f(f, S)
    alpha = hit.alpha
    if alpha == 0:
        return []
    top = iterate_eval(f, alpha, hit.n, bit_budget)
    at_zero = iterate_eval(f, 0, hit.n, bit_budget)
    bad = []
    for p in prime_divisors(alpha.numerator):
        if p in Sf:
            continue
        if valuation(top, p) > 0 and not valuation(at_zero, p) > 0:
            bad.append(p)
    return bad


# ---------------------------------------------------------------- Pell families

class PellPair(NamedTuple):
    r: int
    s: int

    def check(self) -> bool:
        return self.r * self.r - 2 * self.s * self.s == 1


def pell_pairs(count: int) -> list[PellPair]:
    """Solutions of r^2 - 2 s^2 = 1 from (3, 2) via r' = 3r + 4s, s' = 2r + 3s."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = [PellPair(3, 2)]
    while len(out) < count:
        r, s = out[-1]
        out.append(PellPair(3 * r + 4 * s, 2 * r + 3 * s))
    return out


def pell_family(count: int, g: Poly | None = None, variant: str = "U") -> tuple[Poly, list[tuple[PellPair, RelationHit]]]:
    """The two Pell-powered families, each hit replayed exactly before it is returned.

    U: f = 2 g(X)^2 (X^2 - 1) and f(r) = (2 g(r) s)^2.
    V: f = 2 X (X^2 - 1) and f(r) / r = (2 s)^2.
    """
    variant = variant.upper().removesuffix("-FAMILY")
    X = Poly.X()
    if variant == "U":
        g = Poly([1]) if g is None else g
        f = 2 * g * g * (X * X - 1)
    elif variant == "V":
        f = 2 * X * (X * X - 1)
    else:
        raise ValueError(f"variant must be U or V, got {variant!r}")
    out = []
    for pair in pell_pairs(count):
        if not pair.check():
            raise AssertionError(f"{pair} is not a Pell solution")
        r = Fraction(pair.r)
        if variant == "U":
            w = PowerWitness(2, abs(2 * g(r) * pair.s))
            hit = RelationHit("U", r, 1, 0, w)
        else:
            hit = RelationHit("V", r, 1, 0, PowerWitness(2, Fraction(2 * pair.s)))
        if not hit.replay(f):
            raise AssertionError(f"family hit fails to replay at {pair}")
        out.append((pair, hit))
    return f, out
