from fractions import Fraction

import pytest

from oracles import count_rationals
from powerorbits.dynamics import Poly, s_f
from powerorbits.exactnum import is_s_integer
from powerorbits.powerrel import power_representations, u_membership, v_membership
from powerorbits.search import (PellPair, constant_term_chain_violations, enumerate_rationals, pell_family,
                                pell_pairs, search_tilde_v, search_u, search_v)

F = Poly.parse("X^3-X^2+1")
X = Poly.X()


def test_enumeration_small():
    assert list(enumerate_rationals(1)) == [-1, 0, 1]
    got = list(enumerate_rationals(2))
    assert got == [-2, -1, 0, 1, 2, Fraction(-1, 2), Fraction(1, 2)]


@pytest.mark.parametrize("B", [1, 7, 30, 100])
def test_enumeration_count_and_uniqueness(B):
    got = list(enumerate_rationals(B))
    assert len(got) == len(set(got)) == count_rationals(B)
    assert all(max(abs(x.numerator), x.denominator) <= B for x in got)


def test_search_u_small_examples():
    rep = search_u(F, [], 100, workers=1)
    nontrivial = [(h.alpha, h.witness.ell, h.witness.a) for h in rep.hits if h.nontrivial]
    assert nontrivial == [(4, 2, 7), (Fraction(-3, 4), -2, 8)]
    assert rep.warnings == []


def test_search_u_is_complete_against_direct_scan():
    f = Poly.parse("2X^2(X^2-1)")
    for S in ([], [2]):
        rep = search_u(f, S, 40, workers=1)
        direct = [u_membership(f, S, a) for a in enumerate_rationals(40)]
        direct = [h for h in direct if h is not None]
        assert [h.to_json() for h in rep.hits] == [h.to_json() for h in direct]
        assert rep.warnings  # repeated roots


def test_search_u_remark_family_members():
    rep = search_u(Poly.parse("2X^2(X^2-1)"), [], 120, workers=1)
    found = {h.alpha for h in rep.hits if h.nontrivial}
    assert {3, -3, 17, -17, 99, -99} <= found


def test_search_v_small_examples():
    rep = search_v(F, [2], 30, 3, workers=1)
    by_alpha = {h.alpha: h for h in rep.hits}
    h = by_alpha[Fraction(4)]
    assert (h.n, h.witness.ell, h.witness.a) == (1, 2, Fraction(7, 2))
    assert by_alpha[Fraction(-3, 4)].witness.ell == -1
    direct = [v_membership(F, [2], a, 3) for a in enumerate_rationals(30) if a]
    assert [h.to_json() for h in rep.hits] == [h.to_json() for h in direct if h is not None]


def test_search_tilde_v_contains_v():
    f = Poly.parse("2X(X^2-1)")
    v = search_v(f, [], 20, 2, workers=1)
    tv = search_tilde_v(f, [], 20, 2, 1, workers=1)
    v_alphas = {h.alpha for h in v.hits if h.nontrivial}
    assert v_alphas <= {h.alpha for h in tv.hits}
    assert {3, 17} <= v_alphas


def test_counts_nondecreasing_and_final():
    rep = search_u(F, [], 300, workers=1)
    counts = [c for _, c in rep.counts]
    assert counts == sorted(counts)
    assert counts[-1] == rep.tally()["nontrivial"]
    assert rep.stabilization_csv().splitlines()[0] == "bound,cumulative_nontrivial_hits"


@pytest.mark.parametrize("kind", ["U", "V", "TildeV"])
def test_workers_do_not_change_output(kind):
    f = Poly.parse("2X^2(X^2-1)")
    run = {"U": lambda w: search_u(f, [2], 60, workers=w),
           "V": lambda w: search_v(f, [2], 25, 2, workers=w),
           "TildeV": lambda w: search_tilde_v(f, [2], 15, 2, 1, workers=w)}[kind]
    one, two = run(1), run(2)
    assert one.hits_jsonl().encode() == two.hits_jsonl().encode()
    assert one.to_json() == two.to_json()


def test_hits_sound_and_s_integral():
    for S in ([], [2], [2, 3]):
        rep = search_v(F, S, 40, 3, workers=1)
        Sf = s_f(F, S)
        for h in rep.hits:
            assert h.replay(F)
            if h.witness.ell >= 2:
                assert is_s_integer(h.alpha, Sf)
            assert constant_term_chain_violations(F, S, h) == []


def test_u_hits_are_s_integral():
    f = Poly.parse("(1/6)X^3+5")
    rep = search_u(f, [], 200, workers=1)
    Sf = s_f(f, [])
    for h in rep.hits:
        assert h.replay(f)
        if h.witness.ell >= 2:
            assert is_s_integer(h.alpha, Sf)


def test_pell_pairs():
    pairs = pell_pairs(10)
    assert pairs[:3] == [PellPair(3, 2), PellPair(17, 12), PellPair(99, 70)]
    assert all(p.check() for p in pairs)
    with pytest.raises(ValueError):
        pell_pairs(0)


def test_pell_u_family_with_g_x():
    f, rows = pell_family(10, g=X, variant="U")
    assert f == Poly.parse("2X^2(X^2-1)")
    for pair, hit in rows:
        assert f(pair.r) == (2 * pair.r * pair.s) ** 2
        assert hit.witness.a == 2 * pair.r * pair.s
        assert any(w.ell == 2 for w in power_representations(f(pair.r), []))


def test_pell_v_family():
    f, rows = pell_family(10, variant="V")
    assert f == Poly.parse("2X(X^2-1)")
    for pair, hit in rows:
        assert f(pair.r) / pair.r == (2 * pair.s) ** 2
        assert hit.replay(f)
    with pytest.raises(ValueError):
        pell_family(3, variant="W")


def test_bad_arguments():
    with pytest.raises(ValueError):
        search_v(F, [], 10, 0)
    with pytest.raises(ValueError):
        search_tilde_v(F, [], 10, 0, 1)
    with pytest.raises(ValueError):
        list(enumerate_rationals(0))
