from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csys.fincat import CommutativeSquare
from csys.generators import bg_category, boolean_lattice
from csys.precat import build_slice_universe
from csys.presheaf import (
    BudgetExceeded,
    FinPresheaf,
    PresheafCategory,
    PresheafError,
    PresheafMorphism,
    enumerate_presheaf_morphisms,
    evaluate_at_identity,
    final_presheaf,
    is_set_pullback,
    presheaf_from_json,
    presheaf_pullback,
    section_to_morphism,
    to_final,
    validate_presheaf,
    validate_presheaf_morphism,
    yoneda,
    yoneda_on_morphisms,
)
from oracles import natural_transformations

BG2 = bg_category(2)
B1 = boolean_lattice(1)


def brute_hom_count(P: FinPresheaf, Q: FinPresheaf) -> int:
    base = P.base
    morphisms = [(base.dom(m), base.cod(m)) for m in base.morphism_ids]
    return natural_transformations(list(base.objects), morphisms, P.values, P.restrictions, Q.values, Q.restrictions)


@st.composite
def involution_sets(draw, max_size=4):
    """A presheaf on BG(Z/2): a finite set with an involution."""
    n = draw(st.integers(0, max_size))
    perm = list(range(n))
    free = list(range(n))
    while len(free) >= 2 and draw(st.booleans()):
        a = free.pop(draw(st.integers(0, len(free) - 1)))
        b = free.pop(draw(st.integers(0, len(free) - 1)))
        perm[a], perm[b] = b, a
    g = BG2.mor("g")
    return FinPresheaf.from_function(BG2, [list(range(n))], lambda m, y: perm[y] if m == g else y, "S")


def small_presheaves(base):
    su = build_slice_universe(base)
    out = [final_presheaf(base), su.U, su.U_tilde]
    out += [yoneda(base, x) for x in base.objects]
    return out


@pytest.mark.parametrize("base", [BG2, B1], ids=["BG2", "B1"])
def test_standard_presheaves_valid(base):
    for P in small_presheaves(base):
        assert validate_presheaf(P).passed
    for f in base.morphism_ids:
        assert validate_presheaf_morphism(yoneda_on_morphisms(base, f)).passed


@pytest.mark.parametrize("base", [BG2, B1], ids=["BG2", "B1"])
def test_enumeration_matches_brute_force(base):
    obs = small_presheaves(base)
    for P, Q in itertools.product(obs, repeat=2):
        homs = enumerate_presheaf_morphisms(P, Q)
        assert len(homs) == len(set(homs)) == brute_hom_count(P, Q)
        for m in homs:
            assert validate_presheaf_morphism(m).passed


@given(involution_sets(), involution_sets())
@settings(max_examples=80, deadline=None)
def test_gsets_enumeration(P, Q):
    homs = enumerate_presheaf_morphisms(P, Q)
    assert len(homs) == brute_hom_count(P, Q)


@given(involution_sets(max_size=3), involution_sets(max_size=3), involution_sets(max_size=3))
@settings(max_examples=30, deadline=None)
def test_pullback_of_gsets(P, Q, R):
    cat = PresheafCategory(BG2)
    for f in cat.hom(P, R)[:3]:
        for g in cat.hom(Q, R)[:3]:
            apex, pr1, pr2 = presheaf_pullback(f, g)
            assert validate_presheaf(apex).passed
            sq = CommutativeSquare(pr2, pr1, g, f)
            assert cat.commutes(sq)
            assert is_set_pullback(sq)[0]
            # every commuting cone factors uniquely
            for W in (final_presheaf(BG2), P, Q):
                for a in cat.hom(W, P)[:4]:
                    for b in cat.hom(W, Q)[:4]:
                        if a.then(f) == b.then(g):
                            assert len(cat.mediators(W, apex, pr1, pr2, a, b)) == 1


@pytest.mark.parametrize("base", [BG2, B1, boolean_lattice(2)], ids=["BG2", "B1", "B2"])
def test_yoneda_bijection(base):
    cat = PresheafCategory(base)
    for P in small_presheaves(base)[:3]:
        for x in base.objects:
            homs = cat.hom(yoneda(base, x), P)
            assert len(homs) == len(P.values[x])
            for e in P.values[x]:
                assert evaluate_at_identity(section_to_morphism(P, x, e), x) == e


def test_yoneda_fully_faithful_on_b2():
    B2 = boolean_lattice(2)
    cat = PresheafCategory(B2)
    for x, y in itertools.product(B2.objects, repeat=2):
        imgs = {yoneda_on_morphisms(B2, f) for f in B2.hom(x, y)}
        assert imgs == set(cat.hom(yoneda(B2, x), yoneda(B2, y)))


def test_final_presheaf():
    cat = PresheafCategory(B1)
    one = final_presheaf(B1)
    assert cat.is_final(one)
    for P in small_presheaves(B1):
        assert cat.hom(P, one) == (to_final(P),)


def test_inverse_and_iso():
    cat = PresheafCategory(BG2)
    Y = yoneda(BG2, 0)
    g = yoneda_on_morphisms(BG2, BG2.mor("g"))
    inv = cat.inverse(g)
    assert inv is not None and g.then(inv) == cat.identity(Y)
    assert not cat.is_iso(to_final(Y))


def test_budget_exceeded():
    su = build_slice_universe(boolean_lattice(2))
    with pytest.raises(BudgetExceeded) as err:
        enumerate_presheaf_morphisms(su.U, su.U, budget=5)
    assert err.value.budget == 5


def test_invalid_restriction_rejected():
    with pytest.raises(PresheafError):
        FinPresheaf.from_function(BG2, [[0, 1]], lambda m, y: 7, "bad")


def test_non_natural_family_detected():
    P = yoneda(BG2, 0)
    one = final_presheaf(BG2)
    # a "morphism" one -> Yo(pt) picking e: not natural, since g acts freely on Yo(pt)
    m = PresheafMorphism(one, P, [(0,)])
    assert not validate_presheaf_morphism(m).passed


def test_presheaf_json():
    data = {"values": {"pt": ["a", "b"]}, "restrictions": {"g": {"a": "b", "b": "a"}}}
    P = presheaf_from_json(BG2, data, "swap")
    assert validate_presheaf(P).passed
    assert P.restrict(BG2.mor("g"), "a") == "b"
    with pytest.raises(PresheafError, match="restrictions"):
        presheaf_from_json(BG2, {"values": {"pt": ["a"]}, "restrictions": {}})
    with pytest.raises(PresheafError, match="values"):
        presheaf_from_json(BG2, {"values": {}})
