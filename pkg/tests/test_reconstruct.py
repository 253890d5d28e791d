from __future__ import annotations

import pytest

from csys.ccbuild import build_cc
from csys.csystem import check_homomorphism, check_iso_on_truncation, compose_homomorphisms, is_identity_on_truncation, materialize, s_condition_follows
from csys.fincat import validate_category
from csys.presheaf import BudgetExceeded
from csys.reconstruct import (
    TRUNCATION_CAVEAT,
    HeadroomError,
    PresheafModel,
    TowerCategory,
    build_ob1_presheaves,
    check_yoneda_square,
    diagonal_report,
    diagonal_section,
    ob1_report,
    reconstruct_via_presheaves,
    reconstruct_via_towers,
    yoneda_square_report,
)
from csys.universe import NotPullbackError, verify_universe_laws
from oracles import finite_family_sections, natural_transformations

PRESHEAF_REPORTS = ("ob1", "v naturality", "diagonal", "yoneda square", "gamma", "section data", "homomorphism")


def raw_hom_count(P, Q) -> int:
    base = P.base
    morphisms = [(base.dom(m), base.cod(m)) for m in base.morphism_ids]
    return natural_transformations(list(base.objects), morphisms, P.values, P.restrictions, Q.values, Q.restrictions)


@pytest.fixture(scope="module")
def bg_table(bg2_uc):
    return materialize(build_cc(bg2_uc, 3))


def test_ob1_on_term(cc_term4):
    data = build_ob1_presheaves(cc_term4, 2)
    assert ob1_report(data).passed
    assert all(len(v) == 1 for v in data.ob1.values)
    assert all(len(v) == 1 for v in data.ob1_tilde.values)


def test_ob1_on_bg(cc_bg3):
    data = build_ob1_presheaves(cc_bg3, 2)
    assert ob1_report(data).passed
    # two objects above each context; every projection is invertible, so one section each
    assert all(len(v) == 2 for v in data.ob1.values)
    assert all(len(v) == 2 for v in data.ob1_tilde.values)


def test_ob1_on_finsets(finsets):
    cat, uc = finsets
    cc = build_cc(uc, 3)
    data = build_ob1_presheaves(cc, 2)
    assert ob1_report(data).passed
    for i, X in enumerate(data.base.objects):
        n = int(cat.obj_name(cc.int_obj(X)))
        assert len(data.ob1.values[i]) == 2**n
        assert len(data.ob1_tilde.values[i]) == finite_family_sections((0, 1), [n])


def test_headroom(term_uc):
    cc = build_cc(term_uc, 2)
    with pytest.raises(HeadroomError, match="at least 3"):
        build_ob1_presheaves(cc, 2)
    with pytest.raises(HeadroomError, match="at least 3"):
        PresheafModel(cc, 1)
    with pytest.raises(HeadroomError):
        reconstruct_via_presheaves(cc, 1)


@pytest.mark.parametrize("name", ["cc_term4", "cc_bg4"])
def test_diagonal_and_yoneda_square(request, name):
    cc = request.getfixturevalue(name)
    assert diagonal_report(cc, 2).passed
    rep = yoneda_square_report(cc, 2)
    assert rep.passed and rep.checked["pullback"] == len(cc.objects(3)) - 1


def test_yoneda_square_detects_corrupted_sections(bg_table):
    t = bg_table
    D = t.objects_of_length(1)[0]
    G = t.ft(D)
    assert check_yoneda_square(t, G, D, 1) == (True, "")
    f = t.hom(G, D)[0]
    g = t._s[f]
    other = next(h for h in t.hom(t.dom(g), t.cod(g)) if h != g)
    ok, why = check_yoneda_square(t.corrupted(s={f: other}), G, D, 1)
    # p is invertible in BG, so the damage shows up as an image outside the fiber
    assert not ok and "outside the fiber" in why


def test_diagonal_needs_pullback(bg_table):
    t = bg_table
    D = t.objects_of_length(1)[0]
    target, q = t.q(t.p(D), D)
    other = next(h for h in t.hom(target, D) if h != q)
    with pytest.raises(NotPullbackError):
        diagonal_section(t.corrupted(q={(t.p(D), D): (target, other)}), D)
    d = diagonal_section(t, D)
    assert t.compose(d, t.p(target)) == t.identity(D)


@pytest.mark.parametrize("name", ["term_uc", "bg2_uc"])
@pytest.mark.parametrize("n", [1, 2])
def test_presheaf_reconstruction(request, name, n):
    uc = request.getfixturevalue(name)
    res = reconstruct_via_presheaves(build_cc(uc, n + 2), n)
    for key in PRESHEAF_REPORTS:
        assert res.reports[key].passed, key
    assert TRUNCATION_CAVEAT in res.reports["homomorphism"].notes
    assert res.classification.kind == "isomorphism"
    assert res.classification.predicted == "isomorphism" and res.classification.consistent
    assert res.passed
    assert s_condition_follows(res.hom)


def test_presheaf_reconstruction_on_finsets(finsets):
    res = reconstruct_via_presheaves(build_cc(finsets[1], 3), 1)
    assert res.passed


def test_reconstruction_inverse(cc_bg3):
    res = reconstruct_via_presheaves(cc_bg3, 1)
    iso = check_iso_on_truncation(res.hom)
    assert iso.holds
    assert is_identity_on_truncation(compose_homomorphisms(res.hom, iso.inverse))
    assert check_homomorphism(iso.inverse).passed


def test_budget_is_enforced(finsets):
    cc = build_cc(finsets[1], 3)
    with pytest.raises(BudgetExceeded) as err:
        reconstruct_via_towers(cc, 1, budget=4)
    assert err.value.budget == 4
    assert reconstruct_via_towers(cc, 1, budget=8).passed


def tower_level_one_oracle(model) -> int:
    data = model.data
    return sum(raw_hom_count(P, data.ob1) for P in (model.uc.pt, data.ob1, data.ob1_tilde))


@pytest.mark.parametrize("name,n,expected", [("cc_term4", 2, [3, 3, 3]), ("cc_bg3", 1, [3, 6])])
def test_tower_levels_match_enumeration(request, name, n, expected):
    cc = request.getfixturevalue(name)
    model = PresheafModel(cc, n)
    tower = TowerCategory(model, n)
    assert tower.level_sizes() == expected
    assert tower.level_sizes()[1] == tower_level_one_oracle(model)
    assert validate_category(tower.category).passed
    assert tower.embedding().functor.fully_faithful()


@pytest.mark.parametrize("n", [1, 2])
def test_tower_reconstruction_term(cc_term4, n):
    res = reconstruct_via_towers(cc_term4, n)
    assert res.passed
    for key in ("tower universe", "tower functor", "tower homomorphism", "composite homomorphism"):
        assert res.reports[key].passed, key
    assert res.extra["tower level sizes"] == [3] * (n + 1)
    assert res.reports["tower universe"].checked["relative square pullback"] > 0


def test_tower_levels_bg_depth2(cc_bg4):
    tower = TowerCategory(PresheafModel(cc_bg4, 2), 2)
    assert tower.level_sizes() == [3, 6, 12]


def test_tower_reconstruction_bg(cc_bg3):
    res = reconstruct_via_towers(cc_bg3, 1)
    assert res.passed
    assert res.extra["tower level sizes"] == [3, 6]
    assert verify_universe_laws(res.model.uc).passed
