from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csys.ccbuild import CCObject, build_cc, build_cc0, canonical_squares_report, extend_to_csystem, int_fully_faithful
from csys.csystem import check_c0_axioms, check_s_axioms
from csys.fincat import CommutativeSquare
from csys.generators import bg_category, boolean_lattice, lattice_universe_json
from csys.report import PreconditionError
from csys.universe import CanonicalSquare, TableUniverse, UniverseCategory, build_universe_category, enumerate_universe_structures, universe_from_json
from oracles import cyclic_tower_levels, finite_family_towers


def test_term_depth6(term_uc):
    cc = build_cc(term_uc, 6)
    assert cc.level_sizes() == [1] * 7
    obs = cc.objects()
    assert all(len(cc.hom(X, Y)) == 1 for X in obs for Y in obs)
    assert check_c0_axioms(cc).passed and check_s_axioms(cc).passed


@pytest.mark.parametrize("idx", range(4))
def test_bg_levels_all_structures(bg2, idx):
    s = enumerate_universe_structures(bg2, bg2.identity(0))[idx]
    cc = build_cc(build_universe_category(bg2, s, 0, pointed=True), 4)
    assert cc.level_sizes() == cyclic_tower_levels(2, 4) == [1, 2, 4, 8, 16]


def test_bg_axioms(cc_bg4):
    c0, s = check_c0_axioms(cc_bg4), check_s_axioms(cc_bg4)
    assert c0.passed and s.passed
    assert c0.skipped["pt final"] == len(cc_bg4.objects())


def test_bg3_levels():
    B = bg_category(3)
    s = enumerate_universe_structures(B, B.identity(0))[5]
    cc = build_cc(build_universe_category(B, s, 0, pointed=True), 3)
    assert cc.level_sizes() == cyclic_tower_levels(3, 3)


@pytest.mark.parametrize("depth", [2, 3])
def test_finsets_levels_and_homs(finsets, depth):
    cat, uc = finsets
    cc = build_cc(uc, depth)
    towers = finite_family_towers((0, 1), depth)
    assert cc.level_sizes() == [len(lvl) for lvl in towers]
    for n in range(depth + 1):
        mine = sorted(int(cat.obj_name(cc.int_obj(X))) for X in cc.objects_of_length(n))
        assert mine == sorted(len(S) for S in towers[n])
    for X in cc.objects():
        for Y in cc.objects():
            a, b = int(cat.obj_name(cc.int_obj(X))), int(cat.obj_name(cc.int_obj(Y)))
            assert len(cc.hom(X, Y)) == b**a
    assert check_c0_axioms(cc).passed and check_s_axioms(cc).passed


def test_int_fully_faithful(cc_bg3):
    assert int_fully_faithful(cc_bg3).passed


def test_truncation_boundary(cc_bg3):
    top = cc_bg3.objects_of_length(3)[0]
    below = cc_bg3.objects_of_length(2)[0]
    f = cc_bg3.hom(top, below)[0]
    X = cc_bg3.objects_of_length(3)[1]
    assert cc_bg3.ft(X) == below
    assert cc_bg3.q(f, X) is None
    g = cc_bg3.hom(top, X)[0]
    assert cc_bg3.s(g) is None
    low = cc_bg3.hom(below, X)[0]
    assert cc_bg3.s(low) is not None


def test_q_precondition(cc_bg3):
    X = cc_bg3.objects_of_length(2)[0]
    f = cc_bg3.identity(X)
    with pytest.raises(PreconditionError):
        cc_bg3.q(f, X)
    with pytest.raises(PreconditionError):
        cc_bg3.int_obj(CCObject(9, ()))


def test_c0_then_extension(bg2_uc):
    cc0 = build_cc0(bg2_uc, 3)
    assert not cc0.has_sections()
    assert check_c0_axioms(cc0).passed
    assert not check_s_axioms(cc0).passed
    cc = extend_to_csystem(cc0)
    assert check_s_axioms(cc).passed


def test_extension_rejects_non_pullback():
    B2 = boolean_lattice(2)
    uc = universe_from_json(B2, lattice_universe_json(B2))
    # towers start at top, so corrupt the square over id_top: bot commutes but is not the pullback
    F = B2.mor("id_top")
    squares = dict(uc.structure.squares)
    squares[F] = CanonicalSquare(F, B2.obj("bot"), B2.mor("bot<=top"), B2.mor("bot<=top"))
    bad = UniverseCategory(B2, TableUniverse(uc.p, squares), uc.pt, uc.final)
    assert B2.commutes(CommutativeSquare(B2.mor("bot<=top"), B2.mor("bot<=top"), uc.p, F))
    cc0 = build_cc0(bad, 2)
    assert not canonical_squares_report(cc0).passed
    with pytest.raises(PreconditionError, match="not pullback"):
        extend_to_csystem(cc0)


def test_lattice_cc(b2):
    uc = universe_from_json(b2, lattice_universe_json(b2))
    cc = build_cc(uc, 3)
    # Hom(X, top) has one element, so every level has one object
    assert cc.level_sizes() == [1, 1, 1, 1]
    assert check_c0_axioms(cc).passed and check_s_axioms(cc).passed


@given(st.integers(0, 26), st.integers(1, 2))
@settings(max_examples=15, deadline=None)
def test_bg3_random_structure_axioms(idx, depth):
    B = bg_category(3)
    s = enumerate_universe_structures(B, B.identity(0))[idx]
    cc = build_cc(build_universe_category(B, s, 0, pointed=True), depth)
    assert check_c0_axioms(cc).passed and check_s_axioms(cc).passed
