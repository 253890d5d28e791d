from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csys.fincat import CategoryError, check_final_object
from csys.generators import bg_category, boolean_lattice, indiscrete_category, poset_category, terminal_category
from csys.precat import (
    FiberProductStructure,
    NoFiberProduct,
    PrecatModel,
    auto_fiber_products,
    build_equivalence,
    build_slice_universe,
    check_square_correspondence,
    embedding_report,
    fiber_products_from_json,
    final_certificate,
    projection_report,
    slice_universe_report,
    validate_fiber_products,
)
from csys.presheaf import section_to_morphism
from csys.report import PreconditionError
from oracles import cospan_counts, lift_counts


def raw_morphisms(C):
    return [(C.name(f), C.obj_name(C.dom(f)), C.obj_name(C.cod(f))) for f in C.morphism_ids]


@pytest.mark.parametrize("C", [terminal_category(), boolean_lattice(2), bg_category(2), indiscrete_category(2)], ids=["TERM", "B2", "BG2", "I2"])
def test_slice_universe_sizes(C):
    su = build_slice_universe(C)
    assert slice_universe_report(su).passed
    names = list(C.object_names)
    cos, lifts = cospan_counts(names, raw_morphisms(C)), lift_counts(names, raw_morphisms(C))
    for x in C.objects:
        assert len(su.U.values[x]) == cos[C.obj_name(x)]
        assert len(su.U_tilde.values[x]) == lifts[C.obj_name(x)]


def test_slice_universe_known_sizes():
    su = build_slice_universe(boolean_lattice(2))
    assert [len(v) for v in su.U.values] == [9, 6, 6, 4]
    assert [len(v) for v in su.U_tilde.values] == [9, 3, 3, 1]
    su = build_slice_universe(bg_category(2))
    assert len(su.U.values[0]) == len(su.U_tilde.values[0]) == 4
    su = build_slice_universe(terminal_category())
    assert len(su.U.values[0]) == len(su.U_tilde.values[0]) == 1


@pytest.mark.parametrize(
    "C,checks,pullbacks",
    [(terminal_category(), 2, 1), (boolean_lattice(2), 325, 25), (bg_category(2), 40, 8)],
    ids=["TERM", "B2", "BG2"],
)
def test_square_correspondence(C, checks, pullbacks):
    rep = check_square_correspondence(C)
    assert rep.passed
    names = list(C.object_names)
    cos, lifts = cospan_counts(names, raw_morphisms(C)), lift_counts(names, raw_morphisms(C))
    tuples = sum(cos[c] * lifts[d] for _, d, c in raw_morphisms(C))
    assert rep.checked["commutes iff"] == tuples
    assert rep.checked["commutes iff"] + rep.checked["pullback iff"] == checks
    assert f"{pullbacks} pullback instances" in rep.notes


@st.composite
def small_posets(draw):
    n = draw(st.integers(1, 4))
    rel = {(a, b) for a in range(n) for b in range(a + 1, n) if draw(st.booleans())}
    closure = set(rel)
    for _ in range(n):
        closure |= {(a, d) for (a, b), (c, d) in itertools.product(closure, repeat=2) if b == c}
    return poset_category([f"v{i}" for i in range(n)], lambda a, b: a == b or (int(a[1:]), int(b[1:])) in closure)


@given(small_posets())
@settings(max_examples=25, deadline=None)
def test_square_correspondence_on_random_posets(C):
    assert check_square_correspondence(C).passed


def b2_model(depth=1):
    C = boolean_lattice(2)
    return PrecatModel(C, final_certificate(C), auto_fiber_products(C), depth)


def test_embedding_on_b2():
    m = b2_model()
    rep = embedding_report(m)
    assert rep.passed and rep.checked["split mono"] == 4
    # J* is injective on objects
    assert len({m.embed_object(x).obj for x in m.C.objects}) == 4


def test_projection_of_length_one_object_is_meet():
    m = b2_model()
    C = m.C
    top = C.obj("top")
    for z in C.object_names:
        F = m._from_final.then(section_to_morphism(m.su.U, top, (C.identity(top), C.mor(f"{z}<=top" if z != "top" else "id_top"))))
        X = m.cc.pt.extend(F)
        assert C.obj_name(m.project_object(X).obj) == z


def test_unit_is_iso_on_b2():
    m = b2_model()
    for x in m.C.objects:
        u = m.unit(x)
        assert m.C.is_iso(u) and m.C.cod(u) == x
        assert m.project_object(m.embed_object(x).obj).obj == m.C.dom(u)


def test_two_final_objects_give_different_embeddings():
    C = indiscrete_category(2)
    fp = auto_fiber_products(C)
    m0 = PrecatModel(C, check_final_object(C, 0), fp, 1)
    m1 = PrecatModel(C, check_final_object(C, 1), fp, 1)
    assert embedding_report(m0).passed and embedding_report(m1).passed
    assert m0.embed_object(0).obj != m1.embed_object(0).obj


def test_final_certificate_errors():
    with pytest.raises(PreconditionError, match="no final object"):
        final_certificate(bg_category(2))
    with pytest.raises(PreconditionError, match="not final"):
        final_certificate(boolean_lattice(2), "bot")


def test_fiber_products():
    C = boolean_lattice(2)
    fp = auto_fiber_products(C)
    assert validate_fiber_products(fp).passed
    # meets: {0} and {1} over top meet at bot
    w, _, _ = fp(C.mor("{0}<=top"), C.mor("{1}<=top"))
    assert C.obj_name(w) == "bot"
    again = fiber_products_from_json(C, json.loads(json.dumps(fp.to_json())))
    assert again.choices == fp.choices
    with pytest.raises(NoFiberProduct):
        FiberProductStructure(C, {})(C.mor("id_top"), C.mor("id_top"))


def test_missing_pullback():
    # two maximal-below elements with no common lower bound
    V = poset_category(["a", "b", "t"], lambda x, y: x == y or y == "t")
    with pytest.raises(NoFiberProduct, match="no pullback"):
        auto_fiber_products(V)


def test_fiber_products_from_json_errors():
    C = boolean_lattice(2)
    with pytest.raises(CategoryError, match=r"fiber_products\[0\]"):
        fiber_products_from_json(C, {"fiber_products": [{"f": "nope", "g": "id_top", "apex": "top", "pr1": "id_top", "pr2": "id_top"}]})
    partial = fiber_products_from_json(C, {"fiber_products": []})
    assert validate_fiber_products(partial).failures("chosen")


def test_wrong_fiber_product_is_reported():
    C = boolean_lattice(2)
    fp = auto_fiber_products(C)
    choices = dict(fp.choices)
    # bot commutes over (id_top, id_top) but the pullback is top
    choices[(C.mor("id_top"), C.mor("id_top"))] = (C.obj("bot"), C.mor("bot<=top"), C.mor("bot<=top"))
    bad = FiberProductStructure(C, choices)
    rep = validate_fiber_products(bad)
    assert len(rep.failures("pullback")) == 1
    res = build_equivalence(C, final_certificate(C), bad, 1)
    assert not res.passed and set(res.reports) == {"fiber products"}


@pytest.mark.parametrize("depth,levels", [(1, [1, 4]), (2, [1, 4, 25])])
def test_equivalence_on_b2(depth, levels):
    C = boolean_lattice(2)
    res = build_equivalence(C, final_certificate(C), auto_fiber_products(C), depth)
    assert res.passed, {k: r.violations[:2] for k, r in res.reports.items()}
    assert res.model.cc.level_sizes() == levels
    nat = res.reports["natural isomorphisms"]
    assert nat.checked["unit natural"] == len(C.morphisms)
    assert nat.checked["counit natural"] > 0 and not nat.failures()
    assert projection_report(res.model).passed


def test_equivalence_on_term_is_not_an_isomorphism():
    C = terminal_category()
    res = build_equivalence(C, final_certificate(C), auto_fiber_products(C), 2)
    assert res.passed
    # three objects up to length 2 against the single object of TERM
    assert len(res.model.cc.objects()) == 3 and len(C.objects) == 1
    assert len({res.model.project_object(X).obj for X in res.model.cc.objects()}) == 1


def test_projection_needs_fiber_products():
    C = boolean_lattice(2)
    m = PrecatModel(C, final_certificate(C), None, 1)
    X = m.embed_object(C.obj("bot")).obj
    with pytest.raises(PreconditionError, match="fiber products"):
        m.project_object(X)
