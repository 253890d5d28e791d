from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csys.fincat import (
    CategoryError,
    CommutativeSquare,
    FinalObjectCertificate,
    FinCategory,
    FunctorData,
    NotFinal,
    category_from_json,
    category_to_json,
    check_final_object,
    check_pullback_square,
    find_final_object,
    functor_from_names,
    identity_functor,
    is_faithful,
    is_fully_faithful,
    validate_category,
    validate_functor,
)
from csys.generators import (
    bg_category,
    boolean_lattice,
    cyclic_table,
    finsets_skeleton,
    indiscrete_category,
    poset_category,
    terminal_category,
)
from csys.report import PreconditionError


@st.composite
def random_posets(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    rel = {(a, b) for a in range(n) for b in range(a + 1, n) if draw(st.booleans())}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    names = [f"v{i}" for i in range(n)]
    return names, rel


def leq_from(names, rel):
    pos = {x: i for i, x in enumerate(names)}
    return lambda a, b: a == b or (pos[a], pos[b]) in rel


def test_terminal_category():
    T = terminal_category()
    assert len(T.object_names) == 1 and len(T.morphisms) == 1
    assert validate_category(T).passed


def test_boolean_lattice_counts():
    B2 = boolean_lattice(2)
    assert len(B2.object_names) == 4
    assert len(B2.morphisms) == 9
    assert validate_category(B2).passed


def test_bg_counts():
    B = bg_category(2)
    assert len(B.object_names) == 1 and len(B.morphisms) == 2
    assert B.name(B.identity(0)) == "e"


def test_bg_rejects_non_group():
    with pytest.raises(CategoryError):
        bg_category(table=[[0, 1], [1, 1]])


def test_bg_from_table_moves_neutral_first():
    # neutral element is index 1 in this table
    table = [[1, 0], [0, 1]]
    B = bg_category(table=table, names=["a", "n"])
    assert B.name(B.identity(0)) == "n"
    assert validate_category(B).passed


def test_finsets_hom_counts():
    F = finsets_skeleton(2)
    for a in range(3):
        for b in range(3):
            assert len(F.hom(a, b)) == b**a


@given(random_posets())
@settings(max_examples=60, deadline=None)
def test_posets_are_categories(data):
    names, rel = data
    C = poset_category(names, leq_from(names, rel))
    assert validate_category(C).passed
    assert len(C.morphisms) == len(names) + len(rel)
    again = category_from_json(category_to_json(C))
    assert category_to_json(again) == category_to_json(C)


@given(st.integers(1, 6))
@settings(max_examples=6, deadline=None)
def test_cyclic_groups_are_categories(n):
    B = bg_category(table=cyclic_table(n))
    assert validate_category(B).passed
    assert all(B.is_iso(f) for f in B.morphism_ids)


def test_associativity_violation_detected():
    B = bg_category(3)
    table = dict(B.composition_table())
    g = B.mor("g")
    # g then g becomes e
    table[(g, g)] = B.identity(0)
    rep = validate_category(FinCategory(B.object_names, B.morphisms, B.identities, table))
    assert rep.failures("associativity")


def test_identity_violation_detected():
    B = bg_category(2)
    table = dict(B.composition_table())
    e, g = B.identity(0), B.mor("g")
    table[(e, g)] = e
    rep = validate_category(FinCategory(B.object_names, B.morphisms, B.identities, table))
    assert rep.failures("left identity")


def test_missing_composite_detected():
    B = bg_category(2)
    table = dict(B.composition_table())
    del table[(B.mor("g"), B.mor("g"))]
    rep = validate_category(FinCategory(B.object_names, B.morphisms, B.identities, table))
    assert rep.failures("totality")
    with pytest.raises(CategoryError):
        FinCategory(B.object_names, B.morphisms, B.identities, table).compose(1, 1)


class TestJsonErrors:
    def base(self):
        return category_to_json(bg_category(2))

    def test_duplicate_object(self):
        d = self.base()
        d["objects"] = ["pt", "pt"]
        with pytest.raises(CategoryError, match=r"objects\[1\]"):
            category_from_json(d)

    def test_dangling_dom(self):
        d = self.base()
        d["morphisms"][1]["dom"] = "nowhere"
        with pytest.raises(CategoryError, match=r"morphisms\[1\].*dangling dom"):
            category_from_json(d)

    def test_duplicate_morphism(self):
        d = self.base()
        d["morphisms"][1]["name"] = "e"
        with pytest.raises(CategoryError, match=r"morphisms\[1\]"):
            category_from_json(d)

    def test_dangling_compose(self):
        d = self.base()
        d["compose"][2] = ["g", "h", "e"]
        with pytest.raises(CategoryError, match=r"compose\[2\]"):
            category_from_json(d)

    def test_wrong_order(self):
        d = self.base()
        d["order"] = "applicative"
        with pytest.raises(CategoryError, match="order"):
            category_from_json(d)

    def test_missing_identity(self):
        d = self.base()
        d["identities"] = {}
        with pytest.raises(CategoryError, match="identities"):
            category_from_json(d)

    def test_non_composable_entry(self):
        C = boolean_lattice(1)
        d = category_to_json(C)
        d["compose"].append(["bot<=top", "bot<=top", "bot<=top"])
        with pytest.raises(CategoryError, match="composable"):
            category_from_json(d)


def test_final_objects():
    B2 = boolean_lattice(2)
    cert = check_final_object(B2, B2.obj("top"))
    assert isinstance(cert, FinalObjectCertificate)
    assert cert.projection(B2.obj("bot")) == B2.mor("bot<=top")
    nf = check_final_object(B2, B2.obj("bot"))
    assert isinstance(nf, NotFinal) and nf.hom_size == 0
    assert find_final_object(bg_category(2)) is None
    assert find_final_object(indiscrete_category(2)).object == 0


def subset_of(name: str) -> frozenset:
    if name == "bot":
        return frozenset()
    if name == "top":
        return frozenset(range(3))
    return frozenset(int(c) for c in name.strip("{}").split(","))


def test_lattice_pullbacks_are_meets():
    B3 = boolean_lattice(3)
    subsets = {n: subset_of(n) for n in B3.object_names}
    le = {(a, b): f for f in B3.morphism_ids for a, b in [(B3.dom(f), B3.cod(f))]}
    for a, b, c in itertools.product(B3.objects, repeat=3):
        if (a, c) not in le or (b, c) not in le:
            continue
        for w in B3.objects:
            if (w, a) not in le or (w, b) not in le:
                continue
            sq = CommutativeSquare(le[(w, b)], le[(w, a)], le[(b, c)], le[(a, c)])
            holds = check_pullback_square(B3, sq).holds
            expected = subsets[B3.obj_name(w)] == subsets[B3.obj_name(a)] & subsets[B3.obj_name(b)]
            assert holds == expected


def test_pullback_requires_commuting_square():
    B = bg_category(2)
    e, g = B.identity(0), B.mor("g")
    with pytest.raises(PreconditionError):
        check_pullback_square(B, CommutativeSquare(e, e, e, g))


def test_group_squares_are_pullbacks():
    B = bg_category(3)
    for a, b, c in itertools.product(B.morphism_ids, repeat=3):
        d = B.compose_all(B.inverse(b), a, c)
        sq = CommutativeSquare(a, b, c, d)
        assert B.commutes(sq)
        res = check_pullback_square(B, sq)
        # one cone per choice of first leg
        assert res.holds and len(res.certificate) == 3


def test_functors():
    T, B = terminal_category(), bg_category(2)
    inc = FunctorData(T, B, (0,), (0,))
    assert validate_functor(inc).passed
    assert is_faithful(inc) and not is_fully_faithful(inc)
    collapse = FunctorData(B, T, (0,), (0, 0))
    assert validate_functor(collapse).passed and not is_faithful(collapse)
    assert is_fully_faithful(identity_functor(B))
    bad = FunctorData(B, B, (0,), (1, 1))
    assert validate_functor(bad).failures("identity")
    swap = functor_from_names(B, B, {"pt": "pt"}, {"e": "e", "g": "g"})
    assert swap == identity_functor(B)
    with pytest.raises(CategoryError):
        functor_from_names(B, B, {"pt": "pt"}, {"e": "e"})
