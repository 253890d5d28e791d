"""Recovering a truncated C-system as a tower system over presheaves on itself.

Over the full subcategory of objects of length at most N, the presheaf ``Ob1``
sends Γ to the objects one level above it and ``Ob1~`` sends Γ to the sections
of their projections; ``∂`` takes a section to its codomain. The presheaf
route builds an isomorphism ``cc -> CC(PreShv, ∂)``; the tower route replaces
presheaves by a finite category of iterated pullbacks of ``∂``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .ccbuild import CCSystem
from .csystem import (
    CSystemHom,
    TruncCSystem,
    UnderlyingCategory,
    check_homomorphism,
    check_iso_on_truncation,
    compose_homomorphisms,
    underlying_category,
)
from .fincat import FinalObjectCertificate, FinCategory, check_final_object
from .presheaf import (
    DEFAULT_BUDGET,
    FinPresheaf,
    PresheafCategory,
    PresheafMorphism,
    final_presheaf,
    presheaf_pullback,
    section_to_morphism,
    to_final,
    validate_presheaf,
    validate_presheaf_morphism,
    yoneda,
    yoneda_on_morphisms,
)
from .report import PreconditionError, Report
from .ucfunctor import (
    Classification,
    SectionData,
    UCFunctor,
    check_section_data,
    classify_hom,
    hom_from_section_data,
    hom_from_uc_functor,
    validate_uc_functor,
)
from .universe import (
    CanonicalSquare,
    NotPullbackError,
    StandardPresheafUniverse,
    TableUniverse,
    UniverseCategory,
    canonical_square,
    mediate,
    verify_universe_laws,
)

TRUNCATION_CAVEAT = (
    "isomorphism verified on the depth-N truncation only; coherence of the "
    "truncations into an isomorphism of the untruncated systems is assumed"
)


class HeadroomError(PreconditionError):
    def __init__(self, have: int, need: int, what: str):
        super().__init__(f"{what} needs a system of depth at least {need}, got depth {have}")
        self.have = have
        self.need = need


# -- Ob1, Ob1~ and the boundary --------------------------------------------------


def restrict_section(cc: TruncCSystem, f: Any, s: Any) -> Any:
    """Pullback of the section ``s`` along ``f``: the section ``s_{f then s}``."""
    return cc.s(cc.compose(f, s))


@dataclass
class Ob1Data:
    cc: TruncCSystem
    max_len: int
    base: UnderlyingCategory
    ob1: FinPresheaf
    ob1_tilde: FinPresheaf
    boundary: PresheafMorphism


def build_ob1_presheaves(cc: TruncCSystem, max_len: int, base: UnderlyingCategory | None = None) -> Ob1Data:
    if cc.depth < max_len + 1:
        raise HeadroomError(cc.depth, max_len + 1, f"Ob1 over objects of length <= {max_len}")
    if not cc.has_sections():
        raise PreconditionError("the system carries no section operation")
    base = base or underlying_category(cc, max_len)
    cat = base.category
    above = [[Y for Y in cc.objects_of_length(cc.length(X) + 1) if cc.ft(Y) == X] for X in base.objects]
    secs = [[s for Y in above[i] for s in cc.sections(X, Y)] for i, X in enumerate(base.objects)]
    ob1 = FinPresheaf.from_function(cat, above, lambda m, Y: cc.fstar(base.morphisms[m], Y), "Ob1")
    ob1t = FinPresheaf.from_function(cat, secs, lambda m, s: restrict_section(cc, base.morphisms[m], s), "Ob1~")
    boundary = PresheafMorphism.from_function(ob1t, ob1, lambda _x, s: cc.cod(s))
    return Ob1Data(cc, max_len, base, ob1, ob1t, boundary)


def ob1_report(data: Ob1Data) -> Report:
    rep = Report("Ob1 presheaves")
    for label, P in (("Ob1", data.ob1), ("Ob1~", data.ob1_tilde)):
        r = validate_presheaf(P)
        for v in r.violations:
            rep.fail(f"{label} {v.check}", v.instance, v.detail)
        rep.ok(f"{label} functoriality", sum(r.checked.values()) - len(r.violations))
    r = validate_presheaf_morphism(data.boundary)
    for v in r.violations:
        rep.fail("boundary naturality", v.instance, v.detail)
    rep.ok("boundary naturality", sum(r.checked.values()) - len(r.violations))
    return rep


def diagonal_section(cc: TruncCSystem, Delta: Any) -> Any:
    """The unique ``d: Δ -> p_Δ*(Δ)`` with ``d then p = id`` and ``d then q(p_Δ, Δ) = id``."""
    if cc.length(Delta) == 0:
        raise PreconditionError("the diagonal needs an object of positive length")
    r = cc.q(cc.p(Delta), Delta)
    if r is None:
        raise HeadroomError(cc.depth, cc.length(Delta) + 1, f"the diagonal of {cc.describe(Delta)}")
    target, q = r
    ident = cc.identity(Delta)
    pt = cc.p(target)
    found = [d for d in cc.hom(Delta, target) if cc.compose(d, pt) == ident and cc.compose(d, q) == ident]
    if len(found) != 1:
        raise NotPullbackError(f"diagonal square of {cc.describe(Delta)}", len(found))
    return found[0]


def diagonal_report(cc: TruncCSystem, max_len: int) -> Report:
    """For every Δ of length 1..max_len+1: shape of δ(Δ) and ``g*(δ(Δ)) = s_g``."""
    rep = Report("diagonal")
    if cc.depth < max_len + 2:
        raise HeadroomError(cc.depth, max_len + 2, "diagonal identities")
    sources = cc.objects(max_len)
    for Delta in cc.objects(max_len + 1):
        if cc.length(Delta) == 0:
            continue
        d = diagonal_section(cc, Delta)
        rep.expect(cc.cod(d) == cc.fstar(cc.p(Delta), Delta), "boundary of diagonal", cc.describe(Delta))
        for G in sources:
            for g in cc.hom(G, Delta):
                rep.expect(restrict_section(cc, g, d) == cc.s(g), "restricted diagonal = s_g", cc.describe_mor(g))
    return rep


def check_yoneda_square(cc: TruncCSystem, Gamma: Any, Delta: Any, max_len: int) -> tuple[bool, str]:
    """``g |-> (g then p_Δ, s_g)`` is a bijection onto the fiber product, over every Γ' of length <= max_len."""
    if cc.ft(Delta) != Gamma or cc.length(Delta) != cc.length(Gamma) + 1:
        raise PreconditionError("Δ must lie one level above Γ")
    pD = cc.p(Delta)
    for G1 in cc.objects(max_len):
        fiber = set()
        for h in cc.hom(G1, Gamma):
            hD = cc.fstar(h, Delta)
            for s in cc.sections(G1, hD):
                fiber.add((h, s))
        seen: dict[Any, Any] = {}
        for g in cc.hom(G1, Delta):
            img = (cc.compose(g, pD), cc.s(g))
            if img in seen:
                return False, f"not injective: {cc.describe_mor(seen[img])} and {cc.describe_mor(g)} have the same image"
            if img not in fiber:
                return False, f"{cc.describe_mor(g)} is sent outside the fiber product"
            seen[img] = g
        if len(seen) != len(fiber):
            h, s = next(iter(fiber - set(seen)))
            return False, f"not surjective: ({cc.describe_mor(h)}, {cc.describe_mor(s)}) is not hit"
    return True, ""


def yoneda_square_report(cc: TruncCSystem, max_len: int) -> Report:
    rep = Report("Yoneda pullback square")
    for Gamma in cc.objects(max_len):
        for Delta in cc.objects_of_length(cc.length(Gamma) + 1):
            if cc.ft(Delta) != Gamma:
                continue
            ok, why = check_yoneda_square(cc, Gamma, Delta, max_len)
            rep.expect(ok, "pullback", (cc.describe(Gamma), cc.describe(Delta)), why)
    return rep


# -- presheaf reconstruction -------------------------------------------------------


class PresheafModel:
    """Presheaves on the truncation of ``cc`` with the universe ``∂`` and the data v, ṽ, γ."""

    def __init__(self, cc: TruncCSystem, max_len: int, budget: int = DEFAULT_BUDGET):
        if cc.depth < max_len + 2:
            raise HeadroomError(cc.depth, max_len + 2, f"reconstruction at depth {max_len}")
        self.cc = cc
        self.max_len = max_len
        self.data = build_ob1_presheaves(cc, max_len)
        self.base = self.data.base
        self.cat = self.base.category
        self.presheaves = PresheafCategory(self.cat, budget)
        structure = StandardPresheafUniverse(self.data.boundary)
        if cc.pt_final:
            pt = final_presheaf(self.cat)
            self.uc = UniverseCategory(self.presheaves, structure, pt, to_final, "PreShv")
            self.psi_pt = None
        else:
            pt = yoneda(self.cat, self.base.obj(cc.pt))
            self.uc = UniverseCategory(self.presheaves, structure, pt, None, "PreShv")
            self.psi_pt = self.presheaves.identity(pt)
        self._yo: dict[Any, FinPresheaf] = {}
        self._gamma: dict[Any, PresheafMorphism] = {}

    # Yoneda data
    def yo(self, X: Any) -> FinPresheaf:
        P = self._yo.get(X)
        if P is None:
            P = yoneda(self.cat, self.base.obj(X))
            self._yo[X] = P
        return P

    def yo_mor(self, f: Any) -> PresheafMorphism:
        return yoneda_on_morphisms(self.cat, self.base.mor(f))

    def v(self, Delta: Any) -> PresheafMorphism:
        return section_to_morphism(self.data.ob1, self.base.obj(self.cc.ft(Delta)), Delta)

    def v_tilde(self, s: Any) -> PresheafMorphism:
        return section_to_morphism(self.data.ob1_tilde, self.base.obj(self.cc.dom(s)), s)

    def gamma(self, Delta: Any) -> PresheafMorphism:
        """Mediator from the standard pullback ``(Yo Γ; v Δ)`` to ``Yo Δ``."""
        g = self._gamma.get(Delta)
        if g is None:
            cc = self.cc
            sq = canonical_square(self.uc, self.v(Delta))
            left = self.yo_mor(cc.p(Delta))
            top = self.v_tilde(diagonal_section(cc, Delta))
            g = mediate(self.presheaves, sq.total, self.yo(Delta), left, top, sq.proj, sq.top, f"Yoneda square of {cc.describe(Delta)}")
            self._gamma[Delta] = g
        return g

    def section_data(self) -> SectionData:
        return SectionData(self.cc, self.uc, self.yo, self.yo_mor, self.v, self.gamma, self.psi_pt)

    def naturality_report(self) -> Report:
        """``v(f*Δ) = Yo(f) then v(Δ)`` and ``ṽ(f*s) = Yo(f) then ṽ(s)`` for all base f."""
        rep = Report("v naturality")
        cc = self.cc
        for i, f in enumerate(self.base.morphisms):
            G = cc.cod(f)
            Yf = yoneda_on_morphisms(self.cat, i)
            for Delta in self.data.ob1.values[self.base.obj(G)]:
                rep.expect(self.v(cc.fstar(f, Delta)) == Yf.then(self.v(Delta)), "v natural", (cc.describe_mor(f), cc.describe(Delta)))
            for s in self.data.ob1_tilde.values[self.base.obj(G)]:
                rep.expect(self.v_tilde(restrict_section(cc, f, s)) == Yf.then(self.v_tilde(s)), "v~ natural", (cc.describe_mor(f), cc.describe_mor(s)))
        return rep

    def gamma_report(self) -> Report:
        rep = Report("gamma")
        cc = self.cc
        P = self.presheaves
        for Delta in cc.objects(self.max_len):
            if cc.length(Delta) == 0:
                continue
            inst = cc.describe(Delta)
            try:
                g = self.gamma(Delta)
            except NotPullbackError as e:
                rep.fail("gamma mediator", inst, str(e))
                continue
            rep.expect(P.is_iso(g), "gamma iso", inst)
            sq = canonical_square(self.uc, self.v(Delta))
            top = self.v_tilde(diagonal_section(cc, Delta))
            rep.expect(g.then(top) == sq.top, "gamma then v~(diagonal) = Q(v)", inst)
            rep.expect(g.then(self.yo_mor(cc.p(Delta))) == sq.proj, "gamma then Yo(p) = projection", inst)
        return rep

    def yoneda_hypotheses(self) -> dict[str, bool]:
        """Yo fully faithful on the base and each ``v_Γ`` bijective, by counting."""
        cat, P = self.cat, self.presheaves
        faithful = full = True
        for X in self.base.objects:
            for Y in self.base.objects:
                x, y = self.base.obj(X), self.base.obj(Y)
                homs = P.hom(self.yo(X), self.yo(Y))
                images = [yoneda_on_morphisms(cat, f) for f in cat.hom(x, y)]
                if len(set(images)) != len(images):
                    faithful = False
                if set(images) != set(homs):
                    full = False
        injective = bijective = True
        for X in self.base.objects:
            vs = [self.v(D) for D in self.data.ob1.values[self.base.obj(X)]]
            homs = P.hom(self.yo(X), self.data.ob1)
            if len(set(vs)) != len(vs):
                injective = False
            if set(vs) != set(homs):
                bijective = False
        return {"faithful": faithful, "fully faithful": full, "u injective": injective, "u bijective": bijective and injective}


@dataclass
class ReconstructionResult:
    hom: CSystemHom
    target: CCSystem
    reports: dict[str, Report]
    classification: Classification
    model: Any = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports.values()) and self.classification.kind == "isomorphism" and self.classification.consistent


def reconstruct_via_presheaves(cc: TruncCSystem, max_len: int, budget: int = DEFAULT_BUDGET) -> ReconstructionResult:
    model = PresheafModel(cc, max_len, budget)
    reports = {
        "ob1": ob1_report(model.data),
        "v naturality": model.naturality_report(),
        "diagonal": diagonal_report(cc, max_len),
        "yoneda square": yoneda_square_report(cc, max_len),
        "gamma": model.gamma_report(),
    }
    S = model.section_data()
    reports["section data"] = check_section_data(S, max_len)
    target = CCSystem(model.uc, max_len, name="CC(PreShv)")
    h, _ = hom_from_section_data(S, max_len, target, verify=False)
    reports["homomorphism"] = check_homomorphism(h)
    reports["homomorphism"].note(TRUNCATION_CAVEAT)
    cls = classify_hom(h, model.yoneda_hypotheses())
    return ReconstructionResult(h, target, reports, cls, model)


# -- tower reconstruction -------------------------------------------------------------


@dataclass(frozen=True)
class TowerEntry:
    name: str
    level: int
    parent: int | None
    choice: PresheafMorphism | None


class TowerEmbedding:
    """The functor from the tower category to presheaves (objects to their images, morphisms to themselves)."""

    def __init__(self, tower: TowerCategory):
        self.tower = tower

    def obj(self, x: int) -> FinPresheaf:
        return self.tower.images[x]

    def mor(self, f: int) -> PresheafMorphism:
        return self.tower.arrows[f]

    def faithful(self) -> bool:
        return self.fully_faithful()

    def fully_faithful(self) -> bool:
        t = self.tower
        P = t.presheaves
        for x in t.category.objects:
            for y in t.category.objects:
                mine = [t.arrows[f] for f in t.category.hom(x, y)]
                if len(set(mine)) != len(mine) or set(mine) != set(P.hom(t.images[x], t.images[y])):
                    return False
        return True


class TowerCategory:
    """Objects: ``pt, U, Ũ`` then iterated pullbacks of ``∂`` along every map into ``Ob1``."""

    def __init__(self, model: PresheafModel, depth: int):
        self.model = model
        self.depth = depth
        P = model.presheaves
        self.presheaves = P
        data = model.data
        entries = [TowerEntry("pt", 0, None, None), TowerEntry("U", 0, None, None), TowerEntry("U~", 0, None, None)]
        images = [model.uc.pt, data.ob1, data.ob1_tilde]
        squares: dict[tuple[int, PresheafMorphism], tuple[int, PresheafMorphism, PresheafMorphism]] = {}
        self.level_objects = [[0, 1, 2]]
        for n in range(depth):
            nxt = []
            for x in self.level_objects[n]:
                for k, F in enumerate(P.hom(images[x], data.ob1)):
                    apex, pr1, pr2 = presheaf_pullback(F, data.boundary)
                    idx = len(entries)
                    entries.append(TowerEntry(f"({entries[x].name};{k})", n + 1, x, F))
                    images.append(apex)
                    squares[(x, F)] = (idx, pr1, pr2)
                    nxt.append(idx)
            self.level_objects.append(nxt)
        self.entries = entries
        self.images = images
        arrows: list[PresheafMorphism] = []
        rows = []
        index: dict[tuple[int, int, PresheafMorphism], int] = {}
        n_obj = len(entries)
        for x in range(n_obj):
            for y in range(n_obj):
                for k, m in enumerate(P.hom(images[x], images[y])):
                    index[(x, y, m)] = len(arrows)
                    arrows.append(m)
                    rows.append((f"{entries[x].name}->{entries[y].name}#{k}", x, y))
        out_of: dict[int, list[int]] = {}
        for i, (_, d, _) in enumerate(rows):
            out_of.setdefault(d, []).append(i)
        table = {}
        for i, (_, d, c) in enumerate(rows):
            for j in out_of.get(c, []):
                table[(i, j)] = index[(d, rows[j][2], arrows[i].then(arrows[j]))]
        ids = [index[(x, x, P.identity(images[x]))] for x in range(n_obj)]
        self.arrows = arrows
        self.index = index
        self.category = FinCategory([e.name for e in entries], rows, ids, table)
        p = index[(2, 1, data.boundary)]
        table_sq = {}
        for (x, F), (t, pr1, pr2) in squares.items():
            f_idx = index[(x, 1, F)]
            table_sq[f_idx] = CanonicalSquare(f_idx, t, index[(t, x, pr1)], index[(t, 2, pr2)])
        self.structure = TableUniverse(p, table_sq, complete=False)
        cert = check_final_object(self.category, 0)
        final = cert if isinstance(cert, FinalObjectCertificate) else None
        self.uc = UniverseCategory(self.category, self.structure, 0, final, "towers")

    def level_sizes(self) -> list[int]:
        return [len(lvl) for lvl in self.level_objects]

    def embedding(self) -> UCFunctor:
        P = self.presheaves
        data = self.model.data
        psi = None if not self.model.uc.is_pointed else P.identity(self.model.uc.pt)
        return UCFunctor(self.uc, self.model.uc, TowerEmbedding(self), P.identity(data.ob1), P.identity(data.ob1_tilde), psi)


def reconstruct_via_towers(cc: TruncCSystem, max_len: int, budget: int = DEFAULT_BUDGET) -> ReconstructionResult:
    pre = reconstruct_via_presheaves(cc, max_len, budget)
    model = pre.model
    tower = TowerCategory(model, max_len)
    reports = dict(pre.reports)
    laws = verify_universe_laws(tower.uc)
    laws.note("canonical squares exist only below the top level; instances above it are skipped")
    reports["tower universe"] = laws
    F = tower.embedding()
    reports["tower functor"] = validate_uc_functor(F)
    tower_cc = CCSystem(tower.uc, max_len, name="CC(towers)")
    h_tower, _ = hom_from_uc_functor(F, max_len, tower_cc, pre.target)
    reports["tower homomorphism"] = check_homomorphism(h_tower)
    iso = check_iso_on_truncation(h_tower)
    if not iso.holds:
        raise PreconditionError(f"tower comparison is not an isomorphism: {iso.detail}")
    composite = compose_homomorphisms(pre.hom, iso.inverse)
    composite.label = "cc -> CC(towers)"
    reports["composite homomorphism"] = check_homomorphism(composite)
    cls = classify_hom(composite, {"fully faithful": pre.classification.predicted == "isomorphism", "u bijective": True, "faithful": True})
    result = ReconstructionResult(composite, tower_cc, reports, cls, tower)
    result.extra["tower level sizes"] = tower.level_sizes()
    result.extra["presheaf classification"] = pre.classification.to_dict()
    return result
