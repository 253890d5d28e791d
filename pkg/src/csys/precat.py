"""The universe ``p_C: Ũ_C -> U_C`` in presheaves on a finite category C.

``U_C(X)`` holds cospans ``(f: X -> Y, g: Z -> Y)`` and ``Ũ_C(X)`` holds composable
pairs ``(f': X -> Z, g: Z -> Y)``; ``p_C`` composes the first pair. When C has a
final object and chosen fiber products, the functors ``J*: C -> CC(C)`` and
``J_*: CC(C) -> C`` form an equivalence, checked here on a truncation.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from .ccbuild import CCMorphism, CCObject, CCSystem
from .fincat import (
    CategoryError,
    CommutativeSquare,
    FinalObjectCertificate,
    FinCategory,
    check_final_object,
    check_pullback_square,
)
from .presheaf import (
    DEFAULT_BUDGET,
    FinPresheaf,
    PresheafCategory,
    PresheafMorphism,
    evaluate_at_identity,
    final_presheaf,
    section_to_morphism,
    to_final,
    validate_presheaf,
    validate_presheaf_morphism,
    yoneda,
    yoneda_on_morphisms,
)
from .report import PreconditionError, Report
from .universe import StandardPresheafUniverse, UniverseCategory, pair, q_relative

# -- the slice universe ----------------------------------------------------------


@dataclass
class SliceUniverse:
    category: FinCategory
    U: FinPresheaf
    U_tilde: FinPresheaf
    p: PresheafMorphism


def _out(C: FinCategory, x: int) -> list[int]:
    return [f for f in C.morphism_ids if C.dom(f) == x]


def _into(C: FinCategory, y: int) -> list[int]:
    return [g for g in C.morphism_ids if C.cod(g) == y]


def build_slice_universe(C: FinCategory) -> SliceUniverse:
    cospans = [[(f, g) for f in _out(C, x) for g in _into(C, C.cod(f))] for x in C.objects]
    lifts = [[(f1, g) for f1 in _out(C, x) for g in _out(C, C.cod(f1))] for x in C.objects]
    U = FinPresheaf.from_function(C, cospans, lambda a, e: (C.compose(a, e[0]), e[1]), "U_C")
    Ut = FinPresheaf.from_function(C, lifts, lambda a, e: (C.compose(a, e[0]), e[1]), "U~_C")
    p = PresheafMorphism.from_function(Ut, U, lambda _x, e: (C.compose(e[0], e[1]), e[1]))
    return SliceUniverse(C, U, Ut, p)


def slice_universe_report(su: SliceUniverse) -> Report:
    rep = Report("slice universe")
    for label, r in (("U_C", validate_presheaf(su.U)), ("U~_C", validate_presheaf(su.U_tilde)), ("p_C", validate_presheaf_morphism(su.p))):
        for v in r.violations:
            rep.fail(f"{label} {v.check}", v.instance, v.detail)
        rep.ok(f"{label} laws", sum(r.checked.values()) - len(r.violations))
    return rep


def slice_universe_category(su: SliceUniverse, budget: int = DEFAULT_BUDGET) -> UniverseCategory:
    """``(PreShv(C), p_C)`` with the final presheaf as base object."""
    P = PresheafCategory(su.category, budget)
    return UniverseCategory(P, StandardPresheafUniverse(su.p), final_presheaf(su.category), to_final, "PreShv(C)")


def check_square_correspondence(C: FinCategory, su: SliceUniverse | None = None) -> Report:
    """For every ``u: X' -> X``, cospan over X and lift over X', compare the presheaf square with the C-square.

    Both "commutes" and "is a pullback" are decided on each side by its own
    procedure: pointwise sets on the presheaf side, cone enumeration in C.
    """
    su = su or build_slice_universe(C)
    P = PresheafCategory(C)
    rep = Report("square correspondence")
    pullbacks = 0
    for u in C.morphism_ids:
        x1, x = C.dom(u), C.cod(u)
        Yu = yoneda_on_morphisms(C, u)
        for fg in su.U.values[x]:
            v = section_to_morphism(su.U, x, fg)
            for fg1 in su.U_tilde.values[x1]:
                vt = section_to_morphism(su.U_tilde, x1, fg1)
                (f, g), (f1, g1) = fg, fg1
                inst = (C.name(u), C.name(f), C.name(g), C.name(f1), C.name(g1))
                psq = CommutativeSquare(vt, Yu, su.p, v)
                csq = CommutativeSquare(f1, u, g, f)
                p_comm = P.commutes(psq)
                c_comm = g1 == g and C.commutes(csq)
                if not rep.expect(p_comm == c_comm, "commutes iff", inst):
                    continue
                if not p_comm:
                    continue
                p_pb = P.is_pullback(psq).holds
                c_pb = check_pullback_square(C, csq).holds
                rep.expect(p_pb == c_pb, "pullback iff", inst)
                pullbacks += p_pb
    rep.note(f"{pullbacks} pullback instances")
    return rep


# -- fiber products --------------------------------------------------------------


class NoFiberProduct(CategoryError):
    pass


@dataclass
class FiberProductStructure:
    """A chosen pullback ``(apex, pr1, pr2)`` for every cospan ``(f: X -> Z, g: Y -> Z)``."""

    category: FinCategory
    choices: dict[tuple[int, int], tuple[int, int, int]]

    def __call__(self, f: int, g: int) -> tuple[int, int, int]:
        try:
            return self.choices[(f, g)]
        except KeyError:
            raise NoFiberProduct(f"no fiber product chosen for ({self.category.name(f)}, {self.category.name(g)})") from None

    def diagonal(self, f: int, g: int) -> int:
        """The common composite ``pr1 then f = pr2 then g`` from the apex to Z."""
        _, pr1, _ = self(f, g)
        return self.category.compose(pr1, f)

    def apexes(self) -> dict[str, str]:
        C = self.category
        return {f"{C.name(f)},{C.name(g)}": C.obj_name(w) for (f, g), (w, _, _) in sorted(self.choices.items())}

    def to_json(self) -> dict[str, Any]:
        C = self.category
        return {
            "fiber_products": [
                {"f": C.name(f), "g": C.name(g), "apex": C.obj_name(w), "pr1": C.name(a), "pr2": C.name(b)}
                for (f, g), (w, a, b) in sorted(self.choices.items())
            ]
        }


def cospans(C: FinCategory) -> list[tuple[int, int]]:
    return [(f, g) for f in C.morphism_ids for g in C.morphism_ids if C.cod(f) == C.cod(g)]


def auto_fiber_products(C: FinCategory) -> FiberProductStructure:
    """First pullback in (apex, pr1, pr2) order for every cospan."""
    choices = {}
    for f, g in cospans(C):
        found = None
        for w, a, b in C.cones(f, g):
            if check_pullback_square(C, CommutativeSquare(b, a, g, f)).holds:
                found = (w, a, b)
                break
        if found is None:
            raise NoFiberProduct(f"cospan ({C.name(f)}, {C.name(g)}) has no pullback")
        choices[(f, g)] = found
    return FiberProductStructure(C, choices)


def fiber_products_from_json(C: FinCategory, data: Mapping[str, Any]) -> FiberProductStructure:
    choices = {}
    for i, entry in enumerate(data.get("fiber_products", [])):
        try:
            f, g = C.mor(entry["f"]), C.mor(entry["g"])
            choices[(f, g)] = (C.obj(entry["apex"]), C.mor(entry["pr1"]), C.mor(entry["pr2"]))
        except KeyError as e:
            raise CategoryError(f"fiber_products[{i}]: unknown or missing name {e}") from None
    return FiberProductStructure(C, choices)


def validate_fiber_products(fp: FiberProductStructure) -> Report:
    C = fp.category
    rep = Report("fiber products")
    for f, g in cospans(C):
        inst = (C.name(f), C.name(g))
        if not rep.expect((f, g) in fp.choices, "chosen", inst):
            continue
        w, a, b = fp(f, g)
        shape = C.dom(a) == w == C.dom(b) and C.cod(a) == C.dom(f) and C.cod(b) == C.dom(g)
        if not rep.expect(shape, "shape", inst):
            continue
        sq = CommutativeSquare(b, a, g, f)
        if not rep.expect(C.commutes(sq), "commutes", inst):
            continue
        rep.expect(check_pullback_square(C, sq).holds, "pullback", inst)
        rep.expect(fp.diagonal(f, g) == C.compose(b, g), "diagonal", inst)
    return rep


# -- J* and J_* --------------------------------------------------------------------


@dataclass
class Embedding:
    obj: CCObject
    j: PresheafMorphism  # Yo(X) -> int(J*(X))


@dataclass
class Projection:
    obj: int
    sigma: PresheafMorphism  # Yo(J_*(Γ)) -> int(Γ)


class PrecatModel:
    """CC(C) realized as CC(PreShv(C), p_C) at ``depth``, with a final object and optional fiber products."""

    def __init__(
        self,
        C: FinCategory,
        final: FinalObjectCertificate,
        fp: FiberProductStructure | None,
        depth: int,
        budget: int = DEFAULT_BUDGET,
    ):
        self.C = C
        self.final = final
        self.fp = fp
        self.su = build_slice_universe(C)
        self.uc = slice_universe_category(self.su, budget)
        self.P = self.uc.ambient
        self.cc = CCSystem(self.uc, depth, name="CC(C)")
        pt = final.object
        self._from_final = self.P.inverse(to_final(yoneda(C, pt)))
        self._emb: dict[int, Embedding] = {}
        self._proj: dict[CCObject, Projection] = {}

    def pi(self, x: int) -> int:
        return self.final.projection(x)

    # J* on objects
    def embed_object(self, x: int) -> Embedding:
        e = self._emb.get(x)
        if e is None:
            C, su = self.C, self.su
            pt = self.final.object
            F = self._from_final.then(section_to_morphism(su.U, pt, (C.identity(pt), self.pi(x))))
            obj = self.cc.pt.extend(F)
            vt = section_to_morphism(su.U_tilde, x, (C.identity(x), self.pi(x)))
            j = pair(self.uc, F, to_final(yoneda(C, x)), vt)
            e = Embedding(obj, j)
            self._emb[x] = e
        return e

    def retract(self, X: CCObject) -> int:
        """``(f, g) |-> dom(g)`` applied to the value of the last tower entry at the final object."""
        if X.length != 1:
            raise PreconditionError("the retraction is defined on objects of length 1")
        pt = self.final.object
        f, g = X.last.apply(pt, X.last.source.values[pt][0])
        return self.C.dom(g)

    def embed_morphism(self, f: int) -> CCMorphism:
        C, P = self.C, self.P
        ex, ey = self.embed_object(C.dom(f)), self.embed_object(C.cod(f))
        arrow = P.compose_all(P.inverse(ex.j), yoneda_on_morphisms(C, f), ey.j)
        return CCMorphism(ex.obj, ey.obj, arrow)

    # J_* on objects
    def project_object(self, X: CCObject) -> Projection:
        pr = self._proj.get(X)
        if pr is not None:
            return pr
        C = self.C
        if X.length == 0:
            pt = self.final.object
            pr = Projection(pt, to_final(yoneda(C, pt)))
        else:
            if self.fp is None:
                raise PreconditionError("projecting objects of positive length needs fiber products")
            base = self.project_object(X.prefix())
            F = X.last
            sF = base.sigma.then(F)
            f, g = evaluate_at_identity(sF, base.obj)
            w, pr1, pr2 = self.fp(f, g)
            iota = pair(self.uc, sF, yoneda_on_morphisms(C, pr1), section_to_morphism(self.su.U_tilde, w, (pr2, g)))
            pr = Projection(w, iota.then(q_relative(self.uc, base.sigma, F)))
        self._proj[X] = pr
        return pr

    def project_morphism(self, a: CCMorphism) -> int:
        P = self.P
        sx, sy = self.project_object(a.source), self.project_object(a.target)
        m = P.compose_all(sx.sigma, a.arrow, P.inverse(sy.sigma))
        return evaluate_at_identity(m, sx.obj)

    def unit(self, x: int) -> int:
        """``J_*(J*(X)) -> X``."""
        pt = self.final.object
        _, _, pr2 = self.fp(self.C.identity(pt), self.pi(x))
        return pr2

    def counit(self, X: CCObject) -> CCMorphism:
        """``Γ -> J*(J_*(Γ))``."""
        P = self.P
        pr = self.project_object(X)
        e = self.embed_object(pr.obj)
        return CCMorphism(X, e.obj, P.inverse(pr.sigma).then(e.j))


def final_certificate(C: FinCategory, name: str | None = None) -> FinalObjectCertificate:
    if name is not None:
        cert = check_final_object(C, C.obj(name))
        if not isinstance(cert, FinalObjectCertificate):
            raise PreconditionError(f"{name!r} is not final")
        return cert
    for x in C.objects:
        cert = check_final_object(C, x)
        if isinstance(cert, FinalObjectCertificate):
            return cert
    raise PreconditionError("the category has no final object")


def embedding_report(m: PrecatModel) -> Report:
    rep = Report("embedding")
    C, P = m.C, m.P
    for x in C.objects:
        e = m.embed_object(x)
        rep.expect(P.is_iso(e.j), "j iso", C.obj_name(x))
        rep.expect(m.retract(e.obj) == x, "split mono", C.obj_name(x))
    return rep


def projection_report(m: PrecatModel) -> Report:
    rep = Report("projection")
    for X in m.cc.objects():
        rep.expect(m.P.is_iso(m.project_object(X).sigma), "sigma iso", m.cc.describe(X))
    return rep


def _functor_checks(rep: Report, label: str, objs, hom_src, hom_tgt, on_obj, on_mor, ident_src, ident_tgt, comp_src, comp_tgt, describe) -> None:
    for x in objs:
        rep.expect(on_mor(ident_src(x)) == ident_tgt(on_obj(x)), f"{label} identity", describe(x))
    for x in objs:
        for y in objs:
            src = hom_src(x, y)
            imgs = [on_mor(f) for f in src]
            rep.expect(len(set(imgs)) == len(imgs), f"{label} faithful", (describe(x), describe(y)))
            rep.expect(set(imgs) == set(hom_tgt(on_obj(x), on_obj(y))), f"{label} full", (describe(x), describe(y)))
            for z in objs:
                for f in src:
                    for g in hom_src(y, z):
                        rep.expect(on_mor(comp_src(f, g)) == comp_tgt(on_mor(f), on_mor(g)), f"{label} composition", (describe(x), describe(y), describe(z)))


@dataclass
class EquivalenceResult:
    model: PrecatModel
    reports: dict[str, Report] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports.values())


def build_equivalence(C: FinCategory, final: FinalObjectCertificate, fp: FiberProductStructure, depth: int, budget: int = DEFAULT_BUDGET) -> EquivalenceResult:
    m = PrecatModel(C, final, fp, depth, budget)
    res = EquivalenceResult(m)
    res.reports["fiber products"] = validate_fiber_products(fp)
    if not res.reports["fiber products"].passed:
        return res
    res.reports["embedding"] = embedding_report(m)
    res.reports["projection"] = projection_report(m)
    cc = m.cc
    rep = Report("functors")
    _functor_checks(
        rep, "J*", list(C.objects), C.hom, cc.hom,
        lambda x: m.embed_object(x).obj, m.embed_morphism,
        C.identity, cc.identity, C.compose, cc.compose, C.obj_name,
    )
    _functor_checks(
        rep, "J_*", cc.objects(), cc.hom, C.hom,
        lambda X: m.project_object(X).obj, m.project_morphism,
        cc.identity, C.identity, cc.compose, C.compose, cc.describe,
    )
    res.reports["functors"] = rep
    nat = Report("natural isomorphisms")
    for x in C.objects:
        ux = m.unit(x)
        nat.expect(C.is_iso(ux), "unit iso", C.obj_name(x))
        nat.expect(C.dom(ux) == m.project_object(m.embed_object(x).obj).obj, "unit source", C.obj_name(x))
    for f in C.morphism_ids:
        x, y = C.dom(f), C.cod(f)
        lhs = C.compose(m.project_morphism(m.embed_morphism(f)), m.unit(y))
        nat.expect(lhs == C.compose(m.unit(x), f), "unit natural", C.name(f))
    obs = cc.objects()
    for X in obs:
        nat.expect(m.P.is_iso(m.counit(X).arrow), "counit iso", cc.describe(X))
    for X in obs:
        for Y in obs:
            for a in cc.hom(X, Y):
                lhs = cc.compose(a, m.counit(Y))
                rhs = cc.compose(m.counit(X), m.embed_morphism(m.project_morphism(a)))
                nat.expect(lhs == rhs, "counit natural", cc.describe_mor(a))
    nat.note("chosen fiber products: " + ", ".join(f"{k}->{v}" for k, v in fp.apexes().items()))
    res.reports["natural isomorphisms"] = nat
    return res
