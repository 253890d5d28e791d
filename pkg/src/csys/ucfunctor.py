"""Functors of universe categories and the C-system homomorphisms they induce.

Two ways to produce a homomorphism out of a tower C-system are provided:

* from a universe-category functor ``(Φ, φ, φ̃)`` by translating towers level by
  level (:func:`hom_from_uc_functor`);
* from section data ``(I, u, γ)`` on an arbitrary truncated C-system
  (:func:`hom_from_section_data`).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from .ccbuild import CCMorphism, CCObject, CCSystem
from .csystem import (
    CSystemHom,
    TruncCSystem,
    check_injective_on_truncation,
    check_iso_on_truncation,
)
from .fincat import (
    CommutativeSquare,
    FinalObjectCertificate,
    FinCategory,
    FunctorData,
    check_final_object,
    identity_functor,
    is_faithful,
    is_fully_faithful,
    validate_functor,
)
from .report import CheckError, PreconditionError, Report
from .universe import NotPullbackError, UniverseCategory, canonical_square, mediate, q_relative


class TranslationError(CheckError):
    pass


@dataclass
class UCFunctor:
    """``Φ`` between ambients with ``φ: Φ(U) -> U'`` and ``φ̃: Φ(Ũ) -> Ũ'``.

    ``functor`` needs ``obj`` and ``mor``. ``psi`` is the comparison
    ``pt' -> Φ(pt)``; it is forced (and may be omitted) when the target base
    object is final.
    """

    source: UniverseCategory
    target: UniverseCategory
    functor: Any
    phi: Any
    phi_tilde: Any
    psi: Any = None

    def base_comparison(self) -> Any:
        if self.psi is not None:
            return self.psi
        tgt = self.target
        if tgt.is_pointed:
            raise PreconditionError("target base object is not final: an explicit comparison map is required")
        return tgt.to_pt(self.functor.obj(self.source.pt))


def _functor_report(F: UCFunctor) -> Report:
    Phi = F.functor
    if isinstance(Phi, FunctorData):
        return validate_functor(Phi)
    src = F.source.ambient
    tgt = F.target.ambient
    rep = Report("functor laws")
    if not isinstance(src, FinCategory):
        rep.note("functor laws not checked: source ambient is not finite")
        return rep
    for f in src.morphism_ids:
        Pf = Phi.mor(f)
        ok = tgt.dom(Pf) == Phi.obj(src.dom(f)) and tgt.cod(Pf) == Phi.obj(src.cod(f))
        rep.expect(ok, "dom/cod", src.name(f))
    for x in src.objects:
        rep.expect(Phi.mor(src.identity(x)) == tgt.identity(Phi.obj(x)), "identity", src.obj_name(x))
    for f in src.morphism_ids:
        for g in src.morphism_ids:
            if src.cod(f) == src.dom(g):
                rep.expect(Phi.mor(src.compose(f, g)) == tgt.compose(Phi.mor(f), Phi.mor(g)), "composition", (src.name(f), src.name(g)))
    return rep


def validate_uc_functor(F: UCFunctor) -> Report:
    """Functoriality, then the three conditions on squares, the base object and the universe."""
    rep = Report("universe-category functor")
    rep.merge(_functor_report(F))
    src, tgt = F.source, F.target
    A, B = src.ambient, tgt.ambient
    Phi = F.functor
    if not rep.passed:
        return rep
    ok_ends = (
        B.dom(F.phi) == Phi.obj(src.U)
        and B.cod(F.phi) == tgt.U
        and B.dom(F.phi_tilde) == Phi.obj(src.U_tilde)
        and B.cod(F.phi_tilde) == tgt.U_tilde
    )
    if not rep.expect(ok_ends, "phi endpoints", "phi, phi_tilde"):
        return rep

    # condition 1: canonical squares go to pullbacks
    if isinstance(A, FinCategory):
        for x in A.objects:
            for G in A.hom(x, src.U):
                if not src.structure.has_square(G):
                    rep.skip("1 squares preserved")
                    continue
                sq = canonical_square(src, G)
                img = CommutativeSquare(Phi.mor(sq.top), Phi.mor(sq.proj), Phi.mor(src.p), Phi.mor(G))
                inst = A.name(G)
                if rep.expect(B.commutes(img), "1 squares preserved", inst, "image does not commute"):
                    rep.expect(B.is_pullback(img).holds, "1 squares preserved", inst, "image is not a pullback")
    else:
        rep.note("condition 1 not checked: source ambient is not finite")

    # condition 2: the base object
    if tgt.is_pointed or src.is_pointed:
        if F.psi is None and tgt.is_pointed:
            rep.fail("2 base object", "psi", "pointed target needs an explicit comparison map")
        else:
            psi = F.base_comparison()
            ok = B.dom(psi) == tgt.pt and B.cod(psi) == Phi.obj(src.pt) and B.is_iso(psi)
            rep.expect(ok, "2 base object", "psi", "comparison map is not an isomorphism")
            rep.note("base objects are pointed: condition 2 checked as invertibility of the comparison map")
    else:
        Ppt = Phi.obj(src.pt)
        if isinstance(B, FinCategory):
            rep.expect(isinstance(check_final_object(B, Ppt), FinalObjectCertificate), "2 base object", "Phi(pt)", "not final")
        else:
            rep.expect(B.is_final(Ppt), "2 base object", "Phi(pt)", "not final")
        if F.psi is not None:
            rep.expect(F.psi == F.base_comparison() or B.is_iso(F.psi), "2 base object", "psi")

    # condition 3: the universe square
    sq3 = CommutativeSquare(F.phi_tilde, Phi.mor(src.p), tgt.p, F.phi)
    if rep.expect(B.commutes(sq3), "3 universe square", "phi", "does not commute"):
        rep.expect(B.is_pullback(sq3).holds, "3 universe square", "phi", "not a pullback")
    return rep


@dataclass
class TranslationData:
    """Tower translation ``H`` on objects and the comparison isomorphisms ``ψ``."""

    on_objects: dict[CCObject, CCObject] = field(default_factory=dict)
    psi: dict[CCObject, Any] = field(default_factory=dict)
    psi_inverse: dict[CCObject, Any] = field(default_factory=dict)


def build_translation(F: UCFunctor, source_cc: CCSystem, target_cc: CCSystem, depth: int) -> TranslationData:
    src, tgt = F.source, F.target
    B = tgt.ambient
    Phi = F.functor
    if depth > source_cc.depth or depth > target_cc.depth:
        raise PreconditionError("translation depth exceeds a depth bound")
    data = TranslationData()
    root, root_t = source_cc.pt, target_cc.pt
    psi0 = F.base_comparison()
    data.on_objects[root] = root_t
    data.psi[root] = psi0
    inv = B.inverse(psi0)
    if inv is None:
        raise TranslationError("base comparison map is not invertible")
    data.psi_inverse[root] = inv
    after_phi = lambda G: B.compose(Phi.mor(G), F.phi)
    for n in range(depth):
        for X in source_cc.objects_of_length(n + 1):
            A, G = X.prefix(), X.last
            HA = data.on_objects[A]
            psiA = data.psi[A]
            G2 = B.compose(psiA, after_phi(G))
            HX = HA.extend(G2)
            tsq = canonical_square(tgt, G2)
            ssq = canonical_square(src, G)
            # mediator into Φ of the canonical square of G, pasted with the universe square
            a = B.compose(tsq.proj, psiA)
            b = tsq.top
            left = Phi.mor(ssq.proj)
            top = B.compose(Phi.mor(ssq.top), F.phi_tilde)
            where = f"level {n + 1}, tower {source_cc.describe(X)}"
            try:
                psiX = mediate(B, tsq.total, Phi.obj(ssq.total), left, top, a, b, where)
            except NotPullbackError as e:
                raise TranslationError(str(e)) from None
            inv = B.inverse(psiX)
            if inv is None:
                raise TranslationError(f"comparison map at {where} is not an isomorphism")
            data.on_objects[X] = HX
            data.psi[X] = psiX
            data.psi_inverse[X] = inv
    return data


def hom_from_uc_functor(
    F: UCFunctor,
    depth: int,
    source_cc: CCSystem | None = None,
    target_cc: CCSystem | None = None,
) -> tuple[CSystemHom, TranslationData]:
    source_cc = source_cc or CCSystem(F.source, depth)
    target_cc = target_cc or CCSystem(F.target, depth)
    data = build_translation(F, source_cc, target_cc, depth)
    B = F.target.ambient
    Phi = F.functor

    def on_mor(f: CCMorphism) -> CCMorphism:
        arrow = B.compose_all(data.psi[f.source], Phi.mor(f.arrow), data.psi_inverse[f.target])
        return CCMorphism(data.on_objects[f.source], data.on_objects[f.target], arrow)

    h = CSystemHom.from_functions(source_cc, target_cc, depth, lambda X: data.on_objects[X], on_mor, "H(Phi)")
    return h, data


# -- section data ------------------------------------------------------------------


@dataclass
class SectionData:
    """``I`` on the underlying category of ``cc``, ``u`` on positive-length objects, ``γ`` per object.

    ``I_obj``/``I_mor`` map objects and morphisms of ``cc`` into the target ambient;
    ``u(Δ)`` is a morphism ``I(ft Δ) -> U'``; ``gamma(Δ)`` goes from the total
    object of the canonical square of ``u(Δ)`` to ``I(Δ)``. ``psi_pt`` is the
    comparison ``pt' -> I(pt)``; it defaults to the inverse of the projection
    ``I(pt) -> pt'`` when the target base object is final.
    """

    cc: TruncCSystem
    target: UniverseCategory
    I_obj: Callable[[Any], Any]
    I_mor: Callable[[Any], Any]
    u: Callable[[Any], Any]
    gamma: Callable[[Any], Any]
    psi_pt: Any = None

    def base_comparison(self) -> Any:
        B = self.target.ambient
        if self.psi_pt is not None:
            return self.psi_pt
        if self.target.is_pointed:
            raise PreconditionError("pointed target: an explicit comparison map pt' -> I(pt) is required")
        inv = B.inverse(self.target.to_pt(self.I_obj(self.cc.pt)))
        if inv is None:
            raise PreconditionError("the projection I(pt) -> pt' is not an isomorphism")
        return inv


def check_section_data(S: SectionData, depth: int) -> Report:
    """The four conditions, plus invertibility of every γ, on objects of length at most ``depth``."""
    cc, tgt = S.cc, S.target
    B = tgt.ambient
    rep = Report("section data")
    D, M = cc.describe, cc.describe_mor
    # condition 1
    if tgt.is_pointed:
        psi = S.psi_pt
        ok = psi is not None and B.dom(psi) == tgt.pt and B.cod(psi) == S.I_obj(cc.pt) and B.is_iso(psi)
        rep.expect(ok, "1 base object", "pt", "comparison map missing or not invertible")
        rep.note("target base object is pointed: condition 1 checked on the supplied comparison map")
    else:
        rep.expect(B.is_iso(tgt.to_pt(S.I_obj(cc.pt))), "1 base object", "pt", "projection from I(pt) not invertible")
    obs = cc.objects(depth)
    for X in obs:
        if cc.length(X) == 0:
            continue
        G = cc.ft(X)
        uX = S.u(X)
        if not rep.expect(B.dom(uX) == S.I_obj(G) and B.cod(uX) == tgt.U, "u shape", D(X)):
            continue
        sq = canonical_square(tgt, uX)
        gX = S.gamma(X)
        ok = B.dom(gX) == sq.total and B.cod(gX) == S.I_obj(X) and B.is_iso(gX)
        if not rep.expect(ok, "gamma iso", D(X), "gamma is not an isomorphism of the right shape"):
            continue
        # condition 3
        rep.expect(sq.proj == B.compose(gX, S.I_mor(cc.p(X))), "3 projection", D(X))
        for Y in obs:
            for f in cc.hom(Y, G):
                r = cc.q(f, X)
                if r is None or cc.length(r[0]) > depth:
                    rep.skip("2 u natural")
                    rep.skip("4 gamma compatible")
                    continue
                fX, qf = r
                If = S.I_mor(f)
                inst = (M(f), D(X))
                rep.expect(S.u(fX) == B.compose(If, uX), "2 u natural", inst)
                lhs = B.compose(S.gamma(fX), S.I_mor(qf))
                rhs = B.compose(q_relative(tgt, If, uX), gX)
                rep.expect(lhs == rhs, "4 gamma compatible", inst)
    return rep


def hom_from_section_data(S: SectionData, depth: int, target_cc: CCSystem | None = None, verify: bool = True) -> tuple[CSystemHom, TranslationData]:
    if verify:
        rep = check_section_data(S, depth)
        if not rep.passed:
            v = rep.violations[0]
            raise PreconditionError(f"section data condition {v.check} fails at {v.instance}")
    cc, tgt = S.cc, S.target
    B = tgt.ambient
    target_cc = target_cc or CCSystem(tgt, depth)
    data = TranslationData()
    psi0 = S.base_comparison()
    data.on_objects[cc.pt] = target_cc.pt
    data.psi[cc.pt] = psi0
    data.psi_inverse[cc.pt] = B.inverse(psi0)
    for n in range(1, depth + 1):
        for X in cc.objects_of_length(n):
            G = cc.ft(X)
            uX = S.u(X)
            HX = data.on_objects[G].extend(B.compose(data.psi[G], uX))
            psiX = B.compose(q_relative(tgt, data.psi[G], uX), S.gamma(X))
            inv = B.inverse(psiX)
            if inv is None:
                raise TranslationError(f"comparison map at {cc.describe(X)} is not an isomorphism")
            data.on_objects[X] = HX
            data.psi[X] = psiX
            data.psi_inverse[X] = inv

    def on_mor(f: Any) -> CCMorphism:
        X, Y = cc.dom(f), cc.cod(f)
        arrow = B.compose_all(data.psi[X], S.I_mor(f), data.psi_inverse[Y])
        return CCMorphism(data.on_objects[X], data.on_objects[Y], arrow)

    h = CSystemHom.from_functions(cc, target_cc, depth, lambda X: data.on_objects[X], on_mor, "H(I,u,gamma)")
    return h, data


def tautological_section_data(cc: CCSystem) -> SectionData:
    """``I = int``, ``u`` the last tower entry, ``γ`` identities: induces the identity."""
    uc = cc.uc
    amb = uc.ambient
    return SectionData(
        cc,
        uc,
        cc.int_obj,
        cc.int_mor,
        lambda X: X.last,
        lambda X: amb.identity(cc.int_obj(X)),
        psi_pt=amb.identity(uc.pt),
    )


# -- classification ------------------------------------------------------------------


@dataclass
class Classification:
    kind: str  # "isomorphism", "injection" or "neither"
    hypotheses: dict[str, bool]
    predicted: str
    consistent: bool
    detail: str = ""
    inverse: CSystemHom | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "hypotheses": dict(sorted(self.hypotheses.items())),
            "predicted": self.predicted,
            "consistent": self.consistent,
            "detail": self.detail,
        }


def uc_functor_hypotheses(F: UCFunctor) -> dict[str, bool]:
    Phi, B = F.functor, F.target.ambient
    if isinstance(Phi, FunctorData):
        faithful, full = is_faithful(Phi), is_fully_faithful(Phi)
    elif hasattr(Phi, "fully_faithful"):
        full = Phi.fully_faithful()
        faithful = full or Phi.faithful()
    else:
        faithful = full = False
    mono = B.is_mono(F.phi) if hasattr(B, "is_mono") else False
    return {"faithful": faithful, "fully faithful": full, "phi mono": mono, "phi iso": B.is_iso(F.phi)}


def classify_hom(h: CSystemHom, hypotheses: dict[str, bool]) -> Classification:
    """Decide bijection/injection directly and compare with the prediction from the hypotheses.

    ``hypotheses`` uses the keys ``faithful``, ``fully faithful`` and either
    ``phi mono``/``phi iso`` (functor case) or ``u injective``/``u bijective``
    (section-data case).
    """
    iso = check_iso_on_truncation(h)
    if iso.holds:
        kind = "isomorphism"
    else:
        inj, _ = check_injective_on_truncation(h)
        kind = "injection" if inj else "neither"
    strong = hypotheses.get("fully faithful", False) and (hypotheses.get("phi iso", False) or hypotheses.get("u bijective", False))
    weak = hypotheses.get("faithful", False) and (hypotheses.get("phi mono", False) or hypotheses.get("u injective", False))
    predicted = "isomorphism" if strong else "injection" if weak else "unknown"
    if predicted == "isomorphism":
        consistent = kind == "isomorphism"
    elif predicted == "injection":
        consistent = kind in ("injection", "isomorphism")
    else:
        consistent = True
    return Classification(kind, hypotheses, predicted, consistent, iso.detail, iso.inverse)


def reverse_functor(F: UCFunctor) -> UCFunctor:
    """Swap source and target of an identity-based functor between two structures on one (C, p)."""
    return UCFunctor(F.target, F.source, F.functor, F.phi, F.phi_tilde, F.psi)


def identity_uc_functor(src: UniverseCategory, tgt: UniverseCategory) -> UCFunctor:
    """``(Id, id_U, id_Ũ)`` between two universe structures on the same morphism ``p``."""
    cat = src.ambient
    if not isinstance(cat, FinCategory) or tgt.ambient is not cat or src.p != tgt.p:
        raise PreconditionError("identity functor needs two structures on the same p in the same category")
    psi = None
    if src.is_pointed or tgt.is_pointed:
        # the comparison is the identity of pt when both use the same base object
        psi = cat.identity(tgt.pt) if tgt.pt == src.pt else None
    return UCFunctor(src, tgt, identity_functor(cat), cat.identity(src.U), cat.identity(src.U_tilde), psi)

