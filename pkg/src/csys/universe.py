"""Universe structures, the pairing operation and the relative base-change map.

A universe in an ambient category is a morphism ``p: Ũ -> U`` together with a
chosen pullback square for every ``F: X -> U``::

    (X;F) --Q(F)--> Ũ
      |              |
   p_{X,F}           p
      v              v
      X  ----F---->  U

The ambient is any object implementing the small protocol below; both
:class:`~csys.fincat.FinCategory` and :class:`~csys.presheaf.PresheafCategory`
do.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Protocol

from .fincat import CommutativeSquare, FinalObjectCertificate, FinCategory, check_final_object
from .presheaf import PresheafCategory, PresheafMorphism, presheaf_pullback, to_final
from .report import CheckError, PreconditionError, Report


class EffectiveCategory(Protocol):
    def dom(self, f: Any) -> Any: ...
    def cod(self, f: Any) -> Any: ...
    def identity(self, x: Any) -> Any: ...
    def compose(self, f: Any, g: Any) -> Any: ...
    def hom(self, x: Any, y: Any) -> Sequence[Any]: ...
    def inverse(self, f: Any) -> Any | None: ...
    def is_iso(self, f: Any) -> bool: ...
    def mediators(self, w: Any, apex: Any, left: Any, top: Any, a: Any, b: Any) -> list[Any]: ...
    def is_pullback(self, sq: CommutativeSquare) -> Any: ...
    def commutes(self, sq: CommutativeSquare) -> bool: ...
    def describe(self, f: Any) -> str: ...


class UniverseError(CheckError):
    pass


class NotPullbackError(UniverseError):
    """A cone has zero or several mediators into a square that should be a pullback."""

    def __init__(self, where: str, count: int):
        kind = "no mediator" if count == 0 else "several mediators"
        super().__init__(f"{where} is not a pullback ({kind} for a cone)")
        self.where = where
        self.count = count


class MissingSquare(UniverseError):
    """No canonical square is recorded for this morphism (outside a truncated structure)."""


@dataclass(frozen=True)
class CanonicalSquare:
    base: Any
    total: Any
    proj: Any
    top: Any


class TableUniverse:
    """Canonical squares stored in a table keyed by the base morphism."""

    def __init__(self, p: Any, squares: Mapping[Any, CanonicalSquare], complete: bool = True):
        self.p = p
        self.squares = dict(squares)
        self.complete = complete

    def square(self, F: Any) -> CanonicalSquare:
        try:
            return self.squares[F]
        except KeyError:
            raise MissingSquare(f"no canonical square recorded for {F!r}") from None

    def has_square(self, F: Any) -> bool:
        return F in self.squares


class StandardPresheafUniverse:
    """Canonical squares given by the standard (pairs) pullback of presheaves."""

    complete = True

    def __init__(self, p: PresheafMorphism):
        self.p = p
        self._cache: dict[PresheafMorphism, CanonicalSquare] = {}

    def square(self, F: PresheafMorphism) -> CanonicalSquare:
        sq = self._cache.get(F)
        if sq is None:
            apex, pr1, pr2 = presheaf_pullback(F, self.p)
            sq = CanonicalSquare(F, apex, pr1, pr2)
            self._cache[F] = sq
        return sq

    def has_square(self, F: PresheafMorphism) -> bool:
        return True


class UniverseCategory:
    """An ambient category with a universe and a base object ``pt``.

    ``final`` certifies that ``pt`` is final. When it is ``None`` the universe
    category is *pointed*: ``pt`` is only a chosen base object and the
    constructions that rely on finality use explicitly supplied maps instead.
    """

    def __init__(self, ambient: Any, structure: Any, pt: Any, final: FinalObjectCertificate | None = None, name: str = ""):
        self.ambient = ambient
        self.structure = structure
        self.p = structure.p
        self.pt = pt
        self.final = final
        self.name = name
        self.U = ambient.cod(self.p)
        self.U_tilde = ambient.dom(self.p)
        self._q_cache: dict[tuple[Any, Any], Any] = {}

    @property
    def is_pointed(self) -> bool:
        return self.final is None

    def to_pt(self, x: Any) -> Any:
        """The unique morphism into a final ``pt``."""
        if self.final is None:
            raise PreconditionError("base object is not certified final")
        if isinstance(self.final, FinalObjectCertificate):
            return self.final.projection(x)
        return self.final(x)

    def __repr__(self) -> str:
        return f"UniverseCategory({self.name or '?'})"


def final_presheaf_certificate(ambient: PresheafCategory):
    """Finality witness for a singleton-valued presheaf: the projection is computed on demand."""
    return lambda P: to_final(P)


# -- core operations -----------------------------------------------------------


def canonical_square(uc: UniverseCategory, F: Any) -> CanonicalSquare:
    if uc.ambient.cod(F) != uc.U:
        raise PreconditionError(f"{uc.ambient.describe(F)} is not a morphism into U")
    return uc.structure.square(F)


def mediate(ambient: Any, w: Any, apex: Any, left: Any, top: Any, a: Any, b: Any, where: str) -> Any:
    """The unique ``h: w -> apex`` with ``h then left = a`` and ``h then top = b``."""
    meds = ambient.mediators(w, apex, left, top, a, b)
    if len(meds) != 1:
        raise NotPullbackError(where, len(meds))
    return meds[0]


def pair(uc: UniverseCategory, F: Any, f: Any, g: Any) -> Any:
    """Mediator into the canonical square of ``F`` for the cone ``(f: W -> X, g: W -> Ũ)``."""
    amb = uc.ambient
    if amb.compose(f, F) != amb.compose(g, uc.p):
        raise PreconditionError(f"cone ({amb.describe(f)}, {amb.describe(g)}) does not commute over {amb.describe(F)}")
    sq = canonical_square(uc, F)
    return mediate(amb, amb.dom(f), sq.total, sq.proj, sq.top, f, g, f"canonical square for {amb.describe(F)}")


def q_relative(uc: UniverseCategory, f: Any, F: Any) -> Any:
    """``Q(f, F): (X'; f then F) -> (X; F)`` for ``f: X' -> X``."""
    key = (f, F)
    cached = uc._q_cache.get(key)
    if cached is not None:
        return cached
    amb = uc.ambient
    fF = amb.compose(f, F)
    sq = canonical_square(uc, fF)
    out = pair(uc, F, amb.compose(sq.proj, f), sq.top)
    uc._q_cache[key] = out
    return out


def square_is_pullback(ambient: Any, sq: CommutativeSquare) -> bool:
    res = ambient.is_pullback(sq)
    return res.holds


# -- law verification ----------------------------------------------------------


def _morphisms_into(uc: UniverseCategory, objects: Iterable[Any]) -> list[Any]:
    amb = uc.ambient
    return [F for X in objects for F in amb.hom(X, uc.U)]


def verify_universe_laws(
    uc: UniverseCategory,
    objects: Sequence[Any] | None = None,
) -> Report:
    """Check the canonical squares and the laws of the relative map.

    For a finite ambient every object is used; otherwise ``objects`` lists the
    objects over which morphisms are quantified. Instances whose canonical
    square is not recorded (truncated structures) are skipped and counted.
    """
    amb = uc.ambient
    rep = Report("universe laws")
    if objects is None:
        if not isinstance(amb, FinCategory):
            raise PreconditionError("an explicit object list is needed for an infinite ambient")
        objects = list(amb.objects)
    d = amb.describe

    def has(F: Any) -> bool:
        return uc.structure.has_square(F)

    for X in objects:
        for F in amb.hom(X, uc.U):
            if not has(F):
                rep.skip("canonical square pullback")
                continue
            sq = uc.structure.square(F)
            shape_ok = (
                amb.dom(sq.proj) == sq.total
                and amb.cod(sq.proj) == X
                and amb.dom(sq.top) == sq.total
                and amb.cod(sq.top) == uc.U_tilde
            )
            if not rep.expect(shape_ok, "canonical square shape", d(F), "endpoints do not match"):
                continue
            csq = CommutativeSquare(sq.top, sq.proj, uc.p, F)
            if not rep.expect(amb.commutes(csq), "canonical square commutes", d(F)):
                continue
            rep.expect(square_is_pullback(amb, csq), "canonical square pullback", d(F), f"canonical square for {d(F)} not pullback")

    if not rep.passed:
        rep.note("relative laws not checked: canonical squares are invalid")
        return rep

    for X in objects:
        for F in amb.hom(X, uc.U):
            if not has(F):
                continue
            sq = uc.structure.square(F)
            rep.expect(q_relative(uc, amb.identity(X), F) == amb.identity(sq.total), "Q(id,F)=id", d(F))
            for X1 in objects:
                for f in amb.hom(X1, X):
                    fF = amb.compose(f, F)
                    if not has(fF):
                        rep.skip("relative instance")
                        continue
                    inst = (d(f), d(F))
                    try:
                        q = q_relative(uc, f, F)
                    except NotPullbackError as e:
                        rep.fail("pairing", inst, str(e))
                        continue
                    sq1 = uc.structure.square(fF)
                    rep.expect(amb.compose(q, sq.top) == sq1.top, "Q(f,F) then Q(F) = Q(f then F)", inst)
                    rel = CommutativeSquare(q, sq1.proj, sq.proj, f)
                    if rep.expect(amb.commutes(rel), "relative square commutes", inst):
                        rep.expect(square_is_pullback(amb, rel), "relative square pullback", inst)
                    if amb.is_iso(f):
                        rep.expect(amb.is_iso(q), "Q(f,F) iso for iso f", inst)
                    for X2 in objects:
                        for f2 in amb.hom(X2, X1):
                            if not has(amb.compose(f2, fF)):
                                rep.skip("composition law")
                                continue
                            lhs = amb.compose(q_relative(uc, f2, fF), q)
                            rhs = q_relative(uc, amb.compose(f2, f), F)
                            rep.expect(lhs == rhs, "composition law", (d(f2), d(f), d(F)))
    return rep


# -- choosing universe structures ------------------------------------------------


def pullback_squares_over(cat: FinCategory, F: int, p: int) -> Iterable[CanonicalSquare]:
    """Every pullback square over ``(F, p)``, ordered by (total object, top, projection)."""
    X = cat.dom(F)
    for W in cat.objects:
        for top in cat.hom(W, cat.dom(p)):
            tp = cat.compose(top, p)
            for proj in cat.hom(W, X):
                if cat.compose(proj, F) != tp:
                    continue
                if cat.is_pullback(CommutativeSquare(top, proj, p, F)).holds:
                    yield CanonicalSquare(F, W, proj, top)


def derive_universe_structure(cat: FinCategory, p: int) -> TableUniverse:
    """Choose, for each F into U, the first pullback square in the search order."""
    U = cat.cod(p)
    squares = {}
    for X in cat.objects:
        for F in cat.hom(X, U):
            first = next(iter(pullback_squares_over(cat, F, p)), None)
            if first is None:
                raise UniverseError(f"no pullback of {cat.name(F)} along {cat.name(p)} exists")
            squares[F] = first
    return TableUniverse(p, squares)


def enumerate_universe_structures(cat: FinCategory, p: int, limit: int = 10**5) -> list[TableUniverse]:
    """All universe structures on ``p`` (every choice of pullback square per F)."""
    U = cat.cod(p)
    keys = [F for X in cat.objects for F in cat.hom(X, U)]
    options = []
    total = 1
    for F in keys:
        opts = list(pullback_squares_over(cat, F, p))
        if not opts:
            raise UniverseError(f"no pullback of {cat.name(F)} along {cat.name(p)} exists")
        options.append(opts)
        total *= len(opts)
    if total > limit:
        raise UniverseError(f"{total} universe structures exceed the enumeration limit {limit}")
    return [TableUniverse(p, dict(zip(keys, choice))) for choice in itertools.product(*options)]


def build_universe_category(
    cat: FinCategory,
    structure: TableUniverse,
    pt: int,
    pointed: bool = False,
    name: str = "",
) -> UniverseCategory:
    cert = check_final_object(cat, pt)
    if isinstance(cert, FinalObjectCertificate):
        return UniverseCategory(cat, structure, pt, cert, name)
    if not pointed:
        raise UniverseError(
            f"{cat.obj_name(pt)!r} is not final ({cat.obj_name(cert.witness)!r} has {cert.hom_size} maps to it); "
            "mark the universe as pointed to use it as a base object"
        )
    return UniverseCategory(cat, structure, pt, None, name)


# -- JSON -------------------------------------------------------------------------


def universe_from_json(cat: FinCategory, data: Mapping[str, Any], name: str = "") -> UniverseCategory:
    def mor(ref: Any, where: str) -> int:
        try:
            return cat.mor(ref)
        except KeyError:
            raise UniverseError(f"{where}: dangling morphism reference {ref!r}") from None

    def obj(ref: Any, where: str) -> int:
        try:
            return cat.obj(ref)
        except KeyError:
            raise UniverseError(f"{where}: dangling object reference {ref!r}") from None

    if "p" not in data:
        raise UniverseError("universe data needs 'p'")
    p = mor(data["p"], "p")
    pt = obj(data.get("final", None), "final")
    if data.get("auto"):
        structure = derive_universe_structure(cat, p)
    else:
        U = cat.cod(p)
        squares = {}
        raw = data.get("squares", {})
        for F_name, entry in raw.items():
            F = mor(F_name, "squares")
            if cat.cod(F) != U:
                raise UniverseError(f"squares[{F_name!r}]: not a morphism into U")
            try:
                W = obj(entry["object"], f"squares[{F_name!r}].object")
                proj = mor(entry["proj"], f"squares[{F_name!r}].proj")
                top = mor(entry["Q"], f"squares[{F_name!r}].Q")
            except (KeyError, TypeError):
                raise UniverseError(f"squares[{F_name!r}]: expected object/proj/Q") from None
            squares[F] = CanonicalSquare(F, W, proj, top)
        missing = [cat.name(F) for X in cat.objects for F in cat.hom(X, U) if F not in squares]
        if missing:
            raise UniverseError(f"squares: no entry for morphism(s) into U: {', '.join(missing)}")
        structure = TableUniverse(p, squares)
    return build_universe_category(cat, structure, pt, bool(data.get("pointed", False)), name)


def universe_to_json(uc: UniverseCategory) -> dict[str, Any]:
    cat = uc.ambient
    squares = {}
    for F, sq in sorted(uc.structure.squares.items()):
        squares[cat.name(F)] = {"object": cat.obj_name(sq.total), "proj": cat.name(sq.proj), "Q": cat.name(sq.top)}
    out = {"p": cat.name(uc.p), "final": cat.obj_name(uc.pt), "squares": squares}
    if uc.is_pointed:
        out["pointed"] = True
    return out


def structure_signature(uc_or_structure: Any, cat: FinCategory) -> tuple:
    structure = getattr(uc_or_structure, "structure", uc_or_structure)
    return tuple((cat.name(F), cat.obj_name(s.total), cat.name(s.proj), cat.name(s.top)) for F, s in sorted(structure.squares.items()))

