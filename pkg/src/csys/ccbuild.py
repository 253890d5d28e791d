"""The C-system of towers CC(C, p) built from a universe category, truncated at depth N.

An object of length n is a tower ``(F_1, ..., F_n)`` where each ``F_{k+1}`` is a
morphism from the interpretation of the prefix into U; the interpretation of
``(A, F)`` is the total object of the canonical square of F. Morphisms are
ambient morphisms between interpretations.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .csystem import TruncCSystem
from .fincat import CommutativeSquare, FinCategory
from .report import PreconditionError, Report
from .universe import UniverseCategory, canonical_square, pair, q_relative, verify_universe_laws


@dataclass(frozen=True)
class CCObject:
    length: int
    tower: tuple

    def prefix(self) -> CCObject:
        return CCObject(self.length - 1, self.tower[:-1])

    def extend(self, F: Any) -> CCObject:
        return CCObject(self.length + 1, self.tower + (F,))

    @property
    def last(self) -> Any:
        return self.tower[-1]


@dataclass(frozen=True)
class CCMorphism:
    source: CCObject
    target: CCObject
    arrow: Any


@dataclass
class Levels:
    objects: list[list[CCObject]]
    interpretation: dict[CCObject, Any]


def build_levels(uc: UniverseCategory, depth: int) -> Levels:
    """Objects of length 0..depth, each level enumerating Hom(int(A), U) in ambient order."""
    if depth < 0:
        raise PreconditionError("depth must be non-negative")
    amb = uc.ambient
    root = CCObject(0, ())
    levels = [[root]]
    interp: dict[CCObject, Any] = {root: uc.pt}
    for n in range(depth):
        nxt = []
        for A in levels[n]:
            for F in amb.hom(interp[A], uc.U):
                B = A.extend(F)
                interp[B] = canonical_square(uc, F).total
                nxt.append(B)
        levels.append(nxt)
    return Levels(levels, interp)


class CCSystem(TruncCSystem):
    """CC(C, p) truncated at ``depth``; ``with_sections=False`` gives the C0-system."""

    def __init__(self, uc: UniverseCategory, depth: int, with_sections: bool = True, name: str = ""):
        self.uc = uc
        self.ambient = uc.ambient
        self.depth = depth
        self.with_sections = with_sections
        self.name = name or uc.name
        self.levels = build_levels(uc, depth)
        self.pt = self.levels.objects[0][0]
        self.pt_final = not uc.is_pointed
        self._pos = {X: (X.length, i) for lvl in self.levels.objects for i, X in enumerate(lvl)}
        self._homs: dict[tuple[CCObject, CCObject], tuple[CCMorphism, ...]] = {}

    # -- interpretation ----------------------------------------------------

    def int_obj(self, X: CCObject) -> Any:
        try:
            return self.levels.interpretation[X]
        except KeyError:
            raise PreconditionError(f"{X!r} is not an object of this truncation") from None

    def int_mor(self, f: CCMorphism) -> Any:
        return f.arrow

    def lift(self, X: CCObject, Y: CCObject, arrow: Any) -> CCMorphism:
        """The CC-morphism with the given ambient arrow (inverse of ``int`` on morphisms)."""
        amb = self.ambient
        if amb.dom(arrow) != self.int_obj(X) or amb.cod(arrow) != self.int_obj(Y):
            raise PreconditionError("arrow does not connect the interpretations")
        return CCMorphism(X, Y, arrow)

    # -- TruncCSystem interface ----------------------------------------------

    def objects(self, max_len: int | None = None) -> list[CCObject]:
        bound = self.depth if max_len is None else min(max_len, self.depth)
        return [X for n in range(bound + 1) for X in self.levels.objects[n]]

    def objects_of_length(self, n: int) -> list[CCObject]:
        return list(self.levels.objects[n]) if n <= self.depth else []

    def length(self, X: CCObject) -> int:
        return X.length

    def ft(self, X: CCObject) -> CCObject:
        return X if X.length == 0 else X.prefix()

    def hom(self, X: CCObject, Y: CCObject) -> tuple[CCMorphism, ...]:
        key = (X, Y)
        h = self._homs.get(key)
        if h is None:
            h = tuple(CCMorphism(X, Y, a) for a in self.ambient.hom(self.int_obj(X), self.int_obj(Y)))
            self._homs[key] = h
        return h

    def dom(self, f: CCMorphism) -> CCObject:
        return f.source

    def cod(self, f: CCMorphism) -> CCObject:
        return f.target

    def identity(self, X: CCObject) -> CCMorphism:
        return CCMorphism(X, X, self.ambient.identity(self.int_obj(X)))

    def compose(self, f: CCMorphism, g: CCMorphism) -> CCMorphism:
        if f.target != g.source:
            raise PreconditionError("CC-morphisms are not composable")
        return CCMorphism(f.source, g.target, self.ambient.compose(f.arrow, g.arrow))

    def p(self, X: CCObject) -> CCMorphism:
        if X.length == 0:
            return self.identity(X)
        B = X.prefix()
        return CCMorphism(X, B, canonical_square(self.uc, X.last).proj)

    def q(self, f: CCMorphism, X: CCObject) -> tuple[CCObject, CCMorphism] | None:
        if X.length == 0:
            raise PreconditionError("q is defined only over objects of positive length")
        if f.target != X.prefix():
            raise PreconditionError("q(f, X) needs f to land in ft(X)")
        Y = f.source
        if Y.length + 1 > self.depth:
            return None
        F = X.last
        fX = Y.extend(self.ambient.compose(f.arrow, F))
        return fX, CCMorphism(fX, X, q_relative(self.uc, f.arrow, F))

    def has_sections(self) -> bool:
        return self.with_sections

    def s(self, f: CCMorphism) -> CCMorphism | None:
        if not self.with_sections:
            raise PreconditionError("this is a C0-system without sections")
        X = f.target
        if X.length == 0:
            raise PreconditionError("s_f needs a target of positive length")
        Y = f.source
        if Y.length + 1 > self.depth:
            return None
        amb = self.ambient
        F = X.last
        sq = canonical_square(self.uc, F)
        a = f.arrow
        G = amb.compose_all(a, sq.proj, F)
        target = Y.extend(G)
        arrow = pair(self.uc, G, amb.identity(self.int_obj(Y)), amb.compose(a, sq.top))
        return CCMorphism(Y, target, arrow)

    def describe(self, X: CCObject) -> str:
        n, i = self._pos.get(X, (X.length, "?"))
        if isinstance(self.ambient, FinCategory):
            names = ",".join(self.ambient.name(F) for F in X.tower)
            return f"L{n}[{names}]"
        return f"L{n}#{i}"

    def describe_mor(self, f: CCMorphism) -> str:
        if isinstance(self.ambient, FinCategory):
            a = self.ambient.name(f.arrow)
        else:
            hom = self.hom(f.source, f.target)
            a = f"#{hom.index(f)}" if f in hom else "?"
        return f"{self.describe(f.source)}->{self.describe(f.target)}:{a}"

    def level_sizes(self) -> list[int]:
        return [len(lvl) for lvl in self.levels.objects]

    def __repr__(self) -> str:
        return f"CCSystem({self.name or '?'}, depth {self.depth}, levels {self.level_sizes()})"


def build_cc0(uc: UniverseCategory, depth: int, name: str = "") -> CCSystem:
    return CCSystem(uc, depth, with_sections=False, name=name)


def canonical_squares_report(cc: CCSystem) -> Report:
    """Every canonical square used by the truncation is a pullback in the ambient."""
    rep = Report("canonical squares")
    amb = cc.ambient
    for X in cc.objects():
        if X.length == 0:
            continue
        sq = canonical_square(cc.uc, X.last)
        csq = CommutativeSquare(sq.top, sq.proj, cc.uc.p, X.last)
        if rep.expect(amb.commutes(csq), "canonical square commutes", cc.describe(X)):
            rep.expect(amb.is_pullback(csq).holds, "canonical square pullback", cc.describe(X))
    return rep


def extend_to_csystem(cc0: CCSystem) -> CCSystem:
    """Add the section operation, after confirming the canonical squares are pullbacks."""
    rep = canonical_squares_report(cc0)
    if not rep.passed:
        v = rep.violations[0]
        raise PreconditionError(f"canonical square not pullback at {v.instance}")
    return CCSystem(cc0.uc, cc0.depth, with_sections=True, name=cc0.name)


def build_cc(uc: UniverseCategory, depth: int, name: str = "", check_universe: bool = False) -> CCSystem:
    if check_universe:
        rep = verify_universe_laws(uc)
        if not rep.passed:
            raise PreconditionError(f"universe laws fail: {rep.violations[0].check} at {rep.violations[0].instance}")
    return CCSystem(uc, depth, with_sections=True, name=name)


def int_fully_faithful(cc: CCSystem, objects: Sequence[CCObject] | None = None) -> Report:
    """|Hom_CC(X, Y)| = |Hom(int X, int Y)| and the arrows are exactly the ambient hom-set."""
    rep = Report("int fully faithful")
    obs = cc.objects() if objects is None else objects
    amb = cc.ambient
    for X in obs:
        for Y in obs:
            arrows = [f.arrow for f in cc.hom(X, Y)]
            ok = arrows == list(amb.hom(cc.int_obj(X), cc.int_obj(Y))) and len(set(arrows)) == len(arrows)
            rep.expect(ok, "hom bijection", (cc.describe(X), cc.describe(Y)))
    return rep
