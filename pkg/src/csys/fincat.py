"""Finite precategories given by explicit tables.

Objects and morphisms are integer indices; names are labels only. Composition
is written in diagrammatic order throughout: ``compose(f, g)`` is "f then g"
and is defined exactly when ``cod(f) == dom(g)``.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .report import CheckError, PreconditionError, Report

COMPOSITION_ORDER = "diagrammatic"


class CategoryError(CheckError):
    """Malformed category data (bad indices, dangling names, duplicates)."""


class NotComposable(CategoryError):
    pass


@dataclass(frozen=True)
class CommutativeSquare:
    """A square ``apex --top--> Y``, ``apex --left--> X``, ``Y --right--> Z``, ``X --bottom--> Z``.

    It commutes when ``left ∘ bottom == top ∘ right`` (diagrammatic).
    """

    top: Any
    left: Any
    right: Any
    bottom: Any


@dataclass
class PullbackResult:
    holds: bool
    # (W, a, b) -> mediator, for every cone
    certificate: dict = field(default_factory=dict)
    # (W, a, b, [mediators]) for the first cone with 0 or >= 2 mediators
    counterexample: tuple | None = None


@dataclass(frozen=True)
class FinalObjectCertificate:
    object: Any
    projections: Mapping[Any, Any]

    def projection(self, x: Any) -> Any:
        return self.projections[x]


@dataclass(frozen=True)
class NotFinal:
    object: Any
    witness: Any
    hom_size: int


class FinCategory:
    """A finite precategory with a total composition table on composable pairs."""

    def __init__(
        self,
        object_names: Sequence[str],
        morphisms: Sequence[tuple[str, int, int]],
        identities: Sequence[int],
        compose: Mapping[tuple[int, int], int],
    ):
        self.object_names = tuple(object_names)
        self.morphisms = tuple((str(n), int(d), int(c)) for n, d, c in morphisms)
        self.identities = tuple(identities)
        self._compose = dict(compose)
        n_obj, n_mor = len(self.object_names), len(self.morphisms)

        if len(set(self.object_names)) != n_obj:
            dup = _first_duplicate(self.object_names)
            raise CategoryError(f"duplicate object name {dup!r}")
        if len({m[0] for m in self.morphisms}) != n_mor:
            dup = _first_duplicate([m[0] for m in self.morphisms])
            raise CategoryError(f"duplicate morphism name {dup!r}")
        for i, (name, d, c) in enumerate(self.morphisms):
            if not (0 <= d < n_obj and 0 <= c < n_obj):
                raise CategoryError(f"morphisms[{i}] ({name!r}): dom/cod index out of range")
        if len(self.identities) != n_obj:
            raise CategoryError(f"identity table has {len(self.identities)} entries for {n_obj} objects")
        for x, i in enumerate(self.identities):
            if not 0 <= i < n_mor:
                raise CategoryError(f"identities[{x}]: morphism index {i} out of range")
            if self.morphisms[i][1:] != (x, x):
                raise CategoryError(
                    f"identities[{x}]: {self.morphisms[i][0]!r} is not an endomorphism of {self.object_names[x]!r}"
                )
        for (f, g), h in self._compose.items():
            for idx in (f, g, h):
                if not 0 <= idx < n_mor:
                    raise CategoryError(f"compose entry ({f}, {g}) -> {h}: index out of range")
            if self.morphisms[f][2] != self.morphisms[g][1]:
                raise NotComposable(
                    f"compose entry ({self.morphisms[f][0]!r}, {self.morphisms[g][0]!r}) is not a composable pair"
                )

        self._obj_index = {n: i for i, n in enumerate(self.object_names)}
        self._mor_index = {m[0]: i for i, m in enumerate(self.morphisms)}
        homs: dict[tuple[int, int], list[int]] = {}
        for i, (_, d, c) in enumerate(self.morphisms):
            homs.setdefault((d, c), []).append(i)
        self._homs = {k: tuple(v) for k, v in homs.items()}

    # -- basic access -------------------------------------------------------

    @property
    def objects(self) -> range:
        return range(len(self.object_names))

    @property
    def morphism_ids(self) -> range:
        return range(len(self.morphisms))

    def dom(self, f: int) -> int:
        return self.morphisms[f][1]

    def cod(self, f: int) -> int:
        return self.morphisms[f][2]

    def identity(self, x: int) -> int:
        return self.identities[x]

    def compose(self, f: int, g: int) -> int:
        try:
            return self._compose[(f, g)]
        except KeyError:
            if self.cod(f) != self.dom(g):
                raise NotComposable(f"{self.name(f)!r} then {self.name(g)!r}: codomain/domain mismatch") from None
            raise CategoryError(f"composition table has no entry for ({self.name(f)!r}, {self.name(g)!r})") from None

    def compose_all(self, *fs: int) -> int:
        out = fs[0]
        for g in fs[1:]:
            out = self.compose(out, g)
        return out

    def hom(self, x: int, y: int) -> tuple[int, ...]:
        return self._homs.get((x, y), ())

    def name(self, f: int) -> str:
        return self.morphisms[f][0]

    def obj_name(self, x: int) -> str:
        return self.object_names[x]

    def obj(self, name: str) -> int:
        return self._obj_index[name]

    def mor(self, name: str) -> int:
        return self._mor_index[name]

    def composition_table(self) -> dict[tuple[int, int], int]:
        return dict(self._compose)

    def __repr__(self) -> str:
        return f"FinCategory({len(self.object_names)} objects, {len(self.morphisms)} morphisms)"

    # -- ambient-category interface (shared with the presheaf category) -----

    def describe(self, f: int) -> str:
        return self.name(f)

    def inverse(self, f: int) -> int | None:
        x, y = self.dom(f), self.cod(f)
        for g in self.hom(y, x):
            if self.compose(f, g) == self.identity(x) and self.compose(g, f) == self.identity(y):
                return g
        return None

    def is_iso(self, f: int) -> bool:
        return self.inverse(f) is not None

    def is_mono(self, f: int) -> bool:
        x = self.dom(f)
        for w in self.objects:
            images = [self.compose(h, f) for h in self.hom(w, x)]
            if len(set(images)) != len(images):
                return False
        return True

    def mediators(self, w: int, apex: int, left: int, top: int, a: int, b: int) -> list[int]:
        return [h for h in self.hom(w, apex) if self.compose(h, left) == a and self.compose(h, top) == b]

    def commutes(self, sq: CommutativeSquare) -> bool:
        return self.compose(sq.left, sq.bottom) == self.compose(sq.top, sq.right)

    def cones(self, bottom: int, right: int) -> Iterable[tuple[int, int, int]]:
        x, y = self.dom(bottom), self.dom(right)
        for w in self.objects:
            for a in self.hom(w, x):
                ab = self.compose(a, bottom)
                for b in self.hom(w, y):
                    if ab == self.compose(b, right):
                        yield w, a, b

    def is_pullback(self, sq: CommutativeSquare) -> PullbackResult:
        return check_pullback_square(self, sq)


def _first_duplicate(items: Iterable[Any]) -> Any:
    seen = set()
    for it in items:
        if it in seen:
            return it
        seen.add(it)
    return None


def category_from_function(
    object_names: Sequence[str],
    morphisms: Sequence[tuple[str, int, int]],
    identities: Sequence[int],
    compose_fn,
) -> FinCategory:
    """Build the composition table by calling ``compose_fn(f, g)`` on every composable pair."""
    homs_from: dict[int, list[int]] = {}
    for i, (_, d, _) in enumerate(morphisms):
        homs_from.setdefault(d, []).append(i)
    table = {}
    for f, (_, _, c) in enumerate(morphisms):
        for g in homs_from.get(c, ()):
            table[(f, g)] = compose_fn(f, g)
    return FinCategory(object_names, morphisms, identities, table)


# -- validation ---------------------------------------------------------------


def validate_category(cat: FinCategory) -> Report:
    rep = Report("category axioms")
    n = cat.name
    for x in cat.objects:
        i = cat.identity(x)
        for f in cat.morphism_ids:
            if cat.dom(f) == x:
                rep.expect(_lookup(cat, i, f) == f, "left identity", (n(i), n(f)), f"id then {n(f)} != {n(f)}")
            if cat.cod(f) == x:
                rep.expect(_lookup(cat, f, i) == f, "right identity", (n(f), n(i)), f"{n(f)} then id != {n(f)}")
    for f in cat.morphism_ids:
        for g in cat.morphism_ids:
            if cat.cod(f) != cat.dom(g):
                continue
            fg = _lookup(cat, f, g)
            if fg is None:
                rep.fail("totality", (n(f), n(g)), "missing composite")
                continue
            rep.expect(
                cat.dom(fg) == cat.dom(f) and cat.cod(fg) == cat.cod(g),
                "dom/cod coherence",
                (n(f), n(g)),
            )
    for f in cat.morphism_ids:
        for g in cat.morphism_ids:
            if cat.cod(f) != cat.dom(g):
                continue
            fg = _lookup(cat, f, g)
            for h in cat.morphism_ids:
                if cat.cod(g) != cat.dom(h):
                    continue
                gh = _lookup(cat, g, h)
                if fg is None or gh is None:
                    rep.skip("associativity")
                    continue
                left, right = _lookup(cat, fg, h), _lookup(cat, f, gh)
                rep.expect(left is not None and left == right, "associativity", (n(f), n(g), n(h)))
    return rep


def _lookup(cat: FinCategory, f: int, g: int) -> int | None:
    return cat._compose.get((f, g))


def enumerate_hom(cat: FinCategory, x: int, y: int) -> list[int]:
    return list(cat.hom(x, y))


def check_pullback_square(cat: FinCategory, sq: CommutativeSquare) -> PullbackResult:
    """Exhaustive cone enumeration: every cone over the cospan must have exactly one mediator."""
    if not cat.commutes(sq):
        raise PreconditionError(
            f"square ({cat.name(sq.top)}, {cat.name(sq.left)}, {cat.name(sq.right)}, {cat.name(sq.bottom)}) does not commute"
        )
    apex = cat.dom(sq.top)
    result = PullbackResult(True)
    for w, a, b in cat.cones(sq.bottom, sq.right):
        meds = cat.mediators(w, apex, sq.left, sq.top, a, b)
        if len(meds) != 1:
            result.holds = False
            result.counterexample = (w, a, b, meds)
            return result
        result.certificate[(w, a, b)] = meds[0]
    return result


def check_final_object(cat: FinCategory, x: int) -> FinalObjectCertificate | NotFinal:
    projections = {}
    for y in cat.objects:
        h = cat.hom(y, x)
        if len(h) != 1:
            return NotFinal(x, y, len(h))
        projections[y] = h[0]
    return FinalObjectCertificate(x, projections)


def find_final_object(cat: FinCategory) -> FinalObjectCertificate | None:
    for x in cat.objects:
        cert = check_final_object(cat, x)
        if isinstance(cert, FinalObjectCertificate):
            return cert
    return None


# -- functors -----------------------------------------------------------------


@dataclass(frozen=True)
class FunctorData:
    source: FinCategory
    target: FinCategory
    on_objects: tuple[int, ...]
    on_morphisms: tuple[int, ...]

    def obj(self, x: int) -> int:
        return self.on_objects[x]

    def mor(self, f: int) -> int:
        return self.on_morphisms[f]


def validate_functor(F: FunctorData) -> Report:
    s, t = F.source, F.target
    if len(F.on_objects) != len(s.object_names):
        raise CategoryError(f"object map has {len(F.on_objects)} entries for {len(s.object_names)} objects")
    if len(F.on_morphisms) != len(s.morphisms):
        raise CategoryError(f"morphism map has {len(F.on_morphisms)} entries for {len(s.morphisms)} morphisms")
    for i, x in enumerate(F.on_objects):
        if not 0 <= x < len(t.object_names):
            raise CategoryError(f"on_objects[{i}] = {x} out of range")
    for i, f in enumerate(F.on_morphisms):
        if not 0 <= f < len(t.morphisms):
            raise CategoryError(f"on_morphisms[{i}] = {f} out of range")

    rep = Report("functor laws")
    for f in s.morphism_ids:
        Ff = F.mor(f)
        rep.expect(
            t.dom(Ff) == F.obj(s.dom(f)) and t.cod(Ff) == F.obj(s.cod(f)),
            "dom/cod",
            s.name(f),
        )
    for x in s.objects:
        rep.expect(F.mor(s.identity(x)) == t.identity(F.obj(x)), "identity", s.obj_name(x))
    for f in s.morphism_ids:
        for g in s.morphism_ids:
            if s.cod(f) != s.dom(g):
                continue
            Ff, Fg = F.mor(f), F.mor(g)
            ok = t.cod(Ff) == t.dom(Fg) and F.mor(s.compose(f, g)) == t.compose(Ff, Fg)
            rep.expect(ok, "composition", (s.name(f), s.name(g)))
    return rep


def identity_functor(cat: FinCategory) -> FunctorData:
    return FunctorData(cat, cat, tuple(cat.objects), tuple(cat.morphism_ids))


def functor_from_names(source: FinCategory, target: FinCategory, objects: Mapping[str, str], morphisms: Mapping[str, str]) -> FunctorData:
    try:
        obs = tuple(target.obj(objects[source.obj_name(x)]) for x in source.objects)
        mors = tuple(target.mor(morphisms[source.name(f)]) for f in source.morphism_ids)
    except KeyError as e:
        raise CategoryError(f"functor data: missing or dangling name {e.args[0]!r}") from None
    return FunctorData(source, target, obs, mors)


def is_faithful(F: FunctorData) -> bool:
    s = F.source
    for x, y in itertools.product(s.objects, repeat=2):
        imgs = [F.mor(f) for f in s.hom(x, y)]
        if len(set(imgs)) != len(imgs):
            return False
    return True


def is_fully_faithful(F: FunctorData) -> bool:
    s, t = F.source, F.target
    for x, y in itertools.product(s.objects, repeat=2):
        imgs = sorted(F.mor(f) for f in s.hom(x, y))
        if imgs != sorted(t.hom(F.obj(x), F.obj(y))):
            return False
    return True


# -- JSON ---------------------------------------------------------------------


def category_from_json(data: Mapping[str, Any]) -> FinCategory:
    order = data.get("order", COMPOSITION_ORDER)
    if order != COMPOSITION_ORDER:
        raise CategoryError(f"unsupported composition order {order!r}; expected {COMPOSITION_ORDER!r}")
    objects = data.get("objects")
    if not isinstance(objects, list):
        raise CategoryError("'objects' must be a list of names")
    obj_index: dict[str, int] = {}
    for i, name in enumerate(objects):
        if name in obj_index:
            raise CategoryError(f"objects[{i}]: duplicate object {name!r}")
        obj_index[name] = i
    mors = []
    mor_index: dict[str, int] = {}
    for i, m in enumerate(data.get("morphisms", [])):
        try:
            name, d, c = m["name"], m["dom"], m["cod"]
        except (KeyError, TypeError):
            raise CategoryError(f"morphisms[{i}]: expected an object with name/dom/cod") from None
        if name in mor_index:
            raise CategoryError(f"morphisms[{i}]: duplicate morphism {name!r}")
        for key, ref in (("dom", d), ("cod", c)):
            if ref not in obj_index:
                raise CategoryError(f"morphisms[{i}] ({name!r}): dangling {key} reference {ref!r}")
        mor_index[name] = i
        mors.append((name, obj_index[d], obj_index[c]))
    ids = data.get("identities", {})
    identities = []
    for name in objects:
        if name not in ids:
            raise CategoryError(f"identities: missing entry for object {name!r}")
        if ids[name] not in mor_index:
            raise CategoryError(f"identities[{name!r}]: dangling morphism reference {ids[name]!r}")
        identities.append(mor_index[ids[name]])
    table = {}
    for i, entry in enumerate(data.get("compose", [])):
        if not (isinstance(entry, list) and len(entry) == 3):
            raise CategoryError(f"compose[{i}]: expected [f, g, fg]")
        for ref in entry:
            if ref not in mor_index:
                raise CategoryError(f"compose[{i}]: dangling morphism reference {ref!r}")
        f, g, h = (mor_index[r] for r in entry)
        if (f, g) in table:
            raise CategoryError(f"compose[{i}]: duplicate entry for ({entry[0]!r}, {entry[1]!r})")
        table[(f, g)] = h
    try:
        return FinCategory(objects, mors, identities, table)
    except NotComposable as e:
        raise CategoryError(f"compose: {e}") from None


def category_to_json(cat: FinCategory) -> dict[str, Any]:
    return {
        "order": COMPOSITION_ORDER,
        "objects": list(cat.object_names),
        "morphisms": [{"name": n, "dom": cat.obj_name(d), "cod": cat.obj_name(c)} for n, d, c in cat.morphisms],
        "identities": {cat.obj_name(x): cat.name(cat.identity(x)) for x in cat.objects},
        "compose": [[cat.name(f), cat.name(g), cat.name(h)] for (f, g), h in sorted(cat.composition_table().items())],
    }
