"""Finite-set-valued presheaves on a finite category, and the category they form.

A presheaf stores, per object, a tuple of hashable elements and, per morphism
``m: X -> Y``, the restriction map ``P(Y) -> P(X)`` as a tuple of indices into
``P(X)``. Morphisms of presheaves store their components as index tuples too,
so equality of presheaves and of their morphisms is structural.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from typing import Any

from .fincat import CommutativeSquare, FinCategory, PullbackResult
from .report import CheckError, PreconditionError, Report

FINAL_TOKEN = "tt"
DEFAULT_BUDGET = 10**6


class PresheafError(CheckError):
    """Shape mismatch or out-of-range data in a presheaf or presheaf morphism."""


class BudgetExceeded(CheckError):
    def __init__(self, budget: int, what: str = "presheaf morphism enumeration"):
        super().__init__(f"{what} exceeded its budget of {budget} candidate states")
        self.budget = budget


class FinPresheaf:
    """A contravariant functor from ``base`` to finite sets."""

    __slots__ = ("base", "values", "restrictions", "label", "_index", "_hash")

    def __init__(
        self,
        base: FinCategory,
        values: Sequence[Sequence[Any]],
        restrictions: Sequence[Sequence[int]],
        label: str = "",
    ):
        if len(values) != len(base.object_names):
            raise PresheafError(f"{len(values)} value sets for {len(base.object_names)} objects")
        if len(restrictions) != len(base.morphisms):
            raise PresheafError(f"{len(restrictions)} restriction maps for {len(base.morphisms)} morphisms")
        self.base = base
        self.values = tuple(tuple(v) for v in values)
        self.restrictions = tuple(tuple(r) for r in restrictions)
        self.label = label
        index = []
        for x, vals in enumerate(self.values):
            idx = {v: i for i, v in enumerate(vals)}
            if len(idx) != len(vals):
                raise PresheafError(f"duplicate element in value set of {base.obj_name(x)!r}")
            index.append(idx)
        self._index = tuple(index)
        for m, r in enumerate(self.restrictions):
            d, c = base.dom(m), base.cod(m)
            if len(r) != len(self.values[c]):
                raise PresheafError(f"restriction along {base.name(m)!r} has {len(r)} entries, expected {len(self.values[c])}")
            n = len(self.values[d])
            for i in r:
                if not 0 <= i < n:
                    raise PresheafError(f"restriction along {base.name(m)!r} points outside the value set of {base.obj_name(d)!r}")
        self._hash = hash((id(base), self.values, self.restrictions))

    @classmethod
    def from_function(
        cls,
        base: FinCategory,
        values: Sequence[Sequence[Any]],
        restrict: Callable[[int, Any], Any],
        label: str = "",
    ) -> FinPresheaf:
        """Build from ``restrict(m, y)``, the restriction of ``y ∈ P(cod m)`` along ``m``."""
        index = [{v: i for i, v in enumerate(vals)} for vals in values]
        tables = []
        for m in base.morphism_ids:
            d, c = base.dom(m), base.cod(m)
            row = []
            for y in values[c]:
                img = restrict(m, y)
                try:
                    row.append(index[d][img])
                except KeyError:
                    raise PresheafError(
                        f"restriction of {y!r} along {base.name(m)!r} is {img!r}, not an element over {base.obj_name(d)!r}"
                    ) from None
            tables.append(row)
        return cls(base, values, tables, label)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinPresheaf):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.base is other.base
            and self.values == other.values
            and self.restrictions == other.restrictions
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        sizes = ",".join(str(len(v)) for v in self.values)
        return f"FinPresheaf({self.label or '?'}; sizes {sizes})"

    def index(self, x: int, element: Any) -> int:
        try:
            return self._index[x][element]
        except KeyError:
            raise PresheafError(f"{element!r} is not an element over {self.base.obj_name(x)!r}") from None

    def contains(self, x: int, element: Any) -> bool:
        return element in self._index[x]

    def restrict(self, m: int, element: Any) -> Any:
        """Restriction of ``element ∈ P(cod m)`` along ``m``."""
        c, d = self.base.cod(m), self.base.dom(m)
        return self.values[d][self.restrictions[m][self.index(c, element)]]

    def size(self) -> int:
        return sum(len(v) for v in self.values)


class PresheafMorphism:
    """A natural family of functions ``source(X) -> target(X)``, stored as index tuples."""

    __slots__ = ("source", "target", "components", "_hash")

    def __init__(self, source: FinPresheaf, target: FinPresheaf, components: Sequence[Sequence[int]]):
        if source.base is not target.base:
            raise PresheafError("source and target live over different base categories")
        comps = tuple(tuple(c) for c in components)
        if len(comps) != len(source.values):
            raise PresheafError(f"{len(comps)} components for {len(source.values)} objects")
        for x, c in enumerate(comps):
            if len(c) != len(source.values[x]):
                raise PresheafError(f"component at {source.base.obj_name(x)!r} has the wrong length")
            n = len(target.values[x])
            for i in c:
                if not 0 <= i < n:
                    raise PresheafError(f"component at {source.base.obj_name(x)!r} points outside the target")
        self.source = source
        self.target = target
        self.components = comps
        self._hash = hash((source, target, comps))

    @classmethod
    def from_function(cls, source: FinPresheaf, target: FinPresheaf, fn: Callable[[int, Any], Any]) -> PresheafMorphism:
        comps = [[target.index(x, fn(x, v)) for v in source.values[x]] for x in range(len(source.values))]
        return cls(source, target, comps)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, PresheafMorphism):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.components == other.components
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"PresheafMorphism({self.source.label or '?'} -> {self.target.label or '?'})"

    def apply(self, x: int, element: Any) -> Any:
        return self.target.values[x][self.components[x][self.source.index(x, element)]]

    def then(self, other: PresheafMorphism) -> PresheafMorphism:
        if self.target != other.source:
            raise PresheafError("presheaf morphisms are not composable")
        comps = [tuple(other.components[x][i] for i in c) for x, c in enumerate(self.components)]
        return PresheafMorphism(self.source, other.target, comps)


# -- validation ---------------------------------------------------------------


def validate_presheaf(P: FinPresheaf) -> Report:
    base = P.base
    rep = Report("presheaf laws")
    for x in base.objects:
        i = base.identity(x)
        rep.expect(P.restrictions[i] == tuple(range(len(P.values[x]))), "identity", base.name(i))
    for f in base.morphism_ids:
        for g in base.morphism_ids:
            if base.cod(f) != base.dom(g):
                continue
            fg = base.compose(f, g)
            # restriction along f then g acts as restriction along g followed by restriction along f
            expected = tuple(P.restrictions[f][j] for j in P.restrictions[g])
            rep.expect(P.restrictions[fg] == expected, "composition", (base.name(f), base.name(g)))
    return rep


def validate_presheaf_morphism(m: PresheafMorphism) -> Report:
    base = m.source.base
    rep = Report("naturality")
    for f in base.morphism_ids:
        d, c = base.dom(f), base.cod(f)
        for j in range(len(m.source.values[c])):
            lhs = m.components[d][m.source.restrictions[f][j]]
            rhs = m.target.restrictions[f][m.components[c][j]]
            rep.expect(lhs == rhs, "naturality", (base.name(f), repr(m.source.values[c][j])))
    return rep


# -- standard constructions ---------------------------------------------------


def final_presheaf(base: FinCategory) -> FinPresheaf:
    return FinPresheaf(base, [(FINAL_TOKEN,)] * len(base.object_names), [(0,)] * len(base.morphisms), "1")


def to_final(P: FinPresheaf) -> PresheafMorphism:
    return PresheafMorphism(P, final_presheaf(P.base), [(0,) * len(v) for v in P.values])


def yoneda(base: FinCategory, x: int) -> FinPresheaf:
    """``Hom(-, x)`` with elements the morphism indices, restricted by precomposition."""
    values = [base.hom(g, x) for g in base.objects]
    return FinPresheaf.from_function(base, values, lambda m, h: base.compose(m, h), f"Yo({base.obj_name(x)})")


def yoneda_on_morphisms(base: FinCategory, f: int) -> PresheafMorphism:
    src, tgt = yoneda(base, base.dom(f)), yoneda(base, base.cod(f))
    return PresheafMorphism.from_function(src, tgt, lambda _x, h: base.compose(h, f))


def section_to_morphism(P: FinPresheaf, x: int, element: Any) -> PresheafMorphism:
    """The morphism ``Yo(x) -> P`` sending ``h: Γ -> x`` to the restriction of ``element`` along ``h``."""
    if not P.contains(x, element):
        raise PreconditionError(f"{element!r} is not an element of {P!r} over {P.base.obj_name(x)!r}")
    j = P.index(x, element)
    src = yoneda(P.base, x)
    comps = [tuple(P.restrictions[h][j] for h in src.values[g]) for g in P.base.objects]
    return PresheafMorphism(src, P, comps)


def evaluate_at_identity(m: PresheafMorphism, x: int) -> Any:
    """Inverse of :func:`section_to_morphism`: the image of ``id_x``."""
    return m.apply(x, m.source.base.identity(x))


def presheaf_pullback(f: PresheafMorphism, g: PresheafMorphism) -> tuple[FinPresheaf, PresheafMorphism, PresheafMorphism]:
    """Standard pullback of ``f: X -> Z`` and ``g: Y -> Z`` with elements the pairs ``(x, y)``."""
    if f.target != g.target:
        raise PreconditionError("pullback needs a common codomain")
    X, Y = f.source, g.source
    base = X.base
    values = []
    for o in base.objects:
        fx, gy = f.components[o], g.components[o]
        values.append(tuple((xv, yv) for i, xv in enumerate(X.values[o]) for j, yv in enumerate(Y.values[o]) if fx[i] == gy[j]))
    label = f"({X.label or '?'};{Y.label or '?'})"
    apex = FinPresheaf.from_function(base, values, lambda m, e: (X.restrict(m, e[0]), Y.restrict(m, e[1])), label)
    pr1 = PresheafMorphism.from_function(apex, X, lambda _o, e: e[0])
    pr2 = PresheafMorphism.from_function(apex, Y, lambda _o, e: e[1])
    return apex, pr1, pr2


def is_set_pullback(sq: CommutativeSquare) -> tuple[bool, tuple | None]:
    """Per-object test: the map apex(Γ) -> X(Γ) ×_Z(Γ) Y(Γ) is a bijection."""
    left, top, bottom, right = sq.left, sq.top, sq.bottom, sq.right
    base = left.source.base
    for o in base.objects:
        want = {
            (i, j)
            for i, bi in enumerate(bottom.components[o])
            for j, rj in enumerate(right.components[o])
            if bi == rj
        }
        got = [(left.components[o][a], top.components[o][a]) for a in range(len(left.source.values[o]))]
        if len(set(got)) != len(got):
            return False, (base.obj_name(o), "not injective")
        if set(got) != want:
            return False, (base.obj_name(o), "not surjective")
    return True, None


# -- enumeration ----------------------------------------------------------------


def enumerate_presheaf_morphisms(
    P: FinPresheaf,
    Q: FinPresheaf,
    candidates: Callable[[int, int], Iterable[int]] | None = None,
    limit: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[PresheafMorphism]:
    """All natural families ``P -> Q`` by backtracking with propagation.

    ``candidates(x, i)`` optionally restricts the target indices allowed for the
    i-th element over x. Enumeration stops after ``limit`` results.
    """
    base = P.base
    if Q.base is not base:
        raise PresheafError("presheaves over different bases")
    # incoming morphisms per object: assigning at x forces values at dom(m) for m into x
    into: list[list[int]] = [[] for _ in base.objects]
    for m in base.morphism_ids:
        if base.dom(m) != base.cod(m) or m != base.identity(base.dom(m)):
            into[base.cod(m)].append(m)
    order = sorted(base.objects, key=lambda x: (-len(into[x]), x))
    slots = [(x, i) for x in order for i in range(len(P.values[x]))]
    allowed = {}
    for x, i in slots:
        c = list(range(len(Q.values[x]))) if candidates is None else sorted(set(candidates(x, i)))
        allowed[(x, i)] = c
    assign: dict[tuple[int, int], int] = {}
    results: list[PresheafMorphism] = []
    states = 0

    def propagate(x: int, i: int, j: int, trail: list) -> bool:
        stack = [(x, i, j)]
        while stack:
            x, i, j = stack.pop()
            cur = assign.get((x, i))
            if cur is not None:
                if cur != j:
                    return False
                continue
            if j not in allowed_set[(x, i)]:
                return False
            assign[(x, i)] = j
            trail.append((x, i))
            for m in into[x]:
                d = base.dom(m)
                stack.append((d, P.restrictions[m][i], Q.restrictions[m][j]))
        return True

    allowed_set = {k: set(v) for k, v in allowed.items()}

    def search(pos: int) -> bool:
        nonlocal states
        while pos < len(slots) and slots[pos] in assign:
            pos += 1
        if pos == len(slots):
            comps = [[assign[(x, i)] for i in range(len(P.values[x]))] for x in base.objects]
            results.append(PresheafMorphism(P, Q, comps))
            return limit is not None and len(results) >= limit
        x, i = slots[pos]
        for j in allowed[(x, i)]:
            states += 1
            if states > budget:
                raise BudgetExceeded(budget)
            trail: list = []
            if propagate(x, i, j, trail) and search(pos + 1):
                return True
            for k in trail:
                del assign[k]
        return False

    search(0)
    return results


# -- the category of presheaves -------------------------------------------------


class PresheafCategory:
    """Presheaves on a finite base as an ambient category for universe constructions.

    Objects are :class:`FinPresheaf` values and morphisms :class:`PresheafMorphism`
    values. Hom-sets are enumerated on demand and cached.
    """

    def __init__(self, base: FinCategory, budget: int = DEFAULT_BUDGET):
        self.base = base
        self.budget = budget
        self._homs: dict[tuple[FinPresheaf, FinPresheaf], tuple[PresheafMorphism, ...]] = {}

    def dom(self, f: PresheafMorphism) -> FinPresheaf:
        return f.source

    def cod(self, f: PresheafMorphism) -> FinPresheaf:
        return f.target

    def identity(self, P: FinPresheaf) -> PresheafMorphism:
        return PresheafMorphism(P, P, [tuple(range(len(v))) for v in P.values])

    def compose(self, f: PresheafMorphism, g: PresheafMorphism) -> PresheafMorphism:
        return f.then(g)

    def compose_all(self, *fs: PresheafMorphism) -> PresheafMorphism:
        out = fs[0]
        for g in fs[1:]:
            out = out.then(g)
        return out

    def hom(self, P: FinPresheaf, Q: FinPresheaf) -> tuple[PresheafMorphism, ...]:
        key = (P, Q)
        if key not in self._homs:
            self._homs[key] = tuple(enumerate_presheaf_morphisms(P, Q, budget=self.budget))
        return self._homs[key]

    def describe(self, f: PresheafMorphism) -> str:
        return f"{f.source.label or '?'}->{f.target.label or '?'}{list(map(list, f.components))}"

    def inverse(self, f: PresheafMorphism) -> PresheafMorphism | None:
        comps = []
        for x, c in enumerate(f.components):
            if sorted(c) != list(range(len(f.target.values[x]))):
                return None
            inv = [0] * len(c)
            for i, j in enumerate(c):
                inv[j] = i
            comps.append(inv)
        return PresheafMorphism(f.target, f.source, comps)

    def is_iso(self, f: PresheafMorphism) -> bool:
        return self.inverse(f) is not None

    def is_mono(self, f: PresheafMorphism) -> bool:
        return all(len(set(c)) == len(c) for c in f.components)

    def is_final(self, P: FinPresheaf) -> bool:
        return all(len(v) == 1 for v in P.values)

    def to_final(self, P: FinPresheaf) -> PresheafMorphism:
        return to_final(P)

    def commutes(self, sq: CommutativeSquare) -> bool:
        return sq.left.then(sq.bottom) == sq.top.then(sq.right)

    def mediators(self, W: FinPresheaf, apex: FinPresheaf, left, top, a, b, limit: int = 2) -> list[PresheafMorphism]:
        """Natural ``h: W -> apex`` with ``h then left = a`` and ``h then top = b``.

        Candidates are filtered pointwise first; when every element has a single
        candidate the result is built directly, otherwise the natural families
        among the candidates are enumerated (at most ``limit`` are returned).
        """
        cand = []
        unique = True
        for x in self.base.objects:
            row = []
            for w in range(len(W.values[x])):
                ok = [
                    e
                    for e in range(len(apex.values[x]))
                    if left.components[x][e] == a.components[x][w] and top.components[x][e] == b.components[x][w]
                ]
                if not ok:
                    return []
                unique = unique and len(ok) == 1
                row.append(ok)
            cand.append(row)
        if unique:
            return [PresheafMorphism(W, apex, [[r[0] for r in row] for row in cand])]
        return enumerate_presheaf_morphisms(W, apex, lambda x, i: cand[x][i], limit=limit, budget=self.budget)

    def is_pullback(self, sq: CommutativeSquare) -> PullbackResult:
        if not self.commutes(sq):
            raise PreconditionError("square of presheaf morphisms does not commute")
        holds, cex = is_set_pullback(sq)
        return PullbackResult(holds, {}, cex)


# -- JSON -------------------------------------------------------------------------


def presheaf_from_json(base: FinCategory, data: Mapping[str, Any], label: str = "") -> FinPresheaf:
    vals = data.get("values", {})
    values = []
    for o in base.objects:
        name = base.obj_name(o)
        if name not in vals:
            raise PresheafError(f"values: missing entry for object {name!r}")
        values.append(tuple(vals[name]))
    restr = data.get("restrictions", {})

    def restrict(m: int, y: Any) -> Any:
        name = base.name(m)
        if m == base.identity(base.dom(m)) and name not in restr:
            return y
        try:
            return restr[name][y]
        except KeyError:
            raise PresheafError(f"restrictions[{name!r}]: missing image of {y!r}") from None

    return FinPresheaf.from_function(base, values, restrict, label)
