"""Length-truncated C-systems, their axiom suites and homomorphisms.

A truncated C-system of depth N only has objects of length at most N. The
operations ``q(f, X)`` and ``s(f)`` return ``None`` when their result would
have length above N; checks skip such instances and count them.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .fincat import FinCategory
from .report import CheckError, PreconditionError, Report


class CSystemError(CheckError):
    pass


class TruncCSystem:
    """Interface for truncated C-systems; subclasses provide the primitive operations."""

    depth: int
    pt: Any
    pt_final: bool = True

    def objects(self, max_len: int | None = None) -> list[Any]:
        raise NotImplementedError

    def length(self, X: Any) -> int:
        raise NotImplementedError

    def ft(self, X: Any) -> Any:
        raise NotImplementedError

    def hom(self, X: Any, Y: Any) -> Sequence[Any]:
        raise NotImplementedError

    def dom(self, f: Any) -> Any:
        raise NotImplementedError

    def cod(self, f: Any) -> Any:
        raise NotImplementedError

    def identity(self, X: Any) -> Any:
        raise NotImplementedError

    def compose(self, f: Any, g: Any) -> Any:
        raise NotImplementedError

    def p(self, X: Any) -> Any:
        raise NotImplementedError

    def q(self, f: Any, X: Any) -> tuple[Any, Any] | None:
        """``(f*(X), q(f, X))`` for ``f: Y -> ft(X)``, or ``None`` when out of bound."""
        raise NotImplementedError

    def s(self, f: Any) -> Any | None:
        """The section ``s_f`` for ``f: Y -> X`` with ``l(X) > 0``, or ``None`` when out of bound."""
        raise NotImplementedError

    def has_sections(self) -> bool:
        return True

    def describe(self, X: Any) -> str:
        return str(X)

    def describe_mor(self, f: Any) -> str:
        return str(f)

    # derived helpers

    def fits(self, n: int) -> bool:
        return n <= self.depth

    def objects_of_length(self, n: int) -> list[Any]:
        return [X for X in self.objects(n) if self.length(X) == n]

    def morphisms(self, max_len: int | None = None) -> list[Any]:
        obs = self.objects(max_len)
        return [f for X in obs for Y in obs for f in self.hom(X, Y)]

    def compose_all(self, *fs: Any) -> Any:
        out = fs[0]
        for g in fs[1:]:
            out = self.compose(out, g)
        return out

    def fstar(self, f: Any, X: Any) -> Any | None:
        r = self.q(f, X)
        return None if r is None else r[0]

    def is_section(self, s: Any) -> bool:
        Y = self.cod(s)
        return self.length(Y) > 0 and self.compose(s, self.p(Y)) == self.identity(self.dom(s))

    def sections(self, Gamma: Any, Delta: Any) -> list[Any]:
        return [s for s in self.hom(Gamma, Delta) if self.is_section(s)]


# -- table-backed systems -------------------------------------------------------


class TableCSystem(TruncCSystem):
    """A truncated C-system given by explicit tables over integer ids."""

    def __init__(
        self,
        depth: int,
        objects: Sequence[tuple[str, int, int]],
        pt: int,
        morphisms: Sequence[tuple[str, int, int]],
        identities: Sequence[int],
        compose: Mapping[tuple[int, int], int],
        p: Mapping[int, int],
        q: Mapping[tuple[int, int], tuple[int, int]],
        s: Mapping[int, int] | None,
        pt_final: bool = True,
    ):
        self.depth = depth
        self._objects = [(str(n), int(l), int(ft)) for n, l, ft in objects]
        self.pt = pt
        self._morphisms = [(str(n), int(d), int(c)) for n, d, c in morphisms]
        self._identities = list(identities)
        self._compose = dict(compose)
        self._p = dict(p)
        self._q = dict(q)
        self._s = None if s is None else dict(s)
        self.pt_final = pt_final
        homs: dict[tuple[int, int], list[int]] = {}
        for i, (_, d, c) in enumerate(self._morphisms):
            homs.setdefault((d, c), []).append(i)
        self._homs = homs
        n_obj = len(self._objects)
        for i, (name, l, ft) in enumerate(self._objects):
            if not 0 <= ft < n_obj:
                raise CSystemError(f"object {name!r}: ft index out of range")
            if l > depth:
                raise CSystemError(f"object {name!r} has length {l} above depth {depth}")
        for i, (name, d, c) in enumerate(self._morphisms):
            if not (0 <= d < n_obj and 0 <= c < n_obj):
                raise CSystemError(f"morphism {name!r}: endpoint out of range")
        self._obj_index = {o[0]: i for i, o in enumerate(self._objects)}
        self._mor_index = {m[0]: i for i, m in enumerate(self._morphisms)}

    def objects(self, max_len: int | None = None) -> list[int]:
        bound = self.depth if max_len is None else max_len
        return sorted((i for i, o in enumerate(self._objects) if o[1] <= bound), key=lambda i: (self._objects[i][1], i))

    def length(self, X: int) -> int:
        return self._objects[X][1]

    def ft(self, X: int) -> int:
        return self._objects[X][2]

    def hom(self, X: int, Y: int) -> list[int]:
        return self._homs.get((X, Y), [])

    def dom(self, f: int) -> int:
        return self._morphisms[f][1]

    def cod(self, f: int) -> int:
        return self._morphisms[f][2]

    def identity(self, X: int) -> int:
        return self._identities[X]

    def compose(self, f: int, g: int) -> int:
        try:
            return self._compose[(f, g)]
        except KeyError:
            raise CSystemError(f"no composite recorded for ({self.describe_mor(f)}, {self.describe_mor(g)})") from None

    def p(self, X: int) -> int:
        if X == self.pt and X not in self._p:
            return self.identity(X)
        return self._p[X]

    def q(self, f: int, X: int) -> tuple[int, int] | None:
        if self.length(self.dom(f)) + 1 > self.depth:
            return None
        try:
            return self._q[(f, X)]
        except KeyError:
            raise CSystemError(f"q table has no entry for ({self.describe_mor(f)}, {self.describe(X)})") from None

    def has_sections(self) -> bool:
        return self._s is not None

    def s(self, f: int) -> int | None:
        if self._s is None:
            raise CSystemError("this system carries no section operation")
        if self.length(self.dom(f)) + 1 > self.depth:
            return None
        try:
            return self._s[f]
        except KeyError:
            raise CSystemError(f"s table has no entry for {self.describe_mor(f)}") from None

    def describe(self, X: int) -> str:
        return self._objects[X][0]

    def describe_mor(self, f: int) -> str:
        return self._morphisms[f][0]

    def obj(self, name: str) -> int:
        return self._obj_index[name]

    def mor(self, name: str) -> int:
        return self._mor_index[name]

    def corrupted(self, q: Mapping | None = None, s: Mapping | None = None, p: Mapping | None = None) -> TableCSystem:
        """A copy with some table entries overridden (used to exercise the checks)."""
        new_q = dict(self._q)
        new_q.update(q or {})
        new_s = None if self._s is None else {**self._s, **(s or {})}
        new_p = {**self._p, **(p or {})}
        return TableCSystem(
            self.depth, self._objects, self.pt, self._morphisms, self._identities,
            self._compose, new_p, new_q, new_s, self.pt_final,
        )


def materialize(cc: TruncCSystem) -> TableCSystem:
    """Tabulate every operation of ``cc`` inside its truncation."""
    obs = cc.objects()
    oid = {X: i for i, X in enumerate(obs)}
    names = []
    for X in obs:
        names.append((cc.describe(X), cc.length(X), 0))
    names = [(n, l, oid[cc.ft(X)]) for (n, l, _), X in zip(names, obs)]
    mors: list[Any] = []
    mid: dict[Any, int] = {}
    out_of: dict[int, list[int]] = {}
    for X in obs:
        for Y in obs:
            for f in cc.hom(X, Y):
                mid[f] = len(mors)
                out_of.setdefault(oid[X], []).append(len(mors))
                mors.append(f)
    labels = [cc.describe_mor(f) for f in mors]
    if len(set(labels)) != len(labels):
        labels = [f"{cc.describe(cc.dom(f))}->{cc.describe(cc.cod(f))}#{k}" for k, f in _hom_positions(cc, mors)]
    mor_rows = [(label, oid[cc.dom(f)], oid[cc.cod(f)]) for label, f in zip(labels, mors)]
    table = {}
    for i, f in enumerate(mors):
        for j in out_of.get(oid[cc.cod(f)], []):
            table[(i, j)] = mid[cc.compose(f, mors[j])]
    p_tab = {oid[X]: mid[cc.p(X)] for X in obs if cc.length(X) > 0}
    q_tab = {}
    s_tab = {} if cc.has_sections() else None
    for X in obs:
        if cc.length(X) == 0:
            continue
        for Y in obs:
            for f in cc.hom(Y, cc.ft(X)):
                r = cc.q(f, X)
                if r is not None:
                    q_tab[(mid[f], oid[X])] = (oid[r[0]], mid[r[1]])
            if s_tab is not None:
                for f in cc.hom(Y, X):
                    sf = cc.s(f)
                    if sf is not None:
                        s_tab[mid[f]] = mid[sf]
    return TableCSystem(
        cc.depth, names, oid[cc.pt], mor_rows, [mid[cc.identity(X)] for X in obs],
        table, p_tab, q_tab, s_tab, cc.pt_final,
    )


def _hom_positions(cc: TruncCSystem, mors: Sequence[Any]) -> Iterable[tuple[int, Any]]:
    pos: dict[tuple[Any, Any], int] = {}
    for f in mors:
        key = (cc.dom(f), cc.cod(f))
        k = pos.get(key, 0)
        pos[key] = k + 1
        yield k, f


def csystem_to_json(cc: TruncCSystem) -> dict[str, Any]:
    t = cc if isinstance(cc, TableCSystem) else materialize(cc)
    obj = t.describe
    mor = t.describe_mor
    out: dict[str, Any] = {
        "order": "diagrammatic",
        "depth": t.depth,
        "pt": obj(t.pt),
        "pt_final": t.pt_final,
        "objects": [{"name": n, "length": l, "ft": obj(ft)} for n, l, ft in t._objects],
        "morphisms": [{"name": n, "dom": obj(d), "cod": obj(c)} for n, d, c in t._morphisms],
        "identities": {obj(X): mor(i) for X, i in enumerate(t._identities)},
        "compose": [[mor(f), mor(g), mor(h)] for (f, g), h in sorted(t._compose.items())],
        "p": {obj(X): mor(f) for X, f in sorted(t._p.items())},
        "q": [[mor(f), obj(X), obj(Y), mor(g)] for (f, X), (Y, g) in sorted(t._q.items())],
    }
    if t._s is not None:
        out["s"] = [[mor(f), mor(g)] for f, g in sorted(t._s.items())]
    return out


def csystem_from_json(data: Mapping[str, Any]) -> TableCSystem:
    if data.get("order", "diagrammatic") != "diagrammatic":
        raise CSystemError("only diagrammatic composition order is supported")
    try:
        objs = data["objects"]
        oid = {o["name"]: i for i, o in enumerate(objs)}
        if len(oid) != len(objs):
            raise CSystemError("duplicate object names")

        def O(ref: str, where: str) -> int:
            if ref not in oid:
                raise CSystemError(f"{where}: dangling object reference {ref!r}")
            return oid[ref]

        objects = [(o["name"], o["length"], O(o["ft"], f"objects[{i}].ft")) for i, o in enumerate(objs)]
        mors = data["morphisms"]
        mid = {m["name"]: i for i, m in enumerate(mors)}
        if len(mid) != len(mors):
            raise CSystemError("duplicate morphism names")

        def M(ref: str, where: str) -> int:
            if ref not in mid:
                raise CSystemError(f"{where}: dangling morphism reference {ref!r}")
            return mid[ref]

        morphisms = [(m["name"], O(m["dom"], f"morphisms[{i}].dom"), O(m["cod"], f"morphisms[{i}].cod")) for i, m in enumerate(mors)]
        ids = data["identities"]
        identities = [M(ids[o["name"]], f"identities[{o['name']!r}]") for o in objs]
        compose = {(M(f, f"compose[{i}]"), M(g, f"compose[{i}]")): M(h, f"compose[{i}]") for i, (f, g, h) in enumerate(data["compose"])}
        p = {O(X, "p"): M(f, f"p[{X!r}]") for X, f in data.get("p", {}).items()}
        q = {(M(f, f"q[{i}]"), O(X, f"q[{i}]")): (O(Y, f"q[{i}]"), M(g, f"q[{i}]")) for i, (f, X, Y, g) in enumerate(data.get("q", []))}
        s = None
        if "s" in data:
            s = {M(f, f"s[{i}]"): M(g, f"s[{i}]") for i, (f, g) in enumerate(data["s"])}
        return TableCSystem(
            int(data["depth"]), objects, O(data["pt"], "pt"), morphisms, identities,
            compose, p, q, s, bool(data.get("pt_final", True)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CSystemError(f"malformed C-system data: {e!r}") from None


# -- axiom suites -----------------------------------------------------------------


def check_c0_axioms(cc: TruncCSystem) -> Report:
    rep = Report("C0-system axioms")
    D, M = cc.describe, cc.describe_mor
    obs = cc.objects()
    pt = cc.pt

    rep.expect(cc.length(pt) == 0, "length of pt", lambda: D(pt))
    rep.expect(cc.ft(pt) == pt, "ft(pt)=pt", lambda: D(pt))
    for X in obs:
        if X != pt:
            rep.expect(cc.length(X) > 0, "pt unique at length 0", lambda: D(X))
        if cc.length(X) > 0:
            rep.expect(cc.length(cc.ft(X)) == cc.length(X) - 1, "length of ft", lambda: D(X))
    if cc.pt_final:
        for X in obs:
            n = len(cc.hom(X, pt))
            rep.expect(n == 1, "pt final", lambda: D(X), f"{n} morphisms to pt")
    else:
        rep.skip("pt final", len(obs))
        rep.note("base object is pointed, not final: finality of pt not checked")

    for X in obs:
        if cc.length(X) == 0:
            rep.expect(cc.p(X) == cc.identity(X), "p shape", lambda: D(X), "p_pt is not the identity")
            continue
        pX = cc.p(X)
        rep.expect(cc.dom(pX) == X and cc.cod(pX) == cc.ft(X), "p shape", lambda: D(X))

    for X in obs:
        if cc.length(X) == 0:
            continue
        B = cc.ft(X)
        pX = cc.p(X)
        # unit law
        unit = cc.q(cc.identity(B), X)
        if unit is None:
            rep.skip("unit")
        else:
            rep.expect(unit[0] == X and unit[1] == cc.identity(X), "unit", lambda: D(X))
        for Y in obs:
            for f in cc.hom(Y, B):
                r = cc.q(f, X)
                inst = lambda: (M(f), D(X))
                if r is None:
                    rep.skip("f* instance")
                    continue
                fX, qf = r
                if not rep.expect(cc.length(fX) == cc.length(Y) + 1 and cc.ft(fX) == Y, "f* shape", inst):
                    continue
                if not rep.expect(cc.dom(qf) == fX and cc.cod(qf) == X, "q shape", inst):
                    continue
                rep.expect(cc.compose(qf, pX) == cc.compose(cc.p(fX), f), "q square commutes", inst)
                for Z in obs:
                    for g in cc.hom(Z, Y):
                        r2 = cc.q(g, fX)
                        r3 = cc.q(cc.compose(g, f), X)
                        if r2 is None or r3 is None:
                            rep.skip("composition")
                            continue
                        ok = r3[0] == r2[0] and r3[1] == cc.compose(r2[1], qf)
                        rep.expect(ok, "composition", lambda: (M(g), M(f), D(X)))
    return rep


def check_s_axioms(cc: TruncCSystem) -> Report:
    rep = Report("section axioms")
    if not cc.has_sections():
        rep.fail("s present", "system", "no section operation")
        return rep
    D, M = cc.describe, cc.describe_mor
    obs = cc.objects()
    for X in obs:
        if cc.length(X) == 0:
            continue
        pX = cc.p(X)
        for Y in obs:
            for f in cc.hom(Y, X):
                sf = cc.s(f)
                if sf is None:
                    rep.skip("s instance")
                    continue
                inst = lambda: M(f)
                r = cc.q(cc.compose(f, pX), X)
                if r is None:
                    rep.skip("s instance")
                    continue
                target, qq = r
                if not rep.expect(cc.dom(sf) == Y and cc.cod(sf) == target, "s shape", inst):
                    continue
                rep.expect(cc.compose(sf, cc.p(target)) == cc.identity(Y), "s section", inst)
                rep.expect(cc.compose(sf, qq) == f, "s then q = f", inst)
        # sections of pulled-back projections reproduce themselves
        B = cc.ft(X)
        for Y in obs:
            for f in cc.hom(Y, B):
                r = cc.q(f, X)
                if r is None:
                    rep.skip("s of section")
                    continue
                fX, qf = r
                for sec in cc.sections(Y, fX):
                    ss = cc.s(cc.compose(sec, qf))
                    if ss is None:
                        rep.skip("s of section")
                        continue
                    rep.expect(ss == sec, "s of section", lambda: (M(sec), M(f), D(X)))
    return rep


def check_category_laws(cc: TruncCSystem, max_len: int | None = None) -> Report:
    """Identity and associativity laws of the underlying category (exhaustive)."""
    rep = Report("category laws")
    obs = cc.objects(max_len)
    out = {X: [f for Y in obs for f in cc.hom(X, Y)] for X in obs}
    M = cc.describe_mor
    for X in obs:
        for f in out[X]:
            rep.expect(cc.compose(cc.identity(X), f) == f, "left identity", lambda: M(f))
            rep.expect(cc.compose(f, cc.identity(cc.cod(f))) == f, "right identity", lambda: M(f))
            for g in out[cc.cod(f)]:
                fg = cc.compose(f, g)
                for h in out[cc.cod(g)]:
                    rep.expect(cc.compose(fg, h) == cc.compose(f, cc.compose(g, h)), "associativity", lambda: (M(f), M(g), M(h)))
    return rep


# -- the underlying finite category ----------------------------------------------


@dataclass
class UnderlyingCategory:
    """The full subcategory of objects of length at most ``max_len`` as a FinCategory."""

    category: FinCategory
    objects: list[Any]
    morphisms: list[Any]
    obj_index: dict[Any, int]
    mor_index: dict[Any, int]

    def obj(self, X: Any) -> int:
        return self.obj_index[X]

    def mor(self, f: Any) -> int:
        return self.mor_index[f]


def underlying_category(cc: TruncCSystem, max_len: int | None = None) -> UnderlyingCategory:
    obs = cc.objects(max_len)
    oid = {X: i for i, X in enumerate(obs)}
    mors: list[Any] = []
    mid: dict[Any, int] = {}
    rows = []
    for X in obs:
        for Y in obs:
            for k, f in enumerate(cc.hom(X, Y)):
                mid[f] = len(mors)
                mors.append(f)
                rows.append((f"{cc.describe(X)}->{cc.describe(Y)}#{k}", oid[X], oid[Y]))
    out_of: dict[int, list[int]] = {}
    for i, (_, d, _) in enumerate(rows):
        out_of.setdefault(d, []).append(i)
    table = {}
    for i, (_, _, c) in enumerate(rows):
        for j in out_of.get(c, []):
            table[(i, j)] = mid[cc.compose(mors[i], mors[j])]
    cat = FinCategory([cc.describe(X) for X in obs], rows, [mid[cc.identity(X)] for X in obs], table)
    return UnderlyingCategory(cat, obs, mors, oid, mid)


# -- homomorphisms ---------------------------------------------------------------


@dataclass
class CSystemHom:
    """Object and morphism maps between two truncated C-systems, up to length ``depth``."""

    source: TruncCSystem
    target: TruncCSystem
    depth: int
    obj_map: dict = field(default_factory=dict)
    mor_map: dict = field(default_factory=dict)
    label: str = ""

    @classmethod
    def from_functions(
        cls,
        source: TruncCSystem,
        target: TruncCSystem,
        depth: int,
        on_objects: Callable[[Any], Any],
        on_morphisms: Callable[[Any], Any],
        label: str = "",
    ) -> CSystemHom:
        if depth > source.depth or depth > target.depth:
            raise PreconditionError(f"depth {depth} exceeds a depth bound ({source.depth}, {target.depth})")
        obs = source.objects(depth)
        obj_map = {X: on_objects(X) for X in obs}
        mor_map = {f: on_morphisms(f) for X in obs for Y in obs for f in source.hom(X, Y)}
        return cls(source, target, depth, obj_map, mor_map, label)

    def obj(self, X: Any) -> Any:
        return self.obj_map[X]

    def mor(self, f: Any) -> Any:
        return self.mor_map[f]


def identity_hom(cc: TruncCSystem, depth: int | None = None) -> CSystemHom:
    d = cc.depth if depth is None else depth
    return CSystemHom.from_functions(cc, cc, d, lambda X: X, lambda f: f, "identity")


def compose_homomorphisms(h1: CSystemHom, h2: CSystemHom) -> CSystemHom:
    """``h1`` then ``h2``."""
    if h1.target is not h2.source:
        raise PreconditionError("target of the first homomorphism is not the source of the second")
    d = min(h1.depth, h2.depth)
    obs = h1.source.objects(d)
    obj_map = {X: h2.obj_map[h1.obj_map[X]] for X in obs}
    mor_map = {f: h2.mor_map[h1.mor_map[f]] for f in h1.mor_map if h1.source.length(h1.source.dom(f)) <= d and h1.source.length(h1.source.cod(f)) <= d}
    return CSystemHom(h1.source, h2.target, d, obj_map, mor_map, f"{h1.label} then {h2.label}")


def _check_hom(h: CSystemHom, with_s: bool, with_eq: bool = True) -> Report:
    S, T = h.source, h.target
    rep = Report("C-system homomorphism" if with_s else "C0-system homomorphism")
    D, M = S.describe, S.describe_mor
    d = h.depth
    obs = S.objects(d)
    for X in obs:
        if X not in h.obj_map:
            rep.fail("map defined", D(X), "object not in the map")
    missing = [f for X in obs for Y in obs for f in S.hom(X, Y) if f not in h.mor_map]
    for f in missing:
        rep.fail("map defined", M(f), "morphism not in the map")
    if not rep.passed:
        return rep
    F, Fm = h.obj_map, h.mor_map

    for X in obs:
        rep.expect(T.length(F[X]) == S.length(X), "1 length", lambda: D(X))
        rep.expect(F[S.ft(X)] == T.ft(F[X]), "2 ft", lambda: D(X))
    out = {X: [f for Y in obs for f in S.hom(X, Y)] for X in obs}
    for X in obs:
        rep.expect(Fm[S.identity(X)] == T.identity(F[X]), "3 functor", lambda: ("id", D(X)))
        for f in out[X]:
            Ff = Fm[f]
            if not rep.expect(T.dom(Ff) == F[X] and T.cod(Ff) == F[S.cod(f)], "3 functor", lambda: M(f), "dom/cod"):
                continue
            for g in out[S.cod(f)]:
                if T.dom(Fm[g]) != T.cod(Ff):
                    continue  # reported when g itself is visited
                rep.expect(Fm[S.compose(f, g)] == T.compose(Ff, Fm[g]), "3 functor", lambda: (M(f), M(g)))
    for X in obs:
        if S.length(X) > 0:
            rep.expect(Fm[S.p(X)] == T.p(F[X]), "4 p", lambda: D(X))
    for X in obs:
        if S.length(X) == 0:
            continue
        for Y in obs:
            for f in S.hom(Y, S.ft(X)):
                r = S.q(f, X)
                if r is None or S.length(r[0]) > d:
                    rep.skip("5 q")
                    continue
                inst = lambda: (M(f), D(X))
                if T.length(F[X]) == 0 or T.cod(Fm[f]) != T.ft(F[X]):
                    rep.fail("5 q", inst, "image of f does not land in ft of the image of X")
                    continue
                rt = T.q(Fm[f], F[X])
                if rt is None:
                    rep.skip("5 q")
                    continue
                rep.expect(Fm[r[1]] == rt[1], "5 q", inst)
                if with_eq:
                    rep.expect(F[r[0]] == rt[0], "f* equation", inst)
    if with_s:
        rep.merge(_check_s_condition(h))
    return rep


def _check_s_condition(h: CSystemHom) -> Report:
    S, T = h.source, h.target
    rep = Report("s condition")
    d = h.depth
    obs = S.objects(d)
    for X in obs:
        if S.length(X) == 0:
            continue
        for Y in obs:
            for f in S.hom(Y, X):
                sf = S.s(f)
                if sf is None or S.length(Y) + 1 > d:
                    rep.skip("6 s")
                    continue
                if T.length(T.cod(h.mor_map[f])) == 0:
                    rep.fail("6 s", S.describe_mor(f), "image of f lands in length 0")
                    continue
                st = T.s(h.mor_map[f])
                if st is None:
                    rep.skip("6 s")
                    continue
                rep.expect(h.mor_map[sf] == st, "6 s", lambda: S.describe_mor(f))
    return rep


def check_homomorphism(h: CSystemHom) -> Report:
    return _check_hom(h, with_s=True)


def check_c0_homomorphism(h: CSystemHom) -> Report:
    return _check_hom(h, with_s=False)


def s_condition_follows(h: CSystemHom) -> bool:
    """Condition 6 for a map that already satisfies conditions 1 to 5."""
    if not check_c0_homomorphism(h).passed:
        raise PreconditionError("map does not satisfy the C0-homomorphism conditions")
    return _check_s_condition(h).passed


@dataclass
class IsoResult:
    holds: bool
    inverse: CSystemHom | None = None
    missing_objects: list[str] = field(default_factory=list)
    detail: str = ""


def check_iso_on_truncation(h: CSystemHom, d: int | None = None) -> IsoResult:
    """Bijectivity on objects of length at most ``d`` and on the morphisms between them."""
    S, T = h.source, h.target
    d = h.depth if d is None else d
    if d > h.depth or d > T.depth:
        raise PreconditionError(f"depth {d} exceeds the bounds of the homomorphism")
    s_obs = S.objects(d)
    t_obs = T.objects(d)
    images = [h.obj_map[X] for X in s_obs]
    inv_obj: dict[Any, Any] = {}
    for X, FX in zip(s_obs, images):
        if FX in inv_obj:
            return IsoResult(False, detail=f"objects {S.describe(inv_obj[FX])} and {S.describe(X)} have the same image")
        inv_obj[FX] = X
    missing = [T.describe(Y) for Y in t_obs if Y not in inv_obj]
    if missing:
        return IsoResult(False, missing_objects=missing, detail=f"{len(missing)} target objects not in the image")
    inv_mor: dict[Any, Any] = {}
    for X in s_obs:
        for Y in s_obs:
            src = S.hom(X, Y)
            imgs = [h.mor_map[f] for f in src]
            tgt = T.hom(h.obj_map[X], h.obj_map[Y])
            if len(set(imgs)) != len(imgs):
                return IsoResult(False, detail=f"not injective on Hom({S.describe(X)}, {S.describe(Y)})")
            if set(imgs) != set(tgt):
                return IsoResult(False, detail=f"not surjective onto Hom({T.describe(h.obj_map[X])}, {T.describe(h.obj_map[Y])})")
            for f, g in zip(src, imgs):
                inv_mor[g] = f
    inverse = CSystemHom(T, S, d, {Y: inv_obj[Y] for Y in t_obs}, inv_mor, f"inverse of {h.label}")
    return IsoResult(True, inverse)


def check_injective_on_truncation(h: CSystemHom, d: int | None = None) -> tuple[bool, str]:
    S = h.source
    d = h.depth if d is None else d
    obs = S.objects(d)
    imgs = [h.obj_map[X] for X in obs]
    if len(set(imgs)) != len(imgs):
        return False, "object map not injective"
    for X in obs:
        for Y in obs:
            m = [h.mor_map[f] for f in S.hom(X, Y)]
            if len(set(m)) != len(m):
                return False, f"not injective on Hom({S.describe(X)}, {S.describe(Y)})"
    return True, ""


def homs_equal(h1: CSystemHom, h2: CSystemHom) -> bool:
    return h1.source is h2.source and h1.target is h2.target and h1.obj_map == h2.obj_map and h1.mor_map == h2.mor_map


def is_identity_on_truncation(h: CSystemHom) -> bool:
    return h.source is h.target and all(k == v for k, v in h.obj_map.items()) and all(k == v for k, v in h.mor_map.items())
