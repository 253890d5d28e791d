"""Small finite categories used as test beds, together with universe data for them.

Every generator returns a plain :class:`FinCategory`; the ``*_universe_json``
helpers return dictionaries in the universe JSON format understood by
:func:`csys.universe.universe_from_json`.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from typing import Any

from .fincat import CategoryError, FinCategory, category_from_function


def terminal_category() -> FinCategory:
    """One object, one (identity) morphism."""
    return FinCategory(["pt"], [("id_pt", 0, 0)], [0], {(0, 0): 0})


def indiscrete_category(n: int) -> FinCategory:
    """``n`` objects with exactly one morphism between any two; every object is final."""
    if n < 1:
        raise CategoryError("indiscrete category needs at least one object")
    names = [f"x{i}" for i in range(n)]
    mors = []
    index = {}
    for a, b in itertools.product(range(n), repeat=2):
        index[(a, b)] = len(mors)
        mors.append((f"id_{names[a]}" if a == b else f"{names[a]}->{names[b]}", a, b))
    ids = [index[(a, a)] for a in range(n)]

    def comp(f: int, g: int) -> int:
        return index[(mors[f][1], mors[g][2])]

    return category_from_function(names, mors, ids, comp)


# -- groups -------------------------------------------------------------------


def cyclic_table(n: int) -> list[list[int]]:
    if n < 1:
        raise CategoryError("group order must be positive")
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def cyclic_names(n: int) -> list[str]:
    return ["e"] + ["g" if k == 1 else f"g{k}" for k in range(1, n)]


def validate_group_table(table: Sequence[Sequence[int]]) -> int:
    """Return the index of the neutral element, or raise naming the failed group axiom."""
    n = len(table)
    if n == 0:
        raise CategoryError("empty Cayley table")
    for i, row in enumerate(table):
        if len(row) != n:
            raise CategoryError(f"Cayley table row {i} has length {len(row)}, expected {n}")
        for j, v in enumerate(row):
            if not (isinstance(v, int) and 0 <= v < n):
                raise CategoryError(f"Cayley table entry [{i}][{j}] = {v!r} is not an element index")
    neutral = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
    if not neutral:
        raise CategoryError("Cayley table has no neutral element")
    e = neutral[0]
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise CategoryError(f"Cayley table is not associative at ({a}, {b}, {c})")
    for a in range(n):
        if not any(table[a][b] == e and table[b][a] == e for b in range(n)):
            raise CategoryError(f"element {a} has no inverse")
    return e


def bg_category(
    order: int | None = None,
    table: Sequence[Sequence[int]] | None = None,
    names: Sequence[str] | None = None,
) -> FinCategory:
    """The one-object category of a finite group.

    Either a cyclic ``order`` or an explicit Cayley ``table`` (``table[a][b]`` is
    "a then b") must be given. The neutral element is placed first so that its
    index is 0.
    """
    if table is None:
        if order is None:
            raise CategoryError("bg_category needs an order or a Cayley table")
        table = cyclic_table(order)
        names = names or cyclic_names(order)
    e = validate_group_table(table)
    n = len(table)
    names = list(names) if names is not None else [f"a{i}" for i in range(n)]
    if len(names) != n:
        raise CategoryError(f"{len(names)} element names for a group of order {n}")
    # reorder so the neutral element gets index 0
    perm = [e] + [x for x in range(n) if x != e]
    pos = {x: i for i, x in enumerate(perm)}
    mors = [(names[x], 0, 0) for x in perm]
    return category_from_function(["pt"], mors, [0], lambda f, g: pos[table[perm[f]][perm[g]]])


def bg_universe_json(cat: FinCategory, p: str | None = None, tops: dict[str, str] | None = None) -> dict[str, Any]:
    """Universe data on ``p: pt -> pt`` (default the neutral element).

    ``tops`` assigns the top arrow Q(f) to each f (default: the neutral element);
    the vertical arrow is then forced to be Q(f) then p then f⁻¹.
    """
    p_idx = cat.identity(0) if p is None else cat.mor(p)
    tops = tops or {}
    squares = {}
    for f in cat.hom(0, 0):
        q = cat.mor(tops.get(cat.name(f), cat.name(cat.identity(0))))
        f_inv = cat.inverse(f)
        proj = cat.compose_all(q, p_idx, f_inv)
        squares[cat.name(f)] = {"object": "pt", "proj": cat.name(proj), "Q": cat.name(q)}
    return {"p": cat.name(p_idx), "final": "pt", "pointed": True, "squares": squares}


# -- posets -------------------------------------------------------------------


def poset_category(elements: Sequence[str], leq) -> FinCategory:
    """Thin category of a finite poset: one arrow ``a<=b`` whenever ``leq(a, b)``."""
    n = len(elements)
    for a in range(n):
        if not leq(elements[a], elements[a]):
            raise CategoryError(f"order is not reflexive at {elements[a]!r}")
    mors = []
    index = {}
    for a, b in itertools.product(range(n), repeat=2):
        if leq(elements[a], elements[b]):
            if a != b and leq(elements[b], elements[a]):
                raise CategoryError(f"order is not antisymmetric at ({elements[a]!r}, {elements[b]!r})")
            index[(a, b)] = len(mors)
            mors.append((f"id_{elements[a]}" if a == b else f"{elements[a]}<={elements[b]}", a, b))
    for (a, b), c in itertools.product(list(index), range(n)):
        if (b, c) in index and (a, c) not in index:
            raise CategoryError(f"order is not transitive at ({elements[a]!r}, {elements[b]!r}, {elements[c]!r})")
    ids = [index[(a, a)] for a in range(n)]
    return category_from_function(list(elements), mors, ids, lambda f, g: index[(mors[f][1], mors[g][2])])


def subset_name(s: frozenset[int], k: int) -> str:
    if not s:
        return "bot"
    if len(s) == k:
        return "top"
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


def boolean_lattice(k: int = 2) -> FinCategory:
    """Subsets of ``{0..k-1}`` under inclusion; ``bot`` and ``top`` name the extremes."""
    if k < 0:
        raise CategoryError("number of atoms must be non-negative")
    subsets = sorted(
        (frozenset(c) for r in range(k + 1) for c in itertools.combinations(range(k), r)),
        key=lambda s: (len(s), sorted(s)),
    )
    if k == 0:
        names = ["top"]
    else:
        names = [subset_name(s, k) for s in subsets]
    by_name = dict(zip(names, subsets))
    return poset_category(names, lambda a, b: by_name[a] <= by_name[b])


def lattice_universe_json(cat: FinCategory) -> dict[str, Any]:
    """Universe on the identity of the top element, squares chosen automatically."""
    top = cat.obj("top")
    return {"auto": True, "p": cat.name(cat.identity(top)), "final": "top"}


# -- finite sets ----------------------------------------------------------------


def function_name(images: Sequence[int], n_cod: int) -> str:
    return f"[{','.join(map(str, images))}]:{len(images)}->{n_cod}"


def finsets_skeleton(max_size: int) -> FinCategory:
    """Sets ``0..max_size`` (by cardinality) and all functions between them."""
    if max_size < 0:
        raise CategoryError("max_size must be non-negative")
    objs = [str(k) for k in range(max_size + 1)]
    mors: list[tuple[str, int, int]] = []
    images: list[tuple[int, ...]] = []
    index = {}
    for a in range(max_size + 1):
        for b in range(max_size + 1):
            for img in itertools.product(range(b), repeat=a):
                index[(a, b, img)] = len(mors)
                mors.append((function_name(img, b), a, b))
                images.append(img)
    ids = [index[(a, a, tuple(range(a)))] for a in range(max_size + 1)]

    def comp(f: int, g: int) -> int:
        img = tuple(images[g][x] for x in images[f])
        return index[(mors[f][1], mors[g][2], img)]

    cat = category_from_function(objs, mors, ids, comp)
    cat.function_images = tuple(images)
    return cat


def finsets_fiber(f_images: Sequence[int], p_images: Sequence[int]) -> list[tuple[int, int]]:
    """Set-level pullback of ``f`` along ``p`` as ordered pairs in lexicographic order."""
    return [(x, j) for x in range(len(f_images)) for j in range(len(p_images)) if f_images[x] == p_images[j]]


def finsets_universe(member_sizes: Sequence[int] = (0, 1), max_size: int | None = None) -> tuple[FinCategory, dict[str, Any]]:
    """A skeleton of finite sets with the universe of a finite family of sets.

    ``member_sizes[i]`` is the cardinality of the i-th member. The base object U
    is the index set of the family and Ũ is the set of pairs (member, element),
    with ``p`` sending a pair to its member. Canonical squares are the
    set-level pullbacks listed in lexicographic order.
    """
    sizes = list(member_sizes)
    if any(s < 0 for s in sizes):
        raise CategoryError("member sizes must be non-negative")
    n_u, n_tilde = len(sizes), sum(sizes)
    k = max(2, n_u, n_tilde) if max_size is None else max_size
    if k < max(1, n_u, n_tilde):
        raise CategoryError(f"max_size {k} is too small for U={n_u}, Ũ={n_tilde}")
    cat = finsets_skeleton(k)
    p_img = tuple(i for i, s in enumerate(sizes) for _ in range(s))
    p = cat.mor(function_name(p_img, n_u))
    squares = {}
    for x in cat.objects:
        for f in cat.hom(x, cat.obj(str(n_u))):
            pairs = finsets_fiber(cat.function_images[f], p_img)
            if len(pairs) > k:
                raise CategoryError(
                    f"pullback of {cat.name(f)} has {len(pairs)} elements; max_size {k} is not closed under pullback"
                )
            m = len(pairs)
            proj = function_name(tuple(a for a, _ in pairs), x)
            top = function_name(tuple(b for _, b in pairs), n_tilde)
            squares[cat.name(f)] = {"object": str(m), "proj": proj, "Q": top}
    return cat, {"p": cat.name(p), "final": "1", "squares": squares}
