"""Command-line entry point: ``csys <command> ...``.

Every command that runs checks writes a JSON run report (to ``--out`` or
stdout) and exits 0 when the report has no failures, 1 when some check fails
and 2 on unreadable or inconsistent input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any

from .ccbuild import CCSystem, build_cc, canonical_squares_report, int_fully_faithful
from .csystem import (
    CSystemError,
    check_c0_axioms,
    check_category_laws,
    check_homomorphism,
    check_s_axioms,
    csystem_from_json,
    csystem_to_json,
)
from .fincat import CategoryError, category_from_json, category_to_json, functor_from_names, validate_category, validate_functor
from .generators import (
    bg_category,
    bg_universe_json,
    boolean_lattice,
    cyclic_names,
    finsets_universe,
    lattice_universe_json,
    terminal_category,
)
from .precat import (
    auto_fiber_products,
    build_equivalence,
    build_slice_universe,
    check_square_correspondence,
    fiber_products_from_json,
    final_certificate,
    slice_universe_report,
)
from .presheaf import DEFAULT_BUDGET, BudgetExceeded
from .reconstruct import reconstruct_via_presheaves, reconstruct_via_towers
from .report import CheckError, Report
from .ucfunctor import UCFunctor, classify_hom, hom_from_uc_functor, uc_functor_hypotheses, validate_uc_functor
from .universe import UniverseError, enumerate_universe_structures, universe_from_json, verify_universe_laws

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# -- input helpers ---------------------------------------------------------------


def read_json(path: str) -> tuple[Any, str]:
    """Parse a JSON file; returns the data and the sha256 of its bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    return data, hashlib.sha256(raw).hexdigest()


class Run:
    """Collects inputs, check reports and extra fields for one command."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.args = args
        self.inputs: dict[str, dict[str, str]] = {}
        self.checks: dict[str, Report] = {}
        self.results: dict[str, Any] = {}
        self.start = time.perf_counter()

    def load(self, role: str, path: str) -> Any:
        data, digest = read_json(path)
        self.inputs[role] = {"path": path, "sha256": digest}
        return data

    def category(self, role: str, path: str):
        data = self.load(role, path)
        try:
            return category_from_json(data)
        except CategoryError as e:
            raise InputError(f"{path}: {e}") from None

    def universe(self, role: str, path: str, cat, name: str = ""):
        data = self.load(role, path)
        try:
            return universe_from_json(cat, data, name)
        except (UniverseError, CategoryError) as e:
            raise InputError(f"{path}: {e}") from None

    def add(self, key: str, rep: Report) -> None:
        self.checks[key] = rep

    def failures(self) -> int:
        return sum(len(r.violations) for r in self.checks.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "depth": getattr(self.args, "depth", None),
            "checks": {k: r.to_dict() for k, r in self.checks.items()},
            "results": self.results,
            "failures": self.failures(),
            "passed": self.failures() == 0,
            "wall_time": round(time.perf_counter() - self.start, 6),
        }

    def finish(self, out: str | None) -> int:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        if out:
            Path(out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        for r in self.checks.values():
            print(r.summary(), file=sys.stderr)
        return EXIT_PASS if self.failures() == 0 else EXIT_FAIL


def write_json(path: str, data: Any) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


# -- commands --------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    kind = args.kind
    if kind == "term":
        cat = terminal_category()
        uni = {"p": cat.name(cat.identity(0)), "final": cat.obj_name(0), "auto": True}
    elif kind == "bg":
        if args.table:
            table, _ = read_json(args.table)
            if not isinstance(table, dict) or "table" not in table:
                raise InputError(f"{args.table}: expected {{'table': [[...]], 'names': [...]}}")
            cat = bg_category(table=table["table"], names=table.get("names"))
        else:
            cat = bg_category(args.order, names=cyclic_names(args.order))
        tops = json.loads(args.tops) if args.tops else None
        uni = bg_universe_json(cat, args.p, tops)
    elif kind == "finsets-skeleton":
        sizes = [int(s) for s in args.members.split(",") if s.strip()]
        cat, uni = finsets_universe(sizes, args.k)
    elif kind == "lattice":
        cat = boolean_lattice(args.k or 2)
        uni = lattice_universe_json(cat)
    else:
        raise InputError(f"unknown kind {kind!r}")
    data = category_to_json(cat)
    if args.out:
        write_json(args.out, data)
    else:
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    if args.universe:
        write_json(args.universe, uni)
    print(f"{kind}: {len(cat.object_names)} objects, {len(cat.morphisms)} morphisms", file=sys.stderr)
    return EXIT_PASS


def cmd_validate(args: argparse.Namespace) -> int:
    run = Run("validate", args)
    cat = run.category("category", args.category)
    run.add("category", validate_category(cat))
    run.results["objects"] = len(cat.object_names)
    run.results["morphisms"] = len(cat.morphisms)
    if args.universe:
        uc = run.universe("universe", args.universe, cat)
        run.add("universe laws", verify_universe_laws(uc))
        run.results["pointed"] = uc.is_pointed
    if args.enumerate:
        try:
            p = cat.mor(args.enumerate)
        except KeyError:
            raise InputError(f"--enumerate: unknown morphism {args.enumerate!r}") from None
        structures = enumerate_universe_structures(cat, p)
        run.results["universe structures"] = len(structures)
    return run.finish(args.out)


def _cc_from_args(run: Run, args: argparse.Namespace, depth: int) -> CCSystem:
    cat = run.category("category", args.category)
    uc = run.universe("universe", args.universe, cat)
    return build_cc(uc, depth)


def cmd_build(args: argparse.Namespace) -> int:
    run = Run("build", args)
    cc = _cc_from_args(run, args, args.depth)
    run.add("canonical squares", canonical_squares_report(cc))
    run.add("C0 axioms", check_c0_axioms(cc))
    run.add("s axioms", check_s_axioms(cc))
    run.results["level sizes"] = cc.level_sizes()
    write_json(args.out, csystem_to_json(cc))
    return run.finish(args.report)


def cmd_check(args: argparse.Namespace) -> int:
    run = Run("check", args)
    if args.cc:
        data = run.load("cc", args.cc)
        try:
            cc = csystem_from_json(data)
        except CSystemError as e:
            raise InputError(f"{args.cc}: {e}") from None
    else:
        if args.depth is None:
            raise InputError("--depth is required with --category/--universe")
        cc = _cc_from_args(run, args, args.depth)
        run.add("int fully faithful", int_fully_faithful(cc))
    run.add("category laws", check_category_laws(cc))
    run.add("C0 axioms", check_c0_axioms(cc))
    if cc.has_sections():
        run.add("s axioms", check_s_axioms(cc))
    run.results["level sizes"] = [len(cc.objects_of_length(n)) for n in range(cc.depth + 1)]
    return run.finish(args.out)


def cmd_functor(args: argparse.Namespace) -> int:
    run = Run("functor", args)
    sc = run.category("source category", args.source_cat)
    su = run.universe("source universe", args.source_uni, sc, "source")
    tc = run.category("target category", args.target_cat)
    tu = run.universe("target universe", args.target_uni, tc, "target")
    given = run.load("functor", args.phi)
    try:
        Phi = functor_from_names(sc, tc, given["objects"], given["morphisms"])
        phi = tc.mor(given["phi"])
        phi_t = tc.mor(given["phi_tilde"])
        psi = tc.mor(given["psi"]) if "psi" in given else None
    except (KeyError, TypeError) as e:
        raise InputError(f"{args.phi}: missing or unknown entry {e}") from None
    F = UCFunctor(su, tu, Phi, phi, phi_t, psi)
    run.add("functor", validate_functor(Phi))
    run.add("universe functor", validate_uc_functor(F))
    if not run.checks["universe functor"].passed:
        return run.finish(args.out)
    h, _ = hom_from_uc_functor(F, args.depth)
    run.add("homomorphism", check_homomorphism(h))
    cls = classify_hom(h, uc_functor_hypotheses(F))
    run.results["classification"] = cls.to_dict()
    run.results["objects"] = {h.source.describe(X): h.target.describe(Y) for X, Y in h.obj_map.items()}
    if not cls.consistent:
        rep = Report("classification")
        rep.fail("prediction", cls.kind, f"predicted {cls.predicted}")
        run.add("classification", rep)
    return run.finish(args.out)


def cmd_reconstruct(args: argparse.Namespace) -> int:
    run = Run("reconstruct", args)
    N = args.depth
    if args.cc:
        data = run.load("cc", args.cc)
        try:
            cc = csystem_from_json(data)
        except CSystemError as e:
            raise InputError(f"{args.cc}: {e}") from None
    else:
        cc = _cc_from_args(run, args, N + 2)
    method = reconstruct_via_towers if args.method == "tower" else reconstruct_via_presheaves
    res = method(cc, N, args.budget)
    for k, r in res.reports.items():
        run.add(k, r)
    cls = res.classification
    run.results["classification"] = cls.to_dict()
    run.results.update({k: v for k, v in res.extra.items()})
    run.results["target level sizes"] = res.target.level_sizes()
    if cls.kind != "isomorphism":
        rep = Report("isomorphism")
        rep.fail("isomorphism on truncation", cls.kind, cls.detail)
        run.add("isomorphism", rep)
    return run.finish(args.out)


def cmd_precat(args: argparse.Namespace) -> int:
    run = Run("precat", args)
    C = run.category("category", args.category)
    su = build_slice_universe(C)
    run.add("slice universe", slice_universe_report(su))
    run.add("square correspondence", check_square_correspondence(C, su))
    run.results["U_C sizes"] = {C.obj_name(x): len(su.U.values[x]) for x in C.objects}
    if args.fiber_products:
        fp = fiber_products_from_json(C, run.load("fiber products", args.fiber_products))
    elif args.auto_fp:
        fp = auto_fiber_products(C)
    else:
        return run.finish(args.out)
    cert = final_certificate(C, args.final)
    res = build_equivalence(C, cert, fp, args.depth, args.budget)
    for k, r in res.reports.items():
        run.add(k, r)
    run.results["CC level sizes"] = res.model.cc.level_sizes()
    run.results["fiber product apexes"] = fp.apexes()
    return run.finish(args.out)


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csys", description="Finite universe categories and C-systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated category (and universe) as JSON")
    g.add_argument("kind", choices=["term", "bg", "finsets-skeleton", "lattice"])
    g.add_argument("--out", help="category JSON path (default stdout)")
    g.add_argument("--universe", help="also write universe JSON here")
    g.add_argument("--order", type=int, default=2, help="order of the cyclic group for bg")
    g.add_argument("--table", help="JSON file with a Cayley table for bg")
    g.add_argument("--tops", help="bg: JSON object assigning Q(f) to each f")
    g.add_argument("--p", help="bg: name of the universe morphism")
    g.add_argument("--k", type=int, help="lattice rank or finite-set size bound")
    g.add_argument("--members", default="0,1", help="finsets: comma-separated member sizes")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="validate a category and optional universe")
    v.add_argument("--category", required=True)
    v.add_argument("--universe")
    v.add_argument("--enumerate", metavar="P", help="count universe structures on morphism P")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("build", help="build CC(C, p) and serialize it")
    b.add_argument("--category", required=True)
    b.add_argument("--universe", required=True)
    b.add_argument("--depth", type=int, required=True)
    b.add_argument("--out", required=True, help="C-system JSON path")
    b.add_argument("--report", help="run report path (default stdout)")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="run the axiom suites")
    c.add_argument("--cc", help="serialized C-system")
    c.add_argument("--category")
    c.add_argument("--universe")
    c.add_argument("--depth", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("functor", help="homomorphism induced by a universe functor")
    f.add_argument("--source-cat", required=True)
    f.add_argument("--source-uni", required=True)
    f.add_argument("--target-cat", required=True)
    f.add_argument("--target-uni", required=True)
    f.add_argument("--phi", required=True, help="JSON with objects, morphisms, phi, phi_tilde and optional psi")
    f.add_argument("--depth", type=int, required=True)
    f.add_argument("--out")
    f.set_defaults(func=cmd_functor)

    r = sub.add_parser("reconstruct", help="reconstruct a C-system from its presheaves")
    r.add_argument("--cc", help="serialized C-system of depth at least N+2")
    r.add_argument("--category")
    r.add_argument("--universe")
    r.add_argument("--method", choices=["presheaf", "tower"], default="presheaf")
    r.add_argument("--depth", type=int, required=True)
    r.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reconstruct)

    pc = sub.add_parser("precat", help="the universe of a finite category and the equivalence C ~ CC(C)")
    pc.add_argument("--category", required=True)
    group = pc.add_mutually_exclusive_group()
    group.add_argument("--fiber-products")
    group.add_argument("--auto-fp", action="store_true")
    pc.add_argument("--final", help="name of the final object (default: first found)")
    pc.add_argument("--depth", type=int, default=2)
    pc.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    pc.add_argument("--out")
    pc.set_defaults(func=cmd_precat)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("check", "reconstruct") and not getattr(args, "cc", None):
        if not (args.category and args.universe):
            print("error: give --cc or both --category and --universe", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f"error: {e} (budget {e.budget})", file=sys.stderr)
        return EXIT_INPUT
    except CheckError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
