"""Finite universe categories, C-systems of towers and their reconstruction."""

from __future__ import annotations

from .ccbuild import CCMorphism, CCObject, CCSystem, build_cc
from .csystem import CSystemHom, TableCSystem, TruncCSystem, check_c0_axioms, check_homomorphism, check_s_axioms
from .fincat import FinCategory, category_from_json, category_to_json
from .presheaf import FinPresheaf, PresheafCategory, PresheafMorphism
from .report import CheckError, PreconditionError, Report
from .universe import UniverseCategory, universe_from_json, verify_universe_laws

__version__ = "0.1.0"

__all__ = [
    "CCMorphism",
    "CCObject",
    "CCSystem",
    "CSystemHom",
    "CheckError",
    "FinCategory",
    "FinPresheaf",
    "PreconditionError",
    "PresheafCategory",
    "PresheafMorphism",
    "Report",
    "TableCSystem",
    "TruncCSystem",
    "UniverseCategory",
    "build_cc",
    "category_from_json",
    "category_to_json",
    "check_c0_axioms",
    "check_homomorphism",
    "check_s_axioms",
    "universe_from_json",
    "verify_universe_laws",
]
