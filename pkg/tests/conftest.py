from __future__ import annotations

import pytest

from csys.ccbuild import build_cc
from csys.generators import bg_category, bg_universe_json, boolean_lattice, finsets_universe, terminal_category
from csys.universe import build_universe_category, derive_universe_structure, universe_from_json

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def term():
    return terminal_category()


@pytest.fixture(scope="session")
def term_uc(term):
    return build_universe_category(term, derive_universe_structure(term, 0), 0, name="TERM")


@pytest.fixture(scope="session")
def bg2():
    return bg_category(2)


@pytest.fixture(scope="session")
def bg2_uc(bg2):
    return universe_from_json(bg2, bg_universe_json(bg2), "BG")


@pytest.fixture(scope="session")
def bg2_uc_alt(bg2):
    return universe_from_json(bg2, bg_universe_json(bg2, tops={"e": "g", "g": "g"}), "BG'")


@pytest.fixture(scope="session")
def b2():
    return boolean_lattice(2)


@pytest.fixture(scope="session")
def finsets():
    cat, data = finsets_universe()
    return cat, universe_from_json(cat, data, "FinSet")


@pytest.fixture(scope="session")
def cc_term4(term_uc):
    return build_cc(term_uc, 4)


@pytest.fixture(scope="session")
def cc_bg3(bg2_uc):
    return build_cc(bg2_uc, 3)


@pytest.fixture(scope="session")
def cc_bg4(bg2_uc):
    return build_cc(bg2_uc, 4)
