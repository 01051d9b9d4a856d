from __future__ import annotations

import functools

import numpy as np
import pytest

from fullcentre import diagrams as dg
from fullcentre.diagrams import Morphism
from fullcentre.report import load_algebra_file, load_category_file

CATEGORIES = ["trivial", "semion", "fibonacci", "ising", "toric"]
# simple non-degenerate algebras shipped as fixtures, keyed by file stem
ALGEBRAS = ["vect_unit", "mat2", "mat3", "semion_unit", "fibonacci_unit", "ising_unit",
            "toric_unit", "toric_1e", "toric_1m"]


@functools.lru_cache(maxsize=None)
def category(name: str):
    return load_category_file(f"{name}.json")[0]


@functools.lru_cache(maxsize=None)
def algebra(name: str):
    A, C, _ = load_algebra_file(f"{name}.json")
    # share one category object per file so doubled contexts are reused
    cat_name = C.name
    shared = category(cat_name)
    if shared is not C:
        A, _, _ = load_algebra_file(f"{name}.json", shared)
    return A


def random_morphism(X, Y, rng: np.random.Generator) -> Morphism:
    n = len(dg.hom_basis(X, Y))
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return Morphism.from_vector(X, Y, vec)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
