from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fullcentre.category import (CategoryError, CategoryFormatError, dump_category, global_dimension, load_category,
                                 modularity_residual, product_category, quantum_dimensions, reverse_braiding,
                                 s_matrix, twists, validate_axioms)
from fullcentre.report import fixture_dir

from conftest import CATEGORIES, category


def test_trivial_loads_with_one_label():
    C = category("trivial")
    assert C.rank == 1 and C.labels == ("1",)


def test_fibonacci_fusion_rule():
    C = category("fibonacci")
    assert C.labels == ("1", "tau")
    assert C.N(1, 1, 1) == 1 and C.N(1, 1, 0) == 1


def test_non_involutive_dual_rejected():
    doc = json.loads((fixture_dir() / "toric.json").read_text())
    doc["dual"].update({"e": "m", "m": "e"})
    with pytest.raises(CategoryError):
        load_category(doc)


def test_malformed_json_reports_line():
    with pytest.raises(CategoryFormatError, match="line"):
        load_category("{\n  \"labels\": [\n")


def test_unknown_label_rejected():
    doc = json.loads((fixture_dir() / "fibonacci.json").read_text())
    doc["fusion"].append(["tau", "tau", "sigma", 1])
    with pytest.raises(CategoryError):
        load_category(doc)


@pytest.mark.parametrize("name", CATEGORIES)
def test_bundled_categories_satisfy_axioms(name):
    vr = validate_axioms(category(name))
    assert all(vr.passed.values())
    assert vr.residuals["pentagon"] < 1e-10
    assert vr.residuals["hexagon"] < 1e-10 and vr.residuals["hexagon_inverse"] < 1e-10


def test_trivial_residuals_are_exactly_zero():
    vr = validate_axioms(category("trivial"))
    assert all(v == 0.0 for v in vr.residuals.values())


def test_broken_pentagon_fails_with_order_one_residual():
    C = load_category((fixture_dir() / "broken_pentagon.json").read_text())
    vr = validate_axioms(C)
    assert not vr.passed["pentagon"]
    assert vr.residuals["pentagon"] > 0.1
    assert vr.offending["pentagon"]


@pytest.mark.parametrize("name,label", [("fibonacci", "tau"), ("ising", "sigma")])
def test_dimension_is_perron_eigenvalue(name, label):
    C = category(name)
    k = C.label(label)
    Nk = C.fusion[k].astype(float)           # (N_k)_{b,c} = N_{k b}^c
    perron = max(abs(np.linalg.eigvals(Nk)))
    assert quantum_dimensions(C)[k] == pytest.approx(perron, abs=1e-10)


@pytest.mark.parametrize("name", CATEGORIES)
def test_dimensions_invariant_under_duality(name):
    C = category(name)
    d = quantum_dimensions(C)
    assert d[0] == pytest.approx(1.0)
    assert np.allclose(d, d[list(C.dual)])
    assert abs(global_dimension(C)) >= 1 - 1e-12


@pytest.mark.parametrize("name", CATEGORIES)
def test_s_matrix_first_row_and_modularity(name):
    C = category(name)
    s, Dim = s_matrix(C)
    assert np.allclose(s, s.T)
    assert np.allclose(s[0], quantum_dimensions(C))
    assert modularity_residual(C) < 1e-8
    assert Dim == pytest.approx(np.sum(np.abs(quantum_dimensions(C)) ** 2))


def test_trivial_s_matrix():
    s, Dim = s_matrix(category("trivial"))
    assert s.shape == (1, 1) and s[0, 0] == pytest.approx(1) and Dim == pytest.approx(1)


def test_toric_global_dimension():
    assert s_matrix(category("toric"))[1] == pytest.approx(4.0, abs=1e-10)


def test_toric_twists():
    th = twists(category("toric"))
    assert np.allclose(th, [1, 1, 1, -1])


def test_ising_sigma_twist():
    th = twists(category("ising"))
    assert th[1] == pytest.approx(np.exp(1j * np.pi / 8))
    assert twists(reverse_braiding(category("ising")))[1] == pytest.approx(np.exp(-1j * np.pi / 8))


@pytest.mark.parametrize("name", CATEGORIES)
def test_reverse_is_an_involution_and_conjugates_s(name):
    C = category(name)
    R2 = reverse_braiding(reverse_braiding(C))
    for key, mat in C.rblocks.items():
        assert np.max(np.abs(R2.rblocks[key] - mat)) < 1e-12
    assert validate_axioms(reverse_braiding(C)).passed["hexagon"]
    assert np.allclose(s_matrix(reverse_braiding(C))[0], s_matrix(C)[0].conj())


def test_product_of_trivial_is_trivial():
    P = product_category(category("trivial"), category("trivial"))
    assert P.rank == 1 and s_matrix(P)[1] == pytest.approx(1)


def test_fibonacci_double_dimension():
    C = category("fibonacci")
    P = product_category(C, reverse_braiding(C))
    assert s_matrix(P)[1] == pytest.approx(((5 + math.sqrt(5)) / 2) ** 2, abs=1e-9)
    assert s_matrix(P)[1] == pytest.approx(13.0902, abs=1e-4)


def test_ising_double_has_nine_simples_and_passes_axioms():
    C = category("ising")
    P = product_category(C, reverse_braiding(C))
    assert P.rank == 9
    assert all(validate_axioms(P).passed.values())


@pytest.mark.parametrize("name", CATEGORIES)
def test_dump_then_load_round_trips(name):
    C = category(name)
    C2 = load_category(dump_category(C))
    assert C2.labels == C.labels and np.array_equal(C2.fusion, C.fusion)
    for key, mat in C.rblocks.items():
        assert np.allclose(C2.rblocks[key], mat)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(CATEGORIES), st.sampled_from(CATEGORIES))
def test_product_dimensions_multiply(a, b):
    P = product_category(category(a), category(b))
    assert s_matrix(P)[1] == pytest.approx(s_matrix(category(a))[1] * s_matrix(category(b))[1])
