from __future__ import annotations

import json

import numpy as np
import pytest

from fullcentre import diagrams as dg
from fullcentre.algebra import (AlgebraError, delta, dump_algebra, frobenius_structure, is_nondegenerate, left_centre,
                                left_centre_idempotent, load_algebra, make_algebra, phi, phi_reflected,
                                predicates, tensor_algebra, unit_algebra)
from fullcentre.diagrams import compose, identity
from fullcentre.report import fixture_dir

from conftest import ALGEBRAS, algebra, category


def test_unit_algebra_flags():
    A = unit_algebra(category("ising"))
    pr = predicates(A)
    for flag in ("commutative", "haploid", "nondegenerate", "symmetric", "special", "simple"):
        assert pr[flag], flag
    assert pr["zeta"] == pytest.approx(1) and pr["xi"] == pytest.approx(1)
    assert phi(A).vector() == pytest.approx([1.0])


def test_mat2_is_valid_with_matrix_unit_relations():
    A = algebra("mat2")
    assert A.dim == pytest.approx(4)
    m = A.m.block(0)                      # columns: E_ij (x) E_kl with index (i*2+j)*4 + (k*2+l)
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        col = m[:, (i * 2 + j) * 4 + (k * 2 + l)]
        expect = np.zeros(4)
        if j == k:
            expect[i * 2 + l] = 1
        assert np.allclose(col, expect)


def test_flipped_sign_breaks_associativity():
    doc = json.loads((fixture_dir() / "mat2.json").read_text())
    A = load_algebra(doc, category("trivial"))
    m = A.m.block(0).copy()
    m[:, 1 * 4 + 2] *= -1                 # E_01 E_10 = -E_00
    bad = dg.Morphism(A.m.dom, A.m.cod, {0: m})
    with pytest.raises(AlgebraError, match="assoc"):
        make_algebra(A.obj, bad, A.eta)


def test_mat2_phi_is_regular_trace_gram_matrix():
    # oracle: trace of left multiplication on Mat_2 itself, from the matrix-unit rule alone
    def unit(i, j):
        e = np.zeros((2, 2))
        e[i, j] = 1
        return e

    basis = [unit(i, j) for i, j in np.ndindex(2, 2)]

    def left_mult_trace(x):
        return sum(np.sum((x @ b) * b) for b in basis)

    gram = np.array([[left_mult_trace(a @ b) for b in basis] for a in basis])
    assert np.allclose(gram, 2 * np.array([[np.trace(a @ b) for b in basis] for a in basis]))
    assert np.allclose(phi(algebra("mat2")).block(0), gram)


@pytest.mark.parametrize("name", ALGEBRAS)
def test_frobenius_structure_identities(name):
    A = algebra(name)
    fd = frobenius_structure(A)
    assert fd.xi == pytest.approx(A.dim, abs=1e-9)
    for key in ("frobenius_left", "frobenius_right", "m_delta_id", "symmetry", "eps_eta_dim",
                "counit_left", "counit_right", "coassociativity"):
        assert fd.residuals[key] < 1e-9, key


@pytest.mark.parametrize("name", ALGEBRAS)
def test_phi_equals_reflected_and_two_coproducts_agree(name):
    A = algebra(name)
    assert phi_reflected(A).dist(phi(A)) < 1e-9
    assert frobenius_structure(A).residuals["delta_reflected"] < 1e-9


@pytest.mark.parametrize("name", ALGEBRAS)
def test_bundled_algebras_are_special_with_nonzero_dimension(name):
    A = algebra(name)
    pr = predicates(A)
    assert abs(A.dim) > 1e-9
    assert pr["special"] and pr["simple"] and pr["nondegenerate"]
    assert compose(A.m, delta(A)).dist(pr["zeta"] * identity(A.obj)) < 1e-9


def test_one_plus_e_flags():
    pr = predicates(algebra("toric_1e"))
    assert pr["haploid"] and pr["commutative"] and pr["simple"] and pr["nondegenerate"]
    assert pr["zeta"] == pytest.approx(1)


def test_mat2_is_simple_but_not_haploid():
    pr = predicates(algebra("mat2"))
    assert pr["haploid_dim"] == 4 and not pr["haploid"]
    assert pr["simple"] and pr["bimodule_end_dim"] == 1


def test_tensor_with_unit_is_isomorphic():
    A = algebra("toric_1e")
    T = tensor_algebra(A, unit_algebra(A.cat))
    assert np.array_equal(T.obj.spectrum, A.obj.spectrum)
    assert T.m.dist(A.m.retype(T.m.dom, T.m.cod)) < 1e-12


def test_one_plus_e_squared():
    A = algebra("toric_1e")
    T = tensor_algebra(A, A)
    assert T.dim == pytest.approx(4) and T.residuals["associativity"] < 1e-9
    assert predicates(T)["nondegenerate"]


@pytest.mark.parametrize("pair", [("fibonacci_unit", "fibonacci_unit"), ("toric_1e", "toric_1m"),
                                  ("mat2", "mat2")])
def test_non_degeneracy_is_inherited(pair):
    A, B = algebra(pair[0]), algebra(pair[1])
    assert is_nondegenerate(tensor_algebra(A, B))


def test_commutative_algebra_is_its_own_left_centre():
    A = algebra("toric_1e")
    assert left_centre_idempotent(A).dist(identity(A.obj)) < 1e-12
    assert np.array_equal(left_centre(A).algebra.obj.spectrum, A.obj.spectrum)


def test_mat2_left_centre_is_one_dimensional():
    lc = left_centre(algebra("mat2"))
    assert lc.algebra.obj.spectrum.tolist() == [1]


@pytest.mark.parametrize("name", ALGEBRAS)
def test_left_centre_is_commutative(name):
    lc = left_centre(algebra(name))
    assert lc.residuals["commutative"] < 1e-9
    assert lc.residuals["split_r_e"] < 1e-10 and lc.residuals["split_e_r"] < 1e-9


@pytest.mark.parametrize("name", ALGEBRAS)
def test_dump_then_load_round_trips(name):
    A = algebra(name)
    B = load_algebra(dump_algebra(A), A.cat)
    assert B.m.dist(A.m) == 0 and B.eta.dist(A.eta) == 0
