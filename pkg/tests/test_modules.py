from __future__ import annotations

import json

import numpy as np
import pytest

from fullcentre import diagrams as dg
from fullcentre.algebra import predicates
from fullcentre.diagrams import compose, identity, tensor
from fullcentre.category import quantum_dimensions
from fullcentre.modules import (ModuleError, _invertible_combination, bimodule_homs, dual_bimodule, dual_right_module,
                                endo_algebra, endo_bimodule, induced_module, is_isomorphic_module, load_module,
                                make_bimodule, make_module, module_homs, regular_bimodule, regular_module,
                                simple_modules, tensor_bimodules, tensor_over)
from fullcentre.morita import algebra_isomorphic
from fullcentre.report import fixture_dir

from conftest import ALGEBRAS, algebra

SMALL = ["vect_unit", "mat2", "fibonacci_unit", "ising_unit", "toric_unit", "toric_1e", "toric_1m"]


def test_regular_and_induced_modules_are_valid():
    A = algebra("toric_1e")
    assert max(regular_module(A).residuals.values()) < 1e-12
    for i in range(A.cat.rank):
        M = induced_module(A, dg.simple(A.cat, i))
        assert max(M.residuals.values()) < 1e-12


def test_non_commuting_actions_rejected():
    # Mat_2 acting on itself by a x on the left and by b^T x on the right
    A = algebra("mat2")
    X = A.obj
    perm = np.zeros((4, 4))
    for i, j in np.ndindex(2, 2):
        perm[j * 2 + i, i * 2 + j] = 1
    T = dg.Morphism(X, X, {0: perm.astype(complex)})
    rho_r = compose(A.m, compose(tensor(T, identity(X)), dg.braiding(X, X)))
    assert make_module(A, X, rho_r, "right").residuals["right_representation"] < 1e-12
    with pytest.raises(ModuleError, match="commuting_actions"):
        make_bimodule(A, A, X, A.m, rho_r)


def test_free_module_tensor():
    A = algebra("toric_1e")
    N = simple_modules(A)[1]
    t = tensor_over(regular_module(A, "right"), N)
    assert np.array_equal(t.obj.spectrum, N.obj.spectrum)


def test_column_module_tensor_is_one_dimensional():
    A = algebra("mat2")
    M = load_module(json.loads((fixture_dir() / "c2_module.json").read_text()), A)
    t = tensor_over(dual_right_module(M), M)
    assert t.obj.spectrum.tolist() == [1]


def test_dual_of_regular_tensor_regular():
    A = algebra("toric_1e")
    t = tensor_over(dual_right_module(regular_module(A)), regular_module(A))
    assert dg.dim(t.obj) == pytest.approx(2)


@pytest.mark.parametrize("name", SMALL)
def test_tensor_idempotent_splits(name):
    A = algebra(name)
    Ms = simple_modules(A)
    for M in Ms:
        for N in Ms:
            res = tensor_over(dual_right_module(M), N).residuals
            assert max(res.values()) < 1e-9


def test_double_dual_is_isomorphic():
    A = algebra("fibonacci_unit")
    X = endo_bimodule(simple_modules(A)[1])
    XX = dual_bimodule(dual_bimodule(X))
    homs = bimodule_homs(XX, X)
    f, cond = _invertible_combination(homs, np.random.default_rng(0))
    assert len(homs) == 1 and cond < 1e8


@pytest.mark.parametrize("name", SMALL)
def test_dual_of_simple_is_simple(name):
    for M in simple_modules(algebra(name)):
        Md = dual_right_module(M)
        assert len(module_homs(Md, Md)) == 1


@pytest.mark.parametrize("name,count", [("vect_unit", 1), ("fibonacci_unit", 2), ("ising_unit", 3),
                                        ("toric_unit", 4), ("toric_1e", 2), ("toric_1m", 2), ("mat2", 1)])
def test_simple_module_counts(name, count):
    assert len(simple_modules(algebra(name))) == count


@pytest.mark.parametrize("name", SMALL)
def test_simple_modules_are_distinct_and_exhaust_induced(name):
    A = algebra(name)
    Ms = simple_modules(A)
    for a, M in enumerate(Ms):
        assert abs(M.dim) > 1e-9
        for b, N in enumerate(Ms):
            assert len(module_homs(M, N)) == (a == b)
            if a != b:
                assert not is_isomorphic_module(M, N)[0]
    for i in range(A.cat.rank):
        ind = induced_module(A, dg.simple(A.cat, i))
        mults = [len(module_homs(ind, M)) for M in Ms]
        assert sum(m * M.dim for m, M in zip(mults, Ms)) == pytest.approx(ind.dim)
        # Frobenius reciprocity
        assert mults == [int(M.obj.spectrum[i]) for M in Ms]


def test_endo_of_column_over_unit_is_mat2():
    A = algebra("vect_unit")
    X = dg.atom(A.cat, {0: 2})
    M = make_module(A, X, identity(X).retype(A.obj + X, X))
    E = endo_algebra(M).algebra
    assert E.obj.spectrum.tolist() == [4]
    assert algebra_isomorphic(E, algebra("mat2")).certified


@pytest.mark.parametrize("name", SMALL)
def test_endo_algebras_are_haploid_with_expected_dimension(name):
    A = algebra(name)
    for M in simple_modules(A):
        E = endo_algebra(M).algebra
        pr = predicates(E)
        assert pr["haploid"] and pr["nondegenerate"] and pr["simple"]
        assert E.dim == pytest.approx(M.dim ** 2 / A.dim, abs=1e-9)


@pytest.mark.parametrize("name", ["fibonacci_unit", "ising_unit", "toric_1e", "mat2"])
def test_morita_partner_is_the_dual(name):
    A = algebra(name)
    rng = np.random.default_rng(0)
    for M in simple_modules(A):
        X = endo_bimodule(M)
        Xd = dual_bimodule(X)
        assert len(bimodule_homs(X, X)) == 1
        XX, _ = tensor_bimodules(X, Xd)
        homs = bimodule_homs(XX, regular_bimodule(A))
        f, cond = _invertible_combination(homs, rng)
        assert len(homs) == 1 and cond < 1e8


@pytest.mark.parametrize("name", ["semion_unit", "fibonacci_unit", "ising_unit"])
def test_unit_algebra_module_dimensions_are_quantum_dimensions(name):
    A = algebra(name)
    dims = sorted(M.dim.real for M in simple_modules(A))
    assert dims == pytest.approx(sorted(quantum_dimensions(A.cat).real))


@pytest.mark.parametrize("name", ALGEBRAS)
def test_module_fixture_and_regular_bimodule_axioms(name):
    X = regular_bimodule(algebra(name))
    assert max(X.residuals.values()) < 1e-9
