from __future__ import annotations

import numpy as np
import pytest

from fullcentre import diagrams as dg
from fullcentre.algebra import _block_inverse, left_centre_idempotent, phi, predicates
from fullcentre.category import quantum_dimensions, s_matrix
from fullcentre.centre import (R_of, bimodule_conditions, build_doubled, centre_checks, d_morphism, full_centre,
                               gauge_covariance_residual, phi_R_closed_form, phi_x, q_morphism, unlinking_residual,
                               z_coalgebra, z_matrix)
from fullcentre.diagrams import compose, identity, tensor
from fullcentre.modules import (dual_bimodule, endo_bimodule, make_bimodule, regular_bimodule, simple_modules,
                                tensor_bimodules)
from fullcentre.morita import algebra_isomorphic

from conftest import ALGEBRAS, CATEGORIES, algebra, category, random_morphism

MORITA = ["mat2", "fibonacci_unit", "ising_unit", "toric_unit", "toric_1e", "toric_1m"]


def bimodules(name):
    A = algebra(name)
    return [endo_bimodule(M) for M in simple_modules(A)]


def test_trivial_double_is_unit_algebra():
    ctx = build_doubled(category("trivial"))
    assert ctx.R.obj.spectrum.tolist() == [1]
    assert ctx.R.m.vector() == pytest.approx([1.0])


def test_fibonacci_R_dimension():
    ctx = build_doubled(category("fibonacci"))
    assert ctx.R.dim == pytest.approx(s_matrix(category("fibonacci"))[1])
    assert ctx.R.dim == pytest.approx(3.618, abs=1e-3)


@pytest.mark.parametrize("name", CATEGORIES)
def test_R_axioms_and_closed_form(name):
    ctx = build_doubled(category(name))
    assert ctx.R.residuals["associativity"] < 1e-9
    assert ctx.checks["haploid"] and ctx.checks["commutative"] and ctx.checks["nondegenerate"]
    assert phi(ctx.R).dist(phi_R_closed_form(ctx)) < 1e-8
    assert unlinking_residual(ctx.C, ctx.R.m) < 1e-9


@pytest.mark.parametrize("name", CATEGORIES)
def test_m_R_is_gauge_covariant(name):
    ctx = build_doubled(category(name))
    rng = np.random.default_rng(7)
    assert max(gauge_covariance_residual(ctx, rng) for _ in range(5)) < 1e-9


def test_unit_algebra_centre_is_R():
    A = algebra("ising_unit")
    ctx = build_doubled(A.cat)
    fc = full_centre(A, ctx)
    n = A.cat.rank
    expect = np.zeros((n, n), dtype=int)
    for i in range(n):
        expect[i, A.cat.dual[i]] = 1
    assert np.array_equal(z_matrix(fc), expect)
    assert algebra_isomorphic(fc.Z, ctx.R).certified


def test_matrix_algebra_centre_is_trivial():
    fc = full_centre(algebra("mat2"))
    assert z_matrix(fc).tolist() == [[1]] and fc.Z.dim == pytest.approx(1)


def test_one_plus_e_centre():
    fc = full_centre(algebra("toric_1e"))
    z = z_matrix(fc)
    assert fc.Z.dim == pytest.approx(4.0, abs=1e-8)
    assert z[0, 0] == 1 and z.sum() == 4
    assert set(zip(*np.nonzero(z))) <= {(a, b) for a in (0, 1) for b in (0, 1)}


@pytest.mark.parametrize("name", ALGEBRAS)
def test_full_centre_properties(name):
    A = algebra(name)
    fc = full_centre(A)
    cc = centre_checks(fc)
    assert cc["haploid"] and cc["commutative"] and cc["nondegenerate"]
    assert cc["dim_Z_minus_Dim"] < 1e-8
    assert cc["Z00"] == 1 == predicates(A)["bimodule_end_dim"]
    assert cc["weighted_sum_residual"] < 1e-8
    assert cc["s_commutation"] < 1e-9
    ratio = cc["dim_ratio"]
    assert abs(ratio - round(ratio.real)) < 1e-6 and round(ratio.real) >= 1
    assert cc["split_r_e"] < 1e-10 and cc["split_e_r"] < 1e-9
    assert cc["frobenius_max_residual"] < 1e-9


def test_z_matrix_weighted_sum_uses_dimensions():
    fc = full_centre(algebra("fibonacci_unit"))
    d = quantum_dimensions(fc.ctx.C)
    assert np.einsum("ij,i,j->", z_matrix(fc), d, d) == pytest.approx(fc.Z.dim)


@pytest.mark.parametrize("name", MORITA)
def test_Q_of_regular_bimodule_is_left_centre_idempotent(name):
    A = algebra(name)
    ctx = build_doubled(A.cat)
    P = left_centre_idempotent(R_of(ctx, A))
    assert q_morphism(regular_bimodule(A), ctx).dist(P) < 1e-9
    assert d_morphism(regular_bimodule(A), ctx).dist(identity(full_centre(A, ctx).Z.obj)) < 1e-9


@pytest.mark.parametrize("name", MORITA)
def test_Q_is_multiplicative_on_tensor_products(name):
    ctx = build_doubled(algebra(name).cat)
    for X in bimodules(name):
        Xd = dual_bimodule(X)
        XX, _ = tensor_bimodules(X, Xd)
        lhs = compose(q_morphism(X, ctx), q_morphism(Xd, ctx))
        assert lhs.dist(q_morphism(XX, ctx)) < 1e-8


def regauge(X, rng):
    g = random_morphism(X.obj, X.obj, rng) + identity(X.obj) * 3
    ginv, cond = _block_inverse(g)
    assert cond < 1e4
    rho_l = compose(g, compose(X.rho_l, tensor(identity(X.A.obj), ginv)))
    rho_r = compose(g, compose(X.rho_r, tensor(ginv, identity(X.B.obj))))
    return make_bimodule(X.A, X.B, X.obj, rho_l, rho_r, X.name + "'")


@pytest.mark.parametrize("name", ["mat2", "ising_unit", "toric_1e"])
def test_Q_is_invariant_under_bimodule_isomorphism(name, rng):
    ctx = build_doubled(algebra(name).cat)
    for X in bimodules(name):
        Xp = regauge(X, rng)
        assert Xp.rho_l.dist(X.rho_l) > 1e-3 or X.obj.spectrum.max() == 1
        assert q_morphism(Xp, ctx).dist(q_morphism(X, ctx)) < 1e-9


@pytest.mark.parametrize("name", MORITA)
def test_bimodule_conditions_and_inverse_pair(name):
    for X in bimodules(name):
        res = bimodule_conditions(X).residuals
        assert res["dim_X_squared"] < 1e-8
        assert res["f2_f1"] < 1e-8 and res["f1_f2"] < 1e-8
        assert res["unit_loop_A"] < 1e-8 and res["unit_loop_B"] < 1e-8 and res["projector"] < 1e-8


@pytest.mark.parametrize("name", MORITA)
def test_phi_X_is_a_frobenius_isomorphism(name):
    ctx = build_doubled(algebra(name).cat)
    for X in bimodules(name):
        ph = phi_x(X, ctx)
        assert max(ph.residuals.values()) < 1e-8, ph.residuals
        _, cond = _block_inverse(ph.phi)
        assert cond < 1e8


def test_phi_of_regular_bimodule_is_identity():
    A = algebra("toric_1e")
    ph = phi_x(regular_bimodule(A))
    assert ph.phi.dist(identity(full_centre(A).Z.obj)) < 1e-9


def test_phi_x_raises_when_conditions_fail():
    from fullcentre.algebra import AlgebraError
    A = algebra("toric_1e")
    X = regular_bimodule(A)
    bad = make_bimodule(A, A, X.obj, X.rho_l, X.rho_r, check=False)
    bad.rho_l = X.rho_l * 2.0
    with pytest.raises(AlgebraError, match="conditions fail|violates axioms"):
        phi_x(bad)


@pytest.mark.parametrize("name", ["toric_1e", "fibonacci_unit"])
def test_z_coalgebra_counit_and_unit(name):
    fc = full_centre(algebra(name))
    D, eps = z_coalgebra(fc)
    Z = fc.Z
    assert compose(tensor(eps, identity(Z.obj)), D).dist(identity(Z.obj)) < 1e-9
    assert compose(tensor(identity(Z.obj), eps), D).dist(identity(Z.obj)) < 1e-9


def test_doubled_context_is_cached():
    C = category("ising")
    assert build_doubled(C) is build_doubled(C)
    assert dg.dim(build_doubled(C).R.obj) == pytest.approx(4)
