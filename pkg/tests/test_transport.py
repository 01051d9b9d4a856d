from __future__ import annotations

import numpy as np
import pytest

from fullcentre import diagrams as dg
from fullcentre.algebra import AlgebraError, predicates
from fullcentre.category import quantum_dimensions, s_matrix
from fullcentre.centre import build_doubled, full_centre, z_matrix
from fullcentre.diagrams import compose
from fullcentre.modules import simple_modules
from fullcentre.transport import (ca_data, ca_ta_iso, iota_maps, killing_ring_residual, local_basis,
                                  local_idempotent, module_loop_residual, sa_matrices, t_algebra, t_functor,
                                  t_functor_residuals)

from conftest import ALGEBRAS, CATEGORIES, algebra, category

UNIT = ["vect_unit", "semion_unit", "fibonacci_unit", "ising_unit", "toric_unit"]
HAPLOID = [a for a in ALGEBRAS if a not in ("mat2", "mat3")]
GOLDEN = (1 + 5 ** 0.5) / 2


def fusion_spectrum(C):
    """Object spectrum of ``(+)_i U_i (x) U_i^v`` counted from the fusion rules."""
    return np.einsum("im->m", C.fusion[np.arange(C.rank), C.dual]).astype(int)


@pytest.mark.parametrize("name", CATEGORIES)
def test_T_of_R_matches_fusion_rules(name):
    C = category(name)
    ctx = build_doubled(C)
    TR = t_algebra(ctx.R, t_functor(ctx))
    assert TR.obj.spectrum.tolist() == fusion_spectrum(C).tolist()
    assert dg.dim(TR.obj) == pytest.approx(sum(d * d for d in quantum_dimensions(C)))


def test_T_of_R_for_fibonacci_is_not_commutative():
    ctx = build_doubled(category("fibonacci"))
    TR = t_algebra(ctx.R, t_functor(ctx))
    assert TR.obj.spectrum.tolist() == [2, 1]
    pr = predicates(TR)
    assert not pr["commutative"] and pr["nondegenerate"]


def test_T_of_unit_is_unit():
    ctx = build_doubled(category("ising"))
    T = t_functor(ctx)
    one = dg.unit(ctx.P)
    assert T.obj(one).spectrum.tolist() == dg.unit(ctx.C).spectrum.tolist()
    assert T.phi0().vector() == pytest.approx(dg.identity(dg.unit(ctx.C)).vector())


@pytest.mark.parametrize("name", CATEGORIES)
def test_T_is_a_tensor_functor(name):
    res = t_functor_residuals(build_doubled(category(name)), seed=3)
    assert max(res.values()) < 1e-10, res


def test_C_A_for_ising_unit_has_dimension_four():
    A = algebra("ising_unit")
    cd = ca_data(A)
    assert cd.CA.dim == pytest.approx(4.0)
    assert max(cd.residuals.values()) < 1e-10


@pytest.mark.parametrize("name", UNIT)
def test_local_basis_of_unit_algebra_is_everything(name):
    lb = local_basis(algebra(name))
    assert all(v == 1 for v in lb.n_loc.values())
    assert max(lb.residuals.values()) < 1e-10


@pytest.mark.parametrize("name", ALGEBRAS)
def test_local_count_matches_number_of_simple_modules(name):
    A = algebra(name)
    lb = local_basis(A)
    assert sum(lb.n_loc.values()) == len(simple_modules(A))
    assert max(lb.residuals.values()) < 1e-10


@pytest.mark.parametrize("name", ALGEBRAS)
def test_local_count_matches_centre_multiplicities(name):
    A = algebra(name)
    z = z_matrix(full_centre(A))
    n_loc = local_basis(A).n_loc
    assert [n_loc[i] for i in range(A.cat.rank)] == [int(z[i, A.cat.dual[i]]) for i in range(A.cat.rank)]


def test_one_plus_e_local_morphisms_sit_on_condensed_channels():
    A = algebra("toric_1e")
    lb = local_basis(A)
    assert lb.n_loc == {0: 1, 1: 1, 2: 0, 3: 0}


@pytest.mark.parametrize("name", ["toric_1e", "fibonacci_unit", "mat2"])
def test_local_idempotent_is_idempotent(name):
    A = algebra(name)
    for i in range(A.cat.rank):
        P = local_idempotent(A, dg.simple(A.cat, i))
        assert compose(P, P).dist(P) < 1e-10


@pytest.mark.parametrize("name", ALGEBRAS)
def test_sa_matrices_are_square_and_biorthogonal(name):
    A = algebra(name)
    sa = sa_matrices(A)
    Dim = s_matrix(A.cat)[1]
    assert sa.s.shape[0] == sa.s.shape[1]
    assert max(sa.residuals.values()) < 1e-9, sa.residuals
    assert np.allclose(sa.s @ sa.s_tilde, Dim * np.eye(len(sa.index)), atol=1e-9)
    dims = np.array([M.dim for M in sa.modules]) / A.dim
    assert np.allclose(sa.s[:, 0], dims, atol=1e-9)


def test_fibonacci_sA_of_unit_is_modular_s():
    sa = sa_matrices(algebra("fibonacci_unit"))
    assert np.allclose(sa.s, [[1, GOLDEN], [GOLDEN, -1]], atol=1e-12)


@pytest.mark.parametrize("name", UNIT)
def test_sA_of_unit_agrees_with_s(name):
    A = algebra(name)
    s, _ = s_matrix(A.cat)
    sa = sa_matrices(A)
    assert np.allclose(sa.s, s, atol=1e-9) or np.allclose(sa.s, s.conj(), atol=1e-9)


@pytest.mark.parametrize("name", ALGEBRAS)
def test_module_loop_and_killing_ring(name):
    A = algebra(name)
    assert max(module_loop_residual(A).values()) < 1e-9
    assert max(killing_ring_residual(A).values()) < 1e-9


@pytest.mark.parametrize("name", ALGEBRAS)
def test_C_A_is_isomorphic_to_T_A(name):
    iso = ca_ta_iso(algebra(name), tol=1e-8)
    assert max(iso.residuals.values()) < 1e-8
    assert iso.CA.obj.spectrum.tolist() == iso.TA.obj.spectrum.tolist()


@pytest.mark.parametrize("name", HAPLOID)
def test_iota_recovers_A(name):
    A = algebra(name)
    im = iota_maps(A)
    assert max(im.residuals.values()) < 1e-9, im.residuals


def test_iota_requires_haploid():
    with pytest.raises(AlgebraError, match="not haploid"):
        iota_maps(algebra("mat2"))
