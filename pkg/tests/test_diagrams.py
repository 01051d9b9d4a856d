from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fullcentre import diagrams as dg
from fullcentre.algebra import left_centre_idempotent
from fullcentre.category import quantum_dimensions, s_matrix
from fullcentre.centre import R_of, build_doubled
from fullcentre.diagrams import IdempotentError, compose, compose_all, identity, tensor, tensor_all

from conftest import CATEGORIES, algebra, category, random_morphism


def objects(C):
    """A few small words: simples, a sum, and a two-letter word."""
    n = C.rank
    out = [dg.simple(C, k) for k in range(n)]
    out.append(dg.atom(C, {k: 1 for k in range(n)}))
    out.append(dg.simple(C, n - 1) + dg.simple(C, n - 1))
    return out


def test_simple_spectrum_basis_is_identity():
    C = category("ising")
    us, vs = dg.spectrum_basis(dg.simple(C, 1))[1]
    assert len(us) == 1 and us[0].dist(identity(dg.simple(C, 1))) == 0


def test_tau_tau_spectrum():
    C = category("fibonacci")
    t = dg.simple(C, "tau")
    assert (t + t).spectrum.tolist() == [1, 1]


def test_sigma_cubed_spectrum():
    C = category("ising")
    s = dg.simple(C, "sigma")
    assert (s + s + s).spectrum.tolist() == [0, 2, 0]


@pytest.mark.parametrize("name", CATEGORIES)
def test_spectrum_basis_resolves_identity(name):
    C = category(name)
    for X in objects(C):
        total = None
        for k, (us, vs) in dg.spectrum_basis(X).items():
            for u, v in zip(us, vs):
                t = compose(u, v)
                total = t if total is None else total + t
                assert compose(v, u).dist(identity(dg.simple(C, k))) < 1e-10
        assert total.dist(identity(X)) < 1e-10


@pytest.mark.parametrize("name", ["ising", "fibonacci", "toric"])
def test_interchange_law(name, rng):
    C = category(name)
    X, Y = objects(C)[1], objects(C)[-1]
    f, f2 = random_morphism(X, X, rng), random_morphism(X, X, rng)
    g, g2 = random_morphism(Y, Y, rng), random_morphism(Y, Y, rng)
    lhs = compose(tensor(f, g), tensor(f2, g2))
    assert lhs.dist(tensor(compose(f, f2), compose(g, g2))) < 1e-10 * max(1, lhs.norm())


def test_identity_laws(rng):
    C = category("ising")
    X, Y = objects(C)[3], objects(C)[4]
    f = random_morphism(X, Y, rng)
    assert compose(identity(Y), f).dist(f) == 0
    assert tensor(identity(X), identity(Y)).dist(identity(X + Y)) < 1e-12


def test_compose_rejects_mismatch():
    C = category("ising")
    with pytest.raises(ValueError):
        compose(identity(dg.simple(C, 1)), identity(dg.simple(C, 2)))


@pytest.mark.parametrize("name", CATEGORIES)
def test_unit_braiding_is_trivial(name):
    C = category(name)
    for X in objects(C):
        assert dg.braiding(dg.unit(C), X).vector() == pytest.approx(identity(X).vector())


@pytest.mark.parametrize("name", ["fibonacci", "ising", "semion"])
def test_hexagon_on_words(name):
    C = category(name)
    X, Y, Z = (dg.simple(C, C.rank - 1), objects(C)[1], dg.simple(C, 1))
    lhs = dg.braiding(X, Y + Z)
    rhs = compose(tensor(identity(Y), dg.braiding(X, Z)), tensor(dg.braiding(X, Y), identity(Z)))
    assert lhs.dist(rhs) < 1e-9
    assert compose(dg.braiding_inv(X, Y), dg.braiding(X, Y)).dist(identity(X + Y)) < 1e-10


@pytest.mark.parametrize("name", ["ising", "toric"])
def test_braiding_is_natural(name, rng):
    C = category(name)
    X, Y = objects(C)[-2], objects(C)[-1]
    f, g = random_morphism(X, X, rng), random_morphism(Y, Y, rng)
    lhs = compose(dg.braiding(X, Y), tensor(f, g))
    assert lhs.dist(compose(tensor(g, f), dg.braiding(X, Y))) < 1e-9 * max(1, lhs.norm())


@pytest.mark.parametrize("name", CATEGORIES)
def test_double_braiding_trace_is_s(name):
    C = category(name)
    s = s_matrix(C)[0]
    for i in range(C.rank):
        for j in range(C.rank):
            Ui, Uj = dg.simple(C, i), dg.simple(C, j)
            assert dg.trace(compose(dg.braiding(Uj, Ui), dg.braiding(Ui, Uj))) == pytest.approx(s[i, j], abs=1e-10)


@pytest.mark.parametrize("name", CATEGORIES)
def test_zigzag_identities(name):
    C = category(name)
    for X in objects(C):
        Xd = dg.dual(X)
        z1 = compose(tensor(identity(X), dg.ev(X)), tensor(dg.coev(X), identity(X)))
        z2 = compose(tensor(dg.ev_tilde(X), identity(X)), tensor(identity(X), dg.coev_tilde(X)))
        z3 = compose(tensor(dg.ev(X), identity(Xd)), tensor(identity(Xd), dg.coev(X)))
        z4 = compose(tensor(identity(Xd), dg.ev_tilde(X)), tensor(dg.coev_tilde(X), identity(Xd)))
        for z, target in ((z1, X), (z2, X), (z3, Xd), (z4, Xd)):
            assert z.dist(identity(target)) < 1e-10


def test_unit_duality_maps_are_trivial():
    C = category("ising")
    one = dg.unit(C)
    for m in (dg.ev(one), dg.coev(one), dg.ev_tilde(one), dg.coev_tilde(one)):
        assert m.vector() == pytest.approx([1.0])


def test_loop_dimension_of_tau_plus_one():
    C = category("fibonacci")
    X = dg.atom(C, {0: 1, 1: 1})
    loop = compose(dg.ev(X), dg.coev_tilde(X)).scalar()
    assert loop == pytest.approx(1 + quantum_dimensions(C)[1])
    assert loop == pytest.approx(2.618, abs=1e-3)


@pytest.mark.parametrize("name", CATEGORIES)
def test_left_and_right_traces_agree(name, rng):
    C = category(name)
    for X in objects(C):
        f = random_morphism(X, X, rng)
        assert dg.trace_l(f) == pytest.approx(dg.trace_r(f), abs=1e-9)
    assert dg.trace(identity(dg.unit(C))) == pytest.approx(1)


def test_dimension_of_one_plus_e():
    assert dg.dim(algebra("toric_1e").obj) == pytest.approx(2.0)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["fibonacci", "ising", "toric"]), st.integers(0, 2**32 - 1))
def test_trace_is_cyclic(name, seed):
    rng = np.random.default_rng(seed)
    C = category(name)
    X, Y = objects(C)[-2], objects(C)[-1]
    f, g = random_morphism(X, Y, rng), random_morphism(Y, X, rng)
    a, b = dg.trace_l(compose(g, f)), dg.trace_l(compose(f, g))
    assert abs(a - b) < 1e-9 * max(1, abs(a))


def test_split_identity_and_zero():
    C = category("ising")
    X = objects(C)[3]
    Im, e, r = dg.split_idempotent(identity(X))
    assert np.array_equal(Im.spectrum, X.spectrum)
    assert compose(r, e).dist(identity(Im)) < 1e-12
    Im0, _, _ = dg.split_idempotent(dg.zero(X, X))
    assert Im0.is_zero


def test_split_rejects_non_idempotent():
    C = category("ising")
    X = objects(C)[3]
    with pytest.raises(IdempotentError):
        dg.split_idempotent(identity(X) * 0.5)


def test_split_of_left_centre_idempotent_of_R():
    A = algebra("ising_unit")
    ctx = build_doubled(A.cat)
    RA = R_of(ctx, A)
    p = left_centre_idempotent(RA)
    Im, e, r = dg.split_idempotent(p)
    n = A.cat.rank
    expected = np.zeros(n * n, dtype=int)
    for i in range(n):
        expected[i * n + A.cat.dual[i]] = 1
    assert np.array_equal(Im.spectrum, expected)
    assert compose(e, r).dist(p) < 1e-9
    assert compose(r, e).dist(identity(Im)) < 1e-10


@pytest.mark.parametrize("name", ["ising", "fibonacci"])
def test_dual_of_morphism_is_contravariant(name, rng):
    C = category(name)
    X = objects(C)[3]
    f, g = random_morphism(X, X, rng), random_morphism(X, X, rng)
    lhs = dg.dual_mor(compose(g, f))
    assert lhs.dist(compose(dg.dual_mor(f), dg.dual_mor(g))) < 1e-9 * max(1, lhs.norm())


def test_tensor_all_and_compose_all_match_pairwise(rng):
    C = category("toric")
    X = objects(C)[-1]
    f, g, h = (random_morphism(X, X, rng) for _ in range(3))
    assert tensor_all(f, g, h).dist(tensor(tensor(f, g), h)) < 1e-12
    assert compose_all(f, g, h).dist(compose(f, compose(g, h))) < 1e-12
