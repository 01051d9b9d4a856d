"""The tensor functor ``T : C x C~ -> C`` and the comparison of ``T(Z(A))`` with ``(+)_kappa M_kappa^v (x)_A M_kappa``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import diagrams as dg
from .algebra import (Algebra, AlgebraError, _block_inverse, counit, delta_eta, make_algebra,
                      predicates)
from .category import quantum_dimensions, s_matrix
from .centre import DoubledContext, FullCentre, build_doubled, full_centre, lift_obj
from .diagrams import Morphism, Obj, compose, compose_all, identity, tensor, tensor_all
from .modules import Module, coaction, endo_algebra, simple_modules

__all__ = ["TFunctor", "t_functor", "t_algebra", "CATA", "ca_ta_iso", "LocalBasis", "local_basis",
           "local_idempotent", "SAMatrices", "sa_matrices", "iota_maps", "module_loop_residual",
           "killing_ring_residual", "direct_sum_algebra", "ca_data", "CAData", "IotaMaps",
           "t_a_algebra", "t_functor_residuals"]


def _cr(U: Obj, V: Obj, s: int) -> Morphism:
    """``U (x) V -> V (x) U``: the braiding for ``s > 0``, the inverse braiding otherwise."""
    return dg.braiding(U, V) if s > 0 else dg.braiding_inv(V, U)


# --------------------------------------------------------------------------- the functor T

class TFunctor:
    """``T(U x V) = U (x) V`` on objects and morphisms of the doubled category, with ``phi_0``, ``phi_2``.

    ``T(X)`` is a single atom of ``C``.  Its copies of ``U_m`` are ordered by
    the label ``(k, l)`` of the doubled category, then by the copy of
    ``U_k x U_l`` in ``X``, then by the channel ``U_k (x) U_l -> U_m``.
    """

    def __init__(self, ctx: DoubledContext):
        self.ctx = ctx
        self.C = ctx.C
        self.P = ctx.P
        self._simple_phi2: dict = {}
        self._layout: dict = {}

    def _lay(self, X: Obj):
        hit = self._layout.get(X)
        if hit is not None:
            return hit
        n, N = self.C.rank, self.C.fusion
        offs = [dict() for _ in range(n)]
        spec = np.zeros(n, dtype=int)
        for q in range(n * n):
            d = X.dim_k(q)
            if not d:
                continue
            k, l = divmod(q, n)
            for m in range(n):
                if N[k, l, m]:
                    offs[m][q] = spec[m]
                    spec[m] += d * N[k, l, m]
        out = (Obj(self.C, [spec]), offs)
        self._layout[X] = out
        return out

    def obj(self, X: Obj) -> Obj:
        return self._lay(X)[0]

    def mor(self, f: Morphism) -> Morphism:
        n, N = self.C.rank, self.C.fusion
        TX, ox = self._lay(f.dom)
        TY, oy = self._lay(f.cod)
        blocks = {}
        for m in range(n):
            if not TX.dim_k(m) or not TY.dim_k(m):
                continue
            b = np.zeros((TY.dim_k(m), TX.dim_k(m)), dtype=complex)
            for q, fq in f.blocks.items():
                if q not in ox[m] or q not in oy[m]:
                    continue
                k, l = divmod(q, n)
                K = np.kron(fq, np.eye(N[k, l, m]))
                r0, c0 = oy[m][q], ox[m][q]
                b[r0:r0 + K.shape[0], c0:c0 + K.shape[1]] = K
            blocks[m] = b
        return Morphism(TX, TY, blocks)

    def phi0(self) -> Morphism:
        return Morphism(dg.unit(self.C), self.obj(dg.unit(self.P)), {0: np.ones((1, 1), dtype=complex)})

    def _phi2_simple(self, q1: int, q2: int) -> Morphism:
        """``T(U_i x U_j) (x) T(U_w x U_x) -> T((U_i x U_j)(x)(U_w x U_x))`` via ``c^{-1}_{w,j}``."""
        key = (q1, q2)
        hit = self._simple_phi2.get(key)
        if hit is not None:
            return hit
        C, n, N = self.C, self.C.rank, self.C.fusion
        i, j = divmod(q1, n)
        w, x = divmod(q2, n)
        U = lambda a: dg.simple(C, a)      # noqa: E731
        _, _, back_ij = dg.flatten(U(i) + U(j))
        _, _, back_wx = dg.flatten(U(w) + U(x))
        _, to_iw, _ = dg.flatten(U(i) + U(w))
        _, to_jx, _ = dg.flatten(U(j) + U(x))
        core = compose_all(tensor(to_iw, to_jx),
                           tensor_all(identity(U(i)), dg.braiding_inv(U(w), U(j)), identity(U(x))),
                           tensor(back_ij, back_wx))
        W = Obj(self.P, [self._unit_vec(q1)]) + Obj(self.P, [self._unit_vec(q2)])
        TW, offs = self._lay(W)
        mid = core.cod
        blocks = {}
        for m in range(n):
            if not TW.dim_k(m):
                continue
            perm = np.zeros((TW.dim_k(m), mid.dim_k(m)), dtype=complex)
            for col, (k, l, a1, a2, nu) in enumerate(mid.basis(m)):
                alpha = a1 * N[j, x, l] + a2
                perm[offs[m][k * n + l] + alpha * N[k, l, m] + nu, col] = 1.0
            blocks[m] = perm
        out = compose(Morphism(mid, TW, blocks), core)
        self._simple_phi2[key] = out
        return out

    def _unit_vec(self, q: int) -> list:
        v = [0] * self.P.rank
        v[q] = 1
        return v

    def phi2(self, X: Obj, Y: Obj) -> Morphism:
        """``phi_2 : T(X) (x) T(Y) -> T(X (x) Y)``, natural in ``X`` and ``Y``."""
        out = None
        sX, sY = dg.spectrum_basis(X), dg.spectrum_basis(Y)
        for q1, (us1, vs1) in sX.items():
            for q2, (us2, vs2) in sY.items():
                core = self._phi2_simple(q1, q2)
                for u1, v1 in zip(us1, vs1):
                    for u2, v2 in zip(us2, vs2):
                        term = compose_all(self.mor(tensor(u1, u2)), core,
                                           tensor(self.mor(v1), self.mor(v2)))
                        out = term if out is None else out + term
        if out is None:
            return dg.zero(self.obj(X) + self.obj(Y), self.obj(X + Y))
        return out

    def phi2_inv(self, X: Obj, Y: Obj) -> Morphism:
        inv, cond = _block_inverse(self.phi2(X, Y))
        if cond > 1e8:
            raise AlgebraError("phi_2 is not invertible")
        return inv


def t_functor(ctx: DoubledContext) -> TFunctor:
    if "T" not in ctx._cache:
        ctx._cache["T"] = (None, TFunctor(ctx))
    return ctx._cache["T"][1]


def t_algebra(B: Algebra, T: TFunctor, name: str = "") -> Algebra:
    """``T(B)`` with ``m = T(m_B) o phi_2`` and ``eta = T(eta_B) o phi_0``."""
    m = compose(T.mor(B.m), T.phi2(B.obj, B.obj))
    eta = compose(T.mor(B.eta), T.phi0())
    return make_algebra(T.obj(B.obj), m, eta, name or f"T({B.name})")


def direct_sum_algebra(algs: list[Algebra], name: str = "") -> tuple[Algebra, list, list]:
    """Direct sum of algebras on one atom, with the summand inclusions and projections."""
    S, incs, projs = dg.direct_sum([a.obj for a in algs])
    m = None
    eta = None
    for a, i, p in zip(algs, incs, projs):
        t = compose_all(i, a.m, tensor(p, p))
        e = compose(i, a.eta)
        m = t if m is None else m + t
        eta = e if eta is None else eta + e
    return make_algebra(S, m, eta, name), incs, projs


# --------------------------------------------------------------------------- C_A and its components

@dataclass(eq=False)
class CAData:
    """``C_A = T(Z(A))`` with ``e_C = T(iota_l)``, ``r_C = T(r_l)`` and the channel maps ``e_i``, ``r_i``."""
    fc: FullCentre
    T: TFunctor
    CA: Algebra
    TRA: Algebra
    eC: Morphism
    rC: Morphism
    e: dict
    r: dict
    residuals: dict = field(default_factory=dict)


def ca_data(A: Algebra, ctx: DoubledContext | None = None) -> CAData:
    ctx = ctx or build_doubled(A.cat)
    key = ("CA", id(A))
    if key in ctx._cache:
        return ctx._cache[key][1]
    if len(A.obj) != 1:
        raise AlgebraError("algebra object must be a single atom")
    C, n = ctx.C, ctx.n
    T = t_functor(ctx)
    fc = full_centre(A, ctx)
    CA = t_algebra(fc.Z, T, f"C_{A.name}")
    TRA = t_algebra(fc.RA, T, f"T(R({A.name}))")
    eC, rC = T.mor(fc.iota), T.mor(fc.r)
    _, _, to_RA, back_RA = fc.RA._cache["word"]
    Ap = lift_obj(ctx, A.obj)
    Rob = ctx.R.obj
    if T.obj(Ap) != A.obj:
        raise AlgebraError("T(A x 1) does not reproduce A")
    split = T.phi2_inv(Ap, Rob)
    join = T.phi2(Ap, Rob)
    sR = dg.spectrum_basis(Rob)
    idA = identity(A.obj)
    e, r = {}, {}
    for i in range(n):
        q = i * n + C.dual[i]
        u, v = sR[q][0][0], sR[q][1][0]
        _, to_i, back_i = dg.flatten(dg.simple(C, i) + dg.simple(C, C.dual[i]))
        W_i = compose_all(tensor(idA, compose(back_i, T.mor(v))), split, T.mor(back_RA))
        Z_i = compose_all(T.mor(to_RA), join, tensor(idA, compose(T.mor(u), to_i)))
        e[i] = compose(W_i, eC)
        r[i] = compose(rC, Z_i)
    res = {
        "eC_unit": compose(eC, CA.eta).dist(TRA.eta),
        "eC_multiplicative": compose(eC, CA.m).dist(compose(TRA.m, tensor(eC, eC))),
        "CA_mult_two_routes": CA.m.dist(compose_all(rC, TRA.m, tensor(eC, eC))),
    }
    out = CAData(fc, T, CA, TRA, eC, rC, e, r, res)
    ctx._cache[key] = (A, out)
    return out


@dataclass(eq=False)
class IotaMaps:
    iota: Morphism
    iota_bar: Morphism
    residuals: dict


def iota_maps(A: Algebra, ctx: DoubledContext | None = None) -> IotaMaps:
    """``iota = sum_i (id_A (x) d~_{U_i}) o e_i`` and ``iota_bar = sum_i dim(A) dim(U_i)/Dim r_i o (id_A (x) b_{U_i})``."""
    if not predicates(A)["haploid"]:
        raise AlgebraError(f"algebra {A.name!r} is not haploid (dim Hom(1, A) != 1)")
    ctx = ctx or build_doubled(A.cat)
    cd = ca_data(A, ctx)
    C = ctx.C
    dims = quantum_dimensions(C)
    Dim = s_matrix(C)[1]
    idA = identity(A.obj)
    iota = ibar = None
    for i in range(C.rank):
        Ui = dg.simple(C, i)
        t = compose(tensor(idA, dg.ev_tilde(Ui)), cd.e[i])
        b = compose(cd.r[i], tensor(idA, dg.coev(Ui))) * (A.dim * dims[i] / Dim)
        iota = t if iota is None else iota + t
        ibar = b if ibar is None else ibar + b
    CA = cd.CA
    res = {
        "iota_iota_bar": compose(iota, ibar).dist(idA),
        "iota_unit": compose(iota, CA.eta).dist(A.eta),
        "iota_multiplicative": compose(iota, CA.m).dist(compose(A.m, tensor(iota, iota))),
    }
    return IotaMaps(iota, ibar, res)


# --------------------------------------------------------------------------- local morphisms

def _monodromy(U: Obj, M: Obj, s: int) -> Morphism:
    """Full twist of ``U`` around ``M`` on ``U (x) M``; ``s`` selects the direction."""
    return compose(_cr(M, U, s), _cr(U, M, s))


def local_idempotent(A: Algebra, U: Obj) -> Morphism:
    """``P^l_A(U)``: the second coproduct leg of ``Delta eta`` encircles ``U`` and multiplies ``A`` from the right.

    The crossing direction is the one fixed for ``P_l(A)``, so ``P^l_A(1) = P_l(A)``.
    """
    from .algebra import left_centre_idempotent
    left_centre_idempotent(A)
    s = A._cache["P_l_sign"]
    X = A.obj
    idA = identity(X)
    mm = compose(A.m, tensor(A.m, idA))
    return compose_all(tensor(mm, identity(U)),
                       tensor(tensor(idA, idA), _cr(U, X, s)),
                       tensor(idA, _cr(X, X + U, s)),
                       tensor(delta_eta(A), identity(X + U)))


@dataclass(eq=False)
class LocalBasis:
    """Per simple ``U_i``: local ``mu^i_alpha`` (first ``n_loc[i]``), all ``mu``, and the dual ``mu_bar``."""
    A: Algebra
    mu: dict
    mu_bar: dict
    n_loc: dict
    residuals: dict

    @property
    def index(self) -> list[tuple[int, int]]:
        return [(i, a) for i in sorted(self.n_loc) for a in range(self.n_loc[i])]


def _coords(basis: list[Morphism], f: Morphism) -> np.ndarray:
    B = np.array([b.vector() for b in basis]).T
    return np.linalg.lstsq(B, f.vector(), rcond=None)[0]


def local_basis(A: Algebra, gap: float = 0.25) -> LocalBasis:
    """Split ``Hom(A (x) U_i, U_i)`` into local morphisms and the kernel of precomposition with ``P^l_A(U_i)``."""
    import scipy.linalg as sla
    if "local_basis" in A._cache:
        return A._cache["local_basis"]
    C = A.cat
    mu, mu_bar, n_loc = {}, {}, {}
    res = {"biorthogonality": 0.0, "locality": 0.0, "annihilated": 0.0}
    for i in range(C.rank):
        U = dg.simple(C, i)
        W = A.obj + U
        basis = dg.hom_basis(W, U)
        if not basis:
            mu[i], mu_bar[i], n_loc[i] = [], [], 0
            continue
        P = local_idempotent(A, U)
        B = np.array([b.vector() for b in basis]).T
        K = np.linalg.lstsq(B, np.array([compose(b, P).vector() for b in basis]).T, rcond=None)[0]
        ev = np.linalg.eigvals(K)
        if np.any((np.abs(ev) > gap) & (np.abs(ev - 1) > gap)):
            raise AlgebraError(f"precomposition with P^l_A(U_{i}) has eigenvalues off 0/1: {ev}")
        loc = sla.orth(K)
        ker = sla.null_space(K) if loc.shape[1] < K.shape[0] else np.zeros((K.shape[0], 0))
        vecs = np.hstack([loc, ker])
        ms = [Morphism.from_vector(W, U, B @ vecs[:, a]) for a in range(vecs.shape[1])]
        if i == 0:
            ms[0] = (counit(A) / A.dim).retype(W, U)
        nb = dg.hom_basis(U, W)
        G = np.array([[compose(m, nu).scalar() for nu in nb] for m in ms])
        Ginv = np.linalg.inv(G)
        bars = []
        for a in range(len(ms)):
            f = nb[0] * Ginv[0, a]
            for b in range(1, len(nb)):
                f = f + nb[b] * Ginv[b, a]
            bars.append(f)
        nl = loc.shape[1]
        for a, m in enumerate(ms):
            for b, mb in enumerate(bars):
                res["biorthogonality"] = max(res["biorthogonality"],
                                             abs(compose(m, mb).scalar() - (a == b)))
            pm = compose(m, P)
            if a < nl:
                res["locality"] = max(res["locality"], pm.dist(m))
            else:
                res["annihilated"] = max(res["annihilated"], pm.norm())
        mu[i], mu_bar[i], n_loc[i] = ms, bars, nl
    if n_loc[0] != 1:
        raise AlgebraError(f"expected a one-dimensional local space at the unit, got {n_loc[0]}")
    res["mu0_bar_is_eta"] = float(np.max(np.abs(mu_bar[0][0].vector() - A.eta.vector())))
    out = LocalBasis(A, mu, mu_bar, n_loc, res)
    A._cache["local_basis"] = out
    return out


@dataclass(eq=False)
class SAMatrices:
    s: np.ndarray
    s_tilde: np.ndarray
    index: list
    modules: list
    residuals: dict


def _s_entry(A: Algebra, M: Module, U: Obj, mu: Morphism) -> complex:
    """Trace of ``U (x) M``: coaction of ``M`` feeds ``mu`` on ``U``, inside an inverse full twist."""
    X = M.obj
    W = compose_all(_monodromy(U, X, -1), tensor(mu, identity(X)),
                    tensor(_cr(U, A.obj, +1), identity(X)), tensor(identity(U), coaction(M)))
    return dg.trace(W)


def _module_loop(A: Algebra, M: Module, U: Obj) -> Morphism:
    """``f_kappa : A (x) U -> U``: ``A`` is absorbed into an ``M`` loop that encircles ``U``."""
    X = M.obj
    F = compose_all(_monodromy(U, X, +1), tensor(identity(U), M.rho),
                    tensor(_cr(A.obj, U, -1), identity(X)))
    return compose_all(tensor(identity(U), dg.ev_tilde(X)), tensor(F, identity(dg.dual(X))),
                       tensor(identity(A.obj + U), dg.coev(X)))


def sa_matrices(A: Algebra, seed: int = 0) -> SAMatrices:
    """``s^A_{kappa, i alpha}`` and ``s~^A_{i alpha, kappa}`` with their biorthogonality residuals."""
    C = A.cat
    Ms = simple_modules(A, seed)
    lb = local_basis(A)
    idx = lb.index
    Dim = s_matrix(C)[1]
    S = np.zeros((len(Ms), len(idx)), dtype=complex)
    St = np.zeros((len(idx), len(Ms)), dtype=complex)
    for k, M in enumerate(Ms):
        for c, (i, a) in enumerate(idx):
            U = dg.simple(C, i)
            S[k, c] = _s_entry(A, M, U, lb.mu[i][a])
            St[c, k] = dg.trace(compose(_module_loop(A, M, U), lb.mu_bar[i][a]))
    res = {"not_square": float(S.shape[0] != S.shape[1])}
    if S.shape[0] == S.shape[1]:
        res["s_stilde"] = float(np.max(np.abs(S @ St - Dim * np.eye(len(Ms)))))
        res["stilde_s"] = float(np.max(np.abs(St @ S - Dim * np.eye(len(idx)))))
    res["s_kappa_01"] = float(np.max(np.abs(S[:, 0] - np.array([M.dim for M in Ms]) / A.dim)))
    return SAMatrices(S, St, idx, Ms, res)


def module_loop_residual(A: Algebra, seed: int = 0) -> dict:
    """``sum_kappa dim(M_kappa)/Dim f_kappa = delta_{i,0} eps_A`` for every ``U_i``; max residual per ``i``."""
    C = A.cat
    Dim = s_matrix(C)[1]
    Ms = simple_modules(A, seed)
    out = {}
    for i in range(C.rank):
        U = dg.simple(C, i)
        f = None
        for M in Ms:
            t = _module_loop(A, M, U) * (M.dim / Dim)
            f = t if f is None else f + t
        target = counit(A).retype(A.obj + U, U) if i == 0 else dg.zero(A.obj + U, U)
        out[i] = f.dist(target)
    return out


def killing_ring_residual(A: Algebra, seed: int = 0) -> dict:
    """``sum_i dim(U_i)`` times a ``U_i`` loop around ``M_a^v (x) M_b`` after ``P_(x)A`` equals
    ``delta_ab Dim/dim(M_a) b~ o d``; max residual per pair."""
    from .modules import dual_right_module, tensor_idempotent
    C = A.cat
    dims = quantum_dimensions(C)
    Dim = s_matrix(C)[1]
    Ms = simple_modules(A, seed)
    out = {}
    for a, Ma in enumerate(Ms):
        Mad = dual_right_module(Ma)
        for b, Mb in enumerate(Ms):
            X = Mad.obj + Mb.obj
            P = tensor_idempotent(Mad, Mb)
            lhs = None
            for i in range(C.rank):
                U = dg.simple(C, i)
                loop = compose_all(tensor(dg.ev(U), identity(X)),
                                   tensor(identity(dg.dual(U)), _monodromy(U, X, +1)),
                                   tensor(dg.coev_tilde(U), identity(X)))
                t = compose(loop, P) * dims[i]
                lhs = t if lhs is None else lhs + t
            if a == b:
                rhs = compose(dg.coev_tilde(Ma.obj), dg.ev(Ma.obj)) * (Dim / Ma.dim)
            else:
                rhs = dg.zero(X, X)
            out[(a, b)] = lhs.dist(rhs)
    return out


# --------------------------------------------------------------------------- C_A = T_A

def _phi_piece(A: Algebra, U: Obj, M: Module) -> Morphism:
    """``A (x) U (x) U^v -> M^v (x) M``: ``U`` clasps the new ``M`` cup, ``A`` acts on ``M``."""
    X, Xd, Ud = M.obj, dg.dual(M.obj), dg.dual(U)
    idA = identity(A.obj)
    clasp = compose(tensor(identity(Xd), _cr(U, X, -1)), tensor(_cr(U, Xd, +1), identity(X)))
    return compose_all(tensor(identity(Xd), M.rho),
                       tensor(_cr(A.obj, Xd, +1), identity(X)),
                       tensor_all(idA, identity(Xd + X), dg.ev_tilde(U)),
                       tensor_all(idA, clasp, identity(Ud)),
                       tensor_all(idA, identity(U), dg.coev_tilde(X), identity(Ud)))


def _phi_bar_piece(A: Algebra, U: Obj, M: Module) -> Morphism:
    """``M^v (x) M -> A (x) U (x) U^v``: mirror image of :func:`_phi_piece`."""
    X, Xd, Ud = M.obj, dg.dual(M.obj), dg.dual(U)
    idA = identity(A.obj)
    unclasp = compose(tensor(_cr(Xd, U, -1), identity(X)), tensor(identity(Xd), _cr(X, U, +1)))
    return compose_all(tensor_all(idA, identity(U), dg.ev(X), identity(Ud)),
                       tensor_all(idA, unclasp, identity(Ud)),
                       tensor_all(idA, identity(Xd + X), dg.coev(U)),
                       tensor(_cr(Xd, A.obj, -1), identity(X)),
                       tensor(identity(Xd), coaction(M)))


@dataclass(eq=False)
class CATA:
    CA: Algebra
    TA: Algebra
    phi: Morphism
    phi_bar: Morphism
    modules: list
    residuals: dict


def t_a_algebra(A: Algebra, seed: int = 0):
    """``T_A = (+)_kappa M_kappa^v (x)_A M_kappa`` with the maps ``e_kappa`` and ``r_kappa``."""
    Ms = simple_modules(A, seed)
    Es = [endo_algebra(M) for M in Ms]
    TA, incs, projs = direct_sum_algebra([E.algebra for E in Es], f"T_{A.name}")
    ek = [compose(E.t.e, p) for E, p in zip(Es, projs)]
    rk = [compose(i, E.t.r) for E, i in zip(Es, incs)]
    return Ms, Es, TA, ek, rk


def ca_ta_iso(A: Algebra, ctx: DoubledContext | None = None, seed: int = 0,
              tol: float | None = None) -> CATA:
    """``phi : C_A -> T_A`` and ``phi_bar : T_A -> C_A`` with the inverse and algebra-map residuals.

    With ``tol`` set, raises :class:`AlgebraError` naming every identity whose residual exceeds it.
    """
    ctx = ctx or build_doubled(A.cat)
    C = ctx.C
    cd = ca_data(A, ctx)
    Ms, Es, TA, ek, rk = t_a_algebra(A, seed)
    dims = quantum_dimensions(C)
    Dim = s_matrix(C)[1]
    phi_ = phib = None
    for i in range(C.rank):
        U = dg.simple(C, i)
        for k, M in enumerate(Ms):
            t = compose_all(rk[k], _phi_piece(A, U, M), cd.e[i])
            tb = compose_all(cd.r[i], _phi_bar_piece(A, U, M), ek[k]) * (dims[i] * M.dim / Dim)
            phi_ = t if phi_ is None else phi_ + t
            phib = tb if phib is None else phib + tb
    CA = cd.CA
    res = {
        "phi_phibar": compose(phi_, phib).dist(identity(TA.obj)),
        "phibar_phi": compose(phib, phi_).dist(identity(CA.obj)),
        "phi_unit": compose(phi_, CA.eta).dist(TA.eta),
        "phi_multiplicative": compose(phi_, CA.m).dist(compose(TA.m, tensor(phi_, phi_))),
        "eC_unit": cd.residuals["eC_unit"],
        "eC_multiplicative": cd.residuals["eC_multiplicative"],
    }
    for k, E in enumerate(Es):
        res[f"not_haploid_{k}"] = float(not predicates(E.algebra)["haploid"])
    if tol is not None:
        bad = sorted(k for k, v in res.items() if v > tol)
        if bad:
            raise AlgebraError(f"C_A = T_A identities failed for {A.name!r}: {', '.join(bad)}")
    return CATA(CA, TA, phi_, phib, Ms, res)


def _random_endo(X: Obj, rng: np.random.Generator) -> Morphism:
    d = len(identity(X).vector())
    vec = rng.normal(size=d) + 1j * rng.normal(size=d)
    return Morphism.from_vector(X, X, vec)


def t_functor_residuals(ctx: DoubledContext, seed: int = 0, trials: int = 3) -> dict:
    """Functoriality, naturality and associativity coherence of ``phi_2``, and dimension preservation."""
    T = t_functor(ctx)
    P = ctx.P
    rng = np.random.default_rng(seed)
    res = {"functorial": 0.0, "natural": 0.0, "coherent": 0.0, "dims": 0.0}
    n = P.rank
    for _ in range(trials):
        X, Y, W = (dg.atom(P, {int(q): 1 for q in rng.choice(n, size=min(2, n), replace=False)})
                   for _ in range(3))
        f, g = _random_endo(X, rng), _random_endo(X, rng)
        h = _random_endo(Y, rng)
        res["functorial"] = max(res["functorial"], T.mor(compose(g, f)).dist(compose(T.mor(g), T.mor(f))))
        lhs = compose(T.phi2(X, Y), tensor(T.mor(f), T.mor(h)))
        rhs = compose(T.mor(tensor(f, h)), T.phi2(X, Y))
        res["natural"] = max(res["natural"], lhs.dist(rhs))
        left = compose_all(T.phi2(X + Y, W), tensor(T.phi2(X, Y), identity(T.obj(W))))
        right = compose_all(T.phi2(X, Y + W), tensor(identity(T.obj(X)), T.phi2(Y, W)))
        res["coherent"] = max(res["coherent"], left.dist(right))
    dims = quantum_dimensions(ctx.C)
    for q in range(n):
        k, l = divmod(q, ctx.n)
        res["dims"] = max(res["dims"], abs(dg.dim(T.obj(dg.simple(P, q))) - dims[k] * dims[l]))
    return res
