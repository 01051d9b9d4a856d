"""Modules and bimodules over algebras, relative tensor products, simple-module enumeration."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import diagrams as dg
from .algebra import (Algebra, AlgebraError, _block_inverse, _parse_atoms, _parse_blocks,
                      delta_eta, make_algebra)
from .diagrams import Morphism, Obj, compose, compose_all, identity, tensor, tensor_all

__all__ = [
    "ModuleError", "Module", "Bimodule", "make_module", "make_bimodule", "regular_module",
    "regular_bimodule", "induced_module", "tensor_over", "tensor_bimodules", "dual_bimodule",
    "dual_right_module", "module_homs", "bimodule_homs", "simple_modules", "endo_algebra",
    "coaction", "endo_bimodule", "load_module", "is_isomorphic_module",
]


class ModuleError(AlgebraError):
    """A module axiom or module-level precondition fails."""


@dataclass(eq=False)
class Module:
    A: Algebra
    obj: Obj
    rho: Morphism
    side: str = "left"
    name: str = ""
    residuals: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> complex:
        return dg.dim(self.obj)

    def __repr__(self) -> str:
        return f"Module({self.side}, {self.name or '?'}, {self.obj!r} over {self.A.name})"


@dataclass(eq=False)
class Bimodule:
    A: Algebra
    B: Algebra
    obj: Obj
    rho_l: Morphism
    rho_r: Morphism
    name: str = ""
    residuals: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> complex:
        return dg.dim(self.obj)

    @property
    def left(self) -> Module:
        return Module(self.A, self.obj, self.rho_l, "left", self.name)

    @property
    def right(self) -> Module:
        return Module(self.B, self.obj, self.rho_r, "right", self.name)

    def __repr__(self) -> str:
        return f"Bimodule({self.name or '?'}, {self.obj!r}, {self.A.name}|{self.B.name})"


def _module_residuals(A: Algebra, M: Obj, rho: Morphism, side: str) -> dict:
    idM, idA = identity(M), identity(A.obj)
    if side == "left":
        rep = compose(rho, tensor(A.m, idM)).dist(compose(rho, tensor(idA, rho)))
        unit = compose(rho, tensor(A.eta, idM)).dist(idM)
    else:
        rep = compose(rho, tensor(idM, A.m)).dist(compose(rho, tensor(rho, idA)))
        unit = compose(rho, tensor(idM, A.eta)).dist(idM)
    return {f"{side}_representation": rep, f"{side}_unit": unit}


def _raise_if_bad(res: dict, tol: float, what: str) -> None:
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise ModuleError(f"{what} violates axioms: "
                          + ", ".join(f"{k} residual {v:.3g}" for k, v in bad.items()))


def make_module(A: Algebra, M: Obj, rho: Morphism, side: str = "left", name: str = "",
                check: bool = True, tol: float = 1e-8) -> Module:
    expect = (A.obj + M) if side == "left" else (M + A.obj)
    if side not in ("left", "right"):
        raise ValueError(side)
    if rho.dom != expect or rho.cod != M:
        raise ModuleError(f"{side} action must map {expect} -> {M}, got {rho}")
    res = _module_residuals(A, M, rho, side) if check else {}
    _raise_if_bad(res, tol * max(1.0, rho.norm()) ** 2, f"module {name!r}")
    return Module(A, M, rho, side, name, res)


def make_bimodule(A: Algebra, B: Algebra, X: Obj, rho_l: Morphism, rho_r: Morphism,
                  name: str = "", check: bool = True, tol: float = 1e-8) -> Bimodule:
    res = {}
    if check:
        res.update(_module_residuals(A, X, rho_l, "left"))
        res.update(_module_residuals(B, X, rho_r, "right"))
        res["commuting_actions"] = compose(rho_r, tensor(rho_l, identity(B.obj))).dist(
            compose(rho_l, tensor(identity(A.obj), rho_r)))
        _raise_if_bad(res, tol * max(1.0, rho_l.norm(), rho_r.norm()) ** 2, f"bimodule {name!r}")
    return Bimodule(A, B, X, rho_l, rho_r, name, res)


def regular_module(A: Algebra, side: str = "left") -> Module:
    return make_module(A, A.obj, A.m, side, name=A.name)


def regular_bimodule(A: Algebra) -> Bimodule:
    return make_bimodule(A, A, A.obj, A.m, A.m, name=A.name)


def induced_module(A: Algebra, U: Obj, name: str = "") -> Module:
    """``A (x) U`` with action ``m (x) id_U``, flattened to one atom."""
    W = A.obj + U
    F, to, back = dg.flatten(W)
    rho = compose_all(to, tensor(A.m, identity(U)), tensor(identity(A.obj), back))
    mod = make_module(A, F, rho, "left", name or f"{A.name}(x)U")
    mod._cache["induced_from"] = (U, to, back)
    return mod


def load_module(source: str | dict, A: Algebra, check: bool = True) -> Module:
    doc = json.loads(source) if isinstance(source, str) else source
    cat = A.cat
    M = _parse_atoms(cat, doc["object"])
    side = doc.get("side", "left")
    dom = (A.obj + M) if side == "left" else (M + A.obj)
    rho = _parse_blocks(cat, dom, M, doc["action"], "action")
    return make_module(A, M, rho, side, str(doc.get("name", "")), check=check)


# --------------------------------------------------------------------------- tensor products

def tensor_idempotent(M: Module, N: Module) -> Morphism:
    """``P_(x)A = (rho_M (x) rho_N) o (id_M (x) Delta eta (x) id_N)`` on ``M (x) N``."""
    if M.side != "right" or N.side != "left" or M.A is not N.A:
        raise ModuleError("tensor_over needs a right and a left module over the same algebra")
    return compose(tensor(M.rho, N.rho),
                   tensor_all(identity(M.obj), delta_eta(M.A), identity(N.obj)))


@dataclass(eq=False)
class TensorOver:
    obj: Obj
    e: Morphism
    r: Morphism
    P: Morphism
    M: Module
    N: Module
    residuals: dict


def tensor_over(M: Module, N: Module) -> TensorOver:
    """Split ``P_(x)A``: ``r e = id`` and ``e r = P``; ``r`` coequalises the two actions."""
    key = ("tensor_over", id(M), id(N))
    if key in M._cache:
        return M._cache[key][1]
    P = tensor_idempotent(M, N)
    Im, e, r = dg.split_idempotent(P)
    idM, idN = identity(M.obj), identity(N.obj)
    res = {
        "idempotent": compose(P, P).dist(P),
        "r_e": compose(r, e).dist(identity(Im)),
        "e_r": compose(e, r).dist(P),
        "coequaliser": compose(r, tensor(M.rho, idN)).dist(compose(r, tensor(idM, N.rho))),
    }
    out = TensorOver(Im, e, r, P, M, N, res)
    M._cache[key] = (N, out)
    return out


def tensor_bimodules(X: Bimodule, Y: Bimodule, name: str = "") -> tuple[Bimodule, TensorOver]:
    """``X (x)_B Y`` for an A-B-bimodule ``X`` and a B-C-bimodule ``Y``."""
    if X.B is not Y.A:
        raise ModuleError("bimodules are not composable over the same algebra")
    t = tensor_over(X.right, Y.left)
    A, C = X.A, Y.B
    rho_l = compose_all(t.r, tensor(X.rho_l, identity(Y.obj)), tensor(identity(A.obj), t.e))
    rho_r = compose_all(t.r, tensor(identity(X.obj), Y.rho_r), tensor(t.e, identity(C.obj)))
    bm = make_bimodule(A, C, t.obj, rho_l, rho_r, name or f"{X.name}(x){Y.name}")
    return bm, t


def dual_right_module(M: Module) -> Module:
    """``M^v`` as a right A-module for a left module ``M``."""
    if M.side != "left":
        raise ModuleError("dual_right_module expects a left module")
    X = M.obj
    Xd = dg.dual(X)
    A = M.A
    rho = compose_all(tensor(dg.ev(X), identity(Xd)),
                      tensor_all(identity(Xd), M.rho, identity(Xd)),
                      tensor_all(identity(Xd), identity(A.obj), dg.coev(X)))
    return make_module(A, Xd, rho, "right", f"{M.name}^v")


def dual_left_module(M: Module) -> Module:
    """``M^v`` as a left A-module for a right module ``M``."""
    if M.side != "right":
        raise ModuleError("dual_left_module expects a right module")
    X = M.obj
    Xd = dg.dual(X)
    A = M.A
    rho = compose_all(tensor(identity(Xd), dg.ev_tilde(X)),
                      tensor_all(identity(Xd), M.rho, identity(Xd)),
                      tensor_all(dg.coev_tilde(X), identity(A.obj), identity(Xd)))
    return make_module(A, Xd, rho, "left", f"{M.name}^v")


def dual_bimodule(X: Bimodule) -> Bimodule:
    """``X^v`` as a B-A-bimodule, actions bent with the (co)evaluations."""
    L = dual_left_module(X.right)
    Rm = dual_right_module(X.left)
    return make_bimodule(X.B, X.A, L.obj, L.rho, Rm.rho, f"{X.name}^v")


# --------------------------------------------------------------------------- Hom spaces

def module_homs(M: Module, N: Module) -> list[Morphism]:
    """Basis of ``Hom_A(M, N)``."""
    if M.side != N.side or M.A is not N.A:
        raise ModuleError("module_homs needs modules of the same side over the same algebra")
    idA = identity(M.A.obj)

    def cons(f):
        if M.side == "left":
            return [compose(f, M.rho) - compose(N.rho, tensor(idA, f))]
        return [compose(f, M.rho) - compose(N.rho, tensor(f, idA))]
    return dg.solve_hom(M.obj, N.obj, cons)


def bimodule_homs(X: Bimodule, Y: Bimodule) -> list[Morphism]:
    idA, idB = identity(X.A.obj), identity(X.B.obj)

    def cons(f):
        return [compose(f, X.rho_l) - compose(Y.rho_l, tensor(idA, f)),
                compose(f, X.rho_r) - compose(Y.rho_r, tensor(f, idB))]
    return dg.solve_hom(X.obj, Y.obj, cons)


def _invertible_combination(basis: list[Morphism], rng: np.random.Generator):
    if not basis:
        return None, float("inf")
    best = (None, float("inf"))
    for _ in range(4):
        c = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
        f = sum((ci * b for ci, b in zip(c, basis[1:])), c[0] * basis[0])
        inv, cond = _block_inverse(f)
        if cond < best[1]:
            best = (f, cond)
        if cond < 1e8:
            break
    return best


def is_isomorphic_module(M: Module, N: Module, seed: int = 0) -> tuple[bool, Morphism | None]:
    """Isomorphic iff the Hom space contains an element with all blocks invertible (cond < 1e8)."""
    if (M.obj.spectrum != N.obj.spectrum).any():
        return False, None
    homs = module_homs(M, N)
    f, cond = _invertible_combination(homs, np.random.default_rng(seed))
    return (cond < 1e8), (f if cond < 1e8 else None)


# --------------------------------------------------------------------------- decomposition

def submodule(M: Module, p: Morphism, name: str = "") -> tuple[Module, Morphism, Morphism]:
    """Image of an idempotent module endomorphism, with inclusion and projection."""
    Im, e, r = dg.split_idempotent(p)
    if M.side == "left":
        rho = compose_all(r, M.rho, tensor(identity(M.A.obj), e))
    else:
        rho = compose_all(r, M.rho, tensor(e, identity(M.A.obj)))
    return make_module(M.A, Im, rho, M.side, name), e, r


def _spectral_idempotents(x: Morphism, tol: float = 1e-6) -> list[Morphism]:
    """Spectral projectors of a diagonalisable endomorphism, one per distinct eigenvalue."""
    eigs = []
    for b in x.blocks.values():
        eigs.extend(np.linalg.eigvals(b))
    clusters: list[complex] = []
    for lam in sorted(eigs, key=lambda z: (round(z.real, 6), round(z.imag, 6))):
        if not any(abs(lam - c) < tol * max(1.0, abs(c)) for c in clusters):
            clusters.append(lam)
    out = []
    for c in clusters:
        blocks = {}
        for k, b in x.blocks.items():
            w, V = np.linalg.eig(b)
            sel = np.abs(w - c) < tol * max(1.0, abs(c))
            if sel.any():
                Vinv = np.linalg.inv(V)
                blocks[k] = V[:, sel] @ Vinv[sel, :]
        out.append(Morphism(x.dom, x.cod, blocks))
    return out


def decompose_module(M: Module, rng: np.random.Generator, depth: int = 0) -> list[Module]:
    """Simple summands of ``M`` (with repetition) by splitting generic endomorphisms."""
    if M.obj.is_zero:
        return []
    ends = module_homs(M, M)
    if len(ends) == 1:
        return [M]
    if depth > 12:
        raise ModuleError("module decomposition did not terminate")
    c = rng.normal(size=len(ends)) + 1j * rng.normal(size=len(ends))
    x = sum((ci * b for ci, b in zip(c[1:], ends[1:])), c[0] * ends[0])
    idems = _spectral_idempotents(x)
    if len(idems) < 2:
        return decompose_module(M, rng, depth + 1)
    out = []
    for p in idems:
        sub, _, _ = submodule(M, p)
        out.extend(decompose_module(sub, rng, depth + 1))
    return out


def simple_modules(A: Algebra, seed: int = 0) -> list[Module]:
    """Representatives ``M_kappa`` of the simple left A-modules, from the induced modules ``A (x) U_i``."""
    key = ("simple_modules", seed)
    if key in A._cache:
        return A._cache[key]
    rng = np.random.default_rng(seed)
    reps: list[Module] = []
    for i in range(A.cat.rank):
        ind = induced_module(A, dg.simple(A.cat, i), f"{A.name}(x)U{i}")
        for S in decompose_module(ind, rng):
            if not any(is_isomorphic_module(S, T, seed)[0] for T in reps):
                S.name = f"M{len(reps)}"
                reps.append(S)
    for M in reps:
        if abs(M.dim) <= A.tol:
            raise ModuleError(f"simple module {M.name} has vanishing dimension")
    A._cache[key] = reps
    return reps


# --------------------------------------------------------------------------- M^v (x)_A M

def coaction(M: Module) -> Morphism:
    """``delta_l = (id_A (x) rho) o (Delta eta (x) id_M) : M -> A (x) M``."""
    A = M.A
    return compose(tensor(identity(A.obj), M.rho), tensor(delta_eta(A), identity(M.obj)))


@dataclass(eq=False)
class EndoAlgebra:
    algebra: Algebra
    module: Module
    dual_module: Module
    t: TensorOver


def endo_algebra(M: Module, name: str = "") -> EndoAlgebra:
    """``M^v (x)_A M`` with unit ``e_A o b~_M`` and multiplication ``r_A o (id (x) d~_M (x) id) o (e_A (x) e_A)``."""
    if M.side != "left":
        raise ModuleError("endo_algebra expects a left module")
    if abs(M.dim) <= M.A.tol:
        raise ModuleError(f"module {M.name!r} has vanishing dimension")
    key = "endo"
    if key in M._cache:
        return M._cache[key]
    Md = dual_right_module(M)
    t = tensor_over(Md, M)
    X, Xd = M.obj, Md.obj
    eta = compose(t.r, dg.coev_tilde(X))
    m = compose_all(t.r, tensor_all(identity(Xd), dg.ev_tilde(X), identity(X)), tensor(t.e, t.e))
    alg = make_algebra(t.obj, m, eta, name or f"End({M.name})")
    out = EndoAlgebra(alg, M, Md, t)
    M._cache[key] = out
    return out


def endo_bimodule(M: Module, E: EndoAlgebra | None = None) -> Bimodule:
    """``M`` as an A-B bimodule for ``B = M^v (x)_A M``, right action through the coaction."""
    E = E or endo_algebra(M)
    A = M.A
    X = M.obj
    psi = compose(tensor(identity(A.obj), dg.ev_tilde(X)), tensor(coaction(M), identity(dg.dual(X))))
    rho_r = compose_all(M.rho, tensor(psi, identity(X)), tensor(identity(X), E.t.e))
    return make_bimodule(A, E.algebra, X, M.rho, rho_r, f"{M.name}")
