"""Algebras in a skeletal category: axioms, trace pairing, Frobenius data, predicates, left centre."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import diagrams as dg
from .category import CategoryData, CategoryError, _parse_number
from .diagrams import Morphism, Obj, compose, compose_all, identity, tensor, tensor_all

__all__ = [
    "AlgebraError",
    "Algebra",
    "FrobeniusData",
    "make_algebra",
    "load_algebra",
    "dump_algebra",
    "phi",
    "phi_reflected",
    "is_nondegenerate",
    "frobenius_structure",
    "predicates",
    "tensor_algebra",
    "left_centre",
    "left_centre_idempotent",
    "unit_algebra",
    "transport_algebra",
]


class AlgebraError(CategoryError):
    """An algebra axiom or a precondition on an algebra fails."""


@dataclass(frozen=True)
class FrobeniusData:
    delta: Morphism
    eps: Morphism
    zeta: complex   # m o Delta = zeta id
    xi: complex     # eps o eta = xi
    residuals: dict


@dataclass(eq=False)
class Algebra:
    obj: Obj
    m: Morphism
    eta: Morphism
    name: str = ""
    residuals: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def cat(self) -> CategoryData:
        return self.obj.cat

    @property
    def dim(self) -> complex:
        return dg.dim(self.obj)

    @property
    def tol(self) -> float:
        return self.cat.tolerance

    def __repr__(self) -> str:
        return f"Algebra({self.name or '?'}, {self.obj!r})"


def _assoc_unit_residuals(A: Obj, m: Morphism, eta: Morphism) -> dict:
    idA = identity(A)
    assoc = compose(m, tensor(m, idA)).dist(compose(m, tensor(idA, m)))
    unit_l = compose(m, tensor(eta, idA)).dist(idA)
    unit_r = compose(m, tensor(idA, eta)).dist(idA)
    return {"associativity": assoc, "unit_left": unit_l, "unit_right": unit_r}


def make_algebra(A: Obj, m: Morphism, eta: Morphism, name: str = "", check: bool = True,
                 tol: float | None = None) -> Algebra:
    """Wrap ``(A, m, eta)``; associativity and unit laws are verified when ``check``."""
    unit = dg.unit(A.cat)
    if m.dom != A + A or m.cod != A:
        raise AlgebraError(f"multiplication must map A(x)A -> A, got {m}")
    if eta.dom != unit or eta.cod != A:
        raise AlgebraError(f"unit must map 1 -> A, got {eta}")
    res = _assoc_unit_residuals(A, m, eta) if check else {}
    tol = A.cat.tolerance if tol is None else tol
    scale = max(1.0, m.norm()) ** 2
    bad = {k: v for k, v in res.items() if v > tol * scale}
    if bad:
        raise AlgebraError(f"algebra {name!r} violates axioms: "
                           + ", ".join(f"{k} residual {v:.3g}" for k, v in bad.items()))
    return Algebra(A, m, eta, name, res)


def unit_algebra(cat: CategoryData, name: str = "1") -> Algebra:
    U = dg.simple(cat, 0)
    m = Morphism(U + U, U, {0: np.ones((1, 1), dtype=complex)})
    eta = Morphism(dg.unit(cat), U, {0: np.ones((1, 1), dtype=complex)})
    return make_algebra(U, m, eta, name)


# --------------------------------------------------------------------------- file format

def _parse_atoms(cat: CategoryData, spec) -> Obj:
    if isinstance(spec, dict):
        spec = [spec]
    atoms = []
    for pos, a in enumerate(spec):
        vec = [0] * cat.rank
        for lab, mult in a.items():
            try:
                vec[cat.label(lab)] += int(mult)
            except CategoryError as exc:
                raise CategoryError(f"object[{pos}]: {exc}") from None
        atoms.append(vec)
    return Obj(cat, atoms)


def _parse_blocks(cat: CategoryData, dom: Obj, cod: Obj, blocks: dict, where: str) -> Morphism:
    out = {}
    for lab, rows in blocks.items():
        k = cat.label(lab)
        mat = np.array([[_parse_number(x, f"{where}[{lab}]") for x in row] for row in rows],
                       dtype=complex).reshape(-1, dom.dim_k(k)) if rows else np.zeros((0, 0))
        if mat.shape != (cod.dim_k(k), dom.dim_k(k)):
            raise CategoryError(f"{where}[{lab}]: block shape {mat.shape}, expected "
                                f"{(cod.dim_k(k), dom.dim_k(k))}")
        out[k] = mat
    return Morphism(dom, cod, out)


def load_algebra(source: str | dict, cat: CategoryData, check: bool = True) -> Algebra:
    """Parse an algebra file: ``object`` (list of atoms), ``m`` and ``eta`` blocks keyed by label."""
    doc = json.loads(source) if isinstance(source, str) else source
    for key in ("object", "m", "eta"):
        if key not in doc:
            raise CategoryError(f"algebra file: missing key {key!r}")
    A = _parse_atoms(cat, doc["object"])
    m = _parse_blocks(cat, A + A, A, doc["m"], "m")
    eta = _parse_blocks(cat, dg.unit(cat), A, doc["eta"], "eta")
    return make_algebra(A, m, eta, str(doc.get("name", "")), check=check)


def _blocks_doc(f: Morphism) -> dict:
    labs = f.cat.labels
    return {labs[k]: [[[repr(complex(x).real), repr(complex(x).imag)] for x in row] for row in b]
            for k, b in sorted(f.blocks.items())}


def dump_algebra(A: Algebra, category_file: str = "") -> dict:
    labs = A.cat.labels
    return {"name": A.name, "category": category_file,
            "object": [{labs[k]: int(v) for k, v in enumerate(a) if v} for a in A.obj.atoms],
            "m": _blocks_doc(A.m), "eta": _blocks_doc(A.eta)}


# --------------------------------------------------------------------------- trace pairing

def phi(A: Algebra) -> Morphism:
    """``Phi_A : A -> A^v``; pairs ``a`` with ``b`` through the trace of left multiplication by ``ab``."""
    if "phi" not in A._cache:
        X = A.obj
        Xd = dg.dual(X)
        P = compose_all(dg.ev_tilde(X), tensor(compose(A.m, tensor(A.m, identity(X))), identity(Xd)),
                        tensor_all(identity(X), identity(X), dg.coev(X)))
        A._cache["phi"] = compose(tensor(P, identity(Xd)), tensor(identity(X), dg.coev(X)))
    return A._cache["phi"]


def phi_reflected(A: Algebra) -> Morphism:
    """Mirror image of :func:`phi`: the left trace of right multiplication, bent with ``b~`` and ``d``."""
    X = A.obj
    Xd = dg.dual(X)
    idA = identity(X)
    mm = compose(A.m, tensor(idA, A.m))
    P = compose_all(dg.ev(X), tensor(identity(Xd), mm), tensor_all(dg.coev_tilde(X), idA, idA))
    return compose(tensor(identity(Xd), P), tensor(dg.coev_tilde(X), idA))


def _block_inverse(f: Morphism) -> tuple[Morphism, float]:
    """Blockwise inverse and the worst block condition number (inf if a block is singular/non-square)."""
    blocks = {}
    worst = 1.0
    for k in range(f.cat.rank):
        r, c = f.cod.dim_k(k), f.dom.dim_k(k)
        if not r and not c:
            continue
        if r != c:
            return None, float("inf")
        b = f.block(k)
        cond = float(np.linalg.cond(b))
        worst = max(worst, cond)
        if not np.isfinite(cond) or cond > 1e12:
            return None, float("inf")
        blocks[k] = np.linalg.inv(b)
    return Morphism(f.cod, f.dom, blocks), worst


def is_nondegenerate(A: Algebra) -> bool:
    return phi_condition(A) < 1e8


def phi_condition(A: Algebra) -> float:
    if "phi_cond" not in A._cache:
        inv, cond = _block_inverse(phi(A))
        A._cache["phi_inv"] = inv
        A._cache["phi_cond"] = cond
    return A._cache["phi_cond"]


def phi_inverse(A: Algebra) -> Morphism:
    if phi_condition(A) >= 1e8:
        raise AlgebraError(f"algebra {A.name!r} is degenerate (cond Phi_A = {A._cache['phi_cond']:.3g})")
    return A._cache["phi_inv"]


def frobenius_structure(A: Algebra) -> FrobeniusData:
    """Coproduct and counit derived from the trace pairing, with their defining identities checked."""
    if "frob" in A._cache:
        return A._cache["frob"]
    X = A.obj
    idA = identity(X)
    pinv = phi_inverse(A)
    delta = compose(tensor(pinv, A.m), tensor(dg.coev_tilde(X), idA))
    eta_dual = compose(dg.ev(X), tensor(identity(dg.dual(X)), A.eta))
    eps = compose(eta_dual, phi(A))
    m_delta = compose(A.m, delta)
    zeta = _scalar_of(m_delta, idA)
    xi = complex(compose(eps, A.eta).block(0)[0, 0])
    res = {
        "frobenius_left": compose(tensor(idA, A.m), tensor(delta, idA)).dist(compose(delta, A.m)),
        "frobenius_right": compose(tensor(A.m, idA), tensor(idA, delta)).dist(compose(delta, A.m)),
        "m_delta_id": m_delta.dist(idA),
        "eps_eta_dim": abs(xi - A.dim),
        "counit_left": compose(tensor(eps, idA), delta).dist(idA),
        "counit_right": compose(tensor(idA, eps), delta).dist(idA),
        "coassociativity": compose(tensor(delta, idA), delta).dist(compose(tensor(idA, delta), delta)),
        "symmetry": symmetry_residual(A, eps),
        "delta_reflected": compose(tensor(A.m, pinv), tensor(idA, dg.coev(X))).dist(delta),
        "phi_reflected": phi_reflected(A).dist(phi(A)),
    }
    fd = FrobeniusData(delta, eps, zeta, xi, res)
    A._cache["frob"] = fd
    return fd


def _scalar_of(f: Morphism, g: Morphism) -> complex:
    """Least-squares ``s`` with ``f = s g``."""
    num = sum(np.vdot(g.block(k), f.block(k)) for k in g.blocks)
    den = sum(np.vdot(g.block(k), g.block(k)) for k in g.blocks)
    return complex(num / den) if den else 0.0


def symmetry_residual(A: Algebra, eps: Morphism) -> float:
    """``((eps m) (x) id) o (id (x) b_A)`` against ``(id (x) (eps m)) o (b~_A (x) id)``."""
    X = A.obj
    Xd = dg.dual(X)
    idA = identity(X)
    em = compose(eps, A.m)
    lhs = compose(tensor(em, identity(Xd)), tensor(idA, dg.coev(X)))
    rhs = compose(tensor(identity(Xd), em), tensor(dg.coev_tilde(X), idA))
    return lhs.dist(rhs)


def delta(A: Algebra) -> Morphism:
    return frobenius_structure(A).delta


def counit(A: Algebra) -> Morphism:
    return frobenius_structure(A).eps


def delta_eta(A: Algebra) -> Morphism:
    """``Delta o eta : 1 -> A (x) A``."""
    return compose(delta(A), A.eta)


# --------------------------------------------------------------------------- predicates

def bimodule_endomorphisms(A: Algebra) -> list[Morphism]:
    """Basis of ``Hom_{A|A}(A, A)``."""
    X = A.obj
    idA = identity(X)

    def cons(f):
        fm = compose(f, A.m)
        return [fm - compose(A.m, tensor(f, idA)), fm - compose(A.m, tensor(idA, f))]
    return dg.solve_hom(X, X, cons)


def commutativity_residual(A: Algebra, sign: int = 1) -> float:
    c = dg.braiding(A.obj, A.obj) if sign > 0 else dg.braiding_inv(A.obj, A.obj)
    return compose(A.m, c).dist(A.m)


def predicates(A: Algebra) -> dict[str, Any]:
    """Flags with witnesses: commutative, symmetric, special (zeta, xi), haploid, simple, non-degenerate."""
    tol = max(A.tol, 1e-9)
    out: dict[str, Any] = {}
    out["commutative_residual"] = commutativity_residual(A)
    out["commutative"] = out["commutative_residual"] < tol * max(1.0, A.m.norm())
    out["haploid_dim"] = int(A.obj.spectrum[0])
    out["haploid"] = out["haploid_dim"] == 1
    out["phi_condition"] = phi_condition(A)
    out["nondegenerate"] = out["phi_condition"] < 1e8
    if out["nondegenerate"]:
        fd = frobenius_structure(A)
        out["symmetric_residual"] = fd.residuals["symmetry"]
        out["symmetric"] = fd.residuals["symmetry"] < 1e-8 * max(1.0, abs(A.dim))
        out["zeta"] = fd.zeta
        out["xi"] = fd.xi
        out["special"] = (compose(A.m, fd.delta).dist(fd.zeta * identity(A.obj)) < 1e-8
                          and abs(fd.zeta) > tol and abs(fd.xi) > tol)
        out["bimodule_end_dim"] = len(bimodule_endomorphisms(A))
        out["simple"] = out["bimodule_end_dim"] == 1
    else:
        out.update(symmetric=False, special=False, simple=False)
    return out


# --------------------------------------------------------------------------- constructions

def flatten_algebra(X: Obj, m: Morphism, eta: Morphism, name: str, check: bool = True):
    """Transfer an algebra on a word to the single-atom object with the same spectrum."""
    F, to, back = dg.flatten(X)
    mf = compose_all(to, m, tensor(back, back))
    ef = compose(to, eta)
    return make_algebra(F, mf, ef, name, check=check), to, back


def tensor_algebra(A: Algebra, B: Algebra, name: str = "") -> Algebra:
    """``A (x) B`` with ``m = (m_A (x) m_B) o (id_A (x) c^{-1}_{A,B} (x) id_B)``, flattened to one atom.

    The returned algebra carries ``_cache['word'] = (A, B, to, back)`` relating it to the word ``A B``.
    """
    X, Y = A.obj, B.obj
    m = compose(tensor(A.m, B.m),
                tensor_all(identity(X), dg.braiding_inv(X, Y), identity(Y)))
    eta = tensor(A.eta, B.eta)
    out, to, back = flatten_algebra(X + Y, m, eta, name or f"{A.name}(x){B.name}")
    out._cache["word"] = (A, B, to, back)
    return out


def left_centre_idempotent(A: Algebra) -> Morphism:
    """``P_l(A) = m o (m (x) id) o (id (x) c (x) ...) o (Delta eta (x) id)`` with the crossing pinned.

    Both crossings of the input strand with the right coproduct leg give
    idempotents in general only for one of them; the one whose image
    satisfies the left-centre condition ``m c_{A,A} (iota (x) id) = m (iota (x) id)``
    is returned.
    """
    if "P_l" in A._cache:
        return A._cache["P_l"]
    X = A.obj
    idA = identity(X)
    de = delta_eta(A)
    mm = compose(A.m, tensor(A.m, idA))
    best = None
    for sign in (+1, -1):
        c = dg.braiding(X, X) if sign > 0 else dg.braiding_inv(X, X)
        # A(x)A(x)A with legs (x1, x2, a) -> (x1, a, x2): braid the last two
        P = compose_all(mm, tensor(idA, c), tensor(de, idA))
        idem = compose(P, P).dist(P)
        cond = compose(A.m, compose(dg.braiding(X, X), tensor(P, idA))).dist(
            compose(A.m, tensor(P, idA)))
        score = max(idem, cond)
        if best is None or score < best[0]:
            best = (score, P, sign)
    A._cache["P_l"] = best[1]
    A._cache["P_l_sign"] = best[2]
    A._cache["P_l_residual"] = best[0]
    return best[1]


@dataclass
class LeftCentre:
    algebra: Algebra
    iota: Morphism
    r: Morphism
    idempotent: Morphism
    residuals: dict


def left_centre(A: Algebra, name: str = "") -> LeftCentre:
    """Image of ``P_l(A)`` with the induced (commutative) algebra structure."""
    P = left_centre_idempotent(A)
    Im, e, r = dg.split_idempotent(P)
    m = compose_all(r, A.m, tensor(e, e))
    eta = compose(r, A.eta)
    C = make_algebra(Im, m, eta, name or f"C_l({A.name})")
    res = {"idempotent": compose(P, P).dist(P),
           "centre_condition": A._cache["P_l_residual"],
           "split_r_e": compose(r, e).dist(identity(Im)),
           "split_e_r": compose(e, r).dist(P),
           "commutative": commutativity_residual(C)}
    return LeftCentre(C, e, r, P, res)


def transport_algebra(A: Algebra, f: Morphism, finv: Morphism, name: str = "") -> Algebra:
    """Algebra structure moved along an isomorphism ``f : A -> B``."""
    m = compose_all(f, A.m, tensor(finv, finv))
    return make_algebra(f.cod, m, compose(f, A.eta), name or A.name)
