"""Objects and morphisms of a skeletal category, evaluated in canonical fusion-tree bases.

An :class:`Obj` is a tensor word of *atoms*; an atom is a finite direct sum of
simple objects, stored as a multiplicity vector.  The word is strictified: its
Hom spaces ``Hom(U_k, X_1 (x) ... (x) X_n)`` are given the left-combed tree
basis and every operation that regroups factors (tensoring morphisms, braiding)
converts through F-moves.  A :class:`Morphism` is then one complex matrix per
simple label ``k``, acting on these coordinate spaces.

Left-combed basis descriptor for a word ``P + [X]`` of length at least two,
ordered lexicographically::

    (e, a, p, i, mu)   e: label of P, a: label of X, p: index in P's basis at e,
                       i: copy of U_a inside X, mu < N[e, a, k]

For a single atom the descriptor is the copy index of ``U_k``; the empty word is
the tensor unit with one basis vector at ``k = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import sparse

from .category import CategoryData, CategoryError

__all__ = [
    "Obj", "Morphism", "IdempotentError", "simple", "atom", "word", "unit", "zero_object",
    "identity", "zero", "compose", "tensor", "tensor_obj", "braiding", "braiding_inv",
    "dual", "ev", "coev", "ev_tilde", "coev_tilde", "pivotal_iso", "dual_mor",
    "trace_l", "trace_r", "trace", "dim", "dim_l", "dim_r", "split_idempotent",
    "spectrum_basis", "flatten", "direct_sum", "hom_basis", "solve_hom",
    "Atom",
]

Atom = tuple  # tuple[int, ...] of multiplicities, one per simple label


class IdempotentError(CategoryError):
    """Raised when a morphism expected to be an idempotent is not, or is ill-conditioned."""


def _cache(cat: CategoryData, key):
    return cat._cache.setdefault(key, {})


# --------------------------------------------------------------------------- objects

class Obj:
    """Tensor word of atoms in category ``cat``; immutable and hashable."""

    __slots__ = ("cat", "atoms", "__dict__")

    def __init__(self, cat: CategoryData, atoms: Iterable[Sequence[int]]):
        self.cat = cat
        n = cat.rank
        out = []
        for a in atoms:
            a = tuple(int(x) for x in a)
            if len(a) != n or min(a, default=0) < 0:
                raise ValueError(f"atom {a} does not fit category of rank {n}")
            out.append(a)
        self.atoms = tuple(out)

    def __len__(self) -> int:
        return len(self.atoms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Obj) and other.cat is self.cat and other.atoms == self.atoms

    def __hash__(self) -> int:
        return hash((id(self.cat), self.atoms))

    def __add__(self, other: "Obj") -> "Obj":
        """Tensor product of words (concatenation)."""
        if other.cat is not self.cat:
            raise ValueError("objects live in different categories")
        return Obj(self.cat, self.atoms + other.atoms)

    def __repr__(self) -> str:
        labs = self.cat.labels
        parts = []
        for a in self.atoms:
            terms = [(f"{m}*" if m > 1 else "") + labs[k] for k, m in enumerate(a) if m]
            parts.append("(" + "+".join(terms) + ")" if len(terms) != 1 else terms[0])
        return "Obj[" + " x ".join(parts or ["1"]) + "]"

    @cached_property
    def spectrum(self) -> np.ndarray:
        return np.array([len(self.basis(k)) for k in range(self.cat.rank)], dtype=int)

    def dim_k(self, k: int) -> int:
        return len(self.basis(k))

    def basis(self, k: int) -> list:
        return _word_basis(self.cat, self.atoms)[0][k]

    def offsets(self, k: int) -> dict:
        return _word_basis(self.cat, self.atoms)[1][k]

    @property
    def is_zero(self) -> bool:
        return not self.spectrum.any()


def _word_basis(cat: CategoryData, atoms: tuple):
    """Descriptor lists and block offsets of the left-combed basis, cached per word."""
    store = _cache(cat, "basis")
    hit = store.get(atoms)
    if hit is not None:
        return hit
    n = cat.rank
    if not atoms:
        bases = [[()] if k == 0 else [] for k in range(n)]
        offs = [{} for _ in range(n)]
    elif len(atoms) == 1:
        bases = [list(range(atoms[0][k])) for k in range(n)]
        offs = [{} for _ in range(n)]
    else:
        prev = _word_basis(cat, atoms[:-1])[0]
        X = atoms[-1]
        N = cat.fusion
        bases, offs = [], []
        for k in range(n):
            lst, off = [], {}
            for e in range(n):
                de = len(prev[e])
                if not de:
                    continue
                for a in range(n):
                    if not X[a] or not N[e, a, k]:
                        continue
                    off[(e, a)] = len(lst)
                    lst.extend((e, a, p, i, mu) for p in range(de) for i in range(X[a])
                               for mu in range(N[e, a, k]))
            bases.append(lst)
            offs.append(off)
    store[atoms] = (bases, offs)
    return bases, offs


def simple(cat: CategoryData, k: int | str) -> Obj:
    k = cat.label(k)
    a = [0] * cat.rank
    a[k] = 1
    return Obj(cat, [a])


def atom(cat: CategoryData, mult: dict | Sequence[int]) -> Obj:
    """Single-atom object from ``{label: multiplicity}`` or a full multiplicity vector."""
    if isinstance(mult, dict):
        a = [0] * cat.rank
        for lab, m in mult.items():
            a[cat.label(lab)] += int(m)
    else:
        a = list(mult)
    return Obj(cat, [a])


def word(*objs: Obj) -> Obj:
    out = objs[0]
    for o in objs[1:]:
        out = out + o
    return out


def unit(cat: CategoryData) -> Obj:
    return Obj(cat, [])


def zero_object(cat: CategoryData) -> Obj:
    return Obj(cat, [[0] * cat.rank])


tensor_obj = word


# --------------------------------------------------------------------------- morphisms

@dataclass(frozen=True, eq=False)
class Morphism:
    """Linear map between words, one matrix ``(cod.dim_k, dom.dim_k)`` per label ``k``."""

    dom: Obj
    cod: Obj
    blocks: dict

    def __post_init__(self):
        if self.dom.cat is not self.cod.cat:
            raise ValueError("domain and codomain in different categories")

    @property
    def cat(self) -> CategoryData:
        return self.dom.cat

    def block(self, k: int) -> np.ndarray:
        b = self.blocks.get(k)
        if b is None:
            return np.zeros((self.cod.dim_k(k), self.dom.dim_k(k)), dtype=complex)
        return b

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def __add__(self, other: "Morphism") -> "Morphism":
        _check_parallel(self, other)
        keys = set(self.blocks) | set(other.blocks)
        return Morphism(self.dom, self.cod, {k: self.block(k) + other.block(k) for k in keys})

    def __sub__(self, other: "Morphism") -> "Morphism":
        return self + (-1.0) * other

    def __neg__(self) -> "Morphism":
        return (-1.0) * self

    def __mul__(self, s) -> "Morphism":
        return Morphism(self.dom, self.cod, {k: s * b for k, b in self.blocks.items()})

    __rmul__ = __mul__

    def __truediv__(self, s) -> "Morphism":
        return self * (1.0 / s)

    def norm(self) -> float:
        return max((float(np.max(np.abs(b))) for b in self.blocks.values() if b.size), default=0.0)

    def dist(self, other: "Morphism") -> float:
        """Max-abs entrywise distance (the residual used throughout)."""
        _check_parallel(self, other)
        out = 0.0
        for k in set(self.blocks) | set(other.blocks):
            d = self.block(k) - other.block(k)
            if d.size:
                out = max(out, float(np.max(np.abs(d))))
        return out

    def scalar(self) -> complex:
        """Value of an endomorphism of the unit (or of a simple atom)."""
        ks = [k for k in range(self.cat.rank) if self.dom.dim_k(k)]
        if len(ks) != 1 or self.dom.dim_k(ks[0]) != 1 or self.cod != self.dom:
            raise ValueError("scalar() needs an endomorphism of a simple object")
        return complex(self.block(ks[0])[0, 0])

    def vector(self) -> np.ndarray:
        """Concatenated block entries in label order (coordinates in the Hom basis)."""
        parts = [self.block(k).ravel() for k in range(self.cat.rank)
                 if self.dom.dim_k(k) and self.cod.dim_k(k)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)

    @staticmethod
    def from_vector(dom: Obj, cod: Obj, vec: np.ndarray) -> "Morphism":
        blocks = {}
        pos = 0
        for k in range(dom.cat.rank):
            r, c = cod.dim_k(k), dom.dim_k(k)
            if r and c:
                blocks[k] = np.asarray(vec[pos:pos + r * c], dtype=complex).reshape(r, c)
                pos += r * c
        if pos != len(vec):
            raise ValueError("vector length does not match Hom space")
        return Morphism(dom, cod, blocks)

    def retype(self, dom: Obj | None = None, cod: Obj | None = None) -> "Morphism":
        """Same blocks between words with identical spectra (identity-block isomorphisms)."""
        dom = dom or self.dom
        cod = cod or self.cod
        if (dom.spectrum != self.dom.spectrum).any() or (cod.spectrum != self.cod.spectrum).any():
            raise ValueError("retype needs matching spectra")
        return Morphism(dom, cod, self.blocks)

    def __repr__(self) -> str:
        return f"Morphism({self.dom!r} -> {self.cod!r})"


def _check_parallel(f: Morphism, g: Morphism) -> None:
    if f.dom != g.dom or f.cod != g.cod:
        raise ValueError(f"morphisms not parallel: {f} vs {g}")


def identity(X: Obj) -> Morphism:
    return Morphism(X, X, {k: np.eye(d, dtype=complex)
                           for k, d in enumerate(X.spectrum) if d})


def zero(X: Obj, Y: Obj) -> Morphism:
    return Morphism(X, Y, {})


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g o f``."""
    if f.cod != g.dom:
        raise ValueError(f"cannot compose {g} after {f}")
    blocks = {}
    for k, fb in f.blocks.items():
        gb = g.blocks.get(k)
        if gb is not None:
            blocks[k] = gb @ fb
    return Morphism(f.dom, g.cod, blocks)


def compose_all(*ms: Morphism) -> Morphism:
    """``ms[0] o ms[1] o ... o ms[-1]``."""
    out = ms[-1]
    for m in reversed(ms[:-1]):
        out = compose(m, out)
    return out


# --------------------------------------------------------------------------- regrouping

def _two_tree_layout(U: Obj, V: Obj, k: int):
    """Offsets of the basis ``(e, f, p, q, mu)`` of Hom(U_k, U (x) V) built from two trees.

    Returns ``(offsets, size, decode)`` with ``decode[idx] = (e, f, p, q, mu)``.
    """
    cat = U.cat
    key = (U.atoms, V.atoms, k)
    store = _cache(cat, "twotree")
    hit = store.get(key)
    if hit is not None:
        return hit
    N = cat.fusion
    off = {}
    decode = []
    for e in range(cat.rank):
        de = U.dim_k(e)
        if not de:
            continue
        for f in range(cat.rank):
            df = V.dim_k(f)
            if df and N[e, f, k]:
                off[(e, f)] = len(decode)
                decode.extend((e, f, p, q, mu) for p in range(de) for q in range(df)
                              for mu in range(N[e, f, k]))
    hit = (off, len(decode), decode)
    store[key] = hit
    return hit


def _trivial_regroup(U: Obj, V: Obj) -> bool:
    return len(V) <= 1 or len(U) == 0


def _regroup(U: Obj, V: Obj, k: int, inverse: bool = False) -> sparse.csc_matrix | None:
    """Change of basis between two-tree vectors of ``U (x) V`` and the left-combed basis of ``U + V``.

    Forward: columns are two-tree vectors written in the left-combed basis.
    Inverse: columns are left-combed vectors written in the two-tree basis.
    ``None`` stands for the identity.  Both directions are assembled from
    F-moves recursively, so no matrix is ever inverted.
    """
    if _trivial_regroup(U, V):
        return None
    cat = U.cat
    key = (U.atoms, V.atoms, k, inverse)
    store = _cache(cat, "regroup")
    hit = store.get(key)
    if hit is not None:
        return hit
    N = cat.fusion
    W = U + V
    D = W.dim_k(k)
    Vp = Obj(cat, V.atoms[:-1])
    X = V.atoms[-1]
    off2, _, decode2 = _two_tree_layout(U, V, k)
    woff = W.offsets(k)
    rows, cols, vals = [], [], []
    inner = {}

    def inner_of(h):
        if h not in inner:
            mat = _regroup(U, Vp, h, inverse)
            lay = _two_tree_layout(U, Vp, h)
            inner[h] = (mat, lay)
        return inner[h]

    if not inverse:
        for col, (e, f, p, q, mu) in enumerate(decode2):
            g, a, qp, i, nu = V.basis(f)[q]
            blk = cat.fblocks[(e, g, a, k)]
            cidx = blk.col_index[(f, nu, mu)]
            finv = blk.inv
            for ridx, (h, al, be) in enumerate(blk.rows):
                coef = finv[cidx, ridx]
                if coef == 0:
                    continue
                Lh, (offh, _, _) = inner_of(h)
                inner_col = offh[(e, g)] + (p * Vp.dim_k(g) + qp) * N[e, g, h] + al
                if Lh is None:
                    nz, data = np.array([inner_col]), np.array([1.0])
                else:
                    sl = slice(Lh.indptr[inner_col], Lh.indptr[inner_col + 1])
                    nz, data = Lh.indices[sl], Lh.data[sl]
                rows.append(woff[(h, a)] + (nz * X[a] + i) * N[h, a, k] + be)
                cols.append(np.full(len(nz), col))
                vals.append(coef * data)
    else:
        for col, (h, a, s, i, be) in enumerate(W.basis(k)):
            Lh, (offh, _, dech) = inner_of(h)
            if Lh is None:
                nz, data = np.array([s]), np.array([1.0])
            else:
                sl = slice(Lh.indptr[s], Lh.indptr[s + 1])
                nz, data = Lh.indices[sl], Lh.data[sl]
            for t, x in zip(nz, data):
                e, g, p, qp, al = dech[t]
                blk = cat.fblocks[(e, g, a, k)]
                ridx = blk.row_index[(h, al, be)]
                for cidx, (f, nu, mu) in enumerate(blk.cols):
                    coef = blk.mat[ridx, cidx]
                    if coef == 0:
                        continue
                    q = V.offsets(f)[(g, a)] + (qp * X[a] + i) * N[g, a, f] + nu
                    rows.append([off2[(e, f)] + (p * V.dim_k(f) + q) * N[e, f, k] + mu])
                    cols.append([col])
                    vals.append([coef * x])
    if rows:
        mat = sparse.csc_matrix((np.concatenate(vals).astype(complex),
                                 (np.concatenate(rows), np.concatenate(cols))), shape=(D, D))
    else:
        mat = sparse.csc_matrix((D, D), dtype=complex)
    mat.sum_duplicates()
    mat.eliminate_zeros()
    store[key] = mat
    return mat


def _apply(L, M):
    """``L @ M`` where ``L`` may be ``None`` (identity) or sparse; ``M`` sparse or dense."""
    return M if L is None else L @ M


def _to_dense(M) -> np.ndarray:
    return M.toarray() if sparse.issparse(M) else np.asarray(M)


def _conjugate(Lt, K, Ls_inv) -> np.ndarray:
    """``Lt @ K @ Ls_inv`` with identity shortcuts, returned dense."""
    out = K
    if Ls_inv is not None:
        out = out @ Ls_inv
    if Lt is not None:
        out = Lt @ out
    return _to_dense(out)


def tensor(f: Morphism, g: Morphism) -> Morphism:
    """``f (x) g`` on concatenated words."""
    if f.cat is not g.cat:
        raise ValueError("tensor of morphisms in different categories")
    cat = f.cat
    N = cat.fusion
    U, V, U2, V2 = f.dom, g.dom, f.cod, g.cod
    blocks = {}
    for k in range(cat.rank):
        off_s, ds, _ = _two_tree_layout(U, V, k)
        off_t, dt, _ = _two_tree_layout(U2, V2, k)
        if not ds or not dt:
            continue
        parts = []
        for (e, ff), s0 in off_s.items():
            t0 = off_t.get((e, ff))
            fb = f.blocks.get(e)
            gb = g.blocks.get(ff)
            if t0 is None or fb is None or gb is None:
                continue
            n = N[e, ff, k]
            sub = np.kron(fb, gb)
            if n > 1:
                sub = np.kron(sub, np.eye(n))
            parts.append((t0, s0, sub))
        if not parts:
            continue
        if len(parts) == 1 and parts[0][2].shape == (dt, ds):
            K = parts[0][2]
        else:
            rr, cc, vv = [], [], []
            for t0, s0, sub in parts:
                r, c = np.nonzero(sub)
                rr.append(r + t0)
                cc.append(c + s0)
                vv.append(sub[r, c])
            K = sparse.csr_matrix((np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
                                  shape=(dt, ds))
        blocks[k] = _conjugate(_regroup(U2, V2, k), K, _regroup(U, V, k, inverse=True))
    return Morphism(U + V, U2 + V2, blocks)


def tensor_all(*ms: Morphism) -> Morphism:
    out = ms[0]
    for m in ms[1:]:
        out = tensor(out, m)
    return out


def braiding(U: Obj, V: Obj, inverse: bool = False) -> Morphism:
    """``c_{U,V} : U (x) V -> V (x) U``; with ``inverse`` returns ``c_{V,U}^{-1} : U (x) V -> V (x) U``."""
    cat = U.cat
    key = (U.atoms, V.atoms, inverse)
    store = _cache(cat, "braid")
    hit = store.get(key)
    if hit is not None:
        return hit
    blocks = {}
    for k in range(cat.rank):
        off_s, ds, _ = _two_tree_layout(U, V, k)
        off_t, _, _ = _two_tree_layout(V, U, k)
        if not ds:
            continue
        rr, cc, vv = [], [], []
        for (e, f), s0 in off_s.items():
            t0 = off_t[(f, e)]
            de, df = U.dim_k(e), V.dim_k(f)
            R = cat.rinv[(f, e, k)] if inverse else cat.rblocks[(e, f, k)]
            sub = np.einsum("Qq,Pp,mn->QPnpqm", np.eye(df), np.eye(de), R).reshape(
                df * de * R.shape[1], de * df * R.shape[0])
            r, c = np.nonzero(sub)
            rr.append(r + t0)
            cc.append(c + s0)
            vv.append(sub[r, c])
        M = sparse.csr_matrix((np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
                              shape=(ds, ds))
        blocks[k] = _conjugate(_regroup(V, U, k), M, _regroup(U, V, k, inverse=True))
    out = Morphism(U + V, V + U, blocks)
    store[key] = out
    return out


def braiding_inv(U: Obj, V: Obj) -> Morphism:
    """``c_{U,V}^{-1} : V (x) U -> U (x) V``."""
    return braiding(V, U, inverse=True)


# --------------------------------------------------------------------------- duality

def _dual_atom(cat: CategoryData, a: tuple) -> tuple:
    return tuple(a[cat.dual[k]] for k in range(cat.rank))


def dual(X: Obj) -> Obj:
    return Obj(X.cat, [_dual_atom(X.cat, a) for a in reversed(X.atoms)])


def _cup_scale(cat: CategoryData) -> np.ndarray:
    """``beta_k`` such that ``(id_k (x) d_k) o (beta_k b^0_k (x) id_k) = id_k``."""
    if "beta" in cat._cache:
        return cat._cache["beta"]
    beta = np.ones(cat.rank, dtype=complex)
    for k in range(cat.rank):
        Uk = simple(cat, k)
        b0 = _atom_cup(Uk.atoms[0], cat, np.ones(cat.rank))
        d0 = _atom_cap(Uk.atoms[0], cat)
        z = compose(tensor(identity(Uk), d0), tensor(b0, identity(Uk))).scalar()
        if abs(z) < 1e-14:
            raise CategoryError(f"degenerate cap/cup pairing at {cat.labels[k]!r}")
        beta[k] = 1.0 / z
    cat._cache["beta"] = beta
    return beta


def _atom_cap(a: tuple, cat: CategoryData, coef: np.ndarray | None = None) -> Morphism:
    """``d_X : X^v (x) X -> 1`` for an atom; copy ``p`` of ``k-bar`` pairs with copy ``p`` of ``k``."""
    X = Obj(cat, [a])
    Xd = Obj(cat, [_dual_atom(cat, a)])
    W = Xd + X
    row = np.zeros((1, W.dim_k(0)), dtype=complex)
    off = W.offsets(0)
    for e in range(cat.rank):
        eb = cat.dual[e]
        m = a[eb]
        if m:
            base = off[(e, eb)]
            c = 1.0 if coef is None else coef[eb]
            for p in range(m):
                row[0, base + p * m + p] = c
    return Morphism(W, unit(cat), {0: row} if row.size else {})


def _atom_cup(a: tuple, cat: CategoryData, coef: np.ndarray) -> Morphism:
    """``b_X : 1 -> X (x) X^v`` with coefficient ``coef[k]`` on the copy of ``k``."""
    X = Obj(cat, [a])
    Xd = Obj(cat, [_dual_atom(cat, a)])
    W = X + Xd
    col = np.zeros((W.dim_k(0), 1), dtype=complex)
    off = W.offsets(0)
    for e in range(cat.rank):
        m = a[e]
        if m:
            base = off[(e, cat.dual[e])]
            for p in range(m):
                col[base + p * m + p, 0] = coef[e]
    return Morphism(unit(cat), W, {0: col} if col.size else {})


def _atom_duality(X: Obj, which: str) -> Morphism:
    cat = X.cat
    a = X.atoms[0]
    beta = _cup_scale(cat)
    piv = cat.pivotal
    dual_idx = np.array(cat.dual)
    if which == "d":
        return _atom_cap(a, cat)
    if which == "b":
        return _atom_cup(a, cat, beta)
    if which == "dt":
        # d~_X : X (x) X^v -> 1, the cap of X^v scaled by the pivotal coefficient of X
        return _atom_cap(_dual_atom(cat, a), cat, coef=piv[dual_idx])
    if which == "bt":
        # b~_X : 1 -> X^v (x) X, the cup of X^v scaled by 1 / pivotal coefficient of X
        return _atom_cup(_dual_atom(cat, a), cat, beta / piv[dual_idx])
    raise ValueError(which)


def _duality(X: Obj, which: str) -> Morphism:
    cat = X.cat
    store = _cache(cat, "duality")
    key = (X.atoms, which)
    hit = store.get(key)
    if hit is not None:
        return hit
    if len(X) == 0:
        out = identity(X)
    elif len(X) == 1:
        out = _atom_duality(X, which)
    else:
        U = Obj(cat, X.atoms[:1])
        V = Obj(cat, X.atoms[1:])
        Ud, Vd = dual(U), dual(V)
        if which == "d":      # V^v U^v U V -> 1
            out = compose(_duality(V, "d"),
                          tensor_all(identity(Vd), _duality(U, "d"), identity(V)))
        elif which == "b":    # 1 -> U V V^v U^v
            out = compose(tensor_all(identity(U), _duality(V, "b"), identity(Ud)),
                          _duality(U, "b"))
        elif which == "dt":   # U V V^v U^v -> 1
            out = compose(_duality(U, "dt"),
                          tensor_all(identity(U), _duality(V, "dt"), identity(Ud)))
        elif which == "bt":   # 1 -> V^v U^v U V
            out = compose(tensor_all(identity(Vd), _duality(U, "bt"), identity(V)),
                          _duality(V, "bt"))
        else:
            raise ValueError(which)
    store[key] = out
    return out


def ev(X: Obj) -> Morphism:
    """``d_X : X^v (x) X -> 1``."""
    return _duality(X, "d")


def coev(X: Obj) -> Morphism:
    """``b_X : 1 -> X (x) X^v``."""
    return _duality(X, "b")


def ev_tilde(X: Obj) -> Morphism:
    """``d~_X : X (x) X^v -> 1``."""
    return _duality(X, "dt")


def coev_tilde(X: Obj) -> Morphism:
    """``b~_X : 1 -> X^v (x) X``."""
    return _duality(X, "bt")


def pivotal_iso(X: Obj) -> Morphism:
    """``delta_X = (d~_X (x) id) o (id_X (x) b_{X^v}) : X -> X^vv``."""
    Xd = dual(X)
    Xdd = dual(Xd)
    return compose(tensor(ev_tilde(X), identity(Xdd)), tensor(identity(X), coev(Xd)))


def dual_mor(f: Morphism) -> Morphism:
    """``f^v : Y^v -> X^v`` for ``f : X -> Y``."""
    X, Y = f.dom, f.cod
    Xd, Yd = dual(X), dual(Y)
    return compose_all(tensor(ev(Y), identity(Xd)),
                       tensor_all(identity(Yd), f, identity(Xd)),
                       tensor(identity(Yd), coev(X)))


def trace_l(f: Morphism) -> complex:
    """``d_X o (id_{X^v} (x) f) o b~_X``."""
    X = f.dom
    if f.cod != X:
        raise ValueError("trace of a non-endomorphism")
    m = compose_all(ev(X), tensor(identity(dual(X)), f), coev_tilde(X))
    return complex(m.block(0)[0, 0])


def trace_r(f: Morphism) -> complex:
    """``d~_X o (f (x) id_{X^v}) o b_X``."""
    X = f.dom
    if f.cod != X:
        raise ValueError("trace of a non-endomorphism")
    m = compose_all(ev_tilde(X), tensor(f, identity(dual(X))), coev(X))
    return complex(m.block(0)[0, 0])


def simple_dims(cat: CategoryData) -> np.ndarray:
    """Left dimensions of the simples from the atom cap/cup normalisation."""
    beta = _cup_scale(cat)
    return np.array([beta[cat.dual[k]] / cat.pivotal[k] for k in range(cat.rank)])


def trace(f: Morphism) -> complex:
    """Trace through the block decomposition: ``sum_k dim(U_k) Tr(f_k)``.

    Agrees with :func:`trace_l` whenever the pivotal structure is monoidal; this
    is the fast route used inside larger computations.
    """
    if f.cod != f.dom:
        raise ValueError("trace of a non-endomorphism")
    d = simple_dims(f.cat)
    return complex(sum(d[k] * np.trace(b) for k, b in f.blocks.items()))


def dim(X: Obj) -> complex:
    return complex(np.dot(simple_dims(X.cat), X.spectrum))


def dim_l(X: Obj) -> complex:
    return trace_l(identity(X))


def dim_r(X: Obj) -> complex:
    return trace_r(identity(X))


# --------------------------------------------------------------------------- sums and splitting

def flatten(X: Obj) -> tuple[Obj, Morphism, Morphism]:
    """Single-atom object with the spectrum of ``X`` and the identity-block isomorphisms."""
    F = Obj(X.cat, [tuple(int(x) for x in X.spectrum)])
    to = Morphism(X, F, identity(X).blocks)
    back = Morphism(F, X, identity(X).blocks)
    return F, to, back


def direct_sum(objs: Sequence[Obj]) -> tuple[Obj, list[Morphism], list[Morphism]]:
    """``S = (+)_j X_j`` as one atom, with inclusions ``X_j -> S`` and projections ``S -> X_j``.

    Copies of ``U_k`` in ``S`` are ordered by summand, then by the summand's own basis.
    """
    cat = objs[0].cat
    spec = sum((o.spectrum for o in objs), np.zeros(cat.rank, dtype=int))
    S = Obj(cat, [tuple(int(x) for x in spec)])
    incs, projs = [], []
    start = np.zeros(cat.rank, dtype=int)
    for o in objs:
        ib, pb = {}, {}
        for k in range(cat.rank):
            d = o.dim_k(k)
            if d:
                m = np.zeros((spec[k], d), dtype=complex)
                m[start[k]:start[k] + d, :] = np.eye(d)
                ib[k] = m
                pb[k] = m.T.copy()
        incs.append(Morphism(o, S, ib))
        projs.append(Morphism(S, o, pb))
        start = start + o.spectrum
    return S, incs, projs


def spectrum_basis(X: Obj) -> dict[int, tuple[list[Morphism], list[Morphism]]]:
    """For each ``k``: embeddings ``u^k_a : U_k -> X`` and projections ``v^k_a : X -> U_k``."""
    cat = X.cat
    out = {}
    for k in range(cat.rank):
        d = X.dim_k(k)
        if not d:
            continue
        Uk = simple(cat, k)
        us, vs = [], []
        for a in range(d):
            col = np.zeros((d, 1), dtype=complex)
            col[a, 0] = 1.0
            us.append(Morphism(Uk, X, {k: col}))
            vs.append(Morphism(X, Uk, {k: col.T.copy()}))
        out[k] = (us, vs)
    return out


def split_idempotent(p: Morphism, tol: float | None = None) -> tuple[Obj, Morphism, Morphism]:
    """Image of an idempotent: ``(Im, e : Im -> X, r : X -> Im)`` with ``r e = id``, ``e r = p``."""
    X = p.dom
    if p.cod != X:
        raise IdempotentError("split_idempotent needs an endomorphism")
    tol = 1e-7 if tol is None else tol
    res = compose(p, p).dist(p)
    scale = max(1.0, p.norm())
    if res > tol * scale:
        raise IdempotentError(f"not idempotent: |p p - p| = {res:.3g}")
    cat = X.cat
    ranks = np.zeros(cat.rank, dtype=int)
    qs = {}
    for k, b in p.blocks.items():
        if not b.size:
            continue
        ev_ = np.linalg.eigvals(b)
        amb = (np.abs(ev_) > 0.1) & (np.abs(ev_ - 1) > 0.1)
        if amb.any():
            raise IdempotentError(
                f"ambiguous rank at label {cat.labels[k]!r}: eigenvalues {ev_[amb]}")
        r = int(np.sum(np.abs(ev_ - 1) <= 0.1))
        if r:
            u, _, _ = np.linalg.svd(b)
            qs[k] = u[:, :r]
            ranks[k] = r
    Im = Obj(cat, [tuple(int(x) for x in ranks)])
    e = Morphism(Im, X, {k: q for k, q in qs.items()})
    r = Morphism(X, Im, {k: q.conj().T @ p.blocks[k] for k, q in qs.items()})
    return Im, e, r


# --------------------------------------------------------------------------- linear solves

def hom_basis(X: Obj, Y: Obj) -> list[Morphism]:
    """Elementary basis of ``Hom(X, Y)`` (one unit entry each), in block order."""
    out = []
    for k in range(X.cat.rank):
        r, c = Y.dim_k(k), X.dim_k(k)
        for i in range(r):
            for j in range(c):
                m = np.zeros((r, c), dtype=complex)
                m[i, j] = 1.0
                out.append(Morphism(X, Y, {k: m}))
    return out


def hom_dim(X: Obj, Y: Obj) -> int:
    return int(np.dot(X.spectrum, Y.spectrum))


def _nullspace(A: np.ndarray, rel: float = 1e-7) -> np.ndarray:
    if A.shape[0] == 0:
        return np.eye(A.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    thresh = rel * max(smax, 1.0)
    rank = int(np.sum(s > thresh))
    return vh[rank:].conj().T


def solve_hom(X: Obj, Y: Obj, constraint: Callable[[Morphism], Sequence[Morphism]],
              rel: float = 1e-7) -> list[Morphism]:
    """Basis of ``{f in Hom(X, Y) : constraint(f) = 0}`` for a linear ``constraint``.

    ``constraint`` returns a list of morphisms that must all vanish.  The null
    space is taken at singular values ``<= rel * max(smax, 1)``.
    """
    basis = hom_basis(X, Y)
    if not basis:
        return []
    cols = []
    for b in basis:
        cols.append(np.concatenate([m.vector() for m in constraint(b)] or [np.zeros(0)]))
    A = np.stack(cols, axis=1)
    ns = _nullspace(A, rel)
    return [Morphism.from_vector(X, Y, ns[:, j]) for j in range(ns.shape[1])]
