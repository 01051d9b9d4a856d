"""Skeletal braided fusion category data: loading, axiom checks, derived invariants.

Conventions
-----------
Simple objects are integers ``0..n-1`` with ``0`` the tensor unit.  Hom spaces
``Hom(U_c, U_a (x) U_b)`` carry the basis of splitting vertices ``Y^{ab}_{c,mu}``,
``mu < N[a, b, c]``.  The F-symbols are the change of basis between the two
bracketings of a three-fold product::

    alpha_{a,b,c} o T1(e, al, be) = sum_{f, ga, de} F^{abc}_d[(e, al, be), (f, ga, de)] T2(f, ga, de)

with ``T1 = (Y^{ab}_{e,al} (x) id_c) o Y^{ec}_{d,be}`` and
``T2 = (id_a (x) Y^{bc}_{f,ga}) o Y^{af}_{d,de}``.  The R-symbols are defined by
``c_{a,b} o Y^{ab}_{c,mu} = sum_nu R^{ab}_c[mu, nu] Y^{ba}_{c,nu}``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

__all__ = [
    "CategoryError",
    "CategoryFormatError",
    "CategoryData",
    "FBlock",
    "ValidationReport",
    "load_category",
    "dump_category",
    "validate_axioms",
    "quantum_dimensions",
    "s_matrix",
    "twists",
    "reverse_braiding",
    "product_category",
]


class CategoryError(Exception):
    """Raised when category data violates an axiom needed by a computation."""


class CategoryFormatError(CategoryError, ValueError):
    """Raised when a category file cannot be parsed."""


@dataclass(frozen=True)
class FBlock:
    """F-matrix for one quadruple ``(a, b, c; d)``.

    Rows are left-bracketed trees ``(e, alpha, beta)``, columns right-bracketed
    trees ``(f, gamma, delta)``.
    """

    rows: tuple
    cols: tuple
    mat: np.ndarray

    @cached_property
    def row_index(self) -> dict:
        return {r: i for i, r in enumerate(self.rows)}

    @cached_property
    def col_index(self) -> dict:
        return {c: i for i, c in enumerate(self.cols)}

    @cached_property
    def inv(self) -> np.ndarray:
        return np.linalg.inv(self.mat)


@dataclass(eq=False)
class CategoryData:
    """Immutable skeletal data of a (braided, pivotal) fusion category.

    ``fblocks`` and ``rblocks`` are the canonical internal representation; the
    flat symbol dictionaries of the file format are recovered with
    :attr:`f_symbols` and :attr:`r_symbols`.
    """

    labels: tuple[str, ...]
    dual: tuple[int, ...]
    fusion: np.ndarray
    fblocks: dict[tuple[int, int, int, int], FBlock]
    rblocks: dict[tuple[int, int, int], np.ndarray]
    pivotal: np.ndarray
    tolerance: float = 1e-9
    name: str = ""
    factors: tuple = field(default=(), repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def label(self, name: str | int) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.labels.index(name)
        except ValueError:
            raise CategoryError(f"unknown label {name!r} in category {self.name!r}") from None

    def N(self, a: int, b: int, c: int) -> int:
        return int(self.fusion[a, b, c])

    @cached_property
    def fusion_channels(self) -> dict[tuple[int, int], tuple[int, ...]]:
        n = self.rank
        return {(a, b): tuple(c for c in range(n) if self.fusion[a, b, c])
                for a in range(n) for b in range(n)}

    def fmove(self, a: int, b: int, c: int, d: int) -> FBlock | None:
        return self.fblocks.get((a, b, c, d))

    def rmove(self, a: int, b: int, c: int) -> np.ndarray:
        return self.rblocks[(a, b, c)]

    @cached_property
    def rinv(self) -> dict[tuple[int, int, int], np.ndarray]:
        """Inverse braiding coefficients: ``c_{a,b}^{-1} Y^{ba}_nu = sum_mu Rinv^{ab}_c[nu, mu] Y^{ab}_mu``."""
        return {key: np.linalg.inv(mat) for key, mat in self.rblocks.items()}

    @property
    def f_symbols(self) -> dict[tuple, complex]:
        out = {}
        for (a, b, c, d), blk in self.fblocks.items():
            for i, (e, al, be) in enumerate(blk.rows):
                for j, (f, ga, de) in enumerate(blk.cols):
                    val = complex(blk.mat[i, j])
                    if val != 0:
                        out[(a, b, c, d, e, f, al, be, ga, de)] = val
        return out

    @property
    def r_symbols(self) -> dict[tuple, complex]:
        out = {}
        for (a, b, c), mat in self.rblocks.items():
            for mu, nu in itertools.product(range(mat.shape[0]), range(mat.shape[1])):
                if mat[mu, nu] != 0:
                    out[(a, b, c, mu, nu)] = complex(mat[mu, nu])
        return out

    def __repr__(self) -> str:
        return f"CategoryData({self.name or '?'}, labels={list(self.labels)})"


# --------------------------------------------------------------------------- parsing

def _parse_number(value: Any, where: str) -> complex:
    try:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ValueError("expected [re, im]")
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(" ", ""))
        return complex(value)
    except (TypeError, ValueError) as exc:
        raise CategoryFormatError(f"{where}: bad number {value!r} ({exc})") from None


def _tree_spaces(fusion: np.ndarray, a: int, b: int, c: int, d: int) -> tuple[tuple, tuple]:
    n = fusion.shape[0]
    rows = tuple((e, al, be) for e in range(n)
                 for al in range(fusion[a, b, e]) for be in range(fusion[e, c, d]))
    cols = tuple((f, ga, de) for f in range(n)
                 for ga in range(fusion[b, c, f]) for de in range(fusion[a, f, d]))
    return rows, cols


def _unit_default(a: int, b: int, c: int, d: int, row: tuple, col: tuple) -> complex:
    e, al, be = row
    f, ga, de = col
    if a == 0:
        return 1.0 if (e == b and f == d and al == 0 and de == 0 and be == ga) else 0.0
    if b == 0:
        return 1.0 if (e == a and f == c and al == 0 and ga == 0 and be == de) else 0.0
    if c == 0:
        return 1.0 if (e == d and f == b and be == 0 and ga == 0 and al == de) else 0.0
    return 0.0


def build_category(labels, dual, fusion, f_entries: dict, r_entries: dict,
                   pivotal=None, tolerance: float = 1e-9, name: str = "") -> CategoryData:
    """Assemble :class:`CategoryData` from flat symbol dictionaries (keys are label indices)."""
    fusion = np.asarray(fusion, dtype=int)
    n = len(labels)
    fblocks = {}
    for a, b, c, d in itertools.product(range(n), repeat=4):
        rows, cols = _tree_spaces(fusion, a, b, c, d)
        if not rows and not cols:
            continue
        mat = np.zeros((len(rows), len(cols)), dtype=complex)
        for i, r in enumerate(rows):
            for j, col in enumerate(cols):
                key = (a, b, c, d, r[0], col[0], r[1], r[2], col[1], col[2])
                if key in f_entries:
                    mat[i, j] = f_entries[key]
                else:
                    mat[i, j] = _unit_default(a, b, c, d, r, col)
        fblocks[(a, b, c, d)] = FBlock(rows, cols, mat)
    rblocks = {}
    for a, b, c in itertools.product(range(n), repeat=3):
        if not fusion[a, b, c]:
            continue
        mat = np.zeros((fusion[a, b, c], fusion[b, a, c]), dtype=complex)
        for mu, nu in itertools.product(range(mat.shape[0]), range(mat.shape[1])):
            key = (a, b, c, mu, nu)
            if key in r_entries:
                mat[mu, nu] = r_entries[key]
            elif (a == 0 or b == 0) and mu == nu:
                mat[mu, nu] = 1.0
        rblocks[(a, b, c)] = mat
    piv = np.ones(n, dtype=complex) if pivotal is None else np.asarray(pivotal, dtype=complex)
    return CategoryData(tuple(labels), tuple(int(x) for x in dual), fusion, fblocks, rblocks,
                        piv, float(tolerance), name)


def load_category(source: str | dict, name: str = "") -> CategoryData:
    """Parse the JSON-shaped category format.

    No axiom checking is done here beyond index resolution and the duality
    map being an involution compatible with ``N_{ij}^0``.
    """
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise CategoryFormatError(f"line {exc.lineno}: {exc.msg}") from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise CategoryFormatError("top level must be an object")
    for key in ("labels", "dual", "fusion"):
        if key not in doc:
            raise CategoryFormatError(f"missing required key {key!r}")
    labels = [str(x) for x in doc["labels"]]
    if not labels:
        raise CategoryFormatError("labels: empty")
    if len(set(labels)) != len(labels):
        raise CategoryFormatError("labels: duplicate names")
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)

    def resolve(lab, where):
        key = str(lab)
        if key not in index:
            raise CategoryFormatError(f"{where}: unknown label {lab!r}")
        return index[key]

    dual_map = doc["dual"]
    if not isinstance(dual_map, dict):
        raise CategoryFormatError("dual: expected a map label -> label")
    dual = list(range(n))
    for lab, tgt in dual_map.items():
        dual[resolve(lab, "dual")] = resolve(tgt, f"dual[{lab}]")

    fusion = np.zeros((n, n, n), dtype=int)
    for pos, entry in enumerate(doc["fusion"]):
        where = f"fusion[{pos}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 4:
            raise CategoryFormatError(f"{where}: expected [a, b, c, N]")
        a, b, c = (resolve(x, where) for x in entry[:3])
        try:
            fusion[a, b, c] = int(entry[3])
        except (TypeError, ValueError):
            raise CategoryFormatError(f"{where}: bad multiplicity {entry[3]!r}") from None
    for i in range(n):
        fusion[0, i, i] = fusion[i, 0, i] = 1

    if dual[0] != 0:
        raise CategoryFormatError("dual: the unit must be self-dual")
    for i in range(n):
        if dual[dual[i]] != i:
            raise CategoryFormatError(f"dual: not an involution at {labels[i]!r}")
        for j in range(n):
            if fusion[i, j, 0] != (1 if j == dual[i] else 0):
                raise CategoryFormatError(
                    f"dual: N[{labels[i]},{labels[j]}->unit] inconsistent with dual map")

    f_entries = {}
    for pos, entry in enumerate(doc.get("F", [])):
        where = f"F[{pos}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 12:
            raise CategoryFormatError(f"{where}: expected [a,b,c,d,e,f,al,be,ga,de,re,im]")
        labs = tuple(resolve(x, where) for x in entry[:6])
        mults = tuple(int(x) for x in entry[6:10])
        a, b, c, d, e, f = labs
        al, be, ga, de = mults
        if (al >= fusion[a, b, e] or be >= fusion[e, c, d] or ga >= fusion[b, c, f]
                or de >= fusion[a, f, d]):
            raise CategoryFormatError(f"{where}: F entry outside admissible fusion channels")
        f_entries[(a, b, c, d, e, f, al, be, ga, de)] = (
            _parse_number([entry[10], entry[11]], where))
    r_entries = {}
    for pos, entry in enumerate(doc.get("R", [])):
        where = f"R[{pos}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 7:
            raise CategoryFormatError(f"{where}: expected [a,b,c,al,be,re,im]")
        a, b, c = (resolve(x, where) for x in entry[:3])
        mu, nu = int(entry[3]), int(entry[4])
        if mu >= fusion[a, b, c] or nu >= fusion[b, a, c]:
            raise CategoryFormatError(f"{where}: R entry outside admissible fusion channels")
        r_entries[(a, b, c, mu, nu)] = _parse_number([entry[5], entry[6]], where)

    pivotal = np.ones(n, dtype=complex)
    for lab, val in (doc.get("pivotal") or {}).items():
        pivotal[resolve(lab, "pivotal")] = _parse_number(val, f"pivotal[{lab}]")
    tol = float(doc.get("tolerance", 1e-9))
    if not tol > 0:
        raise CategoryFormatError("tolerance must be positive")
    return build_category(labels, dual, fusion, f_entries, r_entries, pivotal, tol,
                          name or str(doc.get("name", "")))


def dump_category(cat: CategoryData) -> dict:
    """Inverse of :func:`load_category` (numbers as ``[re, im]`` with full precision)."""
    labs = cat.labels
    doc: dict[str, Any] = {"name": cat.name, "labels": list(labs),
                           "dual": {labs[i]: labs[cat.dual[i]] for i in range(cat.rank)}}
    doc["fusion"] = [[labs[a], labs[b], labs[c], int(cat.fusion[a, b, c])]
                     for a, b, c in itertools.product(range(cat.rank), repeat=3)
                     if cat.fusion[a, b, c] and a and b]
    doc["F"] = [[labs[k[0]], labs[k[1]], labs[k[2]], labs[k[3]], labs[k[4]], labs[k[5]],
                 *k[6:], repr(v.real), repr(v.imag)]
                for k, v in sorted(cat.f_symbols.items()) if 0 not in k[:3]]
    doc["R"] = [[labs[k[0]], labs[k[1]], labs[k[2]], k[3], k[4], repr(v.real), repr(v.imag)]
                for k, v in sorted(cat.r_symbols.items()) if k[0] and k[1]]
    if not np.allclose(cat.pivotal, 1):
        doc["pivotal"] = {labs[i]: [cat.pivotal[i].real, cat.pivotal[i].imag]
                          for i in range(cat.rank) if cat.pivotal[i] != 1}
    doc["tolerance"] = cat.tolerance
    return doc


# --------------------------------------------------------------------------- axioms

@dataclass
class ValidationReport:
    residuals: dict[str, float]
    passed: dict[str, bool]
    offending: dict[str, list] = field(default_factory=dict)
    tolerance: float = 1e-9

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "tolerance": self.tolerance, "residuals": self.residuals,
                "passed": self.passed,
                "offending": {k: [list(map(int, x)) for x in v] for k, v in self.offending.items()}}


def _fentry(cat: CategoryData, a, b, c, d, row, col) -> complex:
    blk = cat.fblocks.get((a, b, c, d))
    if blk is None:
        return 0.0
    i = blk.row_index.get(row)
    j = blk.col_index.get(col)
    if i is None or j is None:
        return 0.0
    return blk.mat[i, j]


def _pentagon(cat: CategoryData, worst: int = 5) -> tuple[float, list]:
    """Max residual of the pentagon over all admissible ``(a, b, c, d; e)``.

    Both sides are assembled as matrices from the space of trees
    ``(((ab)_f c)_g d)_e`` to ``(a (b (cd)_l)_k)_e``.
    """
    n = cat.rank
    N = cat.fusion
    chan = cat.fusion_channels
    res_max = 0.0
    bad = []
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if 0 in (a, b, c, d):
            continue
        # group source trees by e
        src: dict[int, list] = {}
        for f in chan[(a, b)]:
            for g in chan[(f, c)]:
                for e in chan[(g, d)]:
                    for al1, al2, al3 in itertools.product(range(N[a, b, f]), range(N[f, c, g]),
                                                           range(N[g, d, e])):
                        src.setdefault(e, []).append((f, al1, g, al2, al3))
        for e, s1 in src.items():
            tgt = [(l, be1, k, ga1, ga2) for l in chan[(c, d)] for k in chan[(b, l)]
                   if N[a, k, e]
                   for be1, ga1, ga2 in itertools.product(range(N[c, d, l]), range(N[b, l, k]),
                                                          range(N[a, k, e]))]
            tidx = {t: i for i, t in enumerate(tgt)}
            lhs = np.zeros((len(s1), len(tgt)), dtype=complex)
            rhs = np.zeros_like(lhs)
            for si, (f, al1, g, al2, al3) in enumerate(s1):
                # path 1: F^{fcd}_e then F^{abl}_e
                blk = cat.fblocks[(f, c, d, e)]
                r = blk.row_index[(g, al2, al3)]
                for j, (l, be1, be2) in enumerate(blk.cols):
                    x = blk.mat[r, j]
                    if x == 0:
                        continue
                    blk2 = cat.fblocks[(a, b, l, e)]
                    r2 = blk2.row_index[(f, al1, be2)]
                    for j2, (k, ga1, ga2) in enumerate(blk2.cols):
                        y = blk2.mat[r2, j2]
                        if y != 0:
                            lhs[si, tidx[(l, be1, k, ga1, ga2)]] += x * y
                # path 2: F^{abc}_g, F^{ahd}_e, F^{bcd}_k
                blk = cat.fblocks[(a, b, c, g)]
                r = blk.row_index[(f, al1, al2)]
                for j, (h, de1, de2) in enumerate(blk.cols):
                    x = blk.mat[r, j]
                    if x == 0:
                        continue
                    blk2 = cat.fblocks[(a, h, d, e)]
                    r2 = blk2.row_index[(g, de2, al3)]
                    for j2, (k, ep1, ga2) in enumerate(blk2.cols):
                        y = blk2.mat[r2, j2]
                        if y == 0:
                            continue
                        blk3 = cat.fblocks[(b, c, d, k)]
                        r3 = blk3.row_index[(h, de1, ep1)]
                        for j3, (l, be1, ga1) in enumerate(blk3.cols):
                            z = blk3.mat[r3, j3]
                            if z != 0:
                                rhs[si, tidx[(l, be1, k, ga1, ga2)]] += x * y * z
            res = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
            if res > res_max:
                res_max = res
            if res > cat.tolerance and len(bad) < worst:
                bad.append((a, b, c, d, e))
    return res_max, bad


def _hexagon(cat: CategoryData, R: dict, worst: int = 5) -> tuple[float, list]:
    """Residual of ``c_{a, b(x)c} = a^{-1} (id (x) c_{a,c}) a (c_{a,b} (x) id) a^{-1}`` on trees.

    Source trees ``(a (bc)_f)_d``, target trees ``((bc)_f a)_d``.
    """
    n = cat.rank
    N = cat.fusion
    res_max = 0.0
    bad = []
    for a, b, c, d in itertools.product(range(1, n), repeat=4):
        blk_abc = cat.fblocks.get((a, b, c, d))
        blk_bca = cat.fblocks.get((b, c, a, d))
        if blk_abc is None or blk_bca is None or not blk_abc.cols:
            continue
        src = blk_abc.cols                    # (f, ga, de) of (a (bc)_f)_d
        tgt = blk_bca.rows                    # (f, ga, nu) of ((bc)_f a)_d
        tidx = blk_bca.row_index
        lhs = np.zeros((len(src), len(tgt)), dtype=complex)
        for si, (f, ga, de) in enumerate(src):
            Rm = R[(a, f, d)]
            for nu in range(N[f, a, d]):
                lhs[si, tidx[(f, ga, nu)]] += Rm[de, nu]
        # rhs: a^{-1}_{abc} then (c_ab (x) id), a_{bac}, (id (x) c_ac), a^{-1}_{bca}
        m1 = blk_abc.inv                      # rows src (cols of F), cols rows of F
        rows1 = blk_abc.rows                  # (e, al, be) trees ((ab)_e c)_d
        blk_bac = cat.fblocks[(b, a, c, d)]
        m2 = np.zeros((len(rows1), len(blk_bac.rows)), dtype=complex)
        for i, (e, al, be) in enumerate(rows1):
            Rm = R[(a, b, e)]
            for al2 in range(N[b, a, e]):
                m2[i, blk_bac.row_index[(e, al2, be)]] += Rm[al, al2]
        m3 = blk_bac.mat                      # -> (b (ac)_g)_d cols (g, ga, de)
        blk_bca_right = blk_bca.cols          # (b (ca)_g)_d trees
        m4 = np.zeros((len(blk_bac.cols), len(blk_bca_right)), dtype=complex)
        for i, (g, ga, de) in enumerate(blk_bac.cols):
            Rm = R[(a, c, g)]
            for ga2 in range(N[c, a, g]):
                m4[i, blk_bca.col_index[(g, ga2, de)]] += Rm[ga, ga2]
        m5 = blk_bca.inv                      # (b (ca))_d -> ((bc) a)_d
        rhs = m1 @ m2 @ m3 @ m4 @ m5
        res = float(np.max(np.abs(lhs - rhs)))
        if res > res_max:
            res_max = res
        if res > cat.tolerance and len(bad) < worst:
            bad.append((a, b, c, d))
    return res_max, bad


def validate_axioms(cat: CategoryData) -> ValidationReport:
    """Check unit constraints, F-invertibility, pentagon and both hexagons."""
    n = cat.rank
    N = cat.fusion
    residuals: dict[str, float] = {}
    offending: dict[str, list] = {}

    unit_bad = []
    unit_res = 0.0
    for i, j in itertools.product(range(n), repeat=2):
        if N[0, i, j] != (i == j) or N[i, 0, j] != (i == j) or N[i, j, 0] != (j == cat.dual[i]):
            unit_bad.append((i, j))
            unit_res = max(unit_res, 1.0)
    for (a, b, c, d), blk in cat.fblocks.items():
        if 0 not in (a, b, c):
            continue
        expect = np.array([[_unit_default(a, b, c, d, r, col) for col in blk.cols]
                           for r in blk.rows], dtype=complex).reshape(blk.mat.shape)
        r = float(np.max(np.abs(blk.mat - expect))) if blk.mat.size else 0.0
        unit_res = max(unit_res, r)
        if r > cat.tolerance:
            unit_bad.append((a, b, c, d))
    for (a, b, c), mat in cat.rblocks.items():
        if 0 in (a, b):
            r = float(np.max(np.abs(mat - np.eye(*mat.shape))))
            unit_res = max(unit_res, r)
            if r > cat.tolerance:
                unit_bad.append((a, b, c))
    if any(cat.dual[cat.dual[i]] != i for i in range(n)) or cat.dual[0] != 0:
        unit_res = max(unit_res, 1.0)
        unit_bad.append((-1,))
    residuals["unit"] = unit_res
    offending["unit"] = unit_bad[:5]

    inv_res = 0.0
    inv_bad = []
    for key, blk in cat.fblocks.items():
        if blk.mat.shape[0] != blk.mat.shape[1]:
            inv_res, _ = float("inf"), inv_bad.append(key)
            continue
        sv = np.linalg.svd(blk.mat, compute_uv=False)
        r = 0.0 if sv[-1] > cat.tolerance else 1.0 - float(sv[-1])
        if r > 0:
            inv_bad.append(key)
        inv_res = max(inv_res, r)
    for key, mat in cat.rblocks.items():
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[-1] <= cat.tolerance:
            inv_res = max(inv_res, 1.0 - float(sv[-1]))
            inv_bad.append(key)
    residuals["invertibility"] = inv_res
    offending["invertibility"] = inv_bad[:5]

    if inv_bad:
        residuals["pentagon"] = residuals["hexagon"] = residuals["hexagon_inverse"] = float("inf")
    else:
        residuals["pentagon"], offending["pentagon"] = _pentagon(cat)
        residuals["hexagon"], offending["hexagon"] = _hexagon(cat, cat.rblocks)
        rev = {(a, b, c): cat.rinv[(b, a, c)] for (a, b, c) in cat.rblocks}
        residuals["hexagon_inverse"], offending["hexagon_inverse"] = _hexagon(cat, rev)
    passed = {k: bool(v < cat.tolerance) for k, v in residuals.items()}
    offending = {k: v for k, v in offending.items() if v}
    return ValidationReport(residuals, passed, offending, cat.tolerance)


# --------------------------------------------------------------------------- derived data

def quantum_dimensions(cat: CategoryData) -> np.ndarray:
    """``dim(U_i)`` as the categorical trace of ``id_{U_i}``; raises if not spherical."""
    if "dims" in cat._cache:
        return cat._cache["dims"]
    from . import diagrams as dg
    dl = np.zeros(cat.rank, dtype=complex)
    dr = np.zeros(cat.rank, dtype=complex)
    for i in range(cat.rank):
        X = dg.simple(cat, i)
        dl[i] = dg.trace_l(dg.identity(X))
        dr[i] = dg.trace_r(dg.identity(X))
    if not _close(dl, dr, cat.tolerance):
        raise CategoryError(f"left/right dimensions differ (not spherical): {dl} vs {dr}")
    cat._cache["dims"] = dl
    return dl


def _close(x, y, tol) -> bool:
    x = np.asarray(x)
    y = np.asarray(y)
    diff = np.abs(x - y)
    return bool(np.all((diff < tol) | (diff < tol * np.maximum(np.abs(x), np.abs(y)))))


def global_dimension(cat: CategoryData) -> complex:
    d = quantum_dimensions(cat)
    return complex(np.sum(d * d))


def s_matrix(cat: CategoryData, check: bool = True) -> tuple[np.ndarray, complex]:
    """Return ``(s, Dim)`` with ``s_ij = tr(c_{i,j} c_{j,i})``.

    With ``check`` the modularity identity ``s s = Dim * C`` (``C`` the charge
    conjugation) is enforced.
    """
    if "s" not in cat._cache:
        from . import diagrams as dg
        n = cat.rank
        s = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                Ui, Uj = dg.simple(cat, i), dg.simple(cat, j)
                mono = dg.compose(dg.braiding(Ui, Uj), dg.braiding(Uj, Ui))
                s[i, j] = s[j, i] = dg.trace(mono)
        cat._cache["s"] = s
    s = cat._cache["s"]
    dim = global_dimension(cat)
    if check:
        n = cat.rank
        conj = np.zeros((n, n))
        for i in range(n):
            conj[i, cat.dual[i]] = 1.0
        res = float(np.max(np.abs(s @ s - dim * conj)))
        if res > max(cat.tolerance, 1e-8) * max(1.0, abs(dim)):
            raise CategoryError(f"not modular: |s s - Dim C| = {res:.3g}")
    return s, dim


def modularity_residual(cat: CategoryData) -> float:
    s, dim = s_matrix(cat, check=False)
    n = cat.rank
    conj = np.zeros((n, n))
    for i in range(n):
        conj[i, cat.dual[i]] = 1.0
    return float(np.max(np.abs(s @ s - dim * conj)))


def twists(cat: CategoryData) -> np.ndarray:
    """``theta_a = dim(a)^{-1} sum_{c, mu} dim(c) R^{aa}_c[mu, mu]``."""
    d = quantum_dimensions(cat)
    theta = np.zeros(cat.rank, dtype=complex)
    for a in range(cat.rank):
        acc = 0.0
        for c in cat.fusion_channels[(a, a)]:
            acc += d[c] * np.trace(cat.rblocks[(a, a, c)])
        theta[a] = acc / d[a]
    bad = np.abs(np.abs(theta) - 1) > max(cat.tolerance, 1e-9)
    if np.any(bad):
        raise CategoryError(f"twist not unimodular at {[cat.labels[i] for i in np.flatnonzero(bad)]}")
    return theta


def reverse_braiding(cat: CategoryData) -> CategoryData:
    """Same fusion and F; braiding ``c~_{a,b} = c_{b,a}^{-1}``."""
    rb = {(a, b, c): np.linalg.inv(cat.rblocks[(b, a, c)]) for (a, b, c) in cat.rblocks}
    name = cat.name[:-4] if cat.name.endswith("~rev") else (cat.name + "~rev")
    return CategoryData(cat.labels, cat.dual, cat.fusion, cat.fblocks, rb, cat.pivotal.copy(),
                        cat.tolerance, name)


def product_category(c1: CategoryData, c2: CategoryData) -> CategoryData:
    """Deligne product: labels ``(i, j) -> i * n2 + j``; all data multiplies entrywise."""
    n1, n2 = c1.rank, c2.rank
    n = n1 * n2

    def pair(i, j):
        return i * n2 + j

    labels = tuple(f"({a},{b})" for a in c1.labels for b in c2.labels)
    dual = tuple(pair(c1.dual[i], c2.dual[j]) for i in range(n1) for j in range(n2))
    fusion = np.einsum("ace,bdf->abcdef", c1.fusion, c2.fusion).reshape(n, n, n)
    N1, N2 = c1.fusion, c2.fusion
    fblocks = {}
    for (a1, b1, cc1, d1), B1 in c1.fblocks.items():
        for (a2, b2, cc2, d2), B2 in c2.fblocks.items():
            rows = tuple((pair(e1, e2), al1 * N2[a2, b2, e2] + al2, be1 * N2[e2, cc2, d2] + be2)
                         for (e1, al1, be1) in B1.rows for (e2, al2, be2) in B2.rows)
            cols = tuple((pair(f1, f2), ga1 * N2[b2, cc2, f2] + ga2, de1 * N2[a2, f2, d2] + de2)
                         for (f1, ga1, de1) in B1.cols for (f2, ga2, de2) in B2.cols)
            fblocks[(pair(a1, a2), pair(b1, b2), pair(cc1, cc2), pair(d1, d2))] = FBlock(
                rows, cols, np.kron(B1.mat, B2.mat))
    rblocks = {}
    for (a1, b1, x1), R1 in c1.rblocks.items():
        for (a2, b2, x2), R2 in c2.rblocks.items():
            rblocks[(pair(a1, a2), pair(b1, b2), pair(x1, x2))] = np.kron(R1, R2)
    del N1
    piv = np.kron(c1.pivotal, c2.pivotal)
    return CategoryData(labels, dual, fusion, fblocks, rblocks, piv,
                        max(c1.tolerance, c2.tolerance), f"{c1.name}x{c2.name}", factors=(c1, c2))
