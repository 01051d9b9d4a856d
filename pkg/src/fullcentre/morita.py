"""Morita equivalence of simple non-degenerate algebras, decided through full centres and through
haploid representatives, with certificates for every positive answer."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import least_squares

from . import diagrams as dg
from .algebra import Algebra, AlgebraError, _block_inverse, predicates
from .category import s_matrix
from .centre import DoubledContext, bimodule_conditions, build_doubled, full_centre, z_matrix
from .diagrams import Morphism, compose, identity, tensor
from .modules import Module, endo_algebra, endo_bimodule, simple_modules

__all__ = ["IsoCertificate", "MoritaVerdict", "MoritaInputError", "algebra_isomorphic",
           "haploid_representative", "morita_via_centre", "morita_direct", "check_hypotheses"]

EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not_equivalent"
INCONCLUSIVE = "inconclusive"


class MoritaInputError(AlgebraError):
    """An input violates the simple and non-degenerate hypotheses of the comparison."""


@dataclass(eq=False)
class IsoCertificate:
    """Outcome of the isomorphism search; ``certified`` only for a checked invertible algebra map."""
    found: bool
    f: Morphism | None = None
    residuals: dict = field(default_factory=dict)
    condition: float = float("inf")
    restarts: int = 0
    best_residual: float = float("inf")
    reason: str = ""
    invariant_mismatch: bool = False

    @property
    def certified(self) -> bool:
        return (self.found and self.condition < 1e8
                and all(v < 1e-8 for v in self.residuals.values()))

    def summary(self) -> dict[str, Any]:
        return {"found": self.found, "certified": self.certified, "reason": self.reason,
                "invariant_mismatch": self.invariant_mismatch, "restarts": self.restarts,
                "best_residual": self.best_residual, "condition": self.condition,
                "residuals": dict(self.residuals)}


@dataclass(eq=False)
class MoritaVerdict:
    verdict: str
    method: str
    witness: dict = field(default_factory=dict)

    @property
    def equivalent(self) -> bool | None:
        return {EQUIVALENT: True, NOT_EQUIVALENT: False}.get(self.verdict)


def _invariant_mismatch(P: Algebra, Q: Algebra) -> str:
    """Cheapest distinguishing invariant, or ``""`` when none applies."""
    if not np.array_equal(P.obj.spectrum, Q.obj.spectrum):
        return f"object spectra differ: {P.obj.spectrum.tolist()} vs {Q.obj.spectrum.tolist()}"
    if abs(P.dim - Q.dim) > 1e-8 * max(1.0, abs(P.dim)):
        return f"dimensions differ: {P.dim} vs {Q.dim}"
    return ""


def _iso_system(P: Algebra, Q: Algebra):
    """Affine parametrisation ``x = x0 + N y`` of unital maps and the quadratic residual in ``x``."""
    basis = dg.hom_basis(P.obj, Q.obj)
    d = len(basis)
    B = np.array([b.vector() for b in basis]).T
    U = np.array([compose(b, P.eta).vector() for b in basis]).T
    target = Q.eta.vector()
    x0 = np.linalg.lstsq(U, target, rcond=None)[0]
    if np.linalg.norm(U @ x0 - target) > 1e-9:
        return None
    _, sv, vh = np.linalg.svd(U)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0] if len(sv) else 1.0)))
    N = vh[rank:].conj().T
    lin = np.array([compose(b, P.m).vector() for b in basis])            # (d, L)
    quad = np.array([[compose(Q.m, tensor(basis[a], basis[b])).vector() for b in range(d)]
                     for a in range(d)])                                  # (d, d, L)
    return basis, B, x0, N, lin, quad


def _iso_residual(x: np.ndarray, lin: np.ndarray, quad: np.ndarray) -> np.ndarray:
    return x @ lin - np.einsum("a,b,abl->l", x, x, quad)


def _iso_jacobian(x: np.ndarray, lin: np.ndarray, quad: np.ndarray) -> np.ndarray:
    return (lin - np.einsum("b,abl->al", x, quad) - np.einsum("b,bal->al", x, quad)).T


def algebra_isomorphic(P: Algebra, Q: Algebra, seed: int = 0, restarts: int = 32,
                       accept: float = 1e-8) -> IsoCertificate:
    """Search for an invertible unital algebra map ``P -> Q``.

    Invariants are compared first.  Otherwise the unit constraint is solved
    linearly and the multiplicativity residual is minimised by
    Levenberg-Marquardt from seeded random starts.
    """
    if P.cat is not Q.cat:
        raise AlgebraError("algebras live in different categories")
    reason = _invariant_mismatch(P, Q)
    if reason:
        return IsoCertificate(False, reason=reason, invariant_mismatch=True)
    if P is Q:
        f = identity(P.obj)
        return IsoCertificate(True, f, {"unit": 0.0, "multiplicative": 0.0}, 1.0, 0, 0.0, "identity")
    system = _iso_system(P, Q)
    if system is None:
        return IsoCertificate(False, reason="no morphism maps unit to unit", invariant_mismatch=True)
    basis, B, x0, N, lin, quad = system
    k = N.shape[1]
    rng = np.random.default_rng(seed)

    def unpack(z):
        return x0 + N @ (z[:k] + 1j * z[k:])

    def fun(z):
        r = _iso_residual(unpack(z), lin, quad)
        return np.concatenate([r.real, r.imag])

    def jac(z):
        Jx = _iso_jacobian(unpack(z), lin, quad) @ N
        return np.block([[Jx.real, -Jx.imag], [Jx.imag, Jx.real]])

    best = (float("inf"), None)
    tried = 0
    for attempt in range(restarts):
        tried = attempt + 1
        z0 = rng.normal(size=2 * k)
        if k:
            sol = least_squares(fun, z0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                max_nfev=200 * (2 * k + 1))
            z = sol.x
        else:
            z = z0[:0]
        x = unpack(z)
        res = float(np.max(np.abs(_iso_residual(x, lin, quad)))) if lin.size else 0.0
        f = Morphism.from_vector(P.obj, Q.obj, B @ x)
        _, cond = _block_inverse(f)
        if res < best[0]:
            best = (res, f)
        if res < accept and cond < 1e8:
            residuals = {"unit": compose(f, P.eta).dist(Q.eta),
                         "multiplicative": compose(f, P.m).dist(compose(Q.m, tensor(f, f)))}
            return IsoCertificate(True, f, residuals, cond, tried, res, "solver")
        if not k:
            break
    return IsoCertificate(False, None, {}, float("inf"), tried, best[0],
                          "solver exhausted restarts without an invertible algebra map")


def check_hypotheses(A: Algebra) -> dict:
    """Flags for simple and non-degenerate; raises :class:`MoritaInputError` if either fails."""
    pr = predicates(A)
    bad = [k for k in ("nondegenerate", "simple") if not pr.get(k)]
    if bad:
        raise MoritaInputError(
            f"algebra {A.name!r} is not {' and '.join(bad)}; the centre criterion for Morita "
            "equivalence requires simple non-degenerate algebras")
    return pr


def haploid_representative(A: Algebra, seed: int = 0) -> tuple[Algebra, Module, dict]:
    """``B' = M^v (x)_A M`` for the first simple module with non-zero dimension.

    Returns ``B'``, ``M`` and the residuals of the Morita-context conditions on ``M`` as an ``A``-``B'`` bimodule.
    """
    for M in simple_modules(A, seed):
        if abs(M.dim) <= A.tol:
            continue
        E = endo_algebra(M)
        if not predicates(E.algebra)["haploid"]:
            raise AlgebraError(f"endomorphism algebra of {M.name!r} is not haploid")
        conds = bimodule_conditions(endo_bimodule(M, E)).residuals
        return E.algebra, M, conds
    raise AlgebraError(f"algebra {A.name!r} has no simple module of non-zero dimension")


def _gate(fc, Dim) -> float:
    return abs(fc.Z.dim - Dim)


def morita_via_centre(A: Algebra, B: Algebra, ctx: DoubledContext | None = None,
                      seed: int = 0) -> MoritaVerdict:
    """Compare ``Z(A)`` and ``Z(B)`` as algebras."""
    check_hypotheses(A)
    check_hypotheses(B)
    ctx = ctx or build_doubled(A.cat)
    Dim = s_matrix(ctx.C)[1]
    fa, fb = full_centre(A, ctx), full_centre(B, ctx)
    gate = max(_gate(fa, Dim), _gate(fb, Dim))
    if gate > 1e-8:
        raise AlgebraError(f"dim Z differs from Dim(C) by {gate:.2e}; centre data is inconsistent")
    za, zb = z_matrix(fa), z_matrix(fb)
    witness = {"Z_A": za.tolist(), "Z_B": zb.tolist()}
    if not np.array_equal(za, zb):
        diff = np.argwhere(za != zb).tolist()
        witness["z_mismatch"] = diff
        return MoritaVerdict(NOT_EQUIVALENT, "centre", witness)
    cert = algebra_isomorphic(fa.Z, fb.Z, seed=seed)
    witness["certificate"] = cert.summary()
    if cert.certified:
        return MoritaVerdict(EQUIVALENT, "centre", witness)
    if cert.invariant_mismatch:
        return MoritaVerdict(NOT_EQUIVALENT, "centre", witness)
    return MoritaVerdict(INCONCLUSIVE, "centre", witness)


def morita_direct(A: Algebra, B: Algebra, seed: int = 0) -> MoritaVerdict:
    """Find a simple ``A``-module ``M`` with ``M^v (x)_A M`` isomorphic to a haploid representative of ``B``."""
    check_hypotheses(A)
    check_hypotheses(B)
    Bp, N, conds = haploid_representative(B, seed)
    witness: dict[str, Any] = {"representative": Bp.name, "representative_module": N.name,
                               "representative_context": conds, "candidates": []}
    undecided = False
    for k, M in enumerate(simple_modules(A, seed)):
        if abs(M.dim) <= A.tol:
            witness["candidates"].append({"kappa": k, "module": M.name, "reason": "zero dimension"})
            continue
        E = endo_algebra(M).algebra
        cert = algebra_isomorphic(E, Bp, seed=seed)
        entry = {"kappa": k, "module": M.name, "certificate": cert.summary()}
        witness["candidates"].append(entry)
        if cert.certified:
            witness["kappa"] = k
            witness["module"] = M.name
            return MoritaVerdict(EQUIVALENT, "direct", witness)
        if not cert.invariant_mismatch:
            undecided = True
    return MoritaVerdict(INCONCLUSIVE if undecided else NOT_EQUIVALENT, "direct", witness)
