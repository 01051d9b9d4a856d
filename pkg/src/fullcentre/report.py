"""Fixture resolution, check suites and deterministic reports behind the command-line interface."""
from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .algebra import Algebra, AlgebraError, frobenius_structure, left_centre_idempotent, load_algebra, predicates
from .category import CategoryData, CategoryError, load_category, modularity_residual, validate_axioms
from .centre import (DoubledContext, R_of, bimodule_conditions, build_doubled, centre_checks, full_centre,
                     gauge_covariance_residual, phi_x, q_morphism, z_matrix)
from .diagrams import compose
from .modules import dual_bimodule, endo_algebra, endo_bimodule, regular_bimodule, simple_modules, tensor_bimodules
from .morita import (EQUIVALENT, INCONCLUSIVE, NOT_EQUIVALENT, MoritaInputError, haploid_representative,
                     morita_direct, morita_via_centre)
from .transport import (ca_ta_iso, iota_maps, killing_ring_residual, local_basis, module_loop_residual,
                        sa_matrices, t_algebra, t_functor, t_functor_residuals)

__all__ = ["FIXTURE_ENV", "fixture_dir", "resolve_path", "load_category_file", "load_algebra_file", "Check",
           "Report", "InputError", "category_suite", "doubled_suite", "algebra_suite", "cmd_validate",
           "cmd_centre", "cmd_morita", "cmd_verify_paper"]

FIXTURE_ENV = "FULLCENTRE_FIXTURES"
DEFAULT_TOL = 1e-8


class InputError(Exception):
    """Unreadable or invalid input files, or inputs outside the hypotheses of a command."""


# --------------------------------------------------------------------------- inputs

def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("fullcentre") / "fixtures"))


def resolve_path(path: str | os.PathLike) -> Path:
    """An existing path as given, else the same file name inside the fixture directory."""
    p = Path(path)
    if p.is_file():
        return p
    alt = fixture_dir() / p.name
    if alt.is_file():
        return alt
    raise InputError(f"no such file: {path} (also looked in {fixture_dir()})")


def file_hash(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def load_category_file(path: str | os.PathLike) -> tuple[CategoryData, Path]:
    p = resolve_path(path)
    try:
        return load_category(p.read_text(), name=p.stem), p
    except CategoryError as exc:
        raise InputError(f"{p.name}: {exc}") from None


def load_algebra_file(path: str | os.PathLike, cat: CategoryData | None = None
                      ) -> tuple[Algebra, CategoryData, list[Path]]:
    """Load an algebra; its category comes from ``cat`` or from the file's ``category`` entry."""
    p = resolve_path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{p.name}: line {exc.lineno}: {exc.msg}") from None
    used = [p]
    if cat is None:
        ref = doc.get("category")
        if not ref:
            raise InputError(f"{p.name}: no category given")
        cpath = p.parent / ref
        cat, cp = load_category_file(cpath if cpath.is_file() else ref)
        used.append(cp)
    try:
        return load_algebra(doc, cat), cat, used
    except CategoryError as exc:
        raise InputError(f"{p.name}: {exc}") from None


# --------------------------------------------------------------------------- report model

def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        if abs(x.imag) <= 1e-12 * max(1.0, abs(x.real)):
            return _jsonable(float(x.real))
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


@dataclass
class Check:
    name: str
    anchor: str
    residual: float
    tolerance: float
    indices: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        d = {"name": self.name, "anchor": self.anchor, "residual": self.residual,
             "tolerance": self.tolerance, "passed": self.passed}
        if not self.passed:
            d["indices"] = self.indices
        return d


@dataclass
class Report:
    command: str
    seed: int
    tolerance: float
    inputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    wall_time: float | None = None
    exit_code: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, checks: Iterable[Check]) -> None:
        self.checks.extend(checks)

    def to_dict(self) -> dict:
        d = {"command": self.command, "seed": self.seed, "tolerance": self.tolerance,
             "inputs": self.inputs, "passed": self.passed,
             "checks": [c.to_dict() for c in self.checks],
             "verdicts": self.verdicts, "data": self.data, "notes": self.notes,
             "exit_code": self.exit_code}
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return _jsonable(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'} (seed {self.seed}, tol {self.tolerance:g})"]
        for path, h in self.inputs.items():
            lines.append(f"  input {path} sha256={h[:12]}")
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            extra = f"  at {c.indices}" if not c.passed and c.indices else ""
            lines.append(f"  [{mark}] {c.name:<{width}}  {c.residual:.3e}  ({c.anchor}){extra}")
        for k, v in self.verdicts.items():
            lines.append(f"  verdict {k}: {v}")
        for k, v in self.data.items():
            lines.append(f"  {k}: {json.dumps(_jsonable(v), sort_keys=True)}")
        lines.extend(f"  note: {n}" for n in self.notes)
        if self.wall_time is not None:
            lines.append(f"  wall time {self.wall_time:.2f}s")
        return "\n".join(lines)


def _check(name: str, anchor: str, value: Any, tol: float, indices: list | None = None) -> Check:
    return Check(name, anchor, float(abs(value)), tol, indices or [])


def _check_map(name: str, anchor: str, values: dict, tol: float) -> Check:
    worst = max((float(abs(v)) for v in values.values()), default=0.0)
    bad = [k for k, v in values.items() if abs(v) > tol]
    return Check(name, anchor, worst, tol, bad)


def _flag(name: str, anchor: str, ok: bool, tol: float) -> Check:
    return Check(name, anchor, 0.0 if ok else 1.0, tol)


# --------------------------------------------------------------------------- suites

def category_suite(C: CategoryData, tol: float = DEFAULT_TOL) -> list[Check]:
    vr = validate_axioms(C)
    out = [Check(f"axioms.{k}", "category.axioms", float(v), C.tolerance, vr.offending.get(k, []))
           for k, v in vr.residuals.items()]
    if all(c.passed for c in out):
        out.append(_check("modularity", "category.modularity", modularity_residual(C), tol))
    return out


def doubled_suite(C: CategoryData, tol: float = DEFAULT_TOL, seed: int = 0) -> tuple[DoubledContext, list[Check]]:
    ctx = build_doubled(C)
    ch = ctx.checks
    rng = np.random.default_rng(seed)
    gauge = max(gauge_covariance_residual(ctx, rng) for _ in range(5))
    out = [
        _flag("R.haploid", "R.axioms", ch["haploid"], tol),
        _check("R.commutative", "R.axioms", ch["commutative_residual"], tol),
        _flag("R.nondegenerate", "R.axioms", ch["nondegenerate"], tol),
        _check("R.phi_closed_form", "R.phi", ch["phi_R_closed_form"], tol),
        _check("R.unlinking", "R.phi", ch["unlinking"], tol),
        _check("R.gauge_covariance", "R.gauge", gauge, tol),
    ]
    tres = t_functor_residuals(ctx, seed)
    out.extend(_check(f"T.{k}", "T.tensor_functor", v, tol) for k, v in tres.items())
    return ctx, out


def _frobenius_checks(A: Algebra, tol: float) -> list[Check]:
    fd = frobenius_structure(A)
    keys = ("frobenius_left", "frobenius_right", "m_delta_id", "eps_eta_dim", "symmetry")
    return [_check(f"{A.name}.frobenius.{k}", "frobenius.derived", fd.residuals[k], tol) for k in keys]


def _transport_checks(A: Algebra, ctx: DoubledContext, tol: float, seed: int) -> list[Check]:
    name = A.name
    regular = regular_bimodule(A)
    left_centre_idempotent(R_of(ctx, A))
    out = [_check(f"{name}.Q_regular_is_P_l", "transport.Q",
                  q_morphism(regular, ctx).dist(R_of(ctx, A)._cache["P_l"]), tol)]
    comp, phis, conds = {}, {}, {}
    for k, M in enumerate(simple_modules(A, seed)):
        X = endo_bimodule(M, endo_algebra(M))
        Xd = dual_bimodule(X)
        XX, _ = tensor_bimodules(X, Xd)
        comp[k] = compose(q_morphism(X, ctx), q_morphism(Xd, ctx)).dist(q_morphism(XX, ctx))
        c = bimodule_conditions(X, Xd)
        conds[k] = max(c.residuals.values())
        try:
            phis[k] = max(phi_x(X, ctx, tol=tol).residuals.values())
        except AlgebraError:
            phis[k] = float("inf")
        conds[f"{k}.dim_X_squared"] = c.residuals["dim_X_squared"]
    out.append(_check_map(f"{name}.Q_composition", "transport.Q", comp, tol))
    out.append(_check_map(f"{name}.bimodule_conditions", "transport.dimensions", conds, tol))
    out.append(_check_map(f"{name}.phi_X", "transport.phi_X", phis, tol))
    return out


def _local_checks(A: Algebra, ctx: DoubledContext, tol: float, seed: int) -> list[Check]:
    name = A.name
    lb = local_basis(A)
    sa = sa_matrices(A, seed)
    n_modules = len(sa.modules)
    z = z_matrix(full_centre(A, ctx))
    C = ctx.C
    loc_vs_z = {i: lb.n_loc[i] - z[i, C.dual[i]] for i in lb.n_loc}
    out = [
        _check_map(f"{name}.local_basis", "local.basis", lb.residuals, tol),
        _check(f"{name}.local_count", "local.count", sum(lb.n_loc.values()) - n_modules, 0.0),
        _check_map(f"{name}.local_vs_Z", "local.count", loc_vs_z, 0.0),
        _check_map(f"{name}.sA_biorthogonality", "local.s_matrices", sa.residuals, tol),
        _check_map(f"{name}.module_loop", "local.module_loop", module_loop_residual(A, seed), tol),
        _check_map(f"{name}.killing_ring", "local.killing_ring", killing_ring_residual(A, seed), tol),
    ]
    iso = ca_ta_iso(A, ctx, seed)
    out.append(_check_map(f"{name}.C_A_T_A", "local.C_A_iso_T_A", iso.residuals, tol))
    return out


def algebra_suite(A: Algebra, ctx: DoubledContext, tol: float = DEFAULT_TOL, seed: int = 0
                  ) -> tuple[list[Check], dict, list[str]]:
    """All per-algebra checks for a simple non-degenerate algebra; returns checks, data and notes."""
    name = A.name
    notes: list[str] = []
    pr = predicates(A)
    out = [_flag(f"{name}.nondegenerate", "algebra.hypotheses", pr["nondegenerate"], tol),
           _flag(f"{name}.simple", "algebra.hypotheses", pr.get("simple", False), tol)]
    if not (pr["nondegenerate"] and pr.get("simple")):
        notes.append(f"{name}: not simple and non-degenerate; remaining checks skipped")
        return out, {}, notes
    out += _frobenius_checks(A, tol)
    fc = full_centre(A, ctx)
    cc = centre_checks(fc)
    out += [
        _flag(f"{name}.Z.haploid", "centre.predicates", cc["haploid"], tol),
        _check(f"{name}.Z.commutative", "centre.predicates", cc["commutative_residual"], tol),
        _flag(f"{name}.Z.nondegenerate", "centre.predicates", cc["nondegenerate"], tol),
        _check(f"{name}.Z.dim_equals_Dim", "centre.dimension", cc["dim_Z_minus_Dim"], tol),
        _check(f"{name}.Z.Z00", "centre.dimension", cc["Z00"] - 1, 0.0),
        _check(f"{name}.Z.weighted_sum", "centre.dimension", cc["weighted_sum_residual"], tol),
        _check(f"{name}.Z.s_commutation", "centre.modular_invariant", cc["s_commutation"], tol),
    ]
    out += _transport_checks(A, ctx, tol, seed)
    out += _local_checks(A, ctx, tol, seed)
    if pr["haploid"]:
        out.append(_check_map(f"{name}.iota", "local.iota", iota_maps(A, ctx).residuals, tol))
    else:
        notes.append(f"{name}: not haploid; iota checks skipped")
    Bp, M, conds = haploid_representative(A, seed)
    out.append(_flag(f"{name}.representative_haploid", "morita.representative",
                     predicates(Bp)["haploid"], tol))
    out.append(_check_map(f"{name}.representative_context", "morita.representative", conds, tol))
    data = {"Z": z_matrix(fc), "dim_Z": fc.Z.dim, "modules": [m.name for m in simple_modules(A, seed)]}
    return out, data, notes


# --------------------------------------------------------------------------- commands

def _finish(rep: Report, t0: float, timing: bool) -> Report:
    if timing:
        rep.wall_time = time.perf_counter() - t0
    return rep


def cmd_validate(category: str, tol: float = DEFAULT_TOL, seed: int = 0, timing: bool = False) -> Report:
    t0 = time.perf_counter()
    C, p = load_category_file(category)
    rep = Report("validate", seed, tol, {str(p.name): file_hash(p)})
    rep.add(category_suite(C, tol))
    rep.data = {"category": C.name, "rank": C.rank}
    rep.exit_code = 0 if rep.passed else 1
    return _finish(rep, t0, timing)


def cmd_centre(category: str | None, algebra: str, tol: float = DEFAULT_TOL, seed: int = 0,
               timing: bool = False) -> Report:
    t0 = time.perf_counter()
    C = p = None
    if category:
        C, p = load_category_file(category)
    try:
        A, C, used = load_algebra_file(algebra, C)
    except AlgebraError as exc:
        raise InputError(str(exc)) from None
    files = ([p] if p else []) + used
    rep = Report("centre", seed, tol, {str(f.name): file_hash(f) for f in files})
    ctx = build_doubled(C)
    pr = predicates(A)
    if not (pr["nondegenerate"] and pr.get("simple")):
        raise InputError(f"algebra {A.name!r} must be simple and non-degenerate")
    fc = full_centre(A, ctx)
    cc = centre_checks(fc)
    rep.add([
        _flag("Z.haploid", "centre.predicates", cc["haploid"], tol),
        _check("Z.commutative", "centre.predicates", cc["commutative_residual"], tol),
        _flag("Z.nondegenerate", "centre.predicates", cc["nondegenerate"], tol),
        _check("Z.dim_equals_Dim", "centre.dimension", cc["dim_Z_minus_Dim"], tol),
        _check("Z.Z00", "centre.dimension", cc["Z00"] - 1, 0.0),
        _check("Z.weighted_sum", "centre.dimension", cc["weighted_sum_residual"], tol),
        _check("Z.frobenius", "frobenius.derived", cc["frobenius_max_residual"], tol),
    ])
    z = z_matrix(fc)
    r_spec = ctx.R.obj.spectrum.reshape(C.rank, C.rank)
    rep.data = {"algebra": A.name, "category": C.name, "dim_Z": fc.Z.dim, "Dim": cc["Dim"],
                "Z": z, "labels": list(C.labels), "haploid": cc["haploid"], "commutative": cc["commutative"],
                "Z_equals_R": bool(np.array_equal(z, r_spec))}
    rep.exit_code = 0 if rep.passed else 1
    return _finish(rep, t0, timing)


def _verdict_summary(v) -> dict:
    return {"verdict": v.verdict, "method": v.method, "witness": v.witness}


def cmd_morita(category: str | None, algebra_a: str, algebra_b: str, method: str = "both",
               tol: float = DEFAULT_TOL, seed: int = 0, timing: bool = False) -> Report:
    t0 = time.perf_counter()
    C = p = None
    if category:
        C, p = load_category_file(category)
    A, C, used_a = load_algebra_file(algebra_a, C)
    B, _, used_b = load_algebra_file(algebra_b, C)
    files = ([p] if p else []) + used_a + used_b
    rep = Report("morita", seed, tol, {str(f.name): file_hash(f) for f in files})
    verdicts = {}
    try:
        if method in ("centre", "both"):
            verdicts["centre"] = morita_via_centre(A, B, build_doubled(C), seed)
        if method in ("direct", "both"):
            verdicts["direct"] = morita_direct(A, B, seed)
    except MoritaInputError as exc:
        raise InputError(str(exc)) from None
    rep.verdicts = {k: v.verdict for k, v in verdicts.items()}
    rep.data = {"A": A.name, "B": B.name,
                "witnesses": {k: _verdict_summary(v)["witness"] for k, v in verdicts.items()}}
    found = set(rep.verdicts.values())
    if len(verdicts) > 1:
        rep.verdicts["agreement"] = len(found) == 1
    if len(found) > 1 or INCONCLUSIVE in found:
        rep.exit_code = 2
    elif EQUIVALENT in found:
        rep.exit_code = 0
    else:
        assert found == {NOT_EQUIVALENT}
        rep.exit_code = 1
    return _finish(rep, t0, timing)


def _algebra_job(args: tuple) -> tuple[list[Check], dict, list[str]]:
    category, algebra, tol, seed = args
    C, _ = load_category_file(category)
    A, _, _ = load_algebra_file(algebra, C)
    return algebra_suite(A, build_doubled(C), tol, seed)


def cmd_verify_paper(category: str, algebras: list[str], tol: float = DEFAULT_TOL, seed: int = 0,
                     jobs: int = 1, timing: bool = False) -> Report:
    """Every structural check over one category and the given algebras (default: its unit algebra)."""
    t0 = time.perf_counter()
    C, p = load_category_file(category)
    loaded = []
    for a in algebras:
        A, _, used = load_algebra_file(a, C)
        loaded.append((a, A, used[0]))
    rep = Report("verify-paper", seed, tol,
                 {str(f.name): file_hash(f) for f in [p] + [u for _, _, u in loaded]})
    rep.add(category_suite(C, tol))
    if not rep.passed:
        rep.notes.append("category axioms fail; remaining checks skipped")
        rep.exit_code = 1
        return _finish(rep, t0, timing)
    ctx, checks = doubled_suite(C, tol, seed)
    rep.add(checks)
    TR = t_algebra(ctx.R, t_functor(ctx))
    rep.data["T_R_commutative"] = bool(predicates(TR)["commutative"])
    if not loaded:
        from .algebra import unit_algebra
        loaded = [("1", unit_algebra(C), None)]
        rep.notes.append("no algebra given; using the unit algebra")
    if jobs > 1 and all(u is not None for _, _, u in loaded):
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_algebra_job, [(str(p), str(u), tol, seed) for _, _, u in loaded]))
    else:
        results = [algebra_suite(A, ctx, tol, seed) for _, A, _ in loaded]
    for (_, A, _), (checks, data, notes) in zip(loaded, results):
        rep.add(checks)
        rep.data[A.name] = data
        rep.notes.extend(notes)
    rep.exit_code = 0 if rep.passed else 1
    return _finish(rep, t0, timing)
