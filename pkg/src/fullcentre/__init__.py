"""Full centres of algebras in modular tensor categories and the Morita equivalence test they give."""
from __future__ import annotations

from .algebra import Algebra, AlgebraError, load_algebra, make_algebra, predicates, unit_algebra
from .category import CategoryData, CategoryError, load_category, s_matrix, validate_axioms
from .centre import build_doubled, full_centre, z_matrix
from .modules import Bimodule, Module, endo_algebra, simple_modules
from .morita import MoritaVerdict, algebra_isomorphic, morita_direct, morita_via_centre
from .report import load_algebra_file, load_category_file
from .transport import ca_ta_iso, iota_maps, local_basis, sa_matrices

__version__ = "0.1.0"

__all__ = [
    "Algebra", "AlgebraError", "load_algebra", "make_algebra", "predicates", "unit_algebra",
    "CategoryData", "CategoryError", "load_category", "s_matrix", "validate_axioms",
    "build_doubled", "full_centre", "z_matrix",
    "Bimodule", "Module", "endo_algebra", "simple_modules",
    "MoritaVerdict", "algebra_isomorphic", "morita_direct", "morita_via_centre",
    "load_algebra_file", "load_category_file",
    "ca_ta_iso", "iota_maps", "local_basis", "sa_matrices",
]
