"""Graded fusion multiplicities of KR modules via fermionic sums and the quantum Q-system."""

from .cartan import CartanData, FusionInput, build_cartan, cartan_from_name, min_matrix, q_vectors, quadratic_form
from .evaluation import (
    MomentTable,
    Q1Polynomial,
    build_moments,
    ct_z_multiplicity_A1,
    fusion_decompose_ctz,
    fusion_decompose_matrix,
    matrix_multiplicity,
    phi,
    vacuum_pair,
)
from .fermionic import MultiplicityResult, auto_k, enumerate_m, fusion_decompose_fermionic, m_sum, n_sum
from .qsystem import QSolutionTable, solve
from .qtorus import TorusElement, mono_product, product, right_divide_exact, substitute
from .scalars import QPoly, TPoly, TheoremViolation, embed_q, extract_v, qbinomial

__version__ = "0.1.0"

__all__ = [
    "CartanData", "FusionInput", "build_cartan", "cartan_from_name", "min_matrix", "q_vectors",
    "quadratic_form", "MomentTable", "Q1Polynomial", "build_moments", "ct_z_multiplicity_A1",
    "fusion_decompose_ctz", "fusion_decompose_matrix", "matrix_multiplicity", "phi", "vacuum_pair",
    "MultiplicityResult", "auto_k", "enumerate_m", "fusion_decompose_fermionic", "m_sum", "n_sum",
    "QSolutionTable", "solve", "TorusElement", "mono_product", "product", "right_divide_exact",
    "substitute", "QPoly", "TPoly", "TheoremViolation", "embed_q", "extract_v", "qbinomial",
]
