from .fem import EigenError, EigenResult, assemble_p1, element_matrices, neumann_mu1, rayleigh
from .poincare import (
    GAGLIARDO_CONSTANT,
    PS21_CONSTANT,
    Bump,
    TrigPoly,
    gagliardo_check,
    gagliardo_ratios,
    poincare_bound,
    poincare_ratio_disc,
    ps21_ratio_check,
    trig_family,
)

__all__ = [
    "EigenError", "EigenResult", "assemble_p1", "element_matrices", "neumann_mu1", "rayleigh",
    "GAGLIARDO_CONSTANT", "PS21_CONSTANT", "Bump", "TrigPoly", "gagliardo_check",
    "gagliardo_ratios", "poincare_bound", "poincare_ratio_disc", "ps21_ratio_check", "trig_family",
]
