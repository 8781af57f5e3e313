# Core dense linear algebra package
from core.linalg.dense import (
    Vec,
    SymMat,
    as_vec,
    as_symmat,
    is_spd,
    is_psd,
    solve_spd,
    solve_general,
    weighted_norm_sq,
)

__all__ = [
    "Vec",
    "SymMat",
    "as_vec",
    "as_symmat",
    "is_spd",
    "is_psd",
    "solve_spd",
    "solve_general",
    "weighted_norm_sq",
]
