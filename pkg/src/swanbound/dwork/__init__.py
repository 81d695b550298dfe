"""Independent p-adic check of slopes below one via the Dwork trace formula (q = p, V in P^1)."""

from __future__ import annotations

from .operator import (
    Basis,
    FredholmResult,
    UpMatrix,
    char_series,
    certify,
    fredholm_for,
    fredholm_np,
    predicted_fredholm_slopes,
    up_matrix,
)
from .oracle import OracleReport, oracle_compare
from .padic import PadicRamified
from .splitting import (
    PadicLaurent,
    artin_hasse_coeffs,
    dwork_zeta,
    solve_gamma,
    splitting_function,
    teichmuller,
)

__all__ = [
    "Basis", "FredholmResult", "OracleReport", "PadicLaurent", "PadicRamified", "UpMatrix",
    "artin_hasse_coeffs", "certify", "char_series", "dwork_zeta", "fredholm_for", "fredholm_np",
    "oracle_compare", "predicted_fredholm_slopes", "solve_gamma", "splitting_function",
    "teichmuller", "up_matrix",
]
