"""Hammersley-type point sets in base b, their discrepancy function and its
b-adic Haar coefficients, with Besov quasi-norms of the discrepancy."""

from .discrepancy import eval_discrepancy, l2_squared_exact, parse_rational
from .hammersley import DigitMap, PointSet, SignPattern, generate, verify_net
from .haar import HaarIndex, Regime, classify_regime, coeff_discrepancy_fast, coeff_oracle
from .norms import NormParams, besov_quasi_norm, parseval_l2, qmc_integrate, rate_report

__version__ = "0.1.0"

__all__ = [
    "DigitMap",
    "HaarIndex",
    "NormParams",
    "PointSet",
    "Regime",
    "SignPattern",
    "besov_quasi_norm",
    "classify_regime",
    "coeff_discrepancy_fast",
    "coeff_oracle",
    "eval_discrepancy",
    "generate",
    "l2_squared_exact",
    "parse_rational",
    "parseval_l2",
    "qmc_integrate",
    "rate_report",
    "verify_net",
]
