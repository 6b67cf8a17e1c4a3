"""Appell-Lerch specialisations: exact holomorphic parts, multipliers, non-holomorphic data, numerics."""

from .holomorphic import (
    MuSpec,
    M_series,
    N7_product_series,
    N7_series,
    N_series,
    P_klein_series,
    P_series,
    bilateral_lambert,
    calM_series,
    klein_discrepancy,
    lambert_N7_series,
    mu_series,
    mutilde_holomorphic_series,
)
from .multipliers import (
    MultiplierValue,
    biagioli_multiplier,
    eta_multiplier,
    group_multiplier,
    jacobi,
    jacobi_ext,
    standard_multiplier,
)
from .nonholo import NonholoCoefficient, nonholo_coeff
from .numeric import mutilde_eval_numeric
