"""Divided differences and blossoms over the spaces pi_n(gamma1, gamma2)."""

from .blossom import (
    BlossomFunctional,
    BlossomQuery,
    check_axioms,
    ext_blossom_neg,
    ext_blossom_pos,
    ext_blossom_scaled,
    hom_blossom,
    tau_spread,
)
from .divided_difference import (
    DividedDifferenceTable,
    FunctionEvaluand,
    NodeList,
    check_cancellation,
    divdiff,
    divdiff_table,
    newton_interpolate,
)
from .errors import *  # noqa: F401,F403
from .gamma_system import (
    PRESETS,
    GammaSystem,
    HomPoint,
    d_fn,
    d_matrix,
    delta_pair,
    make_preset,
    wronskian,
)
from .identities import KINDS, identity_report, resolve, run_suite
from .pi_space import (
    PiElement,
    evaluate,
    gen_antiderivative,
    gen_antiderivative_numeric,
    gen_derivative,
    gen_derivative_numeric,
    kernel_element,
    multiply,
    taylor_expand,
    unit_element,
)
from .reports import IdentityReport, reports_to_csv

__version__ = "0.1.0"
