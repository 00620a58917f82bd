"""Robust capacitated lot sizing with backordering under budgeted cumulative-demand uncertainty.

Worst-case evaluation of a production plan (``adv_*``) and robust plan
computation (``minmax_*``, ``decompose``) for discrete and continuous
budgets, with brute-force references in :mod:`robust_lotsize.oracle`.
"""
from .adv_continuous import (
    DeviationCost,
    MipModel,
    adv_general_bb,
    adv_nonoverlap_dp,
    deviation_cost,
    deviation_cost_function,
    subset_sum_instance,
)
from .adv_discrete import AdvResult, LayeredGraph, adv_coefficients, adv_general_dp, adv_nonoverlap, build_rlp_graph
from .core import (
    Continuous,
    CostParams,
    Discrete,
    FeasibleSet,
    Instance,
    ProductionPlan,
    Scenario,
    candidate_values,
    f_B,
    f_I,
    is_non_overlapping,
    plan_cost,
    validate,
)
from .errors import (
    BudgetTypeError,
    DimensionError,
    DomainError,
    FormatError,
    InfeasibleError,
    LotSizingError,
    NumericalError,
    PreconditionError,
    SizeGuardError,
    StructuralError,
)
from .linprog import LinearProgram, LpSolution, solve_lp
from .minmax_continuous import DecompositionState, decompose, master_lp
from .minmax_continuous import minmax_nonoverlap_lp as minmax_continuous_lp
from .minmax_discrete import MinMaxResult, build_split_graph, minmax_general_lp, minmax_nonoverlap_lp

__version__ = "0.1.0"
