"""Exact desk-scale toolkit for the ODP to SADP reduction and its hard instances."""

from __future__ import annotations

from .errors import (
    BudgetExceeded,
    BudgetOverflow,
    DegenerateInstance,
    DocumentError,
    EnumerationCapExceeded,
    GroundSizeMismatch,
    MDReduceError,
    MissingEntry,
    NotMatroidBased,
    ProvenanceError,
    SolverFault,
)
from .instances import appendix_counterexample, boxs_family, perturb, pointwise_perturbation, sat_perturbed_valuation
from .itemsets import subset_rank, subset_unrank
from .reduction import (
    build_IT,
    build_VT,
    balancedness,
    check_C_compatibility,
    check_compatibility,
    hardness_budget,
    quality_formula,
    recover_from_IT,
    recover_from_VT,
    witness_for_IT,
)
from .solvers import brute_force_odp, lp_optimal_mdmdp, sadp_eval, trivial_bundle_menu, verify_menu
from .transforms import disjoint_union, fast_truncated_value, item_truncate, scale, value_truncate
from .valuations import (
    OXS,
    Additive,
    CDemand,
    ExplicitTable,
    MatroidBased,
    TypeDistribution,
    Valuation,
    check_properties,
    demand,
    value,
)

__version__ = "0.1.0"
