"""Exact weight combinatorics for modules over sl(n+1)."""

from .cartan import Weight, h_block, h_last_row, h_principal, sl2_coroot
from .groups import (
    a_x,
    corner_log_lower,
    lower_ones,
    sigma,
    sigma_kappa,
    u_elem,
    u_top,
    upper_ones,
    w_limit,
)
from .identities import IdentitySuiteReport, identity_suite
from .lemmas import (
    D1Estimate,
    Sl2Report,
    SSetReport,
    delta_plus_indices,
    estimate_D1,
    fixed_check,
    level_indices,
    s_sets,
    sl2_maxweight_check,
    subgroup_generators,
)
from .modules import (
    ModuleVector,
    WeightModule,
    act,
    act_algebra,
    act_diag_flow,
    basis_vector,
    build_module,
    grade_by_h_block,
    vector,
    weight_component,
    weight_support,
)
from .serialize import to_jsonable, vector_from_json

__all__ = [
    "Weight",
    "WeightModule",
    "ModuleVector",
    "IdentitySuiteReport",
    "SSetReport",
    "Sl2Report",
    "D1Estimate",
    "a_x",
    "act",
    "act_algebra",
    "act_diag_flow",
    "basis_vector",
    "build_module",
    "corner_log_lower",
    "delta_plus_indices",
    "estimate_D1",
    "fixed_check",
    "grade_by_h_block",
    "h_block",
    "h_last_row",
    "h_principal",
    "identity_suite",
    "level_indices",
    "lower_ones",
    "s_sets",
    "sigma",
    "sigma_kappa",
    "sl2_coroot",
    "sl2_maxweight_check",
    "subgroup_generators",
    "to_jsonable",
    "u_elem",
    "u_top",
    "upper_ones",
    "vector",
    "vector_from_json",
    "w_limit",
    "weight_component",
    "weight_support",
]
