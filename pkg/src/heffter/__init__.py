"""Lambda-fold non-zero sum Heffter arrays over finite groups."""

from .arrays import Params, PFArray, VerifyReport, feasibility, verify_array
from .groups import FiniteGroup, Subgroup, build_group, group_from_text, parse_group_spec, subgroup_of_order

__all__ = [
    "FiniteGroup", "Params", "PFArray", "Subgroup", "VerifyReport", "build_group",
    "feasibility", "group_from_text", "parse_group_spec", "subgroup_of_order", "verify_array",
]
