"""Verify and explore pro-p groups with constant generating number on open subgroups."""

__version__ = "0.1.0"

from .catalog import Certificate, Quotient, build, certify, family, symbolic_phi_series
from .pgroup import FiniteGroup, Subgroup, all_subgroups_up_to_index, closure, dmin, frattini
from .verify import d_profile, en_check, schreier_defect_report, star_check, theorem_oracle

__all__ = [
    "Certificate", "FiniteGroup", "Quotient", "Subgroup", "all_subgroups_up_to_index", "build",
    "certify", "closure", "d_profile", "dmin", "en_check", "family", "frattini",
    "schreier_defect_report", "star_check", "symbolic_phi_series", "theorem_oracle",
]
