"""Exact stability criteria for line bundles on toric manifolds and numerics on their LG mirrors."""

from .bridgeland import arcara_miles_scan, dhym_bridgeland_dictionary, k_scan
from .charges import (
    ComplexifiedClass,
    central_charge,
    dhym_nakai_moishezon,
    higher_rank_inequalities,
    jacob_sheu_check,
    phase_inequality_form,
    topological_angles,
)
from .chow import CohClass, DivisorClass, chern_character, gamma_class, intersection_number, is_weak_fano
from .fan import Fan, FanError, load_fan, make_fan, preset_fan
from .lg import build_lg, critical_points, gamma_lhs, i_function, positive_cycle_period, residue_pairing
from .minangle import minimal_angle, semipositivity_check

__version__ = "0.1.0"

__all__ = [
    "ComplexifiedClass", "CohClass", "DivisorClass", "Fan", "FanError",
    "arcara_miles_scan", "build_lg", "central_charge", "chern_character", "critical_points",
    "dhym_bridgeland_dictionary", "dhym_nakai_moishezon", "gamma_class", "gamma_lhs",
    "higher_rank_inequalities", "i_function", "intersection_number", "is_weak_fano",
    "jacob_sheu_check", "k_scan", "load_fan", "make_fan", "minimal_angle", "phase_inequality_form",
    "positive_cycle_period", "preset_fan", "residue_pairing", "semipositivity_check", "topological_angles",
]
