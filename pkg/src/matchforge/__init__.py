"""Deferred acceptance over arbitrary choice-rule profiles, with exhaustive
verification of choice and matching axioms on small instances."""
from matchforge.kernels import BACKEND
from matchforge.model import Contract, InstitutionSpec, Preference, Problem, demand, members, to_mask
from matchforge.choice import ChoiceFunction, ChoiceTable, build_profile, build_rule
from matchforge.engine import DATrace, run_da, is_stable, enumerate_stable
from matchforge.io import load_instance, read_instance, save_instance

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Contract", "InstitutionSpec", "Preference", "Problem", "demand", "members", "to_mask",
    "ChoiceFunction", "ChoiceTable", "build_profile", "build_rule",
    "DATrace", "run_da", "is_stable", "enumerate_stable", "load_instance", "read_instance", "save_instance",
]
