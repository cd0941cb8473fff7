"""Contextuality toolkit: marginal scenarios, noncontextual polytopes, n-cycle
bounds, Lovasz theta, state-independent inequalities, ontological models and
Kochen-Specker colorings."""
from .csw import SolverError, lovasz_theta, quantum_max
from .kscolor import enumerate_colorings, parity_certificate
from .polytope import BooleInequality, decide_contextuality, facet_enumeration, vertex_enumeration
from .scenario import MarginalModel, MarginalScenario, validate_scenario

__all__ = [
    "BooleInequality",
    "MarginalModel",
    "MarginalScenario",
    "SolverError",
    "decide_contextuality",
    "enumerate_colorings",
    "facet_enumeration",
    "lovasz_theta",
    "parity_certificate",
    "quantum_max",
    "validate_scenario",
    "vertex_enumeration",
]
