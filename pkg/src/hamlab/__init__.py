"""Digraph Hamiltonicity laboratory.

Degree-condition checkers, matching and connectivity primitives, regular
pairs, the cycle-cover routine, shifted walks, and the end-to-end
clustered Hamilton-cycle assembly pipeline, plus exact brute-force
oracles and an experiment harness.
"""

from .conditions import (
    CHECKERS,
    CONDITION_NAMES,
    ConditionReport,
    check_ghouila_houri,
    check_kot,
    check_nash_williams_chvatal,
    check_posa_digraph,
    check_posa_min,
    check_semi_exact,
    derive_min_semidegree,
    full_range_equivalence,
    gen_concluding_example,
    gen_extremal_chvatal,
)
from .digraph import (
    BipartiteGraph,
    DegreeSequences,
    Digraph,
    HamiltonCertificate,
    OneFactor,
    degree_sequences,
    distances_on_factor,
    verify_hamilton_cycle,
)
from .errors import (
    ContractError,
    GenerationError,
    HamlabError,
    MalformedCertificateError,
    ParameterError,
    PreconditionError,
    ScaleError,
    SearchFailureError,
    UnreachableError,
    WrongPipelineError,
)
from .matching import (
    FactorCertificate,
    Matching,
    defect_hall_matching,
    find_one_factor,
    find_separator,
    hall_violator,
    internally_disjoint_paths,
    is_strongly_connected,
    is_strongly_k_connected,
    max_matching,
    min_cover,
    strong_connectivity,
    vertex_menger_value,
)
from .oracle import (
    brute_force_hamiltonian,
    enumerate_hamiltonian_permutation,
    max_cycle_cover_coverage,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "CHECKERS",
    "CONDITION_NAMES",
    "ConditionReport",
    "ContractError",
    "DegreeSequences",
    "Digraph",
    "FactorCertificate",
    "GenerationError",
    "HamiltonCertificate",
    "HamlabError",
    "MalformedCertificateError",
    "Matching",
    "OneFactor",
    "ParameterError",
    "PreconditionError",
    "ScaleError",
    "SearchFailureError",
    "UnreachableError",
    "WrongPipelineError",
    "brute_force_hamiltonian",
    "check_ghouila_houri",
    "check_kot",
    "check_nash_williams_chvatal",
    "check_posa_digraph",
    "check_posa_min",
    "check_semi_exact",
    "defect_hall_matching",
    "degree_sequences",
    "derive_min_semidegree",
    "distances_on_factor",
    "enumerate_hamiltonian_permutation",
    "find_one_factor",
    "find_separator",
    "full_range_equivalence",
    "gen_concluding_example",
    "gen_extremal_chvatal",
    "hall_violator",
    "internally_disjoint_paths",
    "is_strongly_connected",
    "is_strongly_k_connected",
    "max_cycle_cover_coverage",
    "max_matching",
    "min_cover",
    "strong_connectivity",
    "vertex_menger_value",
    "verify_hamilton_cycle",
    "__version__",
]
