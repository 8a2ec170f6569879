"""Cayley digraphs of generalized quaternion groups and the CI / m-DCI properties."""

from .ci import (
    CiVerdict,
    SurveyReport,
    cayley_isomorphic,
    ci_subset_test,
    mdci_necessary_condition,
    mdci_survey,
    prime_power_mdci_predicate,
    verify_certificate,
)
from .digraph import (
    Digraph,
    OrbitPartition,
    cayley_digraph,
    induced_subdigraph,
    is_cover,
    is_directed_cycle,
    is_strongly_connected,
    lexicoproduct,
    orbit_quotient,
    standard_digraph,
)
from .errors import DomainError, QdciError, ResourceError, ValidationError
from .groups import (
    Automorphism,
    ConnectionSet,
    FiniteGroup,
    aut_orbit_reps,
    automorphisms,
    element_order,
    extend_to_automorphism,
    generated_subgroup,
    make_cyclic,
    make_quaternion,
    parse_group,
)
from .iso import CanonicalForm, automorphism_group, babai_ci_test, canonical_form, find_isomorphism, refine
from .perm import (
    PermutationGroup,
    is_locally_primitive,
    is_primitive_action,
    regular_subgroups_isomorphic_to_Q,
    right_regular_representation,
    subgroup_transporter,
)
from .witness import (
    Soundness,
    WitnessPair,
    check_soundness,
    claim_iso_check,
    coset_swap_check,
    even_witness,
    phi_map,
    podd_witness,
    regenerate,
)

__version__ = "0.1.0"
