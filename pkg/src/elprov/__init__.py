"""Reasoner for ELHr ontologies annotated with semiring provenance.

Decides entailment of annotated axioms and instance queries by rule
saturation, computes the provenance variables relevant to a consequence,
and answers annotated Boolean conjunctive queries by canonical-model
construction and query rewriting.
"""

from .provenance import (
    BOOLEAN,
    FUZZY,
    ONE,
    ZERO,
    MissingAssignmentError,
    Monomial,
    Polynomial,
    SemiringSpec,
    Variable,
    evaluate,
    monomial_product,
    parse_monomial,
    parse_polynomial,
    poly_add,
    poly_contains,
    poly_mul,
    representative,
)
from .ontology import (
    CA,
    GCI,
    RA,
    RI,
    RR,
    AnnotatedAxiom,
    AnnotatedOntology,
    Atomic,
    Concept,
    Conj,
    Exists,
    ExistsQ,
    FreshNames,
    NamespaceError,
    ParseError,
    Ran,
    TOP,
    Top,
    normalize,
    parse_axiom,
    parse_ontology,
    render_annotated,
    render_axiom,
    signature,
    translate_general_gci,
)
from .completion import (
    Limits,
    ResourceCapExceeded,
    SaturatedSet,
    UnknownNameWarning,
    entails_assertion,
    entails_ca_via_gci,
    entails_gci,
    entails_iq,
    entails_ra_via_ri,
    entails_ri,
    entails_rr,
    reduce_ca_to_gci,
    reduce_ra_to_ri,
    saturate,
)
from .relevance import (
    MergedSet,
    merged_saturate,
    relevant_for_axiom,
    relevant_for_iq,
    relevant_variables,
    relevant_variables_for_axiom,
    relevant_variables_for_iq,
)
from .interpretation import (
    BCQ,
    AnnotatedInterpretation,
    AuxElement,
    ConceptAtom,
    Ind,
    Match,
    Named,
    NonStandardQueryError,
    QueryError,
    RoleAtom,
    UnknownIndividualError,
    Var,
    enumerate_matches,
    parse_query,
    provenance_of_matches,
    query_provenance,
)
from .canonical import (
    Fork,
    RewritingConditions,
    build_canonical_model,
    compute_rewriting,
    entails_query,
    render_rewriting,
)

__version__ = "0.1.0"
