"""The weight-0 identity: term tables, exact expansion, valence budget and certificates."""

from .certificate import Certificate, replay, verify_mod7
from .expand import dissection_check, expand_identity, nonholo_cancellation
from .mutations import fixed_mutations, perturb_term
from .terms import IdentityTerm, DissectionTerm, build_identity_terms, build_dissection_terms

__all__ = [
    "Certificate",
    "IdentityTerm",
    "DissectionTerm",
    "build_identity_terms",
    "build_dissection_terms",
    "dissection_check",
    "expand_identity",
    "fixed_mutations",
    "nonholo_cancellation",
    "perturb_term",
    "replay",
    "verify_mod7",
]
