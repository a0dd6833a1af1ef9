"""catt: composable attestation toolkit.

Integrity proofs over sets of named components, with three interchangeable
backends (sorted Merkle tree, RSA-style accumulator, aggregate RSA-FDH
signatures) plus a layered pipeline combining all three. Proofs compose,
update incrementally, and serialize to one canonical binary envelope.
"""

from . import accumulator, aggsig, integrated, manager, merkle
from .envelope import Proof, deserialize_proof, serialize_proof
from .errors import (
    AttestationError,
    ConfigurationError,
    CorruptProof,
    DomainMismatch,
    IdConflict,
    InvalidComponent,
    InvalidParameter,
    Malformed,
    NotAMember,
    NotAProof,
    NotFound,
    UnsupportedVersion,
)
from .hashing import Component, ComponentSet, build_component_set, digest_component

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Component",
    "ComponentSet",
    "build_component_set",
    "digest_component",
    "serialize_proof",
    "deserialize_proof",
    "Proof",
    "merkle",
    "accumulator",
    "aggsig",
    "integrated",
    "manager",
    "AttestationError",
    "InvalidComponent",
    "InvalidParameter",
    "NotAProof",
    "UnsupportedVersion",
    "Malformed",
    "CorruptProof",
    "DomainMismatch",
    "NotAMember",
    "IdConflict",
    "NotFound",
    "ConfigurationError",
]
