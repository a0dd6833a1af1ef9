"""Exception hierarchy shared by all attestation schemes."""


class AttestationError(Exception):
    """Base class for every error raised by this library."""


class InvalidComponent(AttestationError):
    """Component violates its invariants (empty id, NUL in id, non-byte payload)."""


class InvalidParameter(AttestationError):
    """Setup or key-generation parameter outside the supported range."""


class NotAProof(AttestationError):
    """Byte sequence does not start with the proof envelope magic."""


class UnsupportedVersion(AttestationError):
    """Envelope carries a version this implementation does not speak."""


class Malformed(AttestationError):
    """Structurally invalid input: truncated, non-canonical, or unknown layout."""


class CorruptProof(AttestationError):
    """Proof object fails its own internal consistency checks."""


class DomainMismatch(AttestationError):
    """Operands belong to different trust domains (params, keys, or schemes)."""


class NotAMember(AttestationError):
    """Requested digest is not part of the attested set."""


class IdConflict(AttestationError):
    """Same component id maps to two different digests."""


class NotFound(AttestationError):
    """Referenced component id is not registered."""


class ConfigurationError(AttestationError):
    """Required domain material (params or keys) is missing for the scheme."""
