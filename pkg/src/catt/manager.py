"""Stateful attestation sessions over any proof backend.

A session tracks a registry of components (id to digest), keeps a live proof
in sync with it through the backend's incremental operations, and records
every mutation in an append-only log. Sessions compose: the registries merge
and the proofs combine through the backend's composition operator, which is
how per-domain attestations (environment, hardware, model, libraries) roll
up into one verifiable whole.

Updates are modeled as replacement: the registry entry changes and the proof
is rebuilt from the stored digests (component payloads are never re-read).
Removal is deliberately not offered; the accumulator backend cannot delete
without trapdoor knowledge, and prior digests stay visible in the log.

Sessions are single-writer: mutate from one thread at a time. Verification
and reporting are read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from types import MappingProxyType
from typing import Mapping

from . import accumulator, aggsig, integrated, merkle
from .encoding import Reader, be64, lp
from .envelope import (
    SCHEME_ACCUMULATOR,
    SCHEME_AGGSIG,
    SCHEME_INTEGRATED,
    SCHEME_MERKLE,
    Proof,
    deserialize_proof,
    scheme_of,
    serialize_proof,
)
from .errors import (
    ConfigurationError,
    DomainMismatch,
    IdConflict,
    Malformed,
    NotFound,
)
from .hashing import DIGEST_SIZE, Component, ComponentSet, digest_component, sha256

SESSION_MAGIC = b"CATS"
SESSION_VERSION = 1


class Scheme(IntEnum):
    MERKLE = SCHEME_MERKLE
    ACCUMULATOR = SCHEME_ACCUMULATOR
    AGGSIG = SCHEME_AGGSIG
    INTEGRATED = SCHEME_INTEGRATED


@dataclass(frozen=True)
class DomainMaterial:
    """Parameters and keys a backend needs; verification-only sessions may
    carry just the public half."""

    acc_params: accumulator.AccumulatorParams | None = None
    signing_key: aggsig.SigningKey | None = None
    verify_key: aggsig.VerifyKey | None = None

    def verifier(self) -> aggsig.VerifyKey | None:
        if self.verify_key is not None:
            return self.verify_key
        if self.signing_key is not None:
            return self.signing_key.public()
        return None


OP_ADD = "add"
OP_UPDATE = "update"
OP_COMPOSE = "compose"
_MUTATIONS = (OP_ADD, OP_UPDATE)


@dataclass(frozen=True)
class LogEntry:
    revision: int
    operation: str
    component_id: str
    prior_digest: bytes | None
    new_digest: bytes | None


@dataclass(frozen=True)
class ComponentStatus:
    component_id: str
    digest: bytes
    included: bool


@dataclass(frozen=True)
class TrustReport:
    """Consolidated verification result over all components of a session."""

    revision: int
    scheme: Scheme
    component_count: int
    components: tuple[ComponentStatus, ...]
    overall_valid: bool
    proof_bytes: bytes
    layers: integrated.VerificationReport | None = None

    def render(self) -> str:
        lines = [
            f"trust report: scheme={self.scheme.name.lower()} revision={self.revision}",
            f"components: {self.component_count}",
        ]
        for status in self.components:
            mark = "ok" if status.included else "!!"
            lines.append(f"  [{mark}] {status.component_id}  {status.digest.hex()}")
        if self.layers is not None:
            lines.append(
                "layers: merkle=%s accumulator=%s signature=%s"
                % (
                    "ok" if self.layers.merkle_ok else "FAIL",
                    "ok" if self.layers.accumulator_ok else "FAIL",
                    "ok" if self.layers.signature_ok else "FAIL",
                )
            )
        lines.append(f"overall: {'VALID' if self.overall_valid else 'INVALID'}")
        lines.append(
            f"proof: {len(self.proof_bytes)} bytes sha256={sha256(self.proof_bytes).hex()}"
        )
        return "\n".join(lines)


def require_material(scheme: Scheme, material: DomainMaterial, mutating: bool) -> None:
    if scheme in (Scheme.ACCUMULATOR, Scheme.INTEGRATED) and material.acc_params is None:
        raise ConfigurationError(f"{scheme.name.lower()} sessions need accumulator parameters")
    if scheme in (Scheme.AGGSIG, Scheme.INTEGRATED):
        if mutating and material.signing_key is None:
            raise ConfigurationError(f"{scheme.name.lower()} sessions need a signing key")
        if not mutating and material.verifier() is None:
            raise ConfigurationError(f"{scheme.name.lower()} sessions need a verification key")


def attest_set(scheme: Scheme, material: DomainMaterial, members: ComponentSet) -> Proof:
    match scheme:
        case Scheme.MERKLE:
            return merkle.attest(members)
        case Scheme.ACCUMULATOR:
            return accumulator.attest(material.acc_params, members)
        case Scheme.AGGSIG:
            return aggsig.attest(material.signing_key, members)
        case Scheme.INTEGRATED:
            return integrated.attest(members, material.acc_params, material.signing_key)
    raise ConfigurationError(f"unknown scheme {scheme}")


def include_proof_digest(
    scheme: Scheme,
    material: DomainMaterial,
    proof: Proof,
    digest: bytes,
    component_id: str,
) -> Proof:
    match scheme:
        case Scheme.MERKLE:
            return merkle.include_digest(proof, digest, component_id)
        case Scheme.ACCUMULATOR:
            return accumulator.include_digest(
                proof, digest, material.acc_params, component_id=component_id
            )
        case Scheme.AGGSIG:
            return aggsig.include_digest(
                proof, material.signing_key, digest, component_id=component_id
            )
        case Scheme.INTEGRATED:
            return integrated.include_digest(
                proof, digest, material.acc_params, material.signing_key, component_id
            )
    raise ConfigurationError(f"unknown scheme {scheme}")


def verify_proof(
    scheme: Scheme, material: DomainMaterial, proof: Proof, members: ComponentSet
) -> bool:
    match scheme:
        case Scheme.MERKLE:
            return merkle.verify(proof, members)
        case Scheme.ACCUMULATOR:
            return accumulator.verify(proof, material.acc_params, members)
        case Scheme.AGGSIG:
            return aggsig.verify(proof, material.verifier(), members)
        case Scheme.INTEGRATED:
            return integrated.verify(
                proof, members, material.acc_params, material.verifier()
            ).overall
    raise ConfigurationError(f"unknown scheme {scheme}")


def compose_proofs(
    scheme: Scheme,
    material: DomainMaterial,
    first: Proof,
    second: Proof,
    union: ComponentSet,
) -> Proof:
    match scheme:
        case Scheme.MERKLE:
            return merkle.compose(first, second)
        case Scheme.ACCUMULATOR:
            return accumulator.compose(first, second, material.acc_params)
        case Scheme.AGGSIG:
            return aggsig.compose(first, second, material.verifier())
        case Scheme.INTEGRATED:
            # No proof-level composition exists for the layered scheme (the
            # outer layers must be re-signed), so rebuild over the union.
            return integrated.attest(union, material.acc_params, material.signing_key)
    raise ConfigurationError(f"unknown scheme {scheme}")


def proof_members(scheme: Scheme, proof: Proof) -> ComponentSet:
    if scheme is Scheme.MERKLE:
        return proof.leaves
    if scheme is Scheme.INTEGRATED:
        return proof.merkle.leaves
    return proof.members


class AttestationSession:
    """Registry of components plus the live proof covering them."""

    def __init__(
        self,
        scheme: Scheme,
        material: DomainMaterial,
        registry: dict[str, bytes],
        proof: Proof,
        revision: int,
        log: list[LogEntry],
    ):
        self.scheme = scheme
        self.material = material
        self._registry = registry
        self.current_proof = proof
        self.revision = revision
        self.log = log

    @property
    def registry(self) -> Mapping[str, bytes]:
        return MappingProxyType(self._registry)

    def component_set(self) -> ComponentSet:
        ids = {digest: cid for cid, digest in self._registry.items()}
        return ComponentSet(tuple(sorted(ids)), ids)

    def add_component(self, component: Component) -> bool:
        """Register a new component and extend the proof incrementally.

        Returns False (and leaves the revision untouched) when the identical
        component is already registered; raises IdConflict when the id exists
        with a different digest.
        """
        digest = digest_component(component)
        existing = self._registry.get(component.id)
        if existing is not None:
            if existing == digest:
                return False
            raise IdConflict(f"id {component.id!r} already maps to a different digest")
        self.current_proof = include_proof_digest(
            self.scheme, self.material, self.current_proof, digest, component.id
        )
        self._registry[component.id] = digest
        self.revision += 1
        self.log.append(LogEntry(self.revision, OP_ADD, component.id, None, digest))
        return True

    def update_component(self, component: Component) -> bool:
        """Replace a registered component's digest and rebuild the proof
        from the stored digest set. Returns False for a no-op update."""
        prior = self._registry.get(component.id)
        if prior is None:
            raise NotFound(f"no component registered under id {component.id!r}")
        digest = digest_component(component)
        if digest == prior:
            return False
        self._registry[component.id] = digest
        self.current_proof = attest_set(self.scheme, self.material, self.component_set())
        self.revision += 1
        self.log.append(LogEntry(self.revision, OP_UPDATE, component.id, prior, digest))
        return True

    def verify(self) -> bool:
        return verify_proof(self.scheme, self.material, self.current_proof, self.component_set())

    def layer_report(self) -> integrated.VerificationReport | None:
        if self.scheme is not Scheme.INTEGRATED:
            return None
        return integrated.verify(
            self.current_proof,
            self.component_set(),
            self.material.acc_params,
            self.material.verifier(),
        )

    def report(self) -> TrustReport:
        return build_report(
            self.scheme,
            self.material,
            self.component_set(),
            self.current_proof,
            revision=self.revision,
        )


def build_report(
    scheme: Scheme,
    material: DomainMaterial,
    members: ComponentSet,
    proof: Proof,
    revision: int = 0,
) -> TrustReport:
    """Report a proof against a component set; pure function of its inputs."""
    covered = proof_members(scheme, proof)
    statuses = tuple(
        ComponentStatus(members.id_of(digest) or digest.hex(), digest, digest in covered)
        for digest in members
    )
    layers = None
    if scheme is Scheme.INTEGRATED:
        layers = integrated.verify(proof, members, material.acc_params, material.verifier())
        overall = layers.overall
    else:
        overall = verify_proof(scheme, material, proof, members)
    return TrustReport(
        revision=revision,
        scheme=scheme,
        component_count=len(members),
        components=statuses,
        overall_valid=overall,
        proof_bytes=serialize_proof(proof),
        layers=layers,
    )


def create_session(
    scheme: Scheme,
    initial: list[Component],
    material: DomainMaterial = DomainMaterial(),
) -> AttestationSession:
    """Open a session at revision 0 holding the attestation of `initial`."""
    require_material(scheme, material, mutating=True)
    registry: dict[str, bytes] = {}
    for component in initial:
        digest = digest_component(component)
        existing = registry.get(component.id)
        if existing is not None and existing != digest:
            raise IdConflict(f"id {component.id!r} appears twice with different payloads")
        registry[component.id] = digest
    ids = {digest: cid for cid, digest in registry.items()}
    members = ComponentSet(tuple(sorted(ids)), ids)
    proof = attest_set(scheme, material, members)
    return AttestationSession(scheme, material, registry, proof, 0, [])


def compose_sessions(a: AttestationSession, b: AttestationSession) -> AttestationSession:
    """Merge two sessions of the same scheme and domain into a fresh one.

    Registries union (the same id must map to the same digest), the proofs
    combine through the backend, and the new session starts at revision 0
    with provenance entries naming both parents.
    """
    if a.scheme != b.scheme:
        raise DomainMismatch("cannot compose sessions of different schemes")
    _check_same_material(a.scheme, a.material, b.material)
    registry = dict(a._registry)
    for cid, digest in b._registry.items():
        existing = registry.get(cid)
        if existing is not None and existing != digest:
            raise IdConflict(f"id {cid!r} maps to different digests in the two sessions")
        registry[cid] = digest
    ids = {digest: cid for cid, digest in registry.items()}
    union = ComponentSet(tuple(sorted(ids)), ids)
    proof = compose_proofs(a.scheme, a.material, a.current_proof, b.current_proof, union)
    # Provenance lineage carries forward; parent mutation entries are baked
    # into the referenced proofs and do not count toward the new revision.
    log = [entry for parent in (a, b) for entry in parent.log if entry.operation == OP_COMPOSE]
    log += [
        LogEntry(0, OP_COMPOSE, f"parent:{sha256(serialize_proof(p)).hex()}", None, None)
        for p in (a.current_proof, b.current_proof)
    ]
    return AttestationSession(a.scheme, a.material, registry, proof, 0, log)


def _check_same_material(scheme: Scheme, a: DomainMaterial, b: DomainMaterial) -> None:
    if scheme in (Scheme.ACCUMULATOR, Scheme.INTEGRATED):
        if a.acc_params != b.acc_params:
            raise DomainMismatch("sessions use different accumulator parameters")
    if scheme in (Scheme.AGGSIG, Scheme.INTEGRATED):
        va, vb = a.verifier(), b.verifier()
        if va != vb:
            raise DomainMismatch("sessions use different signing keys")


def replay_log(session: AttestationSession) -> Proof:
    """Reconstruct the current proof by rewinding the log to revision 0 and
    re-applying every mutation through the incremental paths."""
    registry = dict(session._registry)
    mutations = [e for e in session.log if e.operation in _MUTATIONS]
    for entry in reversed(mutations):
        if entry.operation == OP_ADD:
            del registry[entry.component_id]
        else:
            registry[entry.component_id] = entry.prior_digest

    def as_set(reg: dict[str, bytes]) -> ComponentSet:
        ids = {digest: cid for cid, digest in reg.items()}
        return ComponentSet(tuple(sorted(ids)), ids)

    proof = attest_set(session.scheme, session.material, as_set(registry))
    for entry in mutations:
        if entry.operation == OP_ADD:
            registry[entry.component_id] = entry.new_digest
            proof = include_proof_digest(
                session.scheme, session.material, proof, entry.new_digest, entry.component_id
            )
        else:
            registry[entry.component_id] = entry.new_digest
            proof = attest_set(session.scheme, session.material, as_set(registry))
    return proof


def serialize_session(session: AttestationSession) -> bytes:
    out = bytearray(SESSION_MAGIC)
    out += bytes([SESSION_VERSION, session.scheme])
    entries = sorted(session._registry.items(), key=lambda item: item[0].encode("utf-8"))
    out += be64(len(entries))
    for cid, digest in entries:
        out += lp(cid.encode("utf-8"))
        out += digest
    out += lp(serialize_proof(session.current_proof))
    out += be64(len(session.log))
    for entry in session.log:
        out += be64(entry.revision)
        out += bytes([_op_code(entry.operation)])
        out += lp(entry.component_id.encode("utf-8"))
        out += _opt_digest(entry.prior_digest)
        out += _opt_digest(entry.new_digest)
    return bytes(out)


def _op_code(operation: str) -> int:
    return {OP_ADD: 1, OP_UPDATE: 2, OP_COMPOSE: 3}[operation]


def _op_name(code: int) -> str:
    names = {1: OP_ADD, 2: OP_UPDATE, 3: OP_COMPOSE}
    if code not in names:
        raise Malformed(f"unknown log operation code {code}")
    return names[code]


def _opt_digest(digest: bytes | None) -> bytes:
    if digest is None:
        return b"\x00"
    return b"\x01" + digest


def _read_opt_digest(reader: Reader) -> bytes | None:
    flag = reader.byte()
    if flag == 0:
        return None
    if flag == 1:
        return reader.take(DIGEST_SIZE)
    raise Malformed(f"invalid optional digest flag {flag}")


def _decode_id(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise Malformed("component id is not valid UTF-8") from exc


def deserialize_session(data: bytes, material: DomainMaterial) -> AttestationSession:
    if data[:4] != SESSION_MAGIC:
        raise Malformed("not a session file")
    reader = Reader(data[4:], "session")
    version = reader.byte()
    if version != SESSION_VERSION:
        raise Malformed(f"unsupported session version {version}")
    try:
        scheme = Scheme(reader.byte())
    except ValueError as exc:
        raise Malformed(str(exc)) from exc
    registry: dict[str, bytes] = {}
    previous: bytes | None = None
    for _ in range(reader.u64()):
        raw_id = reader.lp()
        if previous is not None and raw_id <= previous:
            raise Malformed("session registry ids not in canonical order")
        previous = raw_id
        registry[_decode_id(raw_id)] = reader.take(DIGEST_SIZE)
    proof = deserialize_proof(reader.lp())
    if scheme_of(proof) != scheme:
        raise Malformed("session proof scheme disagrees with session header")
    log = []
    for _ in range(reader.u64()):
        revision = reader.u64()
        operation = _op_name(reader.byte())
        cid = _decode_id(reader.lp())
        prior = _read_opt_digest(reader)
        new = _read_opt_digest(reader)
        log.append(LogEntry(revision, operation, cid, prior, new))
    reader.expect_end()
    revision = sum(1 for entry in log if entry.operation in _MUTATIONS)
    return AttestationSession(scheme, material, registry, proof, revision, log)


def save_session(session: AttestationSession, path) -> None:
    with open(path, "wb") as handle:
        handle.write(serialize_session(session))


def load_session(path, material: DomainMaterial = DomainMaterial()) -> AttestationSession:
    with open(path, "rb") as handle:
        return deserialize_session(handle.read(), material)
