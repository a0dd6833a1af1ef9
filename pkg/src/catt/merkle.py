"""Sorted Merkle tree attestation over component digest sets.

Construction: each component digest d becomes the leaf hash
SHA-256(0x00 ‖ d); leaf hashes are sorted ascending, and every level pairs
neighbours left-to-right into SHA-256(0x01 ‖ left ‖ right), pairing an odd
trailing node with itself. Sorting the (deduplicated) leaves is what makes
the root independent of input order, and the leaf/node tags prevent a node
value from being replayed as a leaf. The empty set has the fixed root
SHA-256(0x04 ‖ "EMPTY"), which gives composition a true identity element.

Proof objects carry the leaf digest set, not just the root: the union of two
sorted trees interleaves, so composition must rebuild from leaves. Roots
alone cannot be merged.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .encoding import Reader, be64
from .errors import CorruptProof, Malformed, NotAMember
from .hashing import (
    DIGEST_SIZE,
    EMPTY_TAG,
    LEAF_TAG,
    NODE_TAG,
    Component,
    ComponentSet,
    digest_component,
    sha256,
)

EMPTY_ROOT = sha256(EMPTY_TAG, b"EMPTY")


class Side(IntEnum):
    """Position of a sibling relative to the node being folded upward."""

    LEFT = 0
    RIGHT = 1


@dataclass(frozen=True)
class PathStep:
    digest: bytes
    side: Side


@dataclass(frozen=True)
class MerkleInclusionPath:
    """Sibling chain proving one leaf belongs to a root."""

    leaf_index: int
    siblings: tuple[PathStep, ...]


@dataclass(frozen=True)
class MerkleAttestation:
    leaves: ComponentSet
    root: bytes


def _leaf_level(leaves: ComponentSet) -> list[bytes]:
    return sorted(sha256(LEAF_TAG, digest) for digest in leaves)


def _next_level(level: list[bytes]) -> list[bytes]:
    parents = []
    for j in range(0, len(level), 2):
        left = level[j]
        right = level[j + 1] if j + 1 < len(level) else left
        parents.append(sha256(NODE_TAG, left, right))
    return parents


def compute_root(leaves: ComponentSet) -> bytes:
    level = _leaf_level(leaves)
    if not level:
        return EMPTY_ROOT
    while len(level) > 1:
        level = _next_level(level)
    return level[0]


def attest(leaves: ComponentSet) -> MerkleAttestation:
    """Build the sorted-tree attestation of a component set."""
    return MerkleAttestation(leaves, compute_root(leaves))


def verify(proof: MerkleAttestation, leaves: ComponentSet) -> bool:
    """True iff the proof covers exactly `leaves` and its root recomputes."""
    return proof.leaves == leaves and proof.root == compute_root(leaves)


def _check_consistent(proof: MerkleAttestation) -> None:
    if proof.root != compute_root(proof.leaves):
        raise CorruptProof("merkle root does not match its leaf set")


def compose(first: MerkleAttestation, second: MerkleAttestation) -> MerkleAttestation:
    """Attestation of the union of two attested sets. Commutative; the
    empty-set attestation is the identity."""
    _check_consistent(first)
    _check_consistent(second)
    return attest(first.leaves.union(second.leaves))


def include(proof: MerkleAttestation, component: Component) -> MerkleAttestation:
    """Extend an attestation with one new component.

    Only the new component is digested; existing members are reused from the
    proof's leaf set. Including an existing member returns the proof
    unchanged.
    """
    return include_digest(proof, digest_component(component), component.id)


def include_digest(
    proof: MerkleAttestation, digest: bytes, component_id: str | None = None
) -> MerkleAttestation:
    _check_consistent(proof)
    if digest in proof.leaves:
        return proof
    return attest(proof.leaves.with_digest(digest, component_id))


def inclusion_path(proof: MerkleAttestation, digest: bytes) -> MerkleInclusionPath:
    """Sibling path for one member digest; length is logarithmic in set size."""
    if digest not in proof.leaves:
        raise NotAMember("digest is not a leaf of this attestation")
    level = _leaf_level(proof.leaves)
    index = level.index(sha256(LEAF_TAG, digest))
    leaf_index = index
    steps = []
    while len(level) > 1:
        if index % 2 == 0:
            sibling = level[index + 1] if index + 1 < len(level) else level[index]
            steps.append(PathStep(sibling, Side.RIGHT))
        else:
            steps.append(PathStep(level[index - 1], Side.LEFT))
        index //= 2
        level = _next_level(level)
    return MerkleInclusionPath(leaf_index, tuple(steps))


def verify_inclusion(root: bytes, digest: bytes, path: MerkleInclusionPath) -> bool:
    """Fold the leaf hash of `digest` through the path and compare to root."""
    current = sha256(LEAF_TAG, digest)
    for step in path.siblings:
        if step.side is Side.LEFT:
            current = sha256(NODE_TAG, step.digest, current)
        else:
            current = sha256(NODE_TAG, current, step.digest)
    return current == root


def encode_body(proof: MerkleAttestation) -> bytes:
    out = bytearray(be64(len(proof.leaves)))
    for digest in proof.leaves:
        out += digest
    out += proof.root
    return bytes(out)


def decode_body(reader: Reader) -> MerkleAttestation:
    count = reader.u64()
    digests = []
    previous = None
    for _ in range(count):
        digest = reader.take(DIGEST_SIZE)
        if previous is not None and digest <= previous:
            raise Malformed("merkle leaf digests not in canonical order")
        digests.append(digest)
        previous = digest
    root = reader.take(DIGEST_SIZE)
    return MerkleAttestation(ComponentSet(tuple(digests)), root)
