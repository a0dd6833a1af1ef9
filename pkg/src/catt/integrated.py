"""Layered attestation pipeline: Merkle tree, accumulator commitment, signature.

The component set is first attested as a sorted Merkle tree; the root digest
is then committed to the accumulator as a single element; finally the
accumulator value's canonical bytes are hashed and signed with the domain
signing key. The result is one proof whose three layers verify
independently, so a verification failure is localized to the layer that
broke.

Each layer is checked against a ground-truth recomputation from the
presented component set and the public material, never against another
(possibly corrupted) field of the same proof. Corrupting exactly one layer
of the proof therefore flips exactly that layer's flag.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import accumulator, aggsig, merkle
from .encoding import Reader, int_from_bytes, int_to_fixed, lp
from .errors import DomainMismatch, Malformed
from .hashing import (
    DIGEST_SIZE,
    FDH_TAG,
    Component,
    ComponentSet,
    digest_component,
    sha256,
)
from .primes import hash_to_prime


@dataclass(frozen=True)
class IntegratedAttestation:
    merkle: merkle.MerkleAttestation
    acc_params_digest: bytes
    acc_value: int
    acc_width: int
    key_digest: bytes
    signature: int
    sig_width: int


@dataclass(frozen=True)
class VerificationReport:
    """Per-layer verdicts; overall is their conjunction."""

    merkle_ok: bool
    accumulator_ok: bool
    signature_ok: bool

    @property
    def overall(self) -> bool:
        return self.merkle_ok and self.accumulator_ok and self.signature_ok


def _commit_root(root: bytes, params: accumulator.AccumulatorParams) -> int:
    return pow(params.generator, hash_to_prime(root), params.modulus)


def _signing_digest(acc_value: int, width: int) -> bytes:
    return sha256(FDH_TAG, int_to_fixed(acc_value, width))


def attest(
    members: ComponentSet,
    params: accumulator.AccumulatorParams,
    key: aggsig.SigningKey,
) -> IntegratedAttestation:
    """Run the full pipeline; deterministic end to end."""
    tree = merkle.attest(members)
    acc_value = _commit_root(tree.root, params)
    signature = aggsig.sign_digest(key, _signing_digest(acc_value, params.value_width))
    return IntegratedAttestation(
        tree,
        accumulator.params_digest(params),
        acc_value,
        params.value_width,
        aggsig.key_digest(key),
        signature,
        key.width,
    )


def verify(
    proof: IntegratedAttestation,
    members: ComponentSet,
    params: accumulator.AccumulatorParams,
    key: aggsig.VerifyKey,
) -> VerificationReport:
    """Hierarchical verification returning one verdict per layer."""
    expected_root = merkle.compute_root(members)
    merkle_ok = merkle.verify(proof.merkle, members)

    expected_acc = _commit_root(expected_root, params)
    accumulator_ok = (
        proof.acc_params_digest == accumulator.params_digest(params)
        and proof.acc_width == params.value_width
        and proof.acc_value == expected_acc
    )

    target = aggsig.fdh(_signing_digest(expected_acc, params.value_width), key.modulus)
    signature_ok = (
        proof.key_digest == aggsig.key_digest(key)
        and proof.sig_width == key.width
        and 1 <= proof.signature < key.modulus
        and pow(proof.signature, key.public_exponent, key.modulus) == target
    )
    return VerificationReport(merkle_ok, accumulator_ok, signature_ok)


def include(
    proof: IntegratedAttestation,
    component: Component,
    params: accumulator.AccumulatorParams,
    key: aggsig.SigningKey,
) -> IntegratedAttestation:
    """Extend with one component: the tree grows incrementally, then the new
    root costs one hash-to-prime, one exponentiation, and one signing."""
    return include_digest(proof, digest_component(component), params, key, component.id)


def include_digest(
    proof: IntegratedAttestation,
    digest: bytes,
    params: accumulator.AccumulatorParams,
    key: aggsig.SigningKey,
    component_id: str | None = None,
) -> IntegratedAttestation:
    if proof.acc_params_digest != accumulator.params_digest(params):
        raise DomainMismatch("proof was issued under different accumulator parameters")
    if proof.key_digest != aggsig.key_digest(key):
        raise DomainMismatch("proof was issued under a different signing key")
    if digest in proof.merkle.leaves:
        return proof
    tree = merkle.include_digest(proof.merkle, digest, component_id)
    acc_value = _commit_root(tree.root, params)
    signature = aggsig.sign_digest(key, _signing_digest(acc_value, params.value_width))
    return IntegratedAttestation(
        tree,
        proof.acc_params_digest,
        acc_value,
        params.value_width,
        proof.key_digest,
        signature,
        key.width,
    )


def encode_body(proof: IntegratedAttestation) -> bytes:
    acc_layer = proof.acc_params_digest + lp(int_to_fixed(proof.acc_value, proof.acc_width))
    sig_layer = proof.key_digest + lp(int_to_fixed(proof.signature, proof.sig_width))
    return lp(merkle.encode_body(proof.merkle)) + lp(acc_layer) + lp(sig_layer)


def decode_body(reader: Reader) -> IntegratedAttestation:
    tree_reader = Reader(reader.lp(), "integrated merkle layer")
    tree = merkle.decode_body(tree_reader)
    tree_reader.expect_end()

    acc_reader = Reader(reader.lp(), "integrated accumulator layer")
    acc_params_digest = acc_reader.take(DIGEST_SIZE)
    acc_bytes = acc_reader.lp()
    acc_reader.expect_end()
    if not acc_bytes:
        raise Malformed("empty accumulator layer value")

    sig_reader = Reader(reader.lp(), "integrated signature layer")
    key_digest = sig_reader.take(DIGEST_SIZE)
    sig_bytes = sig_reader.lp()
    sig_reader.expect_end()
    if not sig_bytes:
        raise Malformed("empty signature layer value")

    return IntegratedAttestation(
        tree,
        acc_params_digest,
        int_from_bytes(acc_bytes),
        len(acc_bytes),
        key_digest,
        int_from_bytes(sig_bytes),
        len(sig_bytes),
    )
