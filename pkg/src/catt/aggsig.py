"""Aggregate RSA full-domain-hash signatures under a single key.

Each member digest is expanded to the width of the signing modulus with a
counter-mode full-domain hash, signed deterministically with the private
exponent, and the per-member signatures are multiplied modulo Ns into one
aggregate. Verification checks the aggregate against the product of the
hashes and every individual signature besides; the empty set aggregates
to 1, which makes composition a monoid.

Individual signatures are retained in the proof so overlapping proofs can be
composed without modular division: duplicates are deduplicated before
multiplying. Signing is deterministic (no salt), which is what makes
repeated attestations byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import instrumentation
from .encoding import Reader, be32, be64, int_from_bytes, int_to_fixed, lp
from .errors import (
    CorruptProof,
    DomainMismatch,
    InvalidParameter,
    Malformed,
)
from .hashing import DIGEST_SIZE, FDH_TAG, Component, ComponentSet, digest_component, sha256
from .primes import find_rsa_prime

KEY_MAGIC = b"CATK"
_PUBLIC_KIND = 1
_PRIVATE_KIND = 2

PUBLIC_EXPONENT = 65537
SUPPORTED_BITS = (512, 1024, 2048)

FdhFn = Callable[[bytes, int], int]


@dataclass(frozen=True)
class VerifyKey:
    """Public half of a signing key: modulus and public exponent."""

    modulus: int
    public_exponent: int

    def __post_init__(self) -> None:
        if self.modulus < 4 or self.modulus % 2 == 0:
            raise InvalidParameter("signing modulus must be an odd integer > 3")
        if not 1 < self.public_exponent < self.modulus or self.public_exponent % 2 == 0:
            raise InvalidParameter("public exponent must be odd and in (1, Ns)")

    @property
    def width(self) -> int:
        return (self.modulus.bit_length() + 7) // 8


@dataclass(frozen=True)
class SigningKey:
    modulus: int
    public_exponent: int
    private_exponent: int

    def __post_init__(self) -> None:
        VerifyKey(self.modulus, self.public_exponent)
        if not 0 < self.private_exponent:
            raise InvalidParameter("private exponent must be positive")

    def public(self) -> VerifyKey:
        return VerifyKey(self.modulus, self.public_exponent)

    @property
    def width(self) -> int:
        return (self.modulus.bit_length() + 7) // 8


@dataclass(frozen=True)
class AggregateAttestation:
    """Aggregate signature plus the per-member signature witnesses.

    member_sigs is kept in digest-ascending order; the aggregate equals the
    product of the individual signatures mod Ns.
    """

    key_digest: bytes
    aggregate: int
    member_sigs: tuple[tuple[bytes, int], ...]
    members: ComponentSet
    width: int

    def signature_for(self, digest: bytes) -> int | None:
        for member, sig in self.member_sigs:
            if member == digest:
                return sig
        return None


def keygen(seed: bytes, bit_length: int = 2048) -> SigningKey:
    """Deterministic RSA key from a seed; e is fixed at 65537."""
    if bit_length not in SUPPORTED_BITS:
        raise InvalidParameter(f"unsupported bit length {bit_length}")
    half = bit_length // 2
    p = find_rsa_prime(seed, b"sig-p", half, PUBLIC_EXPONENT)
    q = find_rsa_prime(seed, b"sig-q", half, PUBLIC_EXPONENT)
    if p == q:  # pragma: no cover - distinct labels
        raise InvalidParameter("seed produced identical factors")
    phi = (p - 1) * (q - 1)
    d = pow(PUBLIC_EXPONENT, -1, phi)
    return SigningKey(p * q, PUBLIC_EXPONENT, d)


def serialize_verify_key(key: VerifyKey | SigningKey) -> bytes:
    width = (key.modulus.bit_length() + 7) // 8
    e_bytes = key.public_exponent.to_bytes(
        (key.public_exponent.bit_length() + 7) // 8, "big"
    )
    return (
        KEY_MAGIC
        + bytes([_PUBLIC_KIND])
        + be32(key.modulus.bit_length())
        + lp(int_to_fixed(key.modulus, width))
        + lp(e_bytes)
    )


def serialize_signing_key(key: SigningKey) -> bytes:
    width = key.width
    e_bytes = key.public_exponent.to_bytes(
        (key.public_exponent.bit_length() + 7) // 8, "big"
    )
    return (
        KEY_MAGIC
        + bytes([_PRIVATE_KIND])
        + be32(key.modulus.bit_length())
        + lp(int_to_fixed(key.modulus, width))
        + lp(e_bytes)
        + lp(int_to_fixed(key.private_exponent, width))
    )


def load_key(data: bytes) -> SigningKey | VerifyKey:
    if data[:4] != KEY_MAGIC:
        raise Malformed("not a signing key file")
    reader = Reader(data[4:], "signing key")
    kind = reader.byte()
    bit_length = reader.u32()
    modulus = int_from_bytes(reader.lp())
    exponent = int_from_bytes(reader.lp())
    if modulus.bit_length() != bit_length:
        raise Malformed("key bit length does not match modulus")
    try:
        if kind == _PUBLIC_KIND:
            reader.expect_end()
            return VerifyKey(modulus, exponent)
        if kind == _PRIVATE_KIND:
            private = int_from_bytes(reader.lp())
            reader.expect_end()
            return SigningKey(modulus, exponent, private)
    except InvalidParameter as exc:
        raise Malformed(str(exc)) from exc
    raise Malformed(f"unknown key kind {kind}")


def key_digest(key: VerifyKey | SigningKey) -> bytes:
    """Digest of the public key serialization; identical for a signing key
    and its public half."""
    return sha256(serialize_verify_key(key))


def fdh(digest: bytes, modulus: int) -> int:
    """Full-domain hash: expand a digest to the modulus width.

    Counter-mode SHA-256 over (0x05 ‖ digest ‖ counter), truncated to the
    modulus byte width with the top byte masked so the result is strictly
    below 2^(bits(Ns)-1) <= Ns, then clamped to be at least 2.
    """
    bits = modulus.bit_length()
    width = (bits + 7) // 8
    out = bytearray()
    counter = 0
    while len(out) < width:
        out += sha256(FDH_TAG, digest, be64(counter))
        counter += 1
    buf = bytearray(out[:width])
    excess = 8 * width - (bits - 1)
    buf[0] &= (0xFF >> excess) if excess < 8 else 0
    value = int_from_bytes(bytes(buf))
    return value if value >= 2 else 2


def sign_digest(key: SigningKey, digest: bytes, fdh_fn: FdhFn = fdh) -> int:
    """Deterministic signature over one digest: fdh(d)^d_priv mod Ns."""
    instrumentation.record("sig.sign")
    return pow(fdh_fn(digest, key.modulus), key.private_exponent, key.modulus)


def attest(
    key: SigningKey, members: ComponentSet, fdh_fn: FdhFn = fdh
) -> AggregateAttestation:
    """Sign every member and aggregate the signatures multiplicatively."""
    sigs = tuple((digest, sign_digest(key, digest, fdh_fn)) for digest in members)
    aggregate = 1
    for _, sig in sigs:
        aggregate = (aggregate * sig) % key.modulus
    return AggregateAttestation(key_digest(key), aggregate, sigs, members, key.width)


def verify(
    proof: AggregateAttestation,
    key: VerifyKey,
    members: ComponentSet,
    fdh_fn: FdhFn = fdh,
) -> bool:
    """Check set equality, every individual signature, and the aggregate."""
    if proof.key_digest != key_digest(key):
        return False
    if proof.members != members:
        return False
    if tuple(d for d, _ in proof.member_sigs) != proof.members.digests:
        return False
    modulus, exponent = key.modulus, key.public_exponent
    product = 1
    hash_product = 1
    for digest, sig in proof.member_sigs:
        expected = fdh_fn(digest, modulus)
        if pow(sig, exponent, modulus) != expected:
            return False
        product = (product * sig) % modulus
        hash_product = (hash_product * expected) % modulus
    if proof.aggregate != product:
        return False
    return pow(proof.aggregate, exponent, modulus) == hash_product


def _check_consistent(proof: AggregateAttestation, key: VerifyKey | SigningKey) -> None:
    if proof.key_digest != key_digest(key):
        raise DomainMismatch("proof was issued under a different signing key")
    if tuple(d for d, _ in proof.member_sigs) != proof.members.digests:
        raise CorruptProof("member signature list does not match the member set")
    product = 1
    for _, sig in proof.member_sigs:
        if not 1 <= sig < key.modulus:
            raise CorruptProof("member signature out of range")
        product = (product * sig) % key.modulus
    if proof.aggregate != product:
        raise CorruptProof("aggregate does not equal the product of member signatures")


def compose(
    first: AggregateAttestation,
    second: AggregateAttestation,
    key: VerifyKey | SigningKey,
) -> AggregateAttestation:
    """Union the member signatures (deduplicating overlaps) and re-multiply.

    Requires both proofs under the same key; needs no private material.
    """
    _check_consistent(first, key)
    _check_consistent(second, key)
    merged: dict[bytes, int] = dict(first.member_sigs)
    for digest, sig in second.member_sigs:
        if digest in merged and merged[digest] != sig:
            raise CorruptProof("conflicting signatures for one member digest")
        merged[digest] = sig
    sigs = tuple(sorted(merged.items()))
    aggregate = 1
    for _, sig in sigs:
        aggregate = (aggregate * sig) % key.modulus
    return AggregateAttestation(
        first.key_digest,
        aggregate,
        sigs,
        first.members.union(second.members),
        first.width,
    )


def include(
    proof: AggregateAttestation,
    key: SigningKey,
    component: Component,
    fdh_fn: FdhFn = fdh,
) -> AggregateAttestation:
    """Sign exactly one new component and fold it into the aggregate."""
    return include_digest(proof, key, digest_component(component), fdh_fn, component.id)


def include_digest(
    proof: AggregateAttestation,
    key: SigningKey,
    digest: bytes,
    fdh_fn: FdhFn = fdh,
    component_id: str | None = None,
) -> AggregateAttestation:
    _check_consistent(proof, key)
    if digest in proof.members:
        return proof
    sig = sign_digest(key, digest, fdh_fn)
    sigs = tuple(sorted(proof.member_sigs + ((digest, sig),)))
    aggregate = (proof.aggregate * sig) % key.modulus
    return AggregateAttestation(
        proof.key_digest,
        aggregate,
        sigs,
        proof.members.with_digest(digest, component_id),
        proof.width,
    )


def encode_body(proof: AggregateAttestation) -> bytes:
    out = bytearray(proof.key_digest)
    out += lp(int_to_fixed(proof.aggregate, proof.width))
    out += be64(len(proof.member_sigs))
    for digest, sig in proof.member_sigs:
        out += digest
        out += lp(int_to_fixed(sig, proof.width))
    return bytes(out)


def decode_body(reader: Reader) -> AggregateAttestation:
    digest = reader.take(DIGEST_SIZE)
    aggregate_bytes = reader.lp()
    if not aggregate_bytes:
        raise Malformed("empty aggregate value")
    width = len(aggregate_bytes)
    count = reader.u64()
    sigs = []
    previous = None
    for _ in range(count):
        member = reader.take(DIGEST_SIZE)
        if previous is not None and member <= previous:
            raise Malformed("aggregate members not in canonical order")
        sig_bytes = reader.lp()
        if len(sig_bytes) != width:
            raise Malformed("member signature width differs from aggregate width")
        sigs.append((member, int_from_bytes(sig_bytes)))
        previous = member
    members = ComponentSet(tuple(m for m, _ in sigs))
    return AggregateAttestation(
        digest, int_from_bytes(aggregate_bytes), tuple(sigs), members, width
    )
