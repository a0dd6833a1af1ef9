"""RSA-style accumulator attestation with constant-size core value.

The accumulated value is g^(∏ prime(d) for d in members) mod N, where
prime(d) maps a component digest to a 128-bit probable prime (so member
exponents are pairwise coprime) and N is the product of two safe primes
derived deterministically from a setup seed. The value is constant-size
regardless of how many members it represents; the proof object additionally
carries the member digest set so composition and verification need no
external state.

Trusted setup caveat: whoever knows the factorisation of N can forge
membership witnesses. Parameters must be generated once per trust domain
and the factors discarded.

Composition and inclusion only ever exponentiate the existing value; they
never restart from the generator. Witness generation recomputes the
residual product from g and is O(n) by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import instrumentation
from .encoding import Reader, be32, be64, int_from_bytes, int_to_fixed, lp
from .errors import (
    CorruptProof,
    DomainMismatch,
    InvalidParameter,
    Malformed,
    NotAMember,
)
from .hashing import DIGEST_SIZE, Component, ComponentSet, digest_component, sha256
from .primes import draw_integer, find_safe_prime, hash_to_prime

__all__ = [
    "SUPPORTED_BITS",
    "PARAMS_MAGIC",
    "AccumulatorParams",
    "AccumulatorAttestation",
    "MembershipWitness",
    "setup",
    "hash_to_prime",
    "attest",
    "verify",
    "compose",
    "include",
    "include_digest",
    "witness",
    "verify_inclusion",
    "serialize_params",
    "deserialize_params",
    "params_digest",
]

SUPPORTED_BITS = (512, 1024, 2048)
PARAMS_MAGIC = b"CATP"

PrimeFn = Callable[[bytes], int]


@dataclass(frozen=True)
class AccumulatorParams:
    """Public accumulator domain: modulus, quadratic-residue generator, width."""

    modulus: int
    generator: int
    bit_length: int

    def __post_init__(self) -> None:
        if self.modulus < 4 or self.modulus % 2 == 0:
            raise InvalidParameter("modulus must be an odd integer > 3")
        if not 1 < self.generator < self.modulus:
            raise InvalidParameter("generator must lie in (1, N)")
        if math.gcd(self.generator, self.modulus) != 1:
            raise InvalidParameter("generator must be coprime to the modulus")
        if self.bit_length != self.modulus.bit_length():
            raise InvalidParameter("bit_length must equal the modulus bit length")

    @property
    def value_width(self) -> int:
        return (self.bit_length + 7) // 8


@dataclass(frozen=True)
class AccumulatorAttestation:
    params_digest: bytes
    value: int
    members: ComponentSet
    value_width: int


@dataclass(frozen=True)
class MembershipWitness:
    """Residual accumulator value: raising it to the member's prime
    recovers the full accumulated value."""

    witness: int
    member_digest: bytes
    value_width: int


def setup(seed: bytes, bit_length: int = 2048) -> AccumulatorParams:
    """Deterministic trusted setup from a seed.

    N is the product of two distinct safe primes of bit_length/2 bits each;
    g is the square of a seed-derived residue, hence a quadratic residue
    mod N. The same (seed, bit_length) always yields identical parameters.
    """
    if bit_length not in SUPPORTED_BITS:
        raise InvalidParameter(f"unsupported bit length {bit_length}")
    half = bit_length // 2
    p = find_safe_prime(seed, b"acc-p", half)
    q = find_safe_prime(seed, b"acc-q", half)
    if p == q:  # pragma: no cover - labels differ, collision is astronomically unlikely
        raise InvalidParameter("seed produced identical factors")
    modulus = p * q
    counter = 0
    while True:
        h = draw_integer(seed, b"acc-g", bit_length + 64, counter) % modulus
        generator = pow(h, 2, modulus)
        if generator > 1 and math.gcd(generator, modulus) == 1:
            break
        counter += 1  # pragma: no cover - almost never taken
    return AccumulatorParams(modulus, generator, bit_length)


def serialize_params(params: AccumulatorParams) -> bytes:
    width = params.value_width
    return (
        PARAMS_MAGIC
        + be32(params.bit_length)
        + lp(int_to_fixed(params.modulus, width))
        + lp(int_to_fixed(params.generator, width))
    )


def deserialize_params(data: bytes) -> AccumulatorParams:
    if data[:4] != PARAMS_MAGIC:
        raise Malformed("not an accumulator parameter file")
    reader = Reader(data[4:], "accumulator parameters")
    bit_length = reader.u32()
    modulus = int_from_bytes(reader.lp())
    generator = int_from_bytes(reader.lp())
    reader.expect_end()
    try:
        return AccumulatorParams(modulus, generator, bit_length)
    except InvalidParameter as exc:
        raise Malformed(str(exc)) from exc


def params_digest(params: AccumulatorParams) -> bytes:
    return sha256(serialize_params(params))


def _check_domain(proof: AccumulatorAttestation, params: AccumulatorParams) -> None:
    if proof.params_digest != params_digest(params):
        raise DomainMismatch("proof was issued under different accumulator parameters")
    if not 1 <= proof.value < params.modulus:
        raise CorruptProof("accumulator value out of range")


def attest(
    params: AccumulatorParams,
    members: ComponentSet,
    prime_fn: PrimeFn = hash_to_prime,
) -> AccumulatorAttestation:
    """Accumulate a component set: fold every member prime into g.

    The exponentiation commutes, so any insertion order yields the same
    value; the empty set accumulates to g itself.
    """
    instrumentation.record("acc.base_exp")
    value = params.generator
    for digest in members:
        value = pow(value, prime_fn(digest), params.modulus)
    return AccumulatorAttestation(params_digest(params), value, members, params.value_width)


def verify(
    proof: AccumulatorAttestation,
    params: AccumulatorParams,
    members: ComponentSet,
    prime_fn: PrimeFn = hash_to_prime,
) -> bool:
    """Recompute the accumulated value for `members` and compare."""
    if proof.params_digest != params_digest(params):
        return False
    if proof.members != members:
        return False
    return attest(params, members, prime_fn).value == proof.value


def compose(
    first: AccumulatorAttestation,
    second: AccumulatorAttestation,
    params: AccumulatorParams,
    prime_fn: PrimeFn = hash_to_prime,
) -> AccumulatorAttestation:
    """Accumulate the union by raising the first value to the primes of the
    members only the second proof contributes. Never restarts from g."""
    _check_domain(first, params)
    _check_domain(second, params)
    value = first.value
    for digest in second.members:
        if digest not in first.members:
            instrumentation.record("acc.incremental_exp")
            value = pow(value, prime_fn(digest), params.modulus)
    return AccumulatorAttestation(
        first.params_digest, value, first.members.union(second.members), first.value_width
    )


def include(
    proof: AccumulatorAttestation,
    component: Component,
    params: AccumulatorParams,
    prime_fn: PrimeFn = hash_to_prime,
) -> AccumulatorAttestation:
    """Add one component: exactly one modular exponentiation for a new
    member, no work at all for an existing one."""
    return include_digest(proof, digest_component(component), params, prime_fn, component.id)


def include_digest(
    proof: AccumulatorAttestation,
    digest: bytes,
    params: AccumulatorParams,
    prime_fn: PrimeFn = hash_to_prime,
    component_id: str | None = None,
) -> AccumulatorAttestation:
    _check_domain(proof, params)
    if digest in proof.members:
        return proof
    instrumentation.record("acc.incremental_exp")
    value = pow(proof.value, prime_fn(digest), params.modulus)
    return AccumulatorAttestation(
        proof.params_digest,
        value,
        proof.members.with_digest(digest, component_id),
        proof.value_width,
    )


def witness(
    proof: AccumulatorAttestation,
    params: AccumulatorParams,
    digest: bytes,
    prime_fn: PrimeFn = hash_to_prime,
) -> MembershipWitness:
    """Membership witness: g raised to the product of all member primes
    except the requested one. O(n) recomputation by design."""
    _check_domain(proof, params)
    if digest not in proof.members:
        raise NotAMember("digest is not accumulated in this proof")
    instrumentation.record("acc.base_exp")
    value = params.generator
    for member in proof.members:
        if member != digest:
            value = pow(value, prime_fn(member), params.modulus)
    return MembershipWitness(value, digest, proof.value_width)


def verify_inclusion(
    proof: AccumulatorAttestation,
    wit: MembershipWitness,
    params: AccumulatorParams,
    prime_fn: PrimeFn = hash_to_prime,
) -> bool:
    """True iff witness^prime(member) ≡ accumulated value (mod N)."""
    return pow(wit.witness, prime_fn(wit.member_digest), params.modulus) == proof.value


def encode_body(proof: AccumulatorAttestation) -> bytes:
    out = bytearray(proof.params_digest)
    out += lp(int_to_fixed(proof.value, proof.value_width))
    out += be64(len(proof.members))
    for digest in proof.members:
        out += digest
    return bytes(out)


def decode_body(reader: Reader) -> AccumulatorAttestation:
    digest = reader.take(DIGEST_SIZE)
    value_bytes = reader.lp()
    if not value_bytes:
        raise Malformed("empty accumulator value")
    value = int_from_bytes(value_bytes)
    if value < 1:
        raise Malformed("accumulator value must be positive")
    count = reader.u64()
    members = []
    previous = None
    for _ in range(count):
        member = reader.take(DIGEST_SIZE)
        if previous is not None and member <= previous:
            raise Malformed("accumulator members not in canonical order")
        members.append(member)
        previous = member
    return AccumulatorAttestation(
        digest, value, ComponentSet(tuple(members)), len(value_bytes)
    )
