"""Canonical envelope: round trips, byte canonicity, rejection of junk."""

from __future__ import annotations

import random

import pytest

from catt import accumulator, aggsig, integrated, merkle
from catt.envelope import deserialize_proof, serialize_proof
from catt.errors import Malformed, NotAProof, UnsupportedVersion
from tests.helpers import make_components, random_set


def _sample_proofs(rng, acc_params, signing_key, count_per_scheme):
    proofs = []
    for i in range(count_per_scheme):
        cs = random_set(rng, rng.randint(0, 8), f"e{i}-")
        proofs.append(merkle.attest(cs))
        proofs.append(accumulator.attest(acc_params, cs))
        proofs.append(aggsig.attest(signing_key, cs))
        proofs.append(integrated.attest(cs, acc_params, signing_key))
    return proofs


class TestRoundTrip:
    def test_structural_round_trip_all_schemes(self, acc_params, signing_key):
        rng = random.Random(60)
        for proof in _sample_proofs(rng, acc_params, signing_key, 5):
            blob = serialize_proof(proof)
            recovered = deserialize_proof(blob)
            assert recovered == proof
            assert serialize_proof(recovered) == blob

    def test_canonical_encoding_property(self, acc_params, signing_key):
        # serialize . deserialize . serialize == serialize, byte for byte.
        rng = random.Random(61)
        checked = 0
        for proof in _sample_proofs(rng, acc_params, signing_key, 250):
            blob = serialize_proof(proof)
            assert serialize_proof(deserialize_proof(blob)) == blob
            checked += 1
        assert checked == 1000

    def test_same_logical_proof_serializes_identically(self, acc_params, signing_key):
        rng1, rng2 = random.Random(62), random.Random(62)
        from catt.hashing import build_component_set

        first = build_component_set(make_components(rng1, 6))
        second = build_component_set(make_components(rng2, 6))
        assert serialize_proof(merkle.attest(first)) == serialize_proof(merkle.attest(second))
        assert serialize_proof(integrated.attest(first, acc_params, signing_key)) == \
            serialize_proof(integrated.attest(second, acc_params, signing_key))


class TestRejection:
    def test_bad_magic(self):
        rng = random.Random(63)
        blob = serialize_proof(merkle.attest(random_set(rng, 2)))
        with pytest.raises(NotAProof):
            deserialize_proof(b"XXXX" + blob[4:])
        with pytest.raises(NotAProof):
            deserialize_proof(b"")

    def test_unknown_version(self):
        rng = random.Random(64)
        blob = bytearray(serialize_proof(merkle.attest(random_set(rng, 2))))
        blob[4] = 2
        with pytest.raises(UnsupportedVersion):
            deserialize_proof(bytes(blob))

    def test_unknown_scheme(self):
        rng = random.Random(65)
        blob = bytearray(serialize_proof(merkle.attest(random_set(rng, 2))))
        blob[5] = 9
        with pytest.raises(Malformed):
            deserialize_proof(bytes(blob))

    def test_every_truncation_rejected(self, acc_params, signing_key):
        rng = random.Random(66)
        cs = random_set(rng, 3)
        for proof in (
            merkle.attest(cs),
            accumulator.attest(acc_params, cs),
            aggsig.attest(signing_key, cs),
            integrated.attest(cs, acc_params, signing_key),
        ):
            blob = serialize_proof(proof)
            for cut in range(len(blob)):
                with pytest.raises((NotAProof, Malformed)):
                    deserialize_proof(blob[:cut])

    def test_trailing_garbage_rejected(self):
        rng = random.Random(67)
        blob = serialize_proof(merkle.attest(random_set(rng, 2)))
        with pytest.raises(Malformed):
            deserialize_proof(blob + b"\x00")

    def test_non_canonical_member_order_rejected(self):
        rng = random.Random(68)
        cs = random_set(rng, 2)
        blob = bytearray(serialize_proof(merkle.attest(cs)))
        # Swap the two sorted leaf digests in place.
        start = 6 + 8
        first = bytes(blob[start : start + 32])
        second = bytes(blob[start + 32 : start + 64])
        blob[start : start + 32] = second
        blob[start + 32 : start + 64] = first
        with pytest.raises(Malformed):
            deserialize_proof(bytes(blob))
