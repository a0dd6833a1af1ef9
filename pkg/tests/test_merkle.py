"""Sorted Merkle tree: construction, verification, composition, paths."""

from __future__ import annotations

import math
import random
from itertools import combinations

import pytest

from catt import merkle
from catt.envelope import serialize_proof
from catt.errors import CorruptProof, NotAMember
from catt.hashing import Component, build_component_set, digest_component, sha256
from tests.helpers import make_components, random_set, shuffled
from tests.reference import merkle_root_ref, sha256_ref


class TestAttest:
    def test_empty_set_has_fixed_root(self):
        proof = merkle.attest(build_component_set([]))
        assert proof.root == sha256(b"\x04", b"EMPTY")
        assert proof.root == sha256_ref(b"\x04EMPTY")

    def test_single_leaf_root_is_leaf_hash(self):
        c = Component("only", b"payload")
        d = digest_component(c)
        proof = merkle.attest(build_component_set([c]))
        assert proof.root == sha256(b"\x00", d)

    def test_two_leaf_root_hand_composed(self):
        # Hand-composed with the independent hash implementation: the two
        # tagged leaf hashes are paired in ascending order.
        cs = build_component_set([Component("a", b"1"), Component("b", b"2")])
        l1, l2 = sorted(sha256_ref(b"\x00" + d) for d in cs.digests)
        assert merkle.attest(cs).root == sha256_ref(b"\x01" + l1 + l2)

    def test_matches_naive_reference_for_all_subsets(self):
        rng = random.Random(42)
        universe = make_components(rng, 8)
        digests = [digest_component(c) for c in universe]
        for size in range(9):
            for chosen in combinations(range(8), size):
                cs = build_component_set([universe[i] for i in chosen])
                assert merkle.attest(cs).root == merkle_root_ref([digests[i] for i in chosen])

    def test_order_independence(self):
        rng = random.Random(1)
        for _ in range(25):
            components = make_components(rng, rng.randint(1, 64))
            baseline = serialize_proof(merkle.attest(build_component_set(components)))
            for _ in range(8):
                permuted = merkle.attest(build_component_set(shuffled(rng, components)))
                assert serialize_proof(permuted) == baseline


class TestVerify:
    def test_self_verification(self):
        rng = random.Random(2)
        cs = random_set(rng, 9)
        assert merkle.verify(merkle.attest(cs), cs)

    def test_extra_component_rejected(self):
        rng = random.Random(3)
        components = make_components(rng, 5)
        proof = merkle.attest(build_component_set(components))
        extended = build_component_set(components + [Component("extra", b"!")])
        assert not merkle.verify(proof, extended)

    def test_every_root_bit_flip_fails(self):
        rng = random.Random(4)
        cs = random_set(rng, 4)
        proof = merkle.attest(cs)
        for bit in range(256):
            flipped = bytearray(proof.root)
            flipped[bit // 8] ^= 1 << (bit % 8)
            assert not merkle.verify(merkle.MerkleAttestation(cs, bytes(flipped)), cs)


class TestCompose:
    def test_identity_element(self):
        rng = random.Random(5)
        proof = merkle.attest(random_set(rng, 7))
        empty = merkle.attest(build_component_set([]))
        assert merkle.compose(proof, empty) == proof
        assert merkle.compose(empty, proof) == proof

    def test_monoid_laws(self):
        rng = random.Random(6)
        for _ in range(100):
            a = merkle.attest(random_set(rng, rng.randint(0, 10), "a"))
            b = merkle.attest(random_set(rng, rng.randint(0, 10), "b"))
            c = merkle.attest(random_set(rng, rng.randint(0, 10), "c"))
            ab = merkle.compose(a, b)
            ba = merkle.compose(b, a)
            assert serialize_proof(ab) == serialize_proof(ba)
            left = merkle.compose(merkle.compose(a, b), c)
            right = merkle.compose(a, merkle.compose(b, c))
            assert serialize_proof(left) == serialize_proof(right)

    def test_union_oracle_with_overlap(self):
        rng = random.Random(7)
        for _ in range(30):
            pool = make_components(rng, 14)
            s1 = rng.sample(pool, rng.randint(1, 10))
            s2 = rng.sample(pool, rng.randint(1, 10))
            composed = merkle.compose(
                merkle.attest(build_component_set(s1)), merkle.attest(build_component_set(s2))
            )
            direct = merkle.attest(build_component_set(s1 + s2))
            assert serialize_proof(composed) == serialize_proof(direct)

    def test_corrupt_input_rejected(self):
        rng = random.Random(8)
        cs = random_set(rng, 4)
        bogus = merkle.MerkleAttestation(cs, b"\x00" * 32)
        with pytest.raises(CorruptProof):
            merkle.compose(bogus, merkle.attest(cs))


class TestInclude:
    def test_equals_fresh_attestation(self):
        rng = random.Random(9)
        for _ in range(25):
            components = make_components(rng, rng.randint(0, 12))
            new = Component("new", rng.randbytes(8))
            included = merkle.include(merkle.attest(build_component_set(components)), new)
            direct = merkle.attest(build_component_set(components + [new]))
            assert serialize_proof(included) == serialize_proof(direct)

    def test_idempotent_for_existing_member(self):
        rng = random.Random(10)
        components = make_components(rng, 6)
        proof = merkle.attest(build_component_set(components))
        again = merkle.include(proof, components[3])
        assert serialize_proof(again) == serialize_proof(proof)

    def test_include_into_empty(self):
        c = Component("seed", b"s")
        proof = merkle.include(merkle.attest(build_component_set([])), c)
        assert proof.root == sha256(b"\x00", digest_component(c))


class TestInclusionPaths:
    def test_single_leaf_has_empty_path(self):
        c = Component("one", b"1")
        proof = merkle.attest(build_component_set([c]))
        path = merkle.inclusion_path(proof, digest_component(c))
        assert path.siblings == ()
        assert merkle.verify_inclusion(proof.root, digest_component(c), path)

    def test_two_leaves_single_sibling_opposite_side(self):
        cs = build_component_set([Component("a", b"1"), Component("b", b"2")])
        proof = merkle.attest(cs)
        hashes = sorted((sha256(b"\x00", d), d) for d in cs.digests)
        low, high = hashes[0][1], hashes[1][1]
        low_path = merkle.inclusion_path(proof, low)
        high_path = merkle.inclusion_path(proof, high)
        assert len(low_path.siblings) == len(high_path.siblings) == 1
        assert low_path.siblings[0].side is merkle.Side.RIGHT
        assert high_path.siblings[0].side is merkle.Side.LEFT
        assert merkle.verify_inclusion(proof.root, low, low_path)
        assert merkle.verify_inclusion(proof.root, high, high_path)

    def test_exhaustive_small_trees(self):
        rng = random.Random(11)
        for n in range(3, 65):
            cs = random_set(rng, n, f"n{n}-")
            proof = merkle.attest(cs)
            for digest in cs:
                path = merkle.inclusion_path(proof, digest)
                assert merkle.verify_inclusion(proof.root, digest, path)
            outsider = digest_component(Component(f"outsider{n}", b"?"))
            with pytest.raises(NotAMember):
                merkle.inclusion_path(proof, outsider)

    def test_path_for_wrong_member_fails(self):
        rng = random.Random(12)
        cs = random_set(rng, 8)
        proof = merkle.attest(cs)
        paths = {d: merkle.inclusion_path(proof, d) for d in cs}
        for owner in cs:
            for other in cs:
                if owner != other:
                    assert not merkle.verify_inclusion(proof.root, other, paths[owner])

    def test_side_flip_fails_except_self_pairs(self):
        rng = random.Random(13)
        cs = random_set(rng, 3)
        proof = merkle.attest(cs)
        for digest in cs:
            path = merkle.inclusion_path(proof, digest)
            for level, step in enumerate(path.siblings):
                flipped_side = merkle.Side.LEFT if step.side is merkle.Side.RIGHT else merkle.Side.RIGHT
                steps = list(path.siblings)
                steps[level] = merkle.PathStep(step.digest, flipped_side)
                tampered = merkle.MerkleInclusionPath(path.leaf_index, tuple(steps))
                # A node paired with itself hashes identically on both sides;
                # everywhere else the flip must break replay.
                current = sha256(b"\x00", digest)
                for prior in path.siblings[:level]:
                    if prior.side is merkle.Side.LEFT:
                        current = sha256(b"\x01", prior.digest, current)
                    else:
                        current = sha256(b"\x01", current, prior.digest)
                self_pair = step.digest == current
                result = merkle.verify_inclusion(proof.root, digest, tampered)
                assert result == self_pair

    def test_path_length_bound(self):
        rng = random.Random(14)
        for n in (1, 2, 3, 5, 17, 64, 100, 1000, 4096):
            cs = random_set(rng, n, f"b{n}-")
            proof = merkle.attest(cs)
            bound = math.ceil(math.log2(n)) + 1 if n > 1 else 1
            sample = list(cs)[:: max(1, n // 64)]
            for digest in sample:
                path = merkle.inclusion_path(proof, digest)
                assert len(path.siblings) <= bound
                assert merkle.verify_inclusion(proof.root, digest, path)
