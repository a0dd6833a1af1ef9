"""Deterministic primality and prime derivation against an independent oracle."""

from __future__ import annotations

import random

import sympy

from catt.hashing import Component, digest_component
from catt.primes import (
    draw_integer,
    find_rsa_prime,
    find_safe_prime,
    hash_to_prime,
    is_probable_prime,
)


def test_is_probable_prime_agrees_with_oracle_small_range():
    for n in range(2000):
        assert is_probable_prime(n) == sympy.isprime(n), n


def test_is_probable_prime_agrees_with_oracle_random_64bit():
    rng = random.Random(100)
    for _ in range(200):
        n = rng.getrandbits(64) | 1
        assert is_probable_prime(n) == sympy.isprime(n), n


def test_hash_to_prime_deterministic():
    d = digest_component(Component("x", b"payload"))
    assert hash_to_prime(d) == hash_to_prime(d)


def test_hash_to_prime_shape():
    rng = random.Random(101)
    for i in range(50):
        p = hash_to_prime(digest_component(Component(f"s{i}", rng.randbytes(4))))
        assert p.bit_length() == 128
        assert p % 2 == 1


def test_hash_to_prime_passes_independent_primality_check():
    rng = random.Random(102)
    for i in range(25):
        p = hash_to_prime(digest_component(Component(f"p{i}", rng.randbytes(4))))
        assert sympy.isprime(p)


def test_hash_to_prime_distinct_for_distinct_digests():
    rng = random.Random(103)
    primes = {
        hash_to_prime(digest_component(Component(f"d{i}", rng.randbytes(8))))
        for i in range(300)
    }
    assert len(primes) == 300


def test_draw_integer_width_and_determinism():
    v1 = draw_integer(b"seed", b"label", 255)
    v2 = draw_integer(b"seed", b"label", 255)
    assert v1 == v2
    assert v1.bit_length() <= 255
    assert draw_integer(b"seed", b"other", 255) != v1


def test_safe_prime_structure():
    p = find_safe_prime(b"prime-test", b"sp", 256)
    assert p.bit_length() == 256
    assert sympy.isprime(p)
    assert sympy.isprime((p - 1) // 2)
    assert find_safe_prime(b"prime-test", b"sp", 256) == p


def test_rsa_prime_structure():
    p = find_rsa_prime(b"prime-test", b"rp", 256, 65537)
    assert p.bit_length() == 256
    assert sympy.isprime(p)
    assert p % 65537 != 1
    assert find_rsa_prime(b"prime-test", b"rp", 256, 65537) == p


def test_different_labels_give_different_primes():
    a = find_safe_prime(b"prime-test", b"one", 256)
    b = find_safe_prime(b"prime-test", b"two", 256)
    assert a != b
