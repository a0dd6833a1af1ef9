"""Deterministic primality testing and prime derivation.

Nothing in this module consumes system randomness. Candidates come from
SHA-256 counter-mode streams over a caller seed, and Miller-Rabin bases are
derived from the candidate itself, so the same inputs select the same primes
on every machine and in every process. That determinism is what makes
attestation parameters reproducible from a seed.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache

from .encoding import be64
from .hashing import PRIME_TAG, sha256

MILLER_RABIN_ROUNDS = 64

# Trial-division primes: cheap rejection before any modular exponentiation.
_TRIAL_BOUND = 2048
# Sieve bound for the windowed searches used by parameter setup.
_SIEVE_BOUND = 45_000
_WINDOW = 1 << 14


def _simple_sieve(bound: int) -> list[int]:
    flags = bytearray([1]) * bound
    flags[0:2] = b"\x00\x00"
    for n in range(2, int(bound**0.5) + 1):
        if flags[n]:
            flags[n * n :: n] = b"\x00" * len(range(n * n, bound, n))
    return [n for n in range(bound) if flags[n]]


_TRIAL_PRIMES = _simple_sieve(_TRIAL_BOUND)
_sieve_primes_cache: list[int] | None = None


def _sieve_primes() -> list[int]:
    global _sieve_primes_cache
    if _sieve_primes_cache is None:
        _sieve_primes_cache = [p for p in _simple_sieve(_SIEVE_BOUND) if p > 2]
    return _sieve_primes_cache


def _mr_round(n: int, d: int, r: int, base: int) -> bool:
    """One Miller-Rabin round; True means n is still possibly prime."""
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = (x * x) % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Deterministic Miller-Rabin: bases come from a PRG seeded by n itself."""
    if n < 2:
        return False
    for p in _TRIAL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    n_bytes = n.to_bytes((n.bit_length() + 7) // 8, "big")
    for j in range(rounds):
        draw = int.from_bytes(sha256(b"mr-base:", n_bytes, be64(j)), "big")
        base = 2 + draw % (n - 3)
        if not _mr_round(n, d, r, base):
            return False
    return True


@lru_cache(maxsize=1 << 16)
def hash_to_prime(digest: bytes) -> int:
    """Map a 32-byte digest to a 128-bit probable prime, deterministically.

    Candidate k is the top 16 bytes of SHA-256(0x03 ‖ digest ‖ counter) with
    the high and low bits forced to 1; the counter increments until the
    candidate passes 64 Miller-Rabin rounds.
    """
    counter = 0
    while True:
        block = sha256(PRIME_TAG, digest, be64(counter))
        candidate = int.from_bytes(block[:16], "big") | (1 << 127) | 1
        if is_probable_prime(candidate):
            return candidate
        counter += 1


def _stream_bytes(seed: bytes, label: bytes, length: int, counter_start: int = 0) -> bytes:
    """SHA-256 counter-mode expansion of (label, seed). Labels contain no colon."""
    out = bytearray()
    counter = counter_start
    while len(out) < length:
        out += hashlib.sha256(label + b":" + seed + be64(counter)).digest()
        counter += 1
    return bytes(out[:length])


def draw_integer(seed: bytes, label: bytes, bits: int, counter_start: int = 0) -> int:
    """Draw a `bits`-wide integer from the seeded stream (top bits trimmed)."""
    nbytes = (bits + 7) // 8
    value = int.from_bytes(_stream_bytes(seed, label, nbytes, counter_start), "big")
    return value >> (8 * nbytes - bits)


def _force_prime_shape(value: int, bits: int) -> int:
    # Top two bits guarantee the product of two such primes keeps full width;
    # the low bit keeps the candidate odd.
    return value | (1 << (bits - 1)) | (1 << (bits - 2)) | 1


def _sieve_window(start: int, step_targets: list[tuple[int, int]]) -> bytearray:
    """Mark window offsets i where any target (mult, add) makes
    mult*(start + 2i) + add divisible by a sieve prime."""
    flags = bytearray(_WINDOW)
    for r in _sieve_primes():
        inv2 = (r + 1) // 2  # inverse of 2 mod odd r
        for mult, add in step_targets:
            # Solve mult*(start + 2i) + add ≡ 0 (mod r) for i.
            coeff = (mult * 2) % r
            if coeff == 0:
                continue
            rhs = (-(mult * start + add)) % r
            inv_coeff = pow(coeff, -1, r)
            first = (rhs * inv_coeff) % r
            if first < _WINDOW:
                count = (_WINDOW - first + r - 1) // r
                flags[first::r] = b"\x01" * count
    return flags


def find_safe_prime(seed: bytes, label: bytes, bits: int) -> int:
    """Deterministically find p = 2q + 1 with p and q both probable primes.

    p has exactly `bits` bits with the top two bits set. The search walks odd
    q candidates from a seeded starting point, sieving q and 2q+1 together.
    """
    q_bits = bits - 1
    q = _force_prime_shape(draw_integer(seed, label, q_bits), q_bits)
    while True:
        flags = _sieve_window(q, [(1, 0), (2, 1)])
        for i in range(_WINDOW):
            if flags[i]:
                continue
            cand = q + 2 * i
            if cand.bit_length() != q_bits:
                break
            p = 2 * cand + 1
            if not is_probable_prime(cand, rounds=2):
                continue
            if not is_probable_prime(p, rounds=2):
                continue
            if is_probable_prime(cand) and is_probable_prime(p):
                return p
        q += 2 * _WINDOW
        if q.bit_length() != q_bits:
            # Wrapped past the top of the range; restart from a fresh draw.
            q = _force_prime_shape(draw_integer(seed, label + b"+", q_bits), q_bits)


def find_rsa_prime(seed: bytes, label: bytes, bits: int, public_exponent: int) -> int:
    """Deterministically find a prime p with gcd(public_exponent, p-1) = 1.

    public_exponent must itself be prime (65537 in production, 3 in toy
    fixtures), so the gcd condition reduces to p mod e != 1.
    """
    p = _force_prime_shape(draw_integer(seed, label, bits), bits)
    while True:
        flags = _sieve_window(p, [(1, 0)])
        for i in range(_WINDOW):
            if flags[i]:
                continue
            cand = p + 2 * i
            if cand.bit_length() != bits:
                break
            if cand % public_exponent == 1:
                continue
            if not is_probable_prime(cand, rounds=2):
                continue
            if is_probable_prime(cand):
                return cand
        p += 2 * _WINDOW
        if p.bit_length() != bits:
            p = _force_prime_shape(draw_integer(seed, label + b"+", bits), bits)
