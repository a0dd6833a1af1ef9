"""Independent reference implementations used as test oracles.

Nothing here imports from the package under test: the SHA-256 below is a
from-scratch FIPS 180-4 implementation (validated against the published
example digests), and the tree/accumulator references recompute results via
different code paths than the production modules.
"""

from __future__ import annotations

import math

_K = [
    0x428A2F98, 0x71374491, 0xB5C0FBCF, 0xE9B5DBA5, 0x3956C25B, 0x59F111F1, 0x923F82A4, 0xAB1C5ED5,
    0xD807AA98, 0x12835B01, 0x243185BE, 0x550C7DC3, 0x72BE5D74, 0x80DEB1FE, 0x9BDC06A7, 0xC19BF174,
    0xE49B69C1, 0xEFBE4786, 0x0FC19DC6, 0x240CA1CC, 0x2DE92C6F, 0x4A7484AA, 0x5CB0A9DC, 0x76F988DA,
    0x983E5152, 0xA831C66D, 0xB00327C8, 0xBF597FC7, 0xC6E00BF3, 0xD5A79147, 0x06CA6351, 0x14292967,
    0x27B70A85, 0x2E1B2138, 0x4D2C6DFC, 0x53380D13, 0x650A7354, 0x766A0ABB, 0x81C2C92E, 0x92722C85,
    0xA2BFE8A1, 0xA81A664B, 0xC24B8B70, 0xC76C51A3, 0xD192E819, 0xD6990624, 0xF40E3585, 0x106AA070,
    0x19A4C116, 0x1E376C08, 0x2748774C, 0x34B0BCB5, 0x391C0CB3, 0x4ED8AA4A, 0x5B9CCA4F, 0x682E6FF3,
    0x748F82EE, 0x78A5636F, 0x84C87814, 0x8CC70208, 0x90BEFFFA, 0xA4506CEB, 0xBEF9A3F7, 0xC67178F2,
]

_H0 = [0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A,
       0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19]

_MASK = 0xFFFFFFFF


def _rotr(x: int, n: int) -> int:
    return ((x >> n) | (x << (32 - n))) & _MASK


def sha256_ref(message: bytes) -> bytes:
    """From-scratch SHA-256, the independent hash oracle for the suite."""
    length = len(message) * 8
    message = message + b"\x80"
    while (len(message) * 8) % 512 != 448:
        message += b"\x00"
    message += length.to_bytes(8, "big")

    h = list(_H0)
    for offset in range(0, len(message), 64):
        block = message[offset : offset + 64]
        w = [int.from_bytes(block[i : i + 4], "big") for i in range(0, 64, 4)]
        for t in range(16, 64):
            s0 = _rotr(w[t - 15], 7) ^ _rotr(w[t - 15], 18) ^ (w[t - 15] >> 3)
            s1 = _rotr(w[t - 2], 17) ^ _rotr(w[t - 2], 19) ^ (w[t - 2] >> 10)
            w.append((w[t - 16] + s0 + w[t - 7] + s1) & _MASK)
        a, b, c, d, e, f, g, hh = h
        for t in range(64):
            big_s1 = _rotr(e, 6) ^ _rotr(e, 11) ^ _rotr(e, 25)
            ch = (e & f) ^ (~e & g)
            temp1 = (hh + big_s1 + ch + _K[t] + w[t]) & _MASK
            big_s0 = _rotr(a, 2) ^ _rotr(a, 13) ^ _rotr(a, 22)
            maj = (a & b) ^ (a & c) ^ (b & c)
            temp2 = (big_s0 + maj) & _MASK
            hh, g, f, e, d, c, b, a = (
                g, f, e, (d + temp1) & _MASK, c, b, a, (temp1 + temp2) & _MASK,
            )
        h = [(x + y) & _MASK for x, y in zip(h, (a, b, c, d, e, f, g, hh))]
    return b"".join(x.to_bytes(4, "big") for x in h)


def component_digest_ref(component_id: str, payload: bytes) -> bytes:
    """Recreate the component binding digest from first principles."""
    raw = component_id.encode("utf-8")
    return sha256_ref(b"\x02" + len(raw).to_bytes(8, "big") + raw + payload)


def merkle_root_ref(digests: list[bytes]) -> bytes:
    """Naive recursive tree reference: sort tagged leaf hashes, then reduce
    level by level, duplicating an odd trailing node."""
    if not digests:
        return sha256_ref(b"\x04EMPTY")
    level = sorted(sha256_ref(b"\x00" + d) for d in digests)

    def reduce(nodes: list[bytes]) -> bytes:
        if len(nodes) == 1:
            return nodes[0]
        paired = []
        for i in range(0, len(nodes), 2):
            left = nodes[i]
            right = nodes[i + 1] if i + 1 < len(nodes) else left
            paired.append(sha256_ref(b"\x01" + left + right))
        return reduce(paired)

    return reduce(level)


def accumulate_ref(generator: int, modulus: int, primes: list[int]) -> int:
    """Single-exponentiation accumulator reference: one pow with the full
    product exponent instead of the production per-member fold."""
    return pow(generator, math.prod(primes), modulus)
