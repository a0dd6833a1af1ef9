"""Canonical proof envelope shared by all schemes.

Layout: 4-byte magic "CATT" ‖ version byte ‖ scheme byte ‖ scheme body.
Serialization is canonical in both directions: deserialize(serialize(p))
reproduces the proof, and serialize(deserialize(b)) reproduces the exact
bytes for every valid b (trailing garbage and non-canonical member order
are rejected).
"""

from __future__ import annotations

from typing import Union

from . import accumulator, aggsig, integrated, merkle
from .encoding import Reader
from .errors import Malformed, NotAProof, UnsupportedVersion

MAGIC = b"CATT"
VERSION = 1

SCHEME_MERKLE = 1
SCHEME_ACCUMULATOR = 2
SCHEME_AGGSIG = 3
SCHEME_INTEGRATED = 4

SCHEME_NAMES = {
    SCHEME_MERKLE: "merkle",
    SCHEME_ACCUMULATOR: "accumulator",
    SCHEME_AGGSIG: "aggsig",
    SCHEME_INTEGRATED: "integrated",
}

Proof = Union[
    merkle.MerkleAttestation,
    accumulator.AccumulatorAttestation,
    aggsig.AggregateAttestation,
    integrated.IntegratedAttestation,
]

_ENCODERS = {
    merkle.MerkleAttestation: (SCHEME_MERKLE, merkle.encode_body),
    accumulator.AccumulatorAttestation: (SCHEME_ACCUMULATOR, accumulator.encode_body),
    aggsig.AggregateAttestation: (SCHEME_AGGSIG, aggsig.encode_body),
    integrated.IntegratedAttestation: (SCHEME_INTEGRATED, integrated.encode_body),
}

_DECODERS = {
    SCHEME_MERKLE: merkle.decode_body,
    SCHEME_ACCUMULATOR: accumulator.decode_body,
    SCHEME_AGGSIG: aggsig.decode_body,
    SCHEME_INTEGRATED: integrated.decode_body,
}


def scheme_of(proof: Proof) -> int:
    for cls, (scheme, _) in _ENCODERS.items():
        if isinstance(proof, cls):
            return scheme
    raise TypeError(f"not a proof object: {type(proof).__name__}")


def serialize_proof(proof: Proof) -> bytes:
    try:
        scheme, encode = _ENCODERS[type(proof)]
    except KeyError:
        raise TypeError(f"not a proof object: {type(proof).__name__}") from None
    return MAGIC + bytes([VERSION, scheme]) + encode(proof)


def deserialize_proof(data: bytes) -> Proof:
    if data[:4] != MAGIC:
        raise NotAProof("missing proof envelope magic")
    if len(data) < 6:
        raise Malformed("truncated proof envelope header")
    version, scheme = data[4], data[5]
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported envelope version {version}")
    decode = _DECODERS.get(scheme)
    if decode is None:
        raise Malformed(f"unknown proof scheme {scheme}")
    reader = Reader(data[6:], "proof body")
    proof = decode(reader)
    reader.expect_end()
    return proof
