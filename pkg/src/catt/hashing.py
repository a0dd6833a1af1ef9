"""Canonical hashing, component identity, and canonical component sets.

Every digest in the library is SHA-256 over a domain-tagged preimage. The
single leading tag byte states the role of the hash, so a value computed for
one role (say, a tree leaf) can never be replayed in another (a tree node or
a component binding). Component digests additionally length-prefix the id,
which makes the (id, payload) encoding injective: ("a", b"x") and ("ax", b"")
hash differently.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from . import instrumentation
from .errors import InvalidComponent, Malformed

__all__ = [
    "DIGEST_SIZE",
    "LEAF_TAG",
    "NODE_TAG",
    "COMPONENT_TAG",
    "PRIME_TAG",
    "EMPTY_TAG",
    "FDH_TAG",
    "sha256",
    "Component",
    "ComponentSet",
    "digest_component",
    "build_component_set",
]

DIGEST_SIZE = 32

# Domain-separation tags. Exactly one tag prefixes every hash computation.
LEAF_TAG = b"\x00"
NODE_TAG = b"\x01"
COMPONENT_TAG = b"\x02"
PRIME_TAG = b"\x03"
EMPTY_TAG = b"\x04"
FDH_TAG = b"\x05"


def sha256(*chunks: bytes) -> bytes:
    h = hashlib.sha256()
    for chunk in chunks:
        h.update(chunk)
    return h.digest()


@dataclass(frozen=True)
class Component:
    """A named unit of attestable content: a logical id plus raw payload bytes.

    The id is a non-empty UTF-8 string without NUL bytes (a file path, a
    model name, ...). The payload may be empty.
    """

    id: str
    payload: bytes = b""

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise InvalidComponent("component id must be a non-empty string")
        if "\x00" in self.id:
            raise InvalidComponent("component id must not contain NUL bytes")
        if isinstance(self.payload, bytearray):
            object.__setattr__(self, "payload", bytes(self.payload))
        elif not isinstance(self.payload, bytes):
            raise InvalidComponent("component payload must be bytes")


def digest_component(component: Component) -> bytes:
    """Binding digest of a component.

    Computed as SHA-256(0x02 ‖ len(id) as 8-byte big-endian ‖ id ‖ payload).
    Two components compare equal exactly when their digests are equal.
    """
    instrumentation.record("core.digest_component")
    raw_id = component.id.encode("utf-8")
    return sha256(COMPONENT_TAG, len(raw_id).to_bytes(8, "big"), raw_id, component.payload)


@dataclass(frozen=True)
class ComponentSet:
    """Deduplicated component digests in canonical (byte-ascending) order.

    ``ids`` is display metadata mapping a digest back to the component id
    that produced it; it never participates in equality, hashing, or
    serialization.
    """

    digests: tuple[bytes, ...]
    ids: Mapping[bytes, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        previous = None
        for digest in self.digests:
            if not isinstance(digest, bytes) or len(digest) != DIGEST_SIZE:
                raise Malformed("component digests must be 32 bytes")
            if previous is not None and digest <= previous:
                raise Malformed("component digests must be strictly ascending")
            previous = digest
        object.__setattr__(self, "_digest_set", frozenset(self.digests))

    @classmethod
    def from_components(cls, components: Iterable[Component]) -> "ComponentSet":
        ids: dict[bytes, str] = {}
        for component in components:
            ids[digest_component(component)] = component.id
        return cls(tuple(sorted(ids)), ids)

    @classmethod
    def from_digests(
        cls,
        digests: Iterable[bytes],
        ids: Mapping[bytes, str] | None = None,
    ) -> "ComponentSet":
        unique = tuple(sorted(set(digests)))
        return cls(unique, dict(ids) if ids else {})

    def union(self, other: "ComponentSet") -> "ComponentSet":
        merged_ids = {**self.ids, **other.ids}
        return ComponentSet(tuple(sorted(set(self.digests) | set(other.digests))), merged_ids)

    def with_digest(self, digest: bytes, component_id: str | None = None) -> "ComponentSet":
        if digest in self.digests:
            return self
        ids = dict(self.ids)
        if component_id is not None:
            ids[digest] = component_id
        return ComponentSet(tuple(sorted(self.digests + (digest,))), ids)

    def id_of(self, digest: bytes) -> str | None:
        return self.ids.get(digest)

    def __len__(self) -> int:
        return len(self.digests)

    def __contains__(self, digest: object) -> bool:
        return digest in self._digest_set  # type: ignore[attr-defined]

    def __iter__(self) -> Iterator[bytes]:
        return iter(self.digests)


def build_component_set(components: Iterable[Component]) -> ComponentSet:
    """Digest, deduplicate, and canonically order a list of components."""
    return ComponentSet.from_components(components)
