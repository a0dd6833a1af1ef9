"""Shared factories for the test suite."""

from __future__ import annotations

import random

from catt.hashing import Component, ComponentSet, build_component_set

TEST_SEED = b"catt-test-domain"


def make_components(rng: random.Random, count: int, prefix: str = "c") -> list[Component]:
    """Distinct components with random payloads (1..32 bytes, never empty)."""
    return [
        Component(f"{prefix}{i}", rng.randbytes(rng.randint(1, 32)))
        for i in range(count)
    ]


def random_set(rng: random.Random, count: int, prefix: str = "c") -> ComponentSet:
    return build_component_set(make_components(rng, count, prefix))


def shuffled(rng: random.Random, items: list) -> list:
    copy = list(items)
    rng.shuffle(copy)
    return copy
