"""Opt-in operation counters.

The cost contracts of the incremental operations (no payload re-reads on
include, no recomputation from the accumulator base on compose) are asserted
by the test suite through these counters. When no probe is active,
``record`` is a no-op; probing is not thread-safe and is meant for
single-threaded test use only.
"""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager
from typing import Iterator

_active: list[Counter] = []


def record(event: str) -> None:
    if _active:
        for counter in _active:
            counter[event] += 1


@contextmanager
def probe() -> Iterator[Counter]:
    """Collect event counts for the duration of the block."""
    counter: Counter = Counter()
    _active.append(counter)
    try:
        yield counter
    finally:
        _active.remove(counter)
