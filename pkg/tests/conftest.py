from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from catt import accumulator, aggsig
from tests.helpers import TEST_SEED

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("suite")

# One line per acceptance criterion, echoed after the run summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acc_params() -> accumulator.AccumulatorParams:
    return accumulator.setup(TEST_SEED, 512)


@pytest.fixture(scope="session")
def signing_key() -> aggsig.SigningKey:
    return aggsig.keygen(TEST_SEED, 512)


@pytest.fixture(scope="session")
def verify_key(signing_key: aggsig.SigningKey) -> aggsig.VerifyKey:
    return signing_key.public()


@pytest.fixture(scope="session")
def toy_acc_params() -> accumulator.AccumulatorParams:
    # Tiny hand-checkable domain: N = 35 = 5 * 7, g = 2.
    return accumulator.AccumulatorParams(modulus=35, generator=2, bit_length=6)


@pytest.fixture(scope="session")
def toy_signing_key() -> aggsig.SigningKey:
    # Ns = 33 = 3 * 11, phi = 20, e = 3, d = 7 (3 * 7 = 21 = 1 mod 20).
    return aggsig.SigningKey(modulus=33, public_exponent=3, private_exponent=7)
