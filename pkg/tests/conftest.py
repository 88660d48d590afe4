import pytest

from ssisim.identity import generate_keypair, make_did_document
from ssisim.ledger import Ledger, RegisterDid
from ssisim.runtime import DeterministicRng, LogicalClock


def seeded_keypair(tag: bytes):
    return generate_keypair(tag.ljust(32, b"\x00"))


@pytest.fixture
def rng():
    return DeterministicRng(b"test-rng".ljust(32, b"\x00"))


@pytest.fixture
def clock():
    return LogicalClock(0)


@pytest.fixture
def operator():
    return seeded_keypair(b"operator")


@pytest.fixture
def issuer():
    return seeded_keypair(b"issuer")


@pytest.fixture
def holder():
    return seeded_keypair(b"holder")


@pytest.fixture
def ledger(operator, issuer, holder, clock):
    """Fresh chain with the operator as writer and issuer/holder registered."""
    led = Ledger.genesis([make_did_document(operator, created_at=clock.tick())], clock=clock)
    led.attach_writer(operator)
    led.submit([
        RegisterDid(make_did_document(issuer, created_at=clock.tick())),
        RegisterDid(make_did_document(holder, created_at=clock.tick())),
    ])
    return led
