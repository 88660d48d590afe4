"""Minimal PKI baseline: root CA, one subordinate CA, RA queue, VA database.

The hierarchy exists to be broken: the compromise harness in this module
contrasts what a stolen CA key buys an attacker (everything, including
the certificate database the CA maintains) with what a stolen ledger
writer key buys (nothing, because registrations self-certify).
"""

from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    BadConfig,
    BadProofOfPossession,
    UnknownApproval,
    UnknownRequest,
)
from .identity import (
    DidDocument,
    KeyPair,
    derive_did,
    generate_keypair,
    key_agreement_public,
    make_did_document,
    sign,
    verify,
)
from .ledger import Ledger, RegisterDid, build_block
from .runtime import DeterministicRng, LogicalClock
from .serialization import encode_parts

_CSR_CONTEXT = "ssisim/csr/v1"
_CERT_CONTEXT = "ssisim/certificate/v1"

DEFAULT_CERT_LIFETIME_TICKS = 1000


# --- certificate objects ---------------------------------------------------------


@dataclass(frozen=True)
class Csr:
    subject_name: str
    subject_public_key: bytes
    proof_of_possession: bytes


def csr_signing_payload(subject_name: str, subject_public_key: bytes) -> bytes:
    return encode_parts(_CSR_CONTEXT, subject_name, subject_public_key)


def make_csr(subject: KeyPair, subject_name: str) -> Csr:
    return Csr(
        subject_name=subject_name,
        subject_public_key=subject.public_key,
        proof_of_possession=sign(subject.private_key,
                                 csr_signing_payload(subject_name, subject.public_key)),
    )


@dataclass(frozen=True)
class Certificate:
    serial: int
    subject_name: str
    subject_public_key: bytes
    issuer_name: str
    not_before: int
    not_after: int
    issuer_signature: bytes

    def signing_payload(self) -> bytes:
        return encode_parts(
            _CERT_CONTEXT, self.serial, self.subject_name, self.subject_public_key,
            self.issuer_name, self.not_before, self.not_after,
        )

    def to_json_dict(self) -> dict:
        return {
            "serial": self.serial,
            "subject_name": self.subject_name,
            "subject_public_key": self.subject_public_key.hex(),
            "issuer_name": self.issuer_name,
            "not_before": self.not_before,
            "not_after": self.not_after,
            "issuer_signature": self.issuer_signature.hex(),
        }


def issue_signed_certificate(issuer_name: str, issuer_key: KeyPair, serial: int,
                             subject_name: str, subject_public_key: bytes,
                             not_before: int, not_after: int) -> Certificate:
    unsigned = Certificate(
        serial=serial,
        subject_name=subject_name,
        subject_public_key=subject_public_key,
        issuer_name=issuer_name,
        not_before=not_before,
        not_after=not_after,
        issuer_signature=b"",
    )
    return replace(unsigned,
                   issuer_signature=sign(issuer_key.private_key, unsigned.signing_payload()))


class CertStatus(str, Enum):
    VALID = "valid"
    REVOKED = "revoked"


class VerdictCause(str, Enum):
    CHAIN_BROKEN = "ChainBroken"
    NOT_YET_VALID = "NotYetValid"
    EXPIRED = "Expired"
    UNKNOWN_SERIAL = "UnknownSerial"
    REVOKED = "Revoked"


@dataclass(frozen=True)
class CertVerdict:
    valid: bool
    cause: VerdictCause | None = None

    def describe(self) -> str:
        return "Valid" if self.valid else f"Invalid({self.cause.value})"


# --- hierarchy -------------------------------------------------------------------


@dataclass
class CaNode:
    name: str
    keypair: KeyPair
    certificate: Certificate


class RequestState(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    ISSUED = "issued"


@dataclass(frozen=True)
class Approval:
    request_id: int


class CaHierarchy:
    """Root plus subordinates; the VA database is fed only by CA issuance."""

    def __init__(self, root: CaNode, subordinates: list, cert_lifetime: int):
        self.root = root
        self.subordinates = list(subordinates)
        self.cert_lifetime = cert_lifetime
        self.va: dict = {}          # serial -> CertStatus
        self._requests: dict = {}   # request_id -> (Csr, RequestState)
        self._next_request_id = 1
        self._next_serial = 1
        for node in [root, *subordinates]:
            self.va[node.certificate.serial] = CertStatus.VALID

    def issuing_ca(self) -> CaNode:
        return self.subordinates[0] if self.subordinates else self.root

    def node_by_name(self, name: str) -> CaNode | None:
        if name == self.root.name:
            return self.root
        for node in self.subordinates:
            if node.name == name:
                return node
        return None

    def next_serial(self) -> int:
        serial = self._next_serial
        self._next_serial += 1
        return serial


def build_hierarchy(rng=None, clock: LogicalClock | None = None,
                    cert_lifetime: int = DEFAULT_CERT_LIFETIME_TICKS) -> CaHierarchy:
    """One root and one subordinate: the smallest hierarchy with a real chain."""
    rng = rng or DeterministicRng(b"\x00" * 32)
    clock = clock or LogicalClock(0)
    now = clock.now()
    root_key = generate_keypair(rng.randbytes(32))
    root_cert = issue_signed_certificate(
        "root-ca", root_key, serial=1, subject_name="root-ca",
        subject_public_key=root_key.public_key,
        not_before=now, not_after=now + cert_lifetime,
    )
    sub_key = generate_keypair(rng.randbytes(32))
    sub_cert = issue_signed_certificate(
        "root-ca", root_key, serial=2, subject_name="issuing-ca",
        subject_public_key=sub_key.public_key,
        not_before=now, not_after=now + cert_lifetime,
    )
    hierarchy = CaHierarchy(
        root=CaNode(name="root-ca", keypair=root_key, certificate=root_cert),
        subordinates=[CaNode(name="issuing-ca", keypair=sub_key, certificate=sub_cert)],
        cert_lifetime=cert_lifetime,
    )
    hierarchy._next_serial = 3
    return hierarchy


# --- the Fig-4 style request flow ---------------------------------------------------


def submit_csr(hierarchy: CaHierarchy, csr: Csr) -> int:
    """Queue a request at the RA after checking proof of possession."""
    if not verify(csr.subject_public_key,
                  csr_signing_payload(csr.subject_name, csr.subject_public_key),
                  csr.proof_of_possession):
        raise BadProofOfPossession(f"CSR for {csr.subject_name!r} fails self-signature")
    request_id = hierarchy._next_request_id
    hierarchy._next_request_id += 1
    hierarchy._requests[request_id] = (csr, RequestState.PENDING)
    return request_id


def ra_approve(hierarchy: CaHierarchy, request_id: int) -> Approval:
    entry = hierarchy._requests.get(request_id)
    if entry is None:
        raise UnknownRequest(f"no request {request_id}")
    csr, state = entry
    if state is not RequestState.PENDING:
        raise UnknownRequest(f"request {request_id} already {state.value}")
    hierarchy._requests[request_id] = (csr, RequestState.APPROVED)
    return Approval(request_id=request_id)


def ca_issue(hierarchy: CaHierarchy, approval: Approval, clock: LogicalClock) -> Certificate:
    """Sign the approved request and register the serial with the VA."""
    entry = hierarchy._requests.get(approval.request_id)
    if entry is None:
        raise UnknownApproval(f"no request {approval.request_id}")
    csr, state = entry
    if state is not RequestState.APPROVED:
        raise UnknownApproval(f"request {approval.request_id} is {state.value}, not approved")
    ca = hierarchy.issuing_ca()
    now = clock.now()
    certificate = issue_signed_certificate(
        ca.name, ca.keypair, serial=hierarchy.next_serial(),
        subject_name=csr.subject_name, subject_public_key=csr.subject_public_key,
        not_before=now, not_after=now + hierarchy.cert_lifetime,
    )
    hierarchy.va[certificate.serial] = CertStatus.VALID
    hierarchy._requests[approval.request_id] = (csr, RequestState.ISSUED)
    return certificate


def va_revoke(hierarchy: CaHierarchy, serial: int) -> None:
    if serial not in hierarchy.va:
        raise UnknownRequest(f"no certificate with serial {serial}")
    hierarchy.va[serial] = CertStatus.REVOKED


def verify_certificate(hierarchy: CaHierarchy, certificate: Certificate,
                       clock: LogicalClock) -> CertVerdict:
    """Valid iff the chain reaches the root, the window holds, and the VA agrees."""
    issuer = hierarchy.node_by_name(certificate.issuer_name)
    if issuer is None:
        return CertVerdict(valid=False, cause=VerdictCause.CHAIN_BROKEN)
    if not verify(issuer.keypair.public_key, certificate.signing_payload(),
                  certificate.issuer_signature):
        return CertVerdict(valid=False, cause=VerdictCause.CHAIN_BROKEN)
    # Walk up: a subordinate's own certificate must be signed by the root.
    if issuer is not hierarchy.root:
        if not verify(hierarchy.root.keypair.public_key, issuer.certificate.signing_payload(),
                      issuer.certificate.issuer_signature):
            return CertVerdict(valid=False, cause=VerdictCause.CHAIN_BROKEN)
    now = clock.now()
    if now < certificate.not_before:
        return CertVerdict(valid=False, cause=VerdictCause.NOT_YET_VALID)
    if now > certificate.not_after:
        return CertVerdict(valid=False, cause=VerdictCause.EXPIRED)
    status = hierarchy.va.get(certificate.serial)
    if status is None:
        return CertVerdict(valid=False, cause=VerdictCause.UNKNOWN_SERIAL)
    if status is CertStatus.REVOKED:
        return CertVerdict(valid=False, cause=VerdictCause.REVOKED)
    return CertVerdict(valid=True)


# --- compromise harness -------------------------------------------------------------


@dataclass(frozen=True)
class CompromiseReport:
    scenario: str
    forged_accepted: int
    forged_rejected: int
    total_forgeries: int
    writers: int | None = None
    compromised: int | None = None

    def to_json_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "forged_accepted": self.forged_accepted,
            "forged_rejected": self.forged_rejected,
            "total_forgeries": self.total_forgeries,
        }
        if self.writers is not None:
            out["writers"] = self.writers
            out["compromised"] = self.compromised
        return out


@dataclass(frozen=True)
class CompromiseConfig:
    scenario: str  # "ca" or "ledger"
    forgeries: int
    writers: int = 3
    compromised: int = 1
    seed: bytes = b"\x00" * 32


def run_compromise_experiment(config: CompromiseConfig) -> CompromiseReport:
    if config.forgeries < 0:
        raise BadConfig("forgeries must be >= 0")
    if config.scenario == "ca":
        return _run_ca_compromise(config)
    if config.scenario == "ledger":
        return _run_ledger_compromise(config)
    raise BadConfig(f"unknown scenario {config.scenario!r} (expected 'ca' or 'ledger')")


def _run_ca_compromise(config: CompromiseConfig) -> CompromiseReport:
    """Attacker holds the issuing CA key, and with it the CA's database feed.

    Forged certificates follow the normal wire shape but bypass the RA
    entirely; since the CA maintains the VA database, the attacker's
    issuance also plants the serial there.
    """
    rng = DeterministicRng(config.seed)
    clock = LogicalClock(0)
    hierarchy = build_hierarchy(rng=rng, clock=clock)
    stolen = hierarchy.issuing_ca()
    accepted = 0
    for i in range(config.forgeries):
        mallory = generate_keypair(rng.randbytes(32))
        forged = issue_signed_certificate(
            stolen.name, stolen.keypair, serial=hierarchy.next_serial(),
            subject_name=f"forged-subject-{i}", subject_public_key=mallory.public_key,
            not_before=clock.now(), not_after=clock.now() + hierarchy.cert_lifetime,
        )
        hierarchy.va[forged.serial] = CertStatus.VALID
        if verify_certificate(hierarchy, forged, clock).valid:
            accepted += 1
    return CompromiseReport(
        scenario="ca-compromise",
        forged_accepted=accepted,
        forged_rejected=config.forgeries - accepted,
        total_forgeries=config.forgeries,
    )


def _run_ledger_compromise(config: CompromiseConfig) -> CompromiseReport:
    """Attacker controls k of n writers and appends forged re-registrations.

    The forged documents reuse each victim's DID and verification key but
    are signed with the attacker's key, so they are block-valid (a real
    writer sealed them) yet fail self-certification at read time.
    """
    if config.writers < 1:
        raise BadConfig("ledger scenario needs at least one writer")
    if not 0 <= config.compromised <= config.writers:
        raise BadConfig("compromised writers must be between 0 and the writer count")
    rng = DeterministicRng(config.seed)
    clock = LogicalClock(0)
    writer_keys = [generate_keypair(rng.randbytes(32)) for _ in range(config.writers)]
    writer_docs = [make_did_document(k, created_at=clock.tick()) for k in writer_keys]
    ledger = Ledger.genesis(writer_docs, clock=clock)

    victims = [generate_keypair(rng.randbytes(32)) for _ in range(3)]
    for victim in victims:
        ledger.append_block([RegisterDid(make_did_document(victim, created_at=clock.tick()))],
                            writer_keys[-1])
    originals = {str(derive_did(v.public_key)): ledger.resolve_did(derive_did(v.public_key))
                 for v in victims}

    attacker = generate_keypair(rng.randbytes(32))
    accepted = 0
    for i in range(config.forgeries):
        if config.compromised == 0:
            break  # no writer key, nothing reaches the chain
        victim = victims[i % len(victims)]
        victim_did = derive_did(victim.public_key)
        forged_doc = _forged_document(victim, attacker, clock.tick())
        stolen_writer = writer_keys[i % config.compromised]
        last = ledger.blocks[-1]
        block = build_block(
            index=last.index + 1,
            prev_hash=last.block_hash,
            timestamp=ledger.clock.tick(),
            txs=[RegisterDid(forged_doc)],
            writer_did=derive_did(stolen_writer.public_key),
            writer_signature=None,
            writer_key=stolen_writer.private_key,
        )
        ledger.blocks.append(block)  # malicious writer skips append-time validation
        if ledger.validate_chain().ok and ledger.resolve_did(victim_did) != originals[str(victim_did)]:
            accepted += 1
    return CompromiseReport(
        scenario="ledger-writer-compromise",
        forged_accepted=accepted,
        forged_rejected=config.forgeries - accepted,
        total_forgeries=config.forgeries,
        writers=config.writers,
        compromised=config.compromised,
    )


def _forged_document(victim: KeyPair, attacker: KeyPair, created_at: int) -> DidDocument:
    """Victim's DID and verification key, attacker's endpoints and signature."""
    unsigned = DidDocument(
        did=derive_did(victim.public_key),
        verification_key=victim.public_key,
        key_agreement_key=key_agreement_public(attacker.private_key),
        service_endpoints=(("agent", "https://attacker.example/agent"),),
        created_at=created_at,
        controller_signature=b"",
    )
    return replace(unsigned,
                   controller_signature=sign(attacker.private_key, unsigned.signing_payload()))
