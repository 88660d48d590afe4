"""Agents exchange encrypted envelopes over an in-process bus and run DID-Auth.

The bus is the whole transport: FIFO queues keyed by DID, plus a
transcript of every delivery. Agents never put private key material in
any message; everything a peer needs is resolved from the ledger.
"""

from collections import deque
from dataclasses import dataclass

from .credentials import Credential, VerificationReport
from .engine import tamper_check
from .errors import ParseError, StaleChallenge, UnknownDid, UnknownSchema
from .identity import Did, Envelope, decrypt, encrypt_for, sign, verify
from .ledger import CredentialStatus, Ledger
from .runtime import LogicalClock, SystemRng
from .serialization import (
    canonical_json_bytes,
    encode_parts,
    expect_str,
    load_json,
    sha256,
)
from .wallet import Wallet

CHALLENGE_TTL_TICKS = 100

_AUTH_CONTEXT = "ssisim/did-auth/v1"


@dataclass(frozen=True)
class AuthChallenge:
    verifier_did: Did
    nonce: bytes
    issued_at: int


@dataclass(frozen=True)
class AuthResponse:
    subject_did: Did
    nonce: bytes
    signature: bytes


def auth_signing_payload(nonce: bytes, verifier_did: Did) -> bytes:
    return encode_parts(_AUTH_CONTEXT, nonce, str(verifier_did))


class MessageBus:
    """Delivers envelopes to registered agents and logs each step."""

    def __init__(self):
        self._agents: dict = {}
        self.transcript: list = []

    def register(self, agent: "Agent") -> None:
        self._agents[str(agent.did)] = agent

    def deliver(self, sender_did: Did, recipient_did: Did, kind: str,
                envelope: Envelope) -> None:
        recipient = self._agents.get(str(recipient_did))
        if recipient is None:
            raise UnknownDid(f"no agent registered for {recipient_did}")
        recipient.inbox.append(envelope)
        self.transcript.append({
            "step": len(self.transcript) + 1,
            "from_did": str(sender_did),
            "to_did": str(recipient_did),
            "kind": kind,
            "payload_hash": sha256(canonical_json_bytes(envelope.to_json_dict())).hex(),
        })


class Agent:
    """Acts for one wallet: sends/receives envelopes, answers DID-Auth."""

    def __init__(self, wallet: Wallet, ledger_view: Ledger, bus: MessageBus | None = None,
                 rng=None, clock: LogicalClock | None = None,
                 challenge_ttl: int = CHALLENGE_TTL_TICKS):
        self.wallet = wallet
        self.ledger_view = ledger_view
        self.inbox: deque = deque()
        self.bus = bus
        self.rng = rng or SystemRng()
        self.clock = clock or LogicalClock(0)
        self.challenge_ttl = challenge_ttl
        self._outstanding: dict = {}  # nonce -> AuthChallenge
        if bus is not None:
            bus.register(self)

    @property
    def did(self) -> Did:
        return self.wallet.did

    # -- envelope exchange

    def send_message(self, recipient_did: Did, kind: str, body: dict) -> Envelope:
        """Encrypt a typed message to the recipient's ledger-resolved key."""
        recipient_doc = self.ledger_view.resolve_did(recipient_did, reader_did=self.did)
        plaintext = canonical_json_bytes({"kind": kind, "body": body})
        envelope = encrypt_for(recipient_doc.key_agreement_key,
                               self.wallet.keypair.private_key, plaintext, rng=self.rng)
        if self.bus is not None:
            self.bus.deliver(self.did, recipient_did, kind, envelope)
        return envelope

    def send_credential(self, recipient_did: Did, credential: Credential) -> Envelope:
        return self.send_message(recipient_did, "credential", credential.to_json_dict())

    def open_envelope(self, envelope: Envelope) -> dict:
        """Decrypt and parse a message addressed to this agent."""
        sender_did = self.ledger_view.find_did_by_key_agreement(envelope.sender_key_id,
                                                                reader_did=self.did)
        if sender_did is None:
            raise UnknownDid(f"no registered DID owns key {envelope.sender_key_id}")
        sender_doc = self.ledger_view.resolve_did(sender_did, reader_did=self.did)
        plaintext = decrypt(self.wallet.keypair.private_key, sender_doc.key_agreement_key,
                            envelope)
        obj = load_json(plaintext)
        if not isinstance(obj, dict) or set(obj) != {"kind", "body"}:
            raise ParseError("message must be an object with 'kind' and 'body'")
        return obj

    def receive_credential(self, envelope: Envelope) -> VerificationReport:
        """Decrypt, store, and verify a credential against the registry."""
        message = self.open_envelope(envelope)
        if expect_str(message["kind"], "kind") != "credential":
            raise ParseError(f"expected a credential message, got {message['kind']!r}")
        credential = Credential.from_json_dict(message["body"])
        self.wallet.add_credential(credential)
        checks = []
        schema_known = False
        try:
            schema = self.ledger_view.lookup_schema(credential.schema_id, reader_did=self.did)
            schema_known = tuple(n for n, _ in credential.attributes) == schema.attribute_names
        except UnknownSchema:
            schema_known = False
        checks.append(("schema_known", schema_known))
        checks.append(("commitment_root", tamper_check(credential, self.ledger_view,
                                                       reader_did=self.did)))
        # tamper_check already verified the issuer signature against the ledger key
        status = self.ledger_view.credential_status(credential.credential_id,
                                                    reader_did=self.did)
        checks.append(("status_active", status is CredentialStatus.ACTIVE))
        return VerificationReport(checks=tuple(checks))

    # -- DID-Auth

    def did_auth_challenge(self, subject_did: Did) -> AuthChallenge:
        """Issue a fresh single-use nonce for the subject to sign."""
        self.ledger_view.resolve_did(subject_did, reader_did=self.did)
        challenge = AuthChallenge(
            verifier_did=self.did,
            nonce=self.rng.randbytes(32),
            issued_at=self.clock.now(),
        )
        self._outstanding[challenge.nonce] = challenge
        return challenge

    def did_auth_respond(self, challenge: AuthChallenge) -> AuthResponse:
        return AuthResponse(
            subject_did=self.did,
            nonce=challenge.nonce,
            signature=sign(self.wallet.keypair.private_key,
                           auth_signing_payload(challenge.nonce, challenge.verifier_did)),
        )

    def did_auth_check(self, response: AuthResponse) -> bool:
        """True iff the response signs an outstanding nonce; consumes the nonce."""
        challenge = self._outstanding.get(response.nonce)
        if challenge is None:
            return False
        if self.clock.now() - challenge.issued_at > self.challenge_ttl:
            del self._outstanding[response.nonce]
            raise StaleChallenge("challenge expired")
        subject_doc = self.ledger_view.resolve_did(response.subject_did, reader_did=self.did)
        ok = verify(subject_doc.verification_key,
                    auth_signing_payload(challenge.nonce, self.did),
                    response.signature)
        if ok:
            del self._outstanding[response.nonce]
        return ok
