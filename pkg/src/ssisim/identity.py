"""Keys, DIDs, DID documents, signatures, and encrypted envelopes.

Ed25519 signs (deterministic 64-byte signatures), X25519 + ChaCha20-
Poly1305 encrypts. A wallet holds a single 32-byte seed: the signing key
is built from it directly and the key-agreement key is derived with a
domain-separated hash, so the two roles never share key material.

Envelope construction: a fresh 24-byte nonce is drawn per message and
HKDF-SHA256 stretches the X25519 shared secret (nonce as salt) into a
one-message AEAD key; the AEAD nonce is then fixed at zero. The envelope
header (sender/recipient key fingerprints) is bound as associated data,
so any tampering fails authentication rather than yielding plaintext.
"""

from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .errors import AuthFailure, ParseError, SeedLength
from .runtime import SystemRng
from .serialization import (
    b58decode,
    b58encode,
    encode_parts,
    expect_int,
    expect_list,
    expect_object,
    expect_str,
    parse_hex,
    sha256,
)

SEED_LEN = 32
PUBLIC_KEY_LEN = 32
SIGNATURE_LEN = 64
NONCE_LEN = 24
KEY_ID_LEN = 8

DID_METHOD = "sim"

_KA_DOMAIN = b"ssisim/key-agreement/v1"
_ENVELOPE_INFO = b"ssisim/envelope/v1"
_DOC_CONTEXT = "ssisim/did-document/v1"
_ZERO_AEAD_NONCE = b"\x00" * 12

_default_rng = SystemRng()


def key_fingerprint(public_key: bytes) -> str:
    """First 8 bytes of SHA-256 over the key, lowercase hex."""
    return sha256(public_key)[:KEY_ID_LEN].hex()


# --- key pairs ----------------------------------------------------------------


@dataclass(frozen=True)
class KeyPair:
    """Ed25519 keypair; private_key is the 32-byte seed."""

    public_key: bytes
    private_key: bytes
    key_id: str


def generate_keypair(seed: bytes) -> KeyPair:
    """Deterministically derive a keypair from a 32-byte seed."""
    if len(seed) != SEED_LEN:
        raise SeedLength(f"seed must be {SEED_LEN} bytes, got {len(seed)}")
    signing = Ed25519PrivateKey.from_private_bytes(seed)
    public = signing.public_key().public_bytes_raw()
    return KeyPair(public_key=public, private_key=bytes(seed), key_id=key_fingerprint(public))


def sign(private_key: bytes, message: bytes) -> bytes:
    if len(private_key) != SEED_LEN:
        raise SeedLength(f"private key must be {SEED_LEN} bytes")
    return Ed25519PrivateKey.from_private_bytes(private_key).sign(message)


def verify(public_key: bytes, message: bytes, signature: bytes) -> bool:
    """True iff signature was made by the matching key over exactly message.

    Malformed keys or signatures return False, never raise.
    """
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except Exception:
        return False


def key_agreement_private(private_key: bytes) -> bytes:
    """X25519 private scalar derived from the signing seed."""
    if len(private_key) != SEED_LEN:
        raise SeedLength(f"private key must be {SEED_LEN} bytes")
    return sha256(_KA_DOMAIN + private_key)


def key_agreement_public(private_key: bytes) -> bytes:
    """X25519 public key matching key_agreement_private."""
    scalar = key_agreement_private(private_key)
    return X25519PrivateKey.from_private_bytes(scalar).public_key().public_bytes_raw()


# --- DIDs ---------------------------------------------------------------------


@dataclass(frozen=True)
class Did:
    """did:sim:<base58(sha256(public_key))>."""

    method: str
    identifier: str

    def __str__(self) -> str:
        return f"did:{self.method}:{self.identifier}"

    @classmethod
    def parse(cls, text: str) -> "Did":
        prefix = f"did:{DID_METHOD}:"
        if not text.startswith(prefix):
            raise ParseError(f"DID must start with {prefix!r}, got {text[:16]!r}")
        identifier = text[len(prefix):]
        if not identifier:
            raise ParseError("empty DID identifier")
        if len(b58decode(identifier)) != 32:
            raise ParseError("DID identifier must decode to 32 bytes")
        return cls(method=DID_METHOD, identifier=identifier)


def derive_did(public_key: bytes) -> Did:
    """Pure function from a 32-byte public key to its DID."""
    if len(public_key) != PUBLIC_KEY_LEN:
        raise ParseError(f"public key must be {PUBLIC_KEY_LEN} bytes")
    return Did(method=DID_METHOD, identifier=b58encode(sha256(public_key)))


# --- DID documents --------------------------------------------------------------


@dataclass(frozen=True)
class DidDocument:
    """Ledger-anchored binding of a DID to its keys and service endpoints."""

    did: Did
    verification_key: bytes
    key_agreement_key: bytes
    service_endpoints: tuple  # of (name, uri) pairs
    created_at: int
    controller_signature: bytes

    def signing_payload(self) -> bytes:
        return encode_parts(
            _DOC_CONTEXT,
            str(self.did),
            self.verification_key,
            self.key_agreement_key,
            list(self.service_endpoints),
            self.created_at,
        )

    def verify_self(self) -> bool:
        """Self-certification: signature under its own key, DID bound to it."""
        if derive_did(self.verification_key) != self.did:
            return False
        return verify(self.verification_key, self.signing_payload(), self.controller_signature)

    def to_json_dict(self) -> dict:
        return {
            "did": str(self.did),
            "verification_key": self.verification_key.hex(),
            "key_agreement_key": self.key_agreement_key.hex(),
            "service_endpoints": [{"name": n, "uri": u} for n, u in self.service_endpoints],
            "created_at": self.created_at,
        }

    @classmethod
    def from_json_dict(cls, value, signature: bytes) -> "DidDocument":
        obj = expect_object(
            value,
            ("did", "verification_key", "key_agreement_key", "service_endpoints", "created_at"),
            "did document",
        )
        endpoints = []
        for i, ep in enumerate(expect_list(obj["service_endpoints"], "service_endpoints")):
            ep_obj = expect_object(ep, ("name", "uri"), f"service_endpoints[{i}]")
            endpoints.append((expect_str(ep_obj["name"], "endpoint name"),
                              expect_str(ep_obj["uri"], "endpoint uri")))
        return cls(
            did=Did.parse(expect_str(obj["did"], "did")),
            verification_key=parse_hex(obj["verification_key"], PUBLIC_KEY_LEN, "verification_key"),
            key_agreement_key=parse_hex(obj["key_agreement_key"], PUBLIC_KEY_LEN, "key_agreement_key"),
            service_endpoints=tuple(endpoints),
            created_at=expect_int(obj["created_at"], "created_at"),
            controller_signature=signature,
        )


def make_did_document(keypair: KeyPair, service_endpoints=(), created_at: int = 0) -> DidDocument:
    """Build and self-sign a document for the keypair's DID."""
    unsigned = DidDocument(
        did=derive_did(keypair.public_key),
        verification_key=keypair.public_key,
        key_agreement_key=key_agreement_public(keypair.private_key),
        service_endpoints=tuple((str(n), str(u)) for n, u in service_endpoints),
        created_at=created_at,
        controller_signature=b"",
    )
    signature = sign(keypair.private_key, unsigned.signing_payload())
    return DidDocument(
        did=unsigned.did,
        verification_key=unsigned.verification_key,
        key_agreement_key=unsigned.key_agreement_key,
        service_endpoints=unsigned.service_endpoints,
        created_at=unsigned.created_at,
        controller_signature=signature,
    )


# --- envelopes ------------------------------------------------------------------


@dataclass(frozen=True)
class Envelope:
    """Authenticated ciphertext addressed by key-agreement key fingerprints."""

    sender_key_id: str
    recipient_key_id: str
    nonce: bytes
    ciphertext: bytes

    def to_json_dict(self) -> dict:
        return {
            "sender_key_id": self.sender_key_id,
            "recipient_key_id": self.recipient_key_id,
            "nonce": self.nonce.hex(),
            "ciphertext": self.ciphertext.hex(),
        }

    @classmethod
    def from_json_dict(cls, value) -> "Envelope":
        obj = expect_object(
            value, ("sender_key_id", "recipient_key_id", "nonce", "ciphertext"), "envelope"
        )
        return cls(
            sender_key_id=parse_hex(obj["sender_key_id"], KEY_ID_LEN, "sender_key_id").hex(),
            recipient_key_id=parse_hex(obj["recipient_key_id"], KEY_ID_LEN, "recipient_key_id").hex(),
            nonce=parse_hex(obj["nonce"], NONCE_LEN, "nonce"),
            ciphertext=parse_hex(obj["ciphertext"], None, "ciphertext"),
        )


def _envelope_key(shared_secret: bytes, nonce: bytes, sender_public: bytes,
                  recipient_public: bytes) -> bytes:
    # The raw X25519 secret is symmetric between the two parties; baking the
    # ordered sender/recipient keys into the KDF makes the key directional, so
    # decrypting with swapped roles fails authentication.
    info = _ENVELOPE_INFO + sender_public + recipient_public
    return HKDF(algorithm=hashes.SHA256(), length=32, salt=nonce, info=info).derive(shared_secret)


def _envelope_aad(sender_key_id: str, recipient_key_id: str) -> bytes:
    return encode_parts(sender_key_id, recipient_key_id)


def encrypt_for(recipient_public: bytes, sender_private: bytes, plaintext: bytes,
                rng=None) -> Envelope:
    """Encrypt to the recipient's key-agreement key, authenticated as sender.

    recipient_public is an X25519 key (from a DID document); sender_private
    is the sender's signing seed, from which the sender's X25519 key derives.
    """
    rng = rng or _default_rng
    sender_scalar = key_agreement_private(sender_private)
    sender_public = key_agreement_public(sender_private)
    shared = X25519PrivateKey.from_private_bytes(sender_scalar).exchange(
        X25519PublicKey.from_public_bytes(recipient_public)
    )
    nonce = rng.randbytes(NONCE_LEN)
    sender_key_id = key_fingerprint(sender_public)
    recipient_key_id = key_fingerprint(recipient_public)
    key = _envelope_key(shared, nonce, sender_public, recipient_public)
    ciphertext = ChaCha20Poly1305(key).encrypt(
        _ZERO_AEAD_NONCE, plaintext, _envelope_aad(sender_key_id, recipient_key_id)
    )
    return Envelope(
        sender_key_id=sender_key_id,
        recipient_key_id=recipient_key_id,
        nonce=nonce,
        ciphertext=ciphertext,
    )


def decrypt(recipient_private: bytes, sender_public: bytes, envelope: Envelope) -> bytes:
    """Recover the plaintext or raise AuthFailure; never returns garbage."""
    recipient_scalar = key_agreement_private(recipient_private)
    recipient_public = key_agreement_public(recipient_private)
    try:
        shared = X25519PrivateKey.from_private_bytes(recipient_scalar).exchange(
            X25519PublicKey.from_public_bytes(sender_public)
        )
        key = _envelope_key(shared, envelope.nonce, sender_public, recipient_public)
        return ChaCha20Poly1305(key).decrypt(
            _ZERO_AEAD_NONCE,
            envelope.ciphertext,
            _envelope_aad(envelope.sender_key_id, envelope.recipient_key_id),
        )
    except (InvalidTag, ValueError) as exc:
        raise AuthFailure("envelope failed authentication") from exc
