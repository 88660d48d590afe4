"""Credential schemas, credentials, and selective-disclosure presentations.

A credential commits to each attribute as hash(name, value, salt) and
signs the Merkle root of those commitments, so a presentation can reveal
any subset of attributes with their salts and proofs while the rest stay
hidden. Only the commitment root is ever anchored on the ledger.

This module holds the value types and pure constructions; the ledger-
facing issuer/holder/verifier operations live in engine.py.
"""

from dataclasses import dataclass

from .errors import DuplicateAttribute, ParseError, SchemaMismatch, UnknownAttribute, WrongHolderKey
from .identity import (
    Did,
    KeyPair,
    SIGNATURE_LEN,
    derive_did,
    sign,
)
from .merkle import PathStep, leaf_hash, merkle_path, merkle_root, verify_path
from .serialization import (
    encode_parts,
    expect_int,
    expect_list,
    expect_object,
    expect_str,
    parse_hex,
    sha256,
)

SALT_LEN = 16

_SCHEMA_CONTEXT = "ssisim/schema/v1"
_CREDENTIAL_CONTEXT = "ssisim/credential/v1"
_PRESENTATION_CONTEXT = "ssisim/presentation/v1"


# --- schemas -------------------------------------------------------------------


@dataclass(frozen=True)
class CredentialSchema:
    """Named, versioned attribute list; schema_id binds it to its issuer."""

    schema_id: bytes
    issuer_did: Did
    name: str
    version: int
    attribute_names: tuple

    def to_json_dict(self) -> dict:
        return {
            "schema_id": self.schema_id.hex(),
            "issuer_did": str(self.issuer_did),
            "name": self.name,
            "version": self.version,
            "attribute_names": list(self.attribute_names),
        }

    @classmethod
    def from_json_dict(cls, value) -> "CredentialSchema":
        obj = expect_object(
            value, ("schema_id", "issuer_did", "name", "version", "attribute_names"), "schema"
        )
        names = tuple(
            expect_str(n, f"attribute_names[{i}]")
            for i, n in enumerate(expect_list(obj["attribute_names"], "attribute_names"))
        )
        return cls(
            schema_id=parse_hex(obj["schema_id"], 32, "schema_id"),
            issuer_did=Did.parse(expect_str(obj["issuer_did"], "issuer_did")),
            name=expect_str(obj["name"], "name"),
            version=expect_int(obj["version"], "version"),
            attribute_names=names,
        )


def schema_id_for(issuer_did: Did, name: str, version: int, attribute_names) -> bytes:
    return sha256(
        encode_parts(_SCHEMA_CONTEXT, str(issuer_did), name, version, list(attribute_names))
    )


def make_schema(issuer_did: Did, name: str, version: int, attribute_names) -> CredentialSchema:
    """Validate and canonicalize attribute names (sorted order fixed here)."""
    names = list(attribute_names)
    if not names:
        raise DuplicateAttribute("schema needs at least one attribute")
    if len(set(names)) != len(names):
        raise DuplicateAttribute(f"duplicate attribute names in {names}")
    names = tuple(sorted(names))
    return CredentialSchema(
        schema_id=schema_id_for(issuer_did, name, version, names),
        issuer_did=issuer_did,
        name=name,
        version=version,
        attribute_names=names,
    )


def schema_is_well_formed(schema: CredentialSchema) -> bool:
    names = schema.attribute_names
    if not names or len(set(names)) != len(names) or tuple(sorted(names)) != names:
        return False
    return schema.schema_id == schema_id_for(
        schema.issuer_did, schema.name, schema.version, names
    )


# --- credentials -----------------------------------------------------------------


def commitment_leaf(name: str, value: str, salt: bytes) -> bytes:
    return leaf_hash(encode_parts(name, value, salt))


def commitment_root(attributes, salts) -> bytes:
    leaves = [commitment_leaf(n, v, s) for (n, v), s in zip(attributes, salts)]
    return merkle_root(leaves)


def credential_id_for(schema_id: bytes, holder_did: Did, issuance_time: int,
                      root: bytes) -> bytes:
    return sha256(encode_parts(_CREDENTIAL_CONTEXT, schema_id, str(holder_did), issuance_time, root))


def credential_signing_payload(credential_id: bytes, schema_id: bytes, issuer_did: Did,
                               holder_did: Did, root: bytes, issuance_time: int) -> bytes:
    return encode_parts(
        _CREDENTIAL_CONTEXT,
        credential_id,
        schema_id,
        str(issuer_did),
        str(holder_did),
        root,
        issuance_time,
    )


@dataclass(frozen=True)
class Credential:
    credential_id: bytes
    schema_id: bytes
    issuer_did: Did
    holder_did: Did
    attributes: tuple  # of (name, value) pairs, in schema order
    salts: tuple  # one 16-byte salt per attribute
    commitment_root: bytes
    issuance_time: int
    issuer_signature: bytes

    def signing_payload(self) -> bytes:
        return credential_signing_payload(
            self.credential_id, self.schema_id, self.issuer_did, self.holder_did,
            self.commitment_root, self.issuance_time,
        )

    def to_json_dict(self) -> dict:
        return {
            "credential_id": self.credential_id.hex(),
            "schema_id": self.schema_id.hex(),
            "issuer_did": str(self.issuer_did),
            "holder_did": str(self.holder_did),
            "attributes": [{"name": n, "value": v} for n, v in self.attributes],
            "salts": [s.hex() for s in self.salts],
            "commitment_root": self.commitment_root.hex(),
            "issuance_time": self.issuance_time,
            "issuer_signature": self.issuer_signature.hex(),
        }

    @classmethod
    def from_json_dict(cls, value) -> "Credential":
        obj = expect_object(
            value,
            ("credential_id", "schema_id", "issuer_did", "holder_did", "attributes",
             "salts", "commitment_root", "issuance_time", "issuer_signature"),
            "credential",
        )
        attributes = []
        for i, attr in enumerate(expect_list(obj["attributes"], "attributes")):
            attr_obj = expect_object(attr, ("name", "value"), f"attributes[{i}]")
            attributes.append((expect_str(attr_obj["name"], "attribute name"),
                               expect_str(attr_obj["value"], "attribute value")))
        salts = tuple(
            parse_hex(s, SALT_LEN, f"salts[{i}]")
            for i, s in enumerate(expect_list(obj["salts"], "salts"))
        )
        if len(salts) != len(attributes):
            raise ParseError("credential needs one salt per attribute")
        return cls(
            credential_id=parse_hex(obj["credential_id"], 32, "credential_id"),
            schema_id=parse_hex(obj["schema_id"], 32, "schema_id"),
            issuer_did=Did.parse(expect_str(obj["issuer_did"], "issuer_did")),
            holder_did=Did.parse(expect_str(obj["holder_did"], "holder_did")),
            attributes=tuple(attributes),
            salts=salts,
            commitment_root=parse_hex(obj["commitment_root"], 32, "commitment_root"),
            issuance_time=expect_int(obj["issuance_time"], "issuance_time"),
            issuer_signature=parse_hex(obj["issuer_signature"], SIGNATURE_LEN, "issuer_signature"),
        )


def build_credential(issuer: KeyPair, holder_did: Did, schema: CredentialSchema,
                     values: dict, rng, issuance_time: int) -> Credential:
    """Assemble and sign a credential; does not touch the ledger."""
    expected = set(schema.attribute_names)
    provided = set(values)
    if provided != expected:
        missing = sorted(expected - provided)
        extra = sorted(provided - expected)
        raise SchemaMismatch(f"values must cover schema exactly (missing={missing}, extra={extra})")
    attributes = tuple((name, str(values[name])) for name in schema.attribute_names)
    salts = tuple(rng.randbytes(SALT_LEN) for _ in attributes)
    root = commitment_root(attributes, salts)
    credential_id = credential_id_for(schema.schema_id, holder_did, issuance_time, root)
    issuer_did = derive_did(issuer.public_key)
    signature = sign(
        issuer.private_key,
        credential_signing_payload(credential_id, schema.schema_id, issuer_did, holder_did,
                                   root, issuance_time),
    )
    return Credential(
        credential_id=credential_id,
        schema_id=schema.schema_id,
        issuer_did=issuer_did,
        holder_did=holder_did,
        attributes=attributes,
        salts=salts,
        commitment_root=root,
        issuance_time=issuance_time,
        issuer_signature=signature,
    )


def credential_commitments_ok(credential: Credential) -> bool:
    """Recompute the commitment root and credential id from the plaintext."""
    if len(credential.attributes) != len(credential.salts) or not credential.attributes:
        return False
    if commitment_root(credential.attributes, credential.salts) != credential.commitment_root:
        return False
    return credential.credential_id == credential_id_for(
        credential.schema_id, credential.holder_did, credential.issuance_time,
        credential.commitment_root,
    )


# --- presentations ----------------------------------------------------------------


@dataclass(frozen=True)
class RevealedAttribute:
    name: str
    value: str
    salt: bytes
    merkle_path: tuple  # of PathStep

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "salt": self.salt.hex(),
            "merkle_path": [step.to_json_dict() for step in self.merkle_path],
        }

    @classmethod
    def from_json_dict(cls, value) -> "RevealedAttribute":
        obj = expect_object(value, ("name", "value", "salt", "merkle_path"), "revealed attribute")
        path = tuple(
            PathStep.from_json_dict(step)
            for step in expect_list(obj["merkle_path"], "merkle_path")
        )
        return cls(
            name=expect_str(obj["name"], "name"),
            value=expect_str(obj["value"], "value"),
            salt=parse_hex(obj["salt"], SALT_LEN, "salt"),
            merkle_path=path,
        )


def revealed_set_hash(revealed) -> bytes:
    return sha256(encode_parts([(r.name, r.value, r.salt) for r in revealed]))


def presentation_signing_payload(credential_id: bytes, revealed_hash: bytes,
                                 challenge: bytes) -> bytes:
    return encode_parts(_PRESENTATION_CONTEXT, credential_id, revealed_hash, challenge)


@dataclass(frozen=True)
class Presentation:
    """Challenge-bound view of a credential revealing a chosen subset.

    issuance_time travels with the presentation because the copied issuer
    signature covers it; nothing else about the hidden attributes does.
    """

    credential_id: bytes
    schema_id: bytes
    issuer_did: Did
    holder_did: Did
    issuance_time: int
    revealed: tuple  # of RevealedAttribute
    issuer_signature: bytes
    challenge: bytes
    holder_signature: bytes

    def to_json_dict(self) -> dict:
        return {
            "credential_id": self.credential_id.hex(),
            "schema_id": self.schema_id.hex(),
            "issuer_did": str(self.issuer_did),
            "holder_did": str(self.holder_did),
            "issuance_time": self.issuance_time,
            "revealed": [r.to_json_dict() for r in self.revealed],
            "issuer_signature": self.issuer_signature.hex(),
            "challenge": self.challenge.hex(),
            "holder_signature": self.holder_signature.hex(),
        }

    @classmethod
    def from_json_dict(cls, value) -> "Presentation":
        obj = expect_object(
            value,
            ("credential_id", "schema_id", "issuer_did", "holder_did", "issuance_time",
             "revealed", "issuer_signature", "challenge", "holder_signature"),
            "presentation",
        )
        revealed = tuple(
            RevealedAttribute.from_json_dict(r)
            for r in expect_list(obj["revealed"], "revealed")
        )
        return cls(
            credential_id=parse_hex(obj["credential_id"], 32, "credential_id"),
            schema_id=parse_hex(obj["schema_id"], 32, "schema_id"),
            issuer_did=Did.parse(expect_str(obj["issuer_did"], "issuer_did")),
            holder_did=Did.parse(expect_str(obj["holder_did"], "holder_did")),
            issuance_time=expect_int(obj["issuance_time"], "issuance_time"),
            revealed=revealed,
            issuer_signature=parse_hex(obj["issuer_signature"], SIGNATURE_LEN, "issuer_signature"),
            challenge=parse_hex(obj["challenge"], 32, "challenge"),
            holder_signature=parse_hex(obj["holder_signature"], SIGNATURE_LEN, "holder_signature"),
        )


def create_presentation(credential: Credential, reveal, challenge: bytes,
                        holder: KeyPair) -> Presentation:
    """Reveal exactly the requested attributes; everything else stays hidden."""
    if derive_did(holder.public_key) != credential.holder_did:
        raise WrongHolderKey("holder key does not match the credential's holder DID")
    names = [name for name, _ in credential.attributes]
    reveal = set(reveal)
    unknown = reveal - set(names)
    if unknown:
        raise UnknownAttribute(f"credential has no attribute(s) {sorted(unknown)}")
    leaves = [commitment_leaf(n, v, s) for (n, v), s in zip(credential.attributes, credential.salts)]
    revealed = tuple(
        RevealedAttribute(
            name=name,
            value=credential.attributes[i][1],
            salt=credential.salts[i],
            merkle_path=merkle_path(leaves, i),
        )
        for i, name in enumerate(names)
        if name in reveal
    )
    holder_signature = sign(
        holder.private_key,
        presentation_signing_payload(credential.credential_id, revealed_set_hash(revealed),
                                     challenge),
    )
    return Presentation(
        credential_id=credential.credential_id,
        schema_id=credential.schema_id,
        issuer_did=credential.issuer_did,
        holder_did=credential.holder_did,
        issuance_time=credential.issuance_time,
        revealed=revealed,
        issuer_signature=credential.issuer_signature,
        challenge=challenge,
        holder_signature=holder_signature,
    )


def revealed_proofs_ok(presentation: Presentation, root: bytes) -> bool:
    """Every revealed attribute must authenticate against the anchored root."""
    for r in presentation.revealed:
        if not verify_path(commitment_leaf(r.name, r.value, r.salt), r.merkle_path, root):
            return False
    return True


# --- verification reports ------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    """Ordered named checks; Accept iff all pass, else the first failure names the cause."""

    checks: tuple  # of (check_name, passed) pairs

    @property
    def accepted(self) -> bool:
        return all(passed for _, passed in self.checks)

    @property
    def reject_cause(self) -> str | None:
        for name, passed in self.checks:
            if not passed:
                return name
        return None

    @property
    def verdict(self) -> str:
        return "accept" if self.accepted else f"reject:{self.reject_cause}"

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "checks": [{"name": n, "pass": p} for n, p in self.checks],
        }
