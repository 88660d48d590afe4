"""Issuer, holder, and verifier operations against the registry ledger.

Issuance anchors only the commitment root - attribute plaintext never
touches the ledger. Verification resolves everything it trusts (issuer
key, holder key, schema, anchor, status) from the ledger rather than
from the presentation itself.
"""

from .credentials import (
    Credential,
    CredentialSchema,
    Presentation,
    VerificationReport,
    build_credential,
    credential_commitments_ok,
    credential_signing_payload,
    make_schema,
    presentation_signing_payload,
    revealed_proofs_ok,
    revealed_set_hash,
)
from .errors import (
    DuplicateSchema,
    NotIssuer,
    NotSchemaOwner,
    UnknownCredential,
    UnknownDid,
    UnknownSchema,
    UnknownTransition,
)
from .identity import KeyPair, derive_did, sign, verify
from .ledger import (
    AnchorCredential,
    CredentialStatus,
    DefineSchema,
    Ledger,
    Revoke,
    anchor_credential_payload,
    define_schema_payload,
    revoke_payload,
)
from .runtime import LogicalClock, SystemRng


def define_schema(issuer: KeyPair, name: str, version: int, attribute_names,
                  ledger: Ledger) -> CredentialSchema:
    """Anchor a schema on the ledger; attribute order is canonicalized here."""
    issuer_did = derive_did(issuer.public_key)
    ledger.resolve_did(issuer_did, reader_did=issuer_did)
    schema = make_schema(issuer_did, name, version, attribute_names)
    try:
        ledger.lookup_schema(schema.schema_id, reader_did=issuer_did)
    except UnknownSchema:
        pass
    else:
        raise DuplicateSchema(f"schema {schema.schema_id.hex()} already anchored")
    tx = DefineSchema(
        schema=schema,
        submitter_signature=sign(issuer.private_key, define_schema_payload(schema)),
    )
    ledger.submit([tx])
    return schema


def issue_credential(issuer: KeyPair, holder_did, schema: CredentialSchema, values: dict,
                     ledger: Ledger, rng=None, clock: LogicalClock | None = None) -> Credential:
    """Issue to a registered holder and anchor the commitment root."""
    issuer_did = derive_did(issuer.public_key)
    if schema.issuer_did != issuer_did:
        raise NotSchemaOwner(f"schema belongs to {schema.issuer_did}, not {issuer_did}")
    ledger.resolve_did(issuer_did, reader_did=issuer_did)
    ledger.resolve_did(holder_did, reader_did=issuer_did)
    rng = rng or SystemRng()
    clock = clock or ledger.clock
    credential = build_credential(issuer, holder_did, schema, values, rng,
                                  issuance_time=clock.tick())
    tx = AnchorCredential(
        credential_id=credential.credential_id,
        issuer_did=issuer_did,
        commitment_root=credential.commitment_root,
        submitter_signature=sign(
            issuer.private_key,
            anchor_credential_payload(credential.credential_id, issuer_did,
                                      credential.commitment_root),
        ),
    )
    ledger.submit([tx])
    return credential


def verify_presentation(ledger: Ledger, presentation: Presentation,
                        expected_challenge: bytes, reader_did=None) -> VerificationReport:
    """Check a presentation against the registry; failures land in the report."""
    checks = []

    anchor = ledger.credential_anchor(presentation.credential_id, reader_did=reader_did)
    root = anchor.commitment_root if anchor is not None else None

    schema_known = False
    try:
        schema = ledger.lookup_schema(presentation.schema_id, reader_did=reader_did)
        revealed_names = {r.name for r in presentation.revealed}
        schema_known = revealed_names <= set(schema.attribute_names)
    except UnknownSchema:
        schema_known = False
    checks.append(("schema_known", schema_known))

    status = ledger.credential_status(presentation.credential_id, reader_did=reader_did)
    checks.append(("status_active", status is CredentialStatus.ACTIVE))

    issuer_ok = False
    if root is not None:
        try:
            issuer_doc = ledger.resolve_did(presentation.issuer_did, reader_did=reader_did)
            issuer_ok = verify(
                issuer_doc.verification_key,
                credential_signing_payload(
                    presentation.credential_id, presentation.schema_id,
                    presentation.issuer_did, presentation.holder_did,
                    root, presentation.issuance_time,
                ),
                presentation.issuer_signature,
            )
        except UnknownDid:
            issuer_ok = False
    checks.append(("issuer_signature", issuer_ok))

    checks.append(("merkle_proofs",
                   root is not None and revealed_proofs_ok(presentation, root)))

    checks.append(("challenge_match", presentation.challenge == expected_challenge))

    holder_ok = False
    try:
        holder_doc = ledger.resolve_did(presentation.holder_did, reader_did=reader_did)
        holder_ok = verify(
            holder_doc.verification_key,
            presentation_signing_payload(
                presentation.credential_id,
                revealed_set_hash(presentation.revealed),
                expected_challenge,
            ),
            presentation.holder_signature,
        )
    except UnknownDid:
        holder_ok = False
    checks.append(("holder_signature", holder_ok))

    return VerificationReport(checks=tuple(checks))


def revoke_credential(issuer: KeyPair, credential_id: bytes, ledger: Ledger) -> None:
    """Permanently flip the credential to Revoked; only the anchoring issuer may."""
    issuer_did = derive_did(issuer.public_key)
    anchor = ledger.credential_anchor(credential_id, reader_did=issuer_did)
    if anchor is None:
        raise UnknownCredential(f"credential {credential_id.hex()} was never anchored")
    if anchor.issuer_did != issuer_did:
        raise NotIssuer(f"{issuer_did} did not anchor this credential")
    if ledger.credential_status(credential_id, reader_did=issuer_did) is CredentialStatus.REVOKED:
        raise UnknownTransition("credential is already revoked")
    tx = Revoke(
        credential_id=credential_id,
        issuer_did=issuer_did,
        submitter_signature=sign(issuer.private_key,
                                 revoke_payload(credential_id, issuer_did)),
    )
    ledger.submit([tx])


def tamper_check(credential: Credential, ledger: Ledger, reader_did=None) -> bool:
    """True iff commitments recompute and the issuer signature verifies."""
    if not credential_commitments_ok(credential):
        return False
    try:
        issuer_doc = ledger.resolve_did(credential.issuer_did, reader_did=reader_did)
    except UnknownDid:
        return False
    return verify(issuer_doc.verification_key, credential.signing_payload(),
                  credential.issuer_signature)
