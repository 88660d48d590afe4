"""Desk-scale self-sovereign identity stack with a PKI baseline.

Modules:
    identity     keys, DIDs, DID documents, signatures, encrypted envelopes
    ledger       hash-chained permissioned registry (the verifiable data registry)
    credentials  schemas, credentials, selective-disclosure presentations
    engine       issuer/holder/verifier operations against the ledger
    wallet       persistent wallet files
    agents       in-process agent message bus and DID-Auth
    pki          CA/RA/VA baseline and the compromise harness
    scenarios    end-to-end healthcare and government flows
    cli          command-line interface
"""

from .credentials import (
    Credential,
    CredentialSchema,
    Presentation,
    VerificationReport,
    create_presentation,
)
from .engine import (
    define_schema,
    issue_credential,
    revoke_credential,
    tamper_check,
    verify_presentation,
)
from .identity import (
    Did,
    DidDocument,
    Envelope,
    KeyPair,
    decrypt,
    derive_did,
    encrypt_for,
    generate_keypair,
    make_did_document,
    sign,
    verify,
)
from .ledger import (
    AnchorCredential,
    ChainReport,
    CredentialStatus,
    DefineSchema,
    Ledger,
    LedgerBlock,
    LedgerMode,
    RegisterDid,
    Revoke,
)
from .pki import (
    CaHierarchy,
    Certificate,
    CompromiseConfig,
    CompromiseReport,
    Csr,
    build_hierarchy,
    ca_issue,
    make_csr,
    ra_approve,
    run_compromise_experiment,
    submit_csr,
    verify_certificate,
)
from .runtime import DeterministicRng, LogicalClock, SystemRng
from .scenarios import (
    GovernmentConfig,
    HealthcareConfig,
    ScenarioTranscript,
    run_government_scenario,
    run_healthcare_scenario,
)
from .wallet import Wallet, wallet_create, wallet_load, wallet_save

__version__ = "0.1.0"
