"""credveil: privacy-preserving, Sybil-resistant, recoverable credentials.

A protocol library plus a deterministic multi-actor simulator: selective
disclosure of claims, hidden-identifier registry membership, revocation via
one-time nullifiers, associated-identifier Sybil resistance, and key
recovery through association ownership.
"""

from .params import DEFAULT_PARAMS, ProtocolParams
from .claims import Claim, EnumTable
from .credential import Credential, load_credential, save_credential
from .engine import (
    PresentationBundle,
    issue_credential,
    present,
    refresh_revocation_nullifier,
    verify_presentation,
)
from .issuer import IssuerLedger
from .campaign import (
    Campaign,
    check_association,
    check_credential_uniqueness,
    open_campaign,
)
from .merkle import MerkleProof, MerkleTree, RootWindow, verify_membership
from .nizk import Proof, ReferenceString, RelationDescriptor, prove, setup, verify
from .primitives import KeyPair, Signature, keygen, sign, verify_sign
from .relations import REGISTRY
from .vdr import RegistryState
from .wallet import AssociationRecord, Wallet
from .harness import Simulation, load_script, replay, run_scenario

__all__ = [
    "AssociationRecord",
    "Campaign",
    "Claim",
    "Credential",
    "DEFAULT_PARAMS",
    "EnumTable",
    "IssuerLedger",
    "KeyPair",
    "MerkleProof",
    "MerkleTree",
    "PresentationBundle",
    "Proof",
    "ProtocolParams",
    "REGISTRY",
    "ReferenceString",
    "RegistryState",
    "RelationDescriptor",
    "RootWindow",
    "Signature",
    "Simulation",
    "Wallet",
    "check_association",
    "check_credential_uniqueness",
    "issue_credential",
    "keygen",
    "load_credential",
    "load_script",
    "open_campaign",
    "present",
    "prove",
    "refresh_revocation_nullifier",
    "replay",
    "run_scenario",
    "save_credential",
    "setup",
    "sign",
    "verify",
    "verify_membership",
    "verify_presentation",
    "verify_sign",
]

__version__ = "0.1.0"
