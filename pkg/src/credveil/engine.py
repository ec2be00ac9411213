"""Issuance, presentation, and revocation-state refresh.

A presentation is a bundle of three proofs sharing one credential commitment
c_c: selective disclosure over one claim (with the issuer signature and the
holder key possession clauses), membership of the holder's identity record in
the registry, and unrevoked status against the issuer's revocation tree.  The
public transcript never contains claim values, the holder identifier, or the
holder public key; freshness comes from new commitment randomness per call.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .credential import Credential, order_claims, record_digest
from .errors import (
    ChallengeMismatch,
    InvalidInput,
    IssuanceAuditError,
    Revoked,
    StaleRoot,
)
from .issuer import IssuerLedger
from .merkle import verify_membership
from .nizk import Proof, prove, setup, verify
from .params import ProtocolParams
from .primitives import KeyPair, commit, pk_limbs, sign, verify_sign, signature_digest
from .relations import (
    REGISTRY,
    campaign_cred_nullifier,
    identity_leaf,
    proof_to_obj,
    revocation_leaf,
    revocation_nullifier,
)
from .vdr import RegistryState


def _prove(params: ProtocolParams, label: str, statement: dict, witness: dict) -> Proof:
    return prove(params, REGISTRY, setup(REGISTRY, label), statement, witness)


def _verify(params, label, statement, proof, verifier_witness=None) -> bool:
    return verify(params, REGISTRY, setup(REGISTRY, label), statement, proof,
                  verifier_witness)


# --- issuance ---------------------------------------------------------------


def issue_credential(
    params: ProtocolParams,
    issuer_keys: KeyPair,
    issuer_id: int,
    holder_id: int,
    claims,
    ledger: IssuerLedger,
    rng: random.Random,
):
    """Sign a credential and record its revocation leaf.  Returns
    (credential, u_rv); the holder audits both before accepting."""
    ordered = order_claims(params, claims)
    digest = record_digest(params, {
        "issuer_id": issuer_id,
        "holder_id": holder_id,
        "claims": [{"key": c.key, "kind": c.kind, "value": c.value}
                   for c in ordered],
    })
    cred = Credential(
        issuer_id=issuer_id,
        holder_id=holder_id,
        claims=ordered,
        signature=sign(params, issuer_keys.sk, digest),
    )
    u_rv = rng.randrange(params.prime)
    h_rv = revocation_leaf(params, digest, u_rv)
    index = len(ledger.tree)
    root = ledger.record_issuance(h_rv)
    # holder-side audit: the recorded leaf is exactly h1([digest, u_rv])
    if not verify_sign(params, issuer_keys.pk, cred.signature, digest):
        raise IssuanceAuditError("issuer signature does not verify")
    proof = ledger.tree.prove(index)
    if ledger.tree.leaves[index] != h_rv or not verify_membership(
        params, root, h_rv, proof
    ):
        raise IssuanceAuditError("ledger recorded a mismatching revocation leaf")
    return cred, u_rv


# --- presentation -----------------------------------------------------------


@dataclass(frozen=True)
class PresentationBundle:
    pi_c: Proof
    pi_id: Proof
    pi_rv: Proof
    #: campaign-uniqueness proof sharing the same c_c, when presenting
    #: into a Sybil-sensitive campaign
    pi_s: Proof | None = None

    def transcript(self) -> dict:
        """All public slots, the only surface privacy tests inspect."""
        out = {
            "pi_c": dict(self.pi_c.statement),
            "pi_id": dict(self.pi_id.statement),
            "pi_rv": dict(self.pi_rv.statement),
        }
        if self.pi_s is not None:
            out["pi_s"] = dict(self.pi_s.statement)
        return out


def present(
    params: ProtocolParams,
    cred: Credential,
    u_rv: int,
    holder_id: int,
    holder_keys: KeyPair,
    claim_key: str,
    predicate_obj: dict,
    vdr: RegistryState,
    issuer_ledger: IssuerLedger,
    rng: random.Random,
    challenge: int | None = None,
    verifier_pk: int | None = None,
    mask_signature: bool = False,
    campaign=None,
) -> PresentationBundle:
    """Build the three-proof bundle for one claim under one predicate."""
    record = cred.record(params)
    digest = cred.digest(params)
    cred.claim(claim_key)  # NotFound on unknown key
    n_rv = revocation_nullifier(params, digest, u_rv)
    if issuer_ledger.nullifier_seen(n_rv):
        raise Revoked("credential revocation state consumed")

    u_c = rng.randrange(params.prime)
    u_id = rng.randrange(params.prime)
    c_c = commit(params, digest, u_c).value
    c_id = commit(params, holder_id, u_id).value
    pk_h = list(pk_limbs(params, holder_keys.pk))
    issuer_pk = vdr.public_key_of(cred.issuer_id)

    stmt_c = {
        "c_c": c_c,
        "id_i": cred.issuer_id,
        "pk_i": list(pk_limbs(params, issuer_pk)),
        "phi": predicate_obj,
        "claim_key": claim_key,
    }
    wit_c = {
        "cred": record,
        "u_c": u_c,
        "id_h": holder_id,
        "pk_h": pk_h,
        "sk_h": holder_keys.sk,
    }
    if (challenge is None) == (verifier_pk is None):
        raise InvalidInput("exactly one of challenge or verifier key required")
    if challenge is not None:
        stmt_c["e_c"] = challenge
    else:
        stmt_c["pk_v"] = list(pk_limbs(params, verifier_pk))
    if mask_signature:
        u_sigma = rng.randrange(params.prime)
        stmt_c["c_sigma"] = commit(
            params, signature_digest(params, cred.signature), u_sigma
        ).value
        wit_c["sigma_w"] = [cred.signature.e, cred.signature.s]
        wit_c["u_sigma"] = u_sigma
    else:
        stmt_c["sigma"] = [cred.signature.e, cred.signature.s]
    pi_c = _prove(params, "REL_SELECTIVE_DISCLOSURE", stmt_c, wit_c)

    stmt_id = {
        "r_id": vdr.identity_tree.root,
        "c_id": c_id,
        "u_id": u_id,
        "c_c": c_c,
    }
    wit_id = {
        "cred": record,
        "u_c": u_c,
        "id_h": holder_id,
        "pk_h": pk_h,
        "sk_h": holder_keys.sk,
        "v_id": identity_leaf(params, holder_id, holder_keys.pk),
        "rho_id": proof_to_obj(vdr.identity_proof(holder_id)),
    }
    pi_id = _prove(params, "REL_VDR_MEMBERSHIP", stmt_id, wit_id)

    h_rv = revocation_leaf(params, digest, u_rv)
    stmt_rv = {"r_rv": issuer_ledger.tree.root, "n_rv": n_rv, "c_c": c_c}
    wit_rv = {
        "cred": record,
        "u_c": u_c,
        "u_rv": u_rv,
        "h_rv": h_rv,
        "rho_rv": proof_to_obj(issuer_ledger.revocation_proof(h_rv)),
    }
    pi_rv = _prove(params, "REL_CRED_VALIDITY", stmt_rv, wit_rv)

    pi_s = None
    if campaign is not None:
        stmt_s = {
            "id_v": campaign.verifier_id,
            "n_s": campaign_cred_nullifier(
                params, digest, holder_keys.sk, campaign.id_eps
            ),
            "id_eps": campaign.id_eps,
            "c_c": c_c,
        }
        wit_s = {"cred": record, "u_c": u_c, "sk_h": holder_keys.sk}
        pi_s = _prove(params, "REL_CAMPAIGN_NULLIFIER", stmt_s, wit_s)
    return PresentationBundle(pi_c=pi_c, pi_id=pi_id, pi_rv=pi_rv, pi_s=pi_s)


def verify_presentation(
    params: ProtocolParams,
    bundle: PresentationBundle,
    vdr: RegistryState,
    issuer_ledger: IssuerLedger,
    challenge: int | None = None,
    verifier_sk: int | None = None,
) -> bool:
    """Window, nullifier, challenge, and proof checks; issuer key from VDR."""
    stmt_c = bundle.pi_c.statement
    stmt_id = bundle.pi_id.statement
    stmt_rv = bundle.pi_rv.statement
    if not (stmt_c.get("c_c") == stmt_id.get("c_c") == stmt_rv.get("c_c")):
        return False
    if "e_c" in stmt_c and stmt_c["e_c"] != challenge:
        raise ChallengeMismatch("presentation bound to a different challenge")
    if not vdr.identity_window.accepts(stmt_id.get("r_id")):
        raise StaleRoot("identity root not recent")
    if not issuer_ledger.window.accepts(stmt_rv.get("r_rv")):
        raise StaleRoot("revocation root not recent")
    if issuer_ledger.nullifier_seen(stmt_rv["n_rv"]):
        raise Revoked("credential revocation state consumed")
    try:
        issuer_pk = vdr.public_key_of(stmt_c["id_i"])
    except Exception:
        return False
    if stmt_c.get("pk_i") != list(pk_limbs(params, issuer_pk)):
        return False
    verifier_witness = {}
    if "pk_v" in stmt_c:
        if verifier_sk is None:
            return False
        verifier_witness = {"sk_v": verifier_sk}
    return (
        _verify(params, "REL_SELECTIVE_DISCLOSURE", stmt_c, bundle.pi_c,
                verifier_witness)
        and _verify(params, "REL_VDR_MEMBERSHIP", stmt_id, bundle.pi_id)
        and _verify(params, "REL_CRED_VALIDITY", stmt_rv, bundle.pi_rv)
    )


# --- revocation-state refresh ----------------------------------------------


def refresh_revocation_nullifier(
    params: ProtocolParams,
    cred: Credential,
    u_rv: int,
    issuer_ledger: IssuerLedger,
    rng: random.Random,
) -> int:
    """Rotate (h_rv, n_rv) to a fresh opening; returns the new u_rv."""
    digest = cred.digest(params)
    u_rv_new = rng.randrange(params.prime)
    h_rv = revocation_leaf(params, digest, u_rv)
    statement = {
        "r_rv": issuer_ledger.tree.root,
        "n_rv": revocation_nullifier(params, digest, u_rv),
        "h_rv_new": revocation_leaf(params, digest, u_rv_new),
        "n_rv_new": revocation_nullifier(params, digest, u_rv_new),
    }
    witness = {
        "cred": cred.record(params),
        "u_rv": u_rv,
        "u_rv_new": u_rv_new,
        "h_rv": h_rv,
        "rho_rv": proof_to_obj(issuer_ledger.revocation_proof(h_rv)),
    }
    proof = _prove(params, "REL_NULLIFIER_UPDATE", statement, witness)
    issuer_ledger.accept_nullifier_refresh(proof)
    return u_rv_new
