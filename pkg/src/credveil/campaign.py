"""Verifier-side Sybil-resistance state.

A campaign owns a fresh identifier id_eps and two monotone nullifier sets:
n_s (one acceptance per credential-and-holder-key) and n_ae (one acceptance
per associated identifier set).  Association checks also consult the VDR's
blocked bucket and its live association-nullifier bucket, so superseded or
blocked identifiers are rejected here even with a valid proof.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import (
    Blocked,
    DuplicateNullifier,
    StaleAssociation,
    StaleRoot,
    UnsatisfiedRelation,
)
from .hashing import Site, h1
from .nizk import Proof, setup, verify
from .params import ProtocolParams
from .relations import REGISTRY
from .vdr import RegistryState


@dataclass
class Campaign:
    id_eps: int
    verifier_id: int
    consumed_n_s: set = field(default_factory=set)
    consumed_n_ae: set = field(default_factory=set)

    def state_digest(self, params: ProtocolParams) -> int:
        inputs = [self.id_eps, self.verifier_id,
                  len(self.consumed_n_s), len(self.consumed_n_ae)]
        inputs.extend(sorted(self.consumed_n_s))
        inputs.extend(sorted(self.consumed_n_ae))
        return h1(params, inputs, Site.STATE)

    def stats(self) -> dict:
        return {"n_s": len(self.consumed_n_s), "n_ae": len(self.consumed_n_ae)}


def open_campaign(
    params: ProtocolParams, verifier_id: int, rng: random.Random
) -> Campaign:
    return Campaign(id_eps=rng.randrange(params.prime), verifier_id=verifier_id)


def check_credential_uniqueness(
    params: ProtocolParams, campaign: Campaign, proof: Proof
) -> bool:
    """One acceptance per (credential, holder key) per campaign."""
    stmt = proof.statement
    if stmt.get("id_eps") != campaign.id_eps:
        raise UnsatisfiedRelation("proof targets a different campaign")
    if stmt.get("id_v") != campaign.verifier_id:
        raise UnsatisfiedRelation("credential issued by a different party")
    rs = setup(REGISTRY, "REL_CAMPAIGN_NULLIFIER")
    if not verify(params, REGISTRY, rs, stmt, proof):
        raise UnsatisfiedRelation("campaign nullifier proof rejected")
    if stmt["n_s"] in campaign.consumed_n_s:
        raise DuplicateNullifier("credential already used in this campaign")
    campaign.consumed_n_s.add(stmt["n_s"])
    return True


def check_association(
    params: ProtocolParams,
    campaign: Campaign,
    vdr: RegistryState,
    proof: Proof,
) -> bool:
    """One acceptance per associated identifier set per campaign."""
    stmt = proof.statement
    if stmt.get("id_eps") != campaign.id_eps:
        raise UnsatisfiedRelation("proof targets a different campaign")
    if not vdr.association_window.accepts(stmt.get("r_a")):
        raise StaleRoot("association root not recent")
    if stmt["n_a"] in vdr.blocked:
        raise Blocked("associated identifier blocked")
    if stmt["n_a"] in vdr.association_nullifiers:
        raise StaleAssociation("associated identifier superseded")
    rs = setup(REGISTRY, "REL_ID_PRESENT")
    if not verify(params, REGISTRY, rs, stmt, proof):
        raise UnsatisfiedRelation("association presentation proof rejected")
    if stmt["n_ae"] in campaign.consumed_n_ae:
        raise DuplicateNullifier("identifier set already used in this campaign")
    campaign.consumed_n_ae.add(stmt["n_ae"])
    return True
