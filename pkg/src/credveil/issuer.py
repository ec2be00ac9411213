"""Per-issuer revocation contract state.

Holds the revocation Merkle tree of h_rv leaves, the consumed-nullifier
bucket, and the recent-root window.  All mutating endpoints validate first
and touch state last, so a rejected request leaves the ledger bit-identical
(asserted via :meth:`state_digest`).
"""

from __future__ import annotations

from .errors import NotFound, Revoked, StaleRoot, Unauthorized, UnsatisfiedRelation
from .hashing import Site, h1
from .merkle import MerkleTree, RootWindow
from .nizk import Proof, setup, verify
from .params import ProtocolParams
from .relations import REGISTRY, revocation_nullifier


class IssuerLedger:
    def __init__(self, params: ProtocolParams, issuer_id: int):
        self.params = params
        self.issuer_id = issuer_id
        self.tree = MerkleTree(params)
        self.window = RootWindow(params.root_window)
        self.window.push(self.tree.root)
        self.nullifiers: set[int] = set()

    def record_issuance(self, h_rv: int) -> int:
        root = self.tree.append(h_rv)
        self.window.push(root)
        return root

    def revoke(self, acting_issuer: int, cred_digest: int, u_rv: int) -> None:
        """Issuer-only; idempotent insert of the revocation nullifier."""
        if acting_issuer != self.issuer_id:
            raise Unauthorized("only the owning issuer may revoke")
        self.nullifiers.add(revocation_nullifier(self.params, cred_digest, u_rv))

    def revocation_proof(self, h_rv: int):
        """Membership proof for a recorded revocation leaf."""
        try:
            index = self.tree.leaves.index(h_rv)
        except ValueError:
            raise NotFound("revocation leaf not recorded") from None
        return self.tree.prove(index)

    def nullifier_seen(self, n_rv: int) -> bool:
        return n_rv in self.nullifiers

    def accept_nullifier_refresh(self, proof: Proof) -> int:
        """Consume the old n_rv and append the holder's new h'_rv leaf."""
        stmt = proof.statement
        if not self.window.accepts(stmt.get("r_rv")):
            raise StaleRoot("revocation root not recent")
        if stmt["n_rv"] in self.nullifiers:
            raise Revoked("revocation nullifier already consumed")
        rs = setup(REGISTRY, "REL_NULLIFIER_UPDATE")
        if not verify(self.params, REGISTRY, rs, stmt, proof):
            raise UnsatisfiedRelation("nullifier refresh proof rejected")
        # checks done; mutate atomically
        self.nullifiers.add(stmt["n_rv"])
        root = self.tree.append(stmt["h_rv_new"])
        self.window.push(root)
        return root

    def state_digest(self) -> int:
        inputs = [self.issuer_id, self.tree.root, len(self.tree)]
        inputs.extend(sorted(self.nullifiers))
        return h1(self.params, inputs, Site.STATE)

    def stats(self) -> dict:
        return {"leaves": len(self.tree), "nullifiers": len(self.nullifiers)}
