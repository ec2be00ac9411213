"""The Verifiable Data Registry state machine.

Three trees and three buckets: the identity tree (public v_id leaves plus an
id -> pk record table), the registration tree (blinded h_id leaves, gated by
the n_reg bucket), and the association tree (id_a leaves, gated by the n_a
bucket).  A separate blocked bucket supports accountability blocking.  Every
mutating endpoint validates first and mutates last; rejected requests leave
the registry state-digest identical.

Key refresh is the one non-append operation: it rewrites the identity leaf
for the refreshed id in place and resets the identity root window, so any
presentation bound to the old key's record immediately fails the recent-root
check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    AlreadyAssociated,
    Conflict,
    NotFound,
    StaleAssociation,
    StaleRoot,
    Unauthorized,
    UnsatisfiedRelation,
)
from .hashing import Site, h1
from .merkle import MerkleProof, MerkleTree, RootWindow
from .nizk import Proof, setup, verify
from .params import ProtocolParams
from .relations import REGISTRY, identity_leaf


@dataclass(frozen=True)
class RegistrySnapshot:
    """Verifier-facing view: recent roots and bucket copies."""

    r_id: int
    r_reg: int
    r_a: int
    identity_window: tuple
    registration_window: tuple
    association_window: tuple
    association_nullifiers: frozenset
    blocked: frozenset


class RegistryState:
    def __init__(self, params: ProtocolParams):
        self.params = params
        self.identity_tree = MerkleTree(params)
        self.registration_tree = MerkleTree(params)
        self.association_tree = MerkleTree(params)
        self.identity_window = RootWindow(params.root_window)
        self.registration_window = RootWindow(params.root_window)
        self.association_window = RootWindow(params.root_window)
        for tree, window in (
            (self.identity_tree, self.identity_window),
            (self.registration_tree, self.registration_window),
            (self.association_tree, self.association_window),
        ):
            window.push(tree.root)
        #: id -> (pk, identity-tree leaf index)
        self.records: dict[int, tuple[int, int]] = {}
        self.registration_nullifiers: set[int] = set()
        self.association_nullifiers: set[int] = set()
        self.blocked: set[int] = set()

    # --- identity records ---------------------------------------------------

    def publish_identifier(self, ident: int, pk: int) -> int:
        if ident in self.records:
            raise Conflict("identifier already published")
        index = len(self.identity_tree)
        root = self.identity_tree.append(identity_leaf(self.params, ident, pk))
        self.records[ident] = (pk, index)
        self.identity_window.push(root)
        return root

    def public_key_of(self, ident: int) -> int:
        try:
            return self.records[ident][0]
        except KeyError:
            raise NotFound("identifier not published") from None

    def identity_proof(self, ident: int) -> MerkleProof:
        try:
            _, index = self.records[ident]
        except KeyError:
            raise NotFound("identifier not published") from None
        return self.identity_tree.prove(index)

    # --- registration (Phase 1) --------------------------------------------

    def register_identifier(self, proof: Proof) -> int:
        stmt = proof.statement
        if not self.identity_window.accepts(stmt.get("r_id")):
            raise StaleRoot("identity root not recent")
        rs = setup(REGISTRY, "REL_ID_REGISTER")
        if not verify(self.params, REGISTRY, rs, stmt, proof):
            raise UnsatisfiedRelation("registration proof rejected")
        root = self.registration_tree.append(stmt["h_id"])
        self.registration_window.push(root)
        return root

    def registration_proof(self, h_id: int) -> MerkleProof:
        try:
            index = self.registration_tree.leaves.index(h_id)
        except ValueError:
            raise NotFound("registration leaf not present") from None
        return self.registration_tree.prove(index)

    # --- association (Phase 2 and lifecycle) --------------------------------

    def associate(self, proof: Proof) -> int:
        stmt = proof.statement
        if not self.registration_window.accepts(stmt.get("r_reg")):
            raise StaleRoot("registration root not recent")
        for n_reg in stmt["n_regs"]:
            if n_reg in self.registration_nullifiers:
                raise AlreadyAssociated("identifier already associated")
        rs = setup(REGISTRY, "REL_ID_ASSOCIATE")
        if not verify(self.params, REGISTRY, rs, stmt, proof):
            raise UnsatisfiedRelation("association proof rejected")
        root = self.association_tree.append(stmt["id_a"])
        self.registration_nullifiers.update(stmt["n_regs"])
        self.association_window.push(root)
        return root

    def association_proof(self, id_a: int) -> MerkleProof:
        try:
            index = self.association_tree.leaves.index(id_a)
        except ValueError:
            raise NotFound("associated identifier not present") from None
        return self.association_tree.prove(index)

    def append_identifier(self, proof: Proof) -> int:
        stmt = proof.statement
        if not self.association_window.accepts(stmt.get("r_a")):
            raise StaleRoot("association root not recent")
        if not self.registration_window.accepts(stmt.get("r_reg")):
            raise StaleRoot("registration root not recent")
        if stmt["n_a"] in self.association_nullifiers:
            raise StaleAssociation("associated identifier already superseded")
        if stmt["n_reg_new"] in self.registration_nullifiers:
            raise AlreadyAssociated("identifier already associated")
        rs = setup(REGISTRY, "REL_ID_APPEND")
        if not verify(self.params, REGISTRY, rs, stmt, proof):
            raise UnsatisfiedRelation("append proof rejected")
        root = self.association_tree.append(stmt["id_a_new"])
        self.association_nullifiers.add(stmt["n_a"])
        self.registration_nullifiers.add(stmt["n_reg_new"])
        self.association_window.push(root)
        return root

    def aggregate_identifiers(self, proof: Proof) -> int:
        stmt = proof.statement
        if not self.association_window.accepts(stmt.get("r_a")):
            raise StaleRoot("association root not recent")
        # in-transaction consumption: the degenerate self-aggregate trips here
        if stmt["n_a_1"] == stmt["n_a_2"]:
            raise StaleAssociation("second nullifier consumed in-transaction")
        for n_a in (stmt["n_a_1"], stmt["n_a_2"]):
            if n_a in self.association_nullifiers:
                raise StaleAssociation("associated identifier already superseded")
        rs = setup(REGISTRY, "REL_ID_AGGREGATE")
        if not verify(self.params, REGISTRY, rs, stmt, proof):
            raise UnsatisfiedRelation("aggregation proof rejected")
        root = self.association_tree.append(stmt["id_a_new"])
        self.association_nullifiers.update((stmt["n_a_1"], stmt["n_a_2"]))
        self.association_window.push(root)
        return root

    def refresh_association_randomness(self, proof: Proof) -> int:
        stmt = proof.statement
        if not self.association_window.accepts(stmt.get("r_a")):
            raise StaleRoot("association root not recent")
        if stmt["n_a"] in self.association_nullifiers:
            raise StaleAssociation("associated identifier already superseded")
        rs = setup(REGISTRY, "REL_ASSOC_RAND_REFRESH")
        if not verify(self.params, REGISTRY, rs, stmt, proof):
            raise UnsatisfiedRelation("randomness refresh proof rejected")
        root = self.association_tree.append(stmt["id_a_new"])
        self.association_nullifiers.add(stmt["n_a"])
        self.association_window.push(root)
        return root

    # --- key refresh (recovery) --------------------------------------------

    def refresh_key(self, proof: Proof) -> int:
        label = ("REL_KEY_REFRESH_RAND" if self.params.randomized_association
                 else "REL_KEY_REFRESH")
        stmt = proof.statement
        if not self.association_window.accepts(stmt.get("r_a")):
            raise StaleRoot("association root not recent")
        if stmt["n_a"] in self.association_nullifiers:
            raise StaleAssociation("associated identifier already superseded")
        if stmt["id"] not in self.records:
            raise NotFound("identifier not published")
        rs = setup(REGISTRY, label)
        if not verify(self.params, REGISTRY, rs, stmt, proof):
            raise UnsatisfiedRelation("key refresh proof rejected")
        pk_new = stmt["pk_new"][1] * self.params.prime + stmt["pk_new"][0]
        _, index = self.records[stmt["id"]]
        root = self.identity_tree.replace(
            index, identity_leaf(self.params, stmt["id"], pk_new)
        )
        self.records[stmt["id"]] = (pk_new, index)
        # the old record must stop verifying: only the new root is recent
        self.identity_window.reset_to(root)
        self.registration_nullifiers.add(stmt["n_reg_new"])
        # n_a deliberately NOT consumed: the association survives the refresh
        return root

    # --- accountability ------------------------------------------------------

    def block_associated_identifier(
        self, n_a: int, evidence: bytes, confirmed: bool
    ) -> None:
        if not confirmed:
            raise Unauthorized("blocking requires governance confirmation")
        self.blocked.add(n_a)

    # --- views ----------------------------------------------------------------

    def snapshot(self) -> RegistrySnapshot:
        return RegistrySnapshot(
            r_id=self.identity_tree.root,
            r_reg=self.registration_tree.root,
            r_a=self.association_tree.root,
            identity_window=self.identity_window.snapshot(),
            registration_window=self.registration_window.snapshot(),
            association_window=self.association_window.snapshot(),
            association_nullifiers=frozenset(self.association_nullifiers),
            blocked=frozenset(self.blocked),
        )

    def state_digest(self) -> int:
        inputs = [
            self.identity_tree.root,
            self.registration_tree.root,
            self.association_tree.root,
            len(self.identity_tree),
            len(self.registration_tree),
            len(self.association_tree),
        ]
        for ident in sorted(self.records):
            pk, index = self.records[ident]
            inputs.extend([ident, pk % self.params.prime,
                           pk // self.params.prime, index])
        for bucket in (self.registration_nullifiers,
                       self.association_nullifiers, self.blocked):
            inputs.append(len(bucket))
            inputs.extend(sorted(bucket))
        return h1(self.params, inputs, Site.STATE)

    def stats(self) -> dict:
        return {
            "identity_leaves": len(self.identity_tree),
            "registration_leaves": len(self.registration_tree),
            "association_leaves": len(self.association_tree),
            "registration_nullifiers": len(self.registration_nullifiers),
            "association_nullifiers": len(self.association_nullifiers),
            "blocked": len(self.blocked),
        }
