"""Holder-side identity bookkeeping and proof construction.

The registry only ever sees hashes; everything needed to open them (member
identifier lists, association randomness u_a, secret keys) lives here.  Each
method builds the statement and witness for one registry endpoint, proves the
relation, and submits it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import NotFound
from .nizk import Proof, prove, setup
from .params import ProtocolParams
from .primitives import KeyPair, keygen, pk_limbs
from .relations import (
    REGISTRY,
    association_id,
    association_nullifier,
    campaign_assoc_nullifier,
    identity_leaf,
    proof_to_obj,
    registration_leaf,
    registration_nullifier,
)
from .vdr import RegistryState


@dataclass(frozen=True)
class AssociationRecord:
    """Holder-secret opening of one live id_a leaf."""

    ids: tuple
    u_a: int | None
    id_a: int

    @property
    def members(self) -> tuple:
        return self.ids


class Wallet:
    def __init__(self, params: ProtocolParams, rng: random.Random):
        self.params = params
        self.rng = rng
        self.keys: dict[int, KeyPair] = {}

    # --- identities ---------------------------------------------------------

    def create_identity(self) -> int:
        """Sample a fresh identifier with its key pair."""
        ident = self.rng.randrange(1, self.params.prime)
        self.keys[ident] = keygen(self.params, self.rng)
        return ident

    def keypair(self, ident: int) -> KeyPair:
        try:
            return self.keys[ident]
        except KeyError:
            raise NotFound("identifier not in wallet") from None

    def publish(self, vdr: RegistryState, ident: int) -> int:
        return vdr.publish_identifier(ident, self.keypair(ident).pk)

    # --- registration and association ---------------------------------------

    def _prove(self, label: str, statement: dict, witness: dict) -> Proof:
        return prove(self.params, REGISTRY, setup(REGISTRY, label),
                     statement, witness)

    def register(self, vdr: RegistryState, ident: int) -> Proof:
        kp = self.keypair(ident)
        statement = {
            "r_id": vdr.identity_tree.root,
            "h_id": registration_leaf(self.params, ident, kp.sk),
        }
        witness = {
            "id": ident,
            "pk": list(pk_limbs(self.params, kp.pk)),
            "sk": kp.sk,
            "v_id": identity_leaf(self.params, ident, kp.pk),
            "rho_id": proof_to_obj(vdr.identity_proof(ident)),
        }
        proof = self._prove("REL_ID_REGISTER", statement, witness)
        vdr.register_identifier(proof)
        return proof

    def _fresh_u_a(self) -> int | None:
        if self.params.randomized_association:
            return self.rng.randrange(self.params.prime)
        return None

    def associate(self, vdr: RegistryState, idents) -> AssociationRecord:
        idents = tuple(idents)
        sks = [self.keypair(i).sk for i in idents]
        u_a = self._fresh_u_a()
        id_a = association_id(self.params, idents, u_a)
        h_ids = [registration_leaf(self.params, i, sk)
                 for i, sk in zip(idents, sks)]
        statement = {
            "r_reg": vdr.registration_tree.root,
            "id_a": id_a,
            "n_regs": [registration_nullifier(self.params, i, sk)
                       for i, sk in zip(idents, sks)],
        }
        witness = {
            "ids": list(idents),
            "sks": sks,
            "h_ids": h_ids,
            "rho_regs": [proof_to_obj(vdr.registration_proof(h)) for h in h_ids],
        }
        if u_a is not None:
            witness["u_a"] = u_a
        vdr.associate(self._prove("REL_ID_ASSOCIATE", statement, witness))
        return AssociationRecord(ids=idents, u_a=u_a, id_a=id_a)

    def append(
        self, vdr: RegistryState, record: AssociationRecord, new_ident: int
    ) -> AssociationRecord:
        sk_new = self.keypair(new_ident).sk
        u_a_new = self._fresh_u_a()
        ids_new = record.ids + (new_ident,)
        id_a_new = association_id(self.params, ids_new, u_a_new)
        h_id_new = registration_leaf(self.params, new_ident, sk_new)
        statement = {
            "r_a": vdr.association_tree.root,
            "r_reg": vdr.registration_tree.root,
            "n_a": association_nullifier(self.params, record.ids, record.u_a),
            "id_a_new": id_a_new,
            "n_reg_new": registration_nullifier(self.params, new_ident, sk_new),
        }
        witness = {
            "id_a": record.id_a,
            "rho_a": proof_to_obj(vdr.association_proof(record.id_a)),
            "ids": list(record.ids),
            "id_new": new_ident,
            "sk_new": sk_new,
            "h_id_new": h_id_new,
            "rho_reg": proof_to_obj(vdr.registration_proof(h_id_new)),
        }
        if record.u_a is not None:
            witness["u_a"] = record.u_a
        if u_a_new is not None:
            witness["u_a_new"] = u_a_new
        vdr.append_identifier(self._prove("REL_ID_APPEND", statement, witness))
        return AssociationRecord(ids=ids_new, u_a=u_a_new, id_a=id_a_new)

    def aggregate(
        self,
        vdr: RegistryState,
        first: AssociationRecord,
        second: AssociationRecord,
    ) -> AssociationRecord:
        u_a_new = self._fresh_u_a()
        ids_new = first.ids + second.ids
        id_a_new = association_id(self.params, ids_new, u_a_new)
        statement = {
            "r_a": vdr.association_tree.root,
            "n_a_1": association_nullifier(self.params, first.ids, first.u_a),
            "n_a_2": association_nullifier(self.params, second.ids, second.u_a),
            "id_a_new": id_a_new,
        }
        witness = {
            "id_a_1": first.id_a,
            "id_a_2": second.id_a,
            "rho_a_1": proof_to_obj(vdr.association_proof(first.id_a)),
            "rho_a_2": proof_to_obj(vdr.association_proof(second.id_a)),
            "ids_1": list(first.ids),
            "ids_2": list(second.ids),
        }
        for slot, value in (("u_a_1", first.u_a), ("u_a_2", second.u_a),
                            ("u_a_new", u_a_new)):
            if value is not None:
                witness[slot] = value
        vdr.aggregate_identifiers(
            self._prove("REL_ID_AGGREGATE", statement, witness)
        )
        return AssociationRecord(ids=ids_new, u_a=u_a_new, id_a=id_a_new)

    def refresh_randomness(
        self, vdr: RegistryState, record: AssociationRecord
    ) -> AssociationRecord:
        u_a_new = self.rng.randrange(self.params.prime)
        id_a_new = association_id(self.params, record.ids, u_a_new)
        statement = {
            "r_a": vdr.association_tree.root,
            "n_a": association_nullifier(self.params, record.ids, record.u_a),
            "id_a_new": id_a_new,
        }
        witness = {
            "id_a": record.id_a,
            "rho_a": proof_to_obj(vdr.association_proof(record.id_a)),
            "ids": list(record.ids),
            "u_a": record.u_a,
            "u_a_new": u_a_new,
        }
        vdr.refresh_association_randomness(
            self._prove("REL_ASSOC_RAND_REFRESH", statement, witness)
        )
        return AssociationRecord(ids=record.ids, u_a=u_a_new, id_a=id_a_new)

    # --- key recovery --------------------------------------------------------

    def refresh_key(
        self, vdr: RegistryState, record: AssociationRecord, ident: int
    ) -> KeyPair:
        """Replace a (lost) key via ownership of the covering association."""
        kp_new = keygen(self.params, self.rng)
        randomized = self.params.randomized_association
        label = "REL_KEY_REFRESH_RAND" if randomized else "REL_KEY_REFRESH"
        statement = {
            "r_a": vdr.association_tree.root,
            "n_a": association_nullifier(self.params, record.ids, record.u_a),
            "n_reg_new": registration_nullifier(self.params, ident, kp_new.sk),
            "id": ident,
            "pk_new": list(pk_limbs(self.params, kp_new.pk)),
        }
        witness = {
            "id_a": record.id_a,
            "rho_a": proof_to_obj(vdr.association_proof(record.id_a)),
            "ids": list(record.ids),
            "sk_new": kp_new.sk,
        }
        if randomized:
            witness["u_a"] = record.u_a
        vdr.refresh_key(self._prove(label, statement, witness))
        self.keys[ident] = kp_new
        return kp_new

    # --- campaign participation ----------------------------------------------

    def present_association(
        self,
        vdr: RegistryState,
        record: AssociationRecord,
        ident: int,
        campaign,
    ) -> Proof:
        """Proof that ``ident`` belongs to a live id_a, for one campaign."""
        statement = {
            "r_a": vdr.association_tree.root,
            "n_ae": campaign_assoc_nullifier(self.params, record.ids,
                                             campaign.id_eps),
            "n_a": association_nullifier(self.params, record.ids, record.u_a),
            "id_h": ident,
            "id_eps": campaign.id_eps,
        }
        witness = {
            "id_a": record.id_a,
            "rho_a": proof_to_obj(vdr.association_proof(record.id_a)),
            "ids": list(record.ids),
        }
        if record.u_a is not None:
            witness["u_a"] = record.u_a
        return self._prove("REL_ID_PRESENT", statement, witness)
