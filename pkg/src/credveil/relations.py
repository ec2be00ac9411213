"""The registered protocol relations and their hash-derived values.

Every ledger object is a hash of secrets: identity leaves v_id, registration
leaves h_id, associated identifiers id_a, and the nullifiers n_reg, n_a,
n_ae, n_rv, n_s.  This module defines those derivations once and registers
one :class:`RelationDescriptor` per provable statement.  Slot values are
JSON-native: field elements as ints, group elements as two-limb lists,
Merkle proofs as {"index", "siblings"} objects, credentials as plain records.
"""

from __future__ import annotations

from .claims import Claim, predicate_from_obj
from .credential import record_digest
from .hashing import Site, h1
from .merkle import MerkleProof, verify_membership
from .nizk import RelationDescriptor, RelationRegistry
from .params import ProtocolParams
from .primitives import (
    Signature,
    commit,
    pk_from_limbs,
    pubkey_of,
    signature_digest,
    verify_sign,
)

# --- hash-derived ledger values --------------------------------------------


def identity_leaf(params: ProtocolParams, ident: int, pk: int) -> int:
    """v_id, the public identity-tree leaf binding id to its current pk."""
    lo, hi = pk % params.prime, pk // params.prime
    return h1(params, [ident, lo, hi], Site.IDENTITY)


def registration_leaf(params: ProtocolParams, ident: int, sk: int) -> int:
    """h_id, proving registration without exposing the identifier."""
    return h1(params, [ident, sk], Site.REGISTRATION)


def registration_nullifier(params: ProtocolParams, ident: int, sk: int) -> int:
    """n_reg, consumed when the identifier joins an association."""
    return h1(params, [ident, sk, 1], Site.REGISTRATION)


def association_id(params: ProtocolParams, idents, u_a: int | None) -> int:
    """id_a over the member identifiers, with optional refresh randomness."""
    extra = [] if u_a is None else [u_a]
    return h1(params, list(idents) + extra, Site.ASSOCIATION)


def association_nullifier(params: ProtocolParams, idents, u_a: int | None) -> int:
    """n_a, consumed when an id_a is superseded (append/aggregate/refresh)."""
    extra = [] if u_a is None else [u_a]
    return h1(params, list(idents) + extra + [1], Site.ASSOCIATION)


def campaign_assoc_nullifier(params: ProtocolParams, idents, id_eps: int) -> int:
    """n_ae, one per (member set, campaign); independent of u_a by design so
    refreshing randomness cannot buy a second participation."""
    return h1(params, list(idents) + [id_eps], Site.ASSOCIATION)


def campaign_cred_nullifier(
    params: ProtocolParams, cred_digest: int, sk_h: int, id_eps: int
) -> int:
    """n_s, one per (credential, holder key, campaign)."""
    return h1(params, [cred_digest, sk_h, id_eps], Site.CAMPAIGN)


def revocation_leaf(params: ProtocolParams, cred_digest: int, u_rv: int) -> int:
    """h_rv, the issuer-tree leaf recorded at issuance or refresh."""
    return h1(params, [cred_digest, u_rv], Site.REVOCATION)


def revocation_nullifier(params: ProtocolParams, cred_digest: int, u_rv: int) -> int:
    """n_rv, revealed at presentation; its consumption revokes the state."""
    return h1(params, [cred_digest, u_rv, 1], Site.REVOCATION)


# --- slot plumbing ----------------------------------------------------------


def proof_to_obj(proof: MerkleProof) -> dict:
    return {"index": proof.index, "siblings": list(proof.siblings)}


def proof_from_obj(obj: dict) -> MerkleProof:
    return MerkleProof(index=int(obj["index"]),
                       siblings=tuple(int(s) for s in obj["siblings"]))


def _open(params, message, commitment, opening) -> bool:
    return commit(params, message, opening).value == commitment


def _member(params, root, leaf, proof_obj) -> bool:
    return verify_membership(params, root, leaf, proof_from_obj(proof_obj))


def _pk_matches(params, limbs, sk) -> bool:
    return pk_from_limbs(params, *limbs) == pubkey_of(params, sk)


def _holder_clauses(params, record, wit) -> bool:
    """Holder key possession bound into the committed credential."""
    return (
        _pk_matches(params, wit["pk_h"], wit["sk_h"])
        and record["holder_id"] == wit["id_h"]
    )


# --- relation predicates ----------------------------------------------------


def _selective_disclosure(params, stmt, wit, ver) -> bool:
    record = wit["cred"]
    digest = record_digest(params, record)
    if not _open(params, digest, stmt["c_c"], wit["u_c"]):
        return False
    if not _holder_clauses(params, record, wit):
        return False
    # exactly one non-forwardability binder: verifier challenge or verifier key
    if ("e_c" in stmt) == ("pk_v" in stmt):
        return False
    if "pk_v" in stmt and "sk_v" in ver:
        if not _pk_matches(params, stmt["pk_v"], ver["sk_v"]):
            return False
    # issuer signature, public or masked behind its own commitment
    if "sigma" in stmt:
        if "c_sigma" in stmt:
            return False
        sig = Signature(e=stmt["sigma"][0], s=stmt["sigma"][1])
    else:
        if "c_sigma" not in stmt:
            return False
        sig = Signature(e=wit["sigma_w"][0], s=wit["sigma_w"][1])
        if not _open(params, signature_digest(params, sig),
                     stmt["c_sigma"], wit["u_sigma"]):
            return False
    if record["issuer_id"] != stmt["id_i"]:
        return False
    if not verify_sign(params, pk_from_limbs(params, *stmt["pk_i"]), sig, digest):
        return False
    for c in record["claims"]:
        if c["key"] == stmt["claim_key"]:
            claim = Claim(key=c["key"], kind=c["kind"], value=c["value"])
            return predicate_from_obj(stmt["phi"]).evaluate(params, claim)
    return False


def _holder_id(params, stmt, wit, ver) -> bool:
    record = wit["cred"]
    return _open(
        params, record_digest(params, record), stmt["c_c"], wit["u_c"]
    ) and _holder_clauses(params, record, wit)


def _vdr_membership(params, stmt, wit, ver) -> bool:
    record = wit["cred"]
    pk = pk_from_limbs(params, *wit["pk_h"])
    return (
        _open(params, record_digest(params, record), stmt["c_c"], wit["u_c"])
        and _holder_clauses(params, record, wit)
        and _open(params, wit["id_h"], stmt["c_id"], stmt["u_id"])
        and wit["v_id"] == identity_leaf(params, wit["id_h"], pk)
        and _member(params, stmt["r_id"], wit["v_id"], wit["rho_id"])
    )


def _verifier_key(params, stmt, wit, ver) -> bool:
    if "sk_v" not in ver:
        return True  # prover side cannot check the verifier's secret
    return _pk_matches(params, stmt["pk_v"], ver["sk_v"])


def _cred_validity(params, stmt, wit, ver) -> bool:
    digest = record_digest(params, wit["cred"])
    return (
        _open(params, digest, stmt["c_c"], wit["u_c"])
        and wit["h_rv"] == revocation_leaf(params, digest, wit["u_rv"])
        and stmt["n_rv"] == revocation_nullifier(params, digest, wit["u_rv"])
        and _member(params, stmt["r_rv"], wit["h_rv"], wit["rho_rv"])
    )


def _campaign_nullifier(params, stmt, wit, ver) -> bool:
    record = wit["cred"]
    digest = record_digest(params, record)
    return (
        _open(params, digest, stmt["c_c"], wit["u_c"])
        and record["issuer_id"] == stmt["id_v"]
        and stmt["n_s"]
        == campaign_cred_nullifier(params, digest, wit["sk_h"], stmt["id_eps"])
    )


def _id_register(params, stmt, wit, ver) -> bool:
    pk = pk_from_limbs(params, *wit["pk"])
    return (
        _pk_matches(params, wit["pk"], wit["sk"])
        and wit["v_id"] == identity_leaf(params, wit["id"], pk)
        and _member(params, stmt["r_id"], wit["v_id"], wit["rho_id"])
        and stmt["h_id"] == registration_leaf(params, wit["id"], wit["sk"])
    )


def _id_associate(params, stmt, wit, ver) -> bool:
    ids, sks = wit["ids"], wit["sks"]
    h_ids, rhos = wit["h_ids"], wit["rho_regs"]
    if not ids or not len(ids) == len(sks) == len(h_ids) == len(rhos) == len(
        stmt["n_regs"]
    ):
        return False
    if stmt["id_a"] != association_id(params, ids, wit.get("u_a")):
        return False
    for ident, sk, h_id, rho, n_reg in zip(ids, sks, h_ids, rhos, stmt["n_regs"]):
        if h_id != registration_leaf(params, ident, sk):
            return False
        if not _member(params, stmt["r_reg"], h_id, rho):
            return False
        if n_reg != registration_nullifier(params, ident, sk):
            return False
    return True


def _id_present(params, stmt, wit, ver) -> bool:
    ids = wit["ids"]
    u_a = wit.get("u_a")
    return (
        _member(params, stmt["r_a"], wit["id_a"], wit["rho_a"])
        and wit["id_a"] == association_id(params, ids, u_a)
        and stmt["n_a"] == association_nullifier(params, ids, u_a)
        and stmt["n_ae"] == campaign_assoc_nullifier(params, ids, stmt["id_eps"])
        and stmt["id_h"] in ids
    )


def _id_append(params, stmt, wit, ver) -> bool:
    ids = wit["ids"]
    u_a = wit.get("u_a")
    return (
        _member(params, stmt["r_a"], wit["id_a"], wit["rho_a"])
        and wit["id_a"] == association_id(params, ids, u_a)
        and stmt["n_a"] == association_nullifier(params, ids, u_a)
        and wit["h_id_new"]
        == registration_leaf(params, wit["id_new"], wit["sk_new"])
        and _member(params, stmt["r_reg"], wit["h_id_new"], wit["rho_reg"])
        and stmt["n_reg_new"]
        == registration_nullifier(params, wit["id_new"], wit["sk_new"])
        and wit["id_new"] not in ids
        and stmt["id_a_new"]
        == association_id(params, list(ids) + [wit["id_new"]], wit.get("u_a_new"))
    )


def _id_aggregate(params, stmt, wit, ver) -> bool:
    ids_1, ids_2 = wit["ids_1"], wit["ids_2"]
    u_1, u_2 = wit.get("u_a_1"), wit.get("u_a_2")
    return (
        _member(params, stmt["r_a"], wit["id_a_1"], wit["rho_a_1"])
        and _member(params, stmt["r_a"], wit["id_a_2"], wit["rho_a_2"])
        and wit["id_a_1"] == association_id(params, ids_1, u_1)
        and wit["id_a_2"] == association_id(params, ids_2, u_2)
        and stmt["n_a_1"] == association_nullifier(params, ids_1, u_1)
        and stmt["n_a_2"] == association_nullifier(params, ids_2, u_2)
        and not set(ids_1) & set(ids_2)
        and stmt["id_a_new"]
        == association_id(params, list(ids_1) + list(ids_2), wit.get("u_a_new"))
    )


def _key_refresh(randomized: bool):
    def predicate(params, stmt, wit, ver) -> bool:
        ids = wit["ids"]
        u_a = wit["u_a"] if randomized else None
        return (
            _member(params, stmt["r_a"], wit["id_a"], wit["rho_a"])
            and wit["id_a"] == association_id(params, ids, u_a)
            and stmt["n_a"] == association_nullifier(params, ids, u_a)
            and stmt["id"] in ids
            and _pk_matches(params, stmt["pk_new"], wit["sk_new"])
            and stmt["n_reg_new"]
            == registration_nullifier(params, stmt["id"], wit["sk_new"])
        )

    return predicate


def _nullifier_update(params, stmt, wit, ver) -> bool:
    digest = record_digest(params, wit["cred"])
    return (
        wit["h_rv"] == revocation_leaf(params, digest, wit["u_rv"])
        and stmt["n_rv"] == revocation_nullifier(params, digest, wit["u_rv"])
        and _member(params, stmt["r_rv"], wit["h_rv"], wit["rho_rv"])
        and stmt["h_rv_new"] == revocation_leaf(params, digest, wit["u_rv_new"])
        and stmt["n_rv_new"]
        == revocation_nullifier(params, digest, wit["u_rv_new"])
    )


def _assoc_rand_refresh(params, stmt, wit, ver) -> bool:
    ids = wit["ids"]
    return (
        _member(params, stmt["r_a"], wit["id_a"], wit["rho_a"])
        and wit["id_a"] == association_id(params, ids, wit["u_a"])
        and stmt["n_a"] == association_nullifier(params, ids, wit["u_a"])
        and stmt["id_a_new"] == association_id(params, ids, wit["u_a_new"])
    )


def build_registry() -> RelationRegistry:
    registry = RelationRegistry()
    registry.add(RelationDescriptor(
        label="REL_SELECTIVE_DISCLOSURE",
        statement_slots=("c_c", "id_i", "pk_i", "phi", "claim_key",
                         "e_c", "pk_v", "sigma", "c_sigma"),
        witness_slots=("cred", "u_c", "id_h", "pk_h", "sk_h",
                       "sigma_w", "u_sigma"),
        verifier_slots=("sk_v",),
        optional_slots=frozenset({"e_c", "pk_v", "sigma", "c_sigma",
                                  "sigma_w", "u_sigma"}),
        predicate=_selective_disclosure,
    ))
    registry.add(RelationDescriptor(
        label="REL_HOLDER_ID",
        statement_slots=("c_c",),
        witness_slots=("cred", "u_c", "id_h", "pk_h", "sk_h"),
        predicate=_holder_id,
    ))
    registry.add(RelationDescriptor(
        label="REL_VDR_MEMBERSHIP",
        statement_slots=("r_id", "c_id", "u_id", "c_c"),
        witness_slots=("cred", "u_c", "id_h", "pk_h", "sk_h",
                       "v_id", "rho_id"),
        predicate=_vdr_membership,
    ))
    registry.add(RelationDescriptor(
        label="REL_VERIFIER_KEY",
        statement_slots=("pk_v",),
        witness_slots=(),
        verifier_slots=("sk_v",),
        predicate=_verifier_key,
    ))
    registry.add(RelationDescriptor(
        label="REL_CRED_VALIDITY",
        statement_slots=("r_rv", "n_rv", "c_c"),
        witness_slots=("cred", "u_c", "u_rv", "h_rv", "rho_rv"),
        predicate=_cred_validity,
    ))
    registry.add(RelationDescriptor(
        label="REL_CAMPAIGN_NULLIFIER",
        statement_slots=("id_v", "n_s", "id_eps", "c_c"),
        witness_slots=("cred", "u_c", "sk_h"),
        predicate=_campaign_nullifier,
    ))
    registry.add(RelationDescriptor(
        label="REL_ID_REGISTER",
        statement_slots=("r_id", "h_id"),
        witness_slots=("id", "pk", "sk", "v_id", "rho_id"),
        predicate=_id_register,
    ))
    registry.add(RelationDescriptor(
        label="REL_ID_ASSOCIATE",
        statement_slots=("r_reg", "id_a", "n_regs"),
        witness_slots=("ids", "sks", "h_ids", "rho_regs", "u_a"),
        optional_slots=frozenset({"u_a"}),
        predicate=_id_associate,
    ))
    registry.add(RelationDescriptor(
        label="REL_ID_PRESENT",
        statement_slots=("r_a", "n_ae", "n_a", "id_h", "id_eps"),
        witness_slots=("id_a", "rho_a", "ids", "u_a"),
        optional_slots=frozenset({"u_a"}),
        predicate=_id_present,
    ))
    registry.add(RelationDescriptor(
        label="REL_ID_APPEND",
        statement_slots=("r_a", "r_reg", "n_a", "id_a_new", "n_reg_new"),
        witness_slots=("id_a", "rho_a", "ids", "u_a",
                       "id_new", "sk_new", "h_id_new", "rho_reg", "u_a_new"),
        optional_slots=frozenset({"u_a", "u_a_new"}),
        predicate=_id_append,
    ))
    registry.add(RelationDescriptor(
        label="REL_ID_AGGREGATE",
        statement_slots=("r_a", "n_a_1", "n_a_2", "id_a_new"),
        witness_slots=("id_a_1", "id_a_2", "rho_a_1", "rho_a_2",
                       "ids_1", "ids_2", "u_a_1", "u_a_2", "u_a_new"),
        optional_slots=frozenset({"u_a_1", "u_a_2", "u_a_new"}),
        predicate=_id_aggregate,
    ))
    registry.add(RelationDescriptor(
        label="REL_KEY_REFRESH",
        statement_slots=("r_a", "n_a", "n_reg_new", "id", "pk_new"),
        witness_slots=("id_a", "rho_a", "ids", "sk_new"),
        predicate=_key_refresh(randomized=False),
    ))
    registry.add(RelationDescriptor(
        label="REL_KEY_REFRESH_RAND",
        statement_slots=("r_a", "n_a", "n_reg_new", "id", "pk_new"),
        witness_slots=("id_a", "rho_a", "ids", "sk_new", "u_a"),
        predicate=_key_refresh(randomized=True),
    ))
    registry.add(RelationDescriptor(
        label="REL_NULLIFIER_UPDATE",
        statement_slots=("r_rv", "n_rv", "h_rv_new", "n_rv_new"),
        witness_slots=("cred", "u_rv", "u_rv_new", "h_rv", "rho_rv"),
        predicate=_nullifier_update,
    ))
    registry.add(RelationDescriptor(
        label="REL_ASSOC_RAND_REFRESH",
        statement_slots=("r_a", "n_a", "id_a_new"),
        witness_slots=("id_a", "rho_a", "ids", "u_a", "u_a_new"),
        predicate=_assoc_rand_refresh,
    ))
    return registry


#: process-wide registry; descriptors are immutable
REGISTRY = build_registry()
