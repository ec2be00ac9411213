"""Pluggable proof-of-relation interface with a direct-check backend.

A :class:`RelationDescriptor` names the public statement slots, the private
witness slots, and optionally verifier-supplied slots of one relation, plus a
pure predicate over them.  ``prove`` checks the witness actually satisfies the
relation and seals it (with a digest of the statement) into an opaque payload;
``verify`` unseals the payload, checks it was produced for this exact
statement, and re-evaluates the predicate.

The direct-check backend is NOT zero-knowledge: the payload contains the
witness.  It exists so every caller is honest about which values are public
(the statement) and which are private (the payload), and so a sound backend
can be swapped in behind the same three functions.  Privacy tests therefore
inspect only statement slots, never payloads.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import (
    InvalidInput,
    RelationMismatch,
    SchemaError,
    UnknownRelation,
    UnsatisfiedRelation,
)
from .params import ProtocolParams

BACKEND = "direct-check/1"


def canonical_json(obj) -> str:
    """Deterministic JSON used for digests and payloads."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class RelationDescriptor:
    """Schema and semantics of one provable relation."""

    label: str
    statement_slots: tuple[str, ...]
    witness_slots: tuple[str, ...]
    #: slots the verifier supplies privately at verification time; the
    #: predicate must treat a missing verifier slot as vacuously satisfied
    verifier_slots: tuple[str, ...] = ()
    #: slots (statement or witness) that may be absent
    optional_slots: frozenset = field(default_factory=frozenset)
    predicate: Callable[..., bool] = lambda params, stmt, wit, ver: False

    def check_statement(self, statement: Mapping) -> None:
        self._check_slots("statement", statement, self.statement_slots)

    def check_witness(self, witness: Mapping) -> None:
        self._check_slots("witness", witness, self.witness_slots)

    def _check_slots(self, kind: str, given: Mapping, allowed: tuple) -> None:
        extra = set(given) - set(allowed)
        if extra:
            raise SchemaError(
                f"{self.label}: unexpected {kind} slots {sorted(extra)}"
            )
        missing = set(allowed) - set(given) - self.optional_slots
        if missing:
            raise SchemaError(
                f"{self.label}: missing {kind} slots {sorted(missing)}"
            )


class RelationRegistry:
    def __init__(self):
        self._relations: dict[str, RelationDescriptor] = {}

    def add(self, descriptor: RelationDescriptor) -> RelationDescriptor:
        if descriptor.label in self._relations:
            raise InvalidInput(f"relation {descriptor.label!r} already registered")
        self._relations[descriptor.label] = descriptor
        return descriptor

    def get(self, label: str) -> RelationDescriptor:
        try:
            return self._relations[label]
        except KeyError:
            raise UnknownRelation(f"no relation named {label!r}") from None

    def labels(self) -> tuple[str, ...]:
        return tuple(self._relations)


@dataclass(frozen=True)
class ReferenceString:
    """Per-relation verification context produced by setup."""

    relation: str
    backend: str = BACKEND


@dataclass(frozen=True)
class Proof:
    relation: str
    statement: dict
    payload: str  # opaque to everything outside this module
    backend: str = BACKEND

    def to_obj(self) -> dict:
        return {
            "backend": self.backend,
            "payload": self.payload,
            "relation": self.relation,
            "statement": self.statement,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "Proof":
        try:
            return cls(
                relation=obj["relation"],
                statement=dict(obj["statement"]),
                payload=obj["payload"],
                backend=obj["backend"],
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput("malformed proof object") from exc


def statement_digest(statement: Mapping) -> str:
    return hashlib.blake2b(
        canonical_json(statement).encode(), digest_size=32
    ).hexdigest()


def setup(registry: RelationRegistry, label: str) -> ReferenceString:
    registry.get(label)  # UnknownRelation if absent
    return ReferenceString(relation=label)


def prove(
    params: ProtocolParams,
    registry: RelationRegistry,
    rs: ReferenceString,
    statement: Mapping,
    witness: Mapping,
) -> Proof:
    """Check the witness against the relation and seal it into a proof."""
    descriptor = registry.get(rs.relation)
    statement = dict(statement)
    witness = dict(witness)
    descriptor.check_statement(statement)
    descriptor.check_witness(witness)
    try:
        satisfied = bool(descriptor.predicate(params, statement, witness, {}))
    except Exception:
        satisfied = False  # malformed slot contents cannot satisfy
    if not satisfied:
        raise UnsatisfiedRelation(f"{descriptor.label}: witness does not satisfy")
    sealed = canonical_json({"statement_digest": statement_digest(statement),
                             "witness": witness})
    payload = base64.b64encode(sealed.encode()).decode()
    return Proof(relation=descriptor.label, statement=statement, payload=payload)


def verify(
    params: ProtocolParams,
    registry: RelationRegistry,
    rs: ReferenceString,
    statement: Mapping,
    proof: Proof,
    verifier_witness: Mapping | None = None,
) -> bool:
    """Re-check the sealed witness against this exact statement."""
    descriptor = registry.get(rs.relation)
    if proof.relation != rs.relation:
        raise RelationMismatch(
            f"proof is for {proof.relation!r}, expected {rs.relation!r}"
        )
    if proof.backend != BACKEND:
        return False
    statement = dict(statement)
    try:
        descriptor.check_statement(statement)
    except SchemaError:
        return False
    if proof.statement != statement:
        return False
    try:
        sealed = json.loads(base64.b64decode(proof.payload, validate=True))
        digest = sealed["statement_digest"]
        witness = dict(sealed["witness"])
    except (binascii.Error, ValueError, KeyError, TypeError):
        return False
    if digest != statement_digest(statement):
        return False
    try:
        descriptor.check_witness(witness)
    except SchemaError:
        return False
    verifier_witness = dict(verifier_witness or {})
    extra = set(verifier_witness) - set(descriptor.verifier_slots)
    if extra:
        raise SchemaError(f"unexpected verifier slots {sorted(extra)}")
    try:
        return bool(descriptor.predicate(params, statement, witness, verifier_witness))
    except Exception:
        # malformed slot contents inside the payload count as a bad proof
        return False
