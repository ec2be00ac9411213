"""Credential structure, canonical digest, and the on-disk file format.

A credential binds an issuer identifier, a holder identifier, and a claim set
under one issuer signature.  Claims are canonically ordered by key digest so
the digest (and therefore the signature, commitments, and every nullifier
derived from it) is independent of construction order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .claims import Claim, encode_string
from .errors import InvalidInput, NotFound
from .fields import check_fe, fe_from_hex, fe_to_hex
from .hashing import Site, h1
from .params import ProtocolParams
from .primitives import Signature


@dataclass(frozen=True)
class Credential:
    issuer_id: int
    holder_id: int
    claims: tuple  # tuple[Claim], canonically ordered
    signature: Signature

    def digest(self, params: ProtocolParams) -> int:
        return record_digest(params, self.record(params))

    def record(self, params: ProtocolParams) -> dict:
        """Plain-data form used inside proof witnesses (signature excluded)."""
        return {
            "issuer_id": self.issuer_id,
            "holder_id": self.holder_id,
            "claims": [
                {"key": c.key, "kind": c.kind, "value": c.value} for c in self.claims
            ],
        }

    def claim(self, key: str) -> Claim:
        for c in self.claims:
            if c.key == key:
                return c
        raise NotFound(f"no claim with key {key!r}")


def order_claims(params: ProtocolParams, claims) -> tuple:
    """Canonical claim order: ascending key digest; duplicate keys rejected."""
    claims = tuple(claims)
    if len({c.key for c in claims}) != len(claims):
        raise InvalidInput("duplicate claim keys")
    return tuple(sorted(claims, key=lambda c: c.key_digest(params)))


def record_digest(params: ProtocolParams, record: dict) -> int:
    """Canonical credential digest: h1 over issuer, holder, and each claim's
    (key digest, kind tag, encoded value) triple in canonical order."""
    claims = order_claims(
        params,
        (Claim(key=c["key"], kind=c["kind"], value=check_fe(params, c["value"]))
         for c in record["claims"]),
    )
    inputs = [check_fe(params, record["issuer_id"]),
              check_fe(params, record["holder_id"])]
    for c in claims:
        inputs.extend(
            [c.key_digest(params), encode_string(params, c.kind), c.value]
        )
    return h1(params, inputs, Site.CRED)


# --- file format ------------------------------------------------------------


def credential_to_obj(
    params: ProtocolParams, cred: Credential, u_rv: int | None = None
) -> dict:
    obj = {
        "format": "credveil-credential/1",
        "issuer_id": fe_to_hex(params, cred.issuer_id),
        "holder_id": fe_to_hex(params, cred.holder_id),
        "claims": [
            {"key": c.key, "kind": c.kind, "value": fe_to_hex(params, c.value)}
            for c in cred.claims
        ],
        "signature": {
            "e": fe_to_hex(params, cred.signature.e),
            "s": fe_to_hex(params, cred.signature.s),
        },
    }
    if u_rv is not None:
        obj["u_rv"] = fe_to_hex(params, u_rv)
    return obj


def credential_from_obj(params: ProtocolParams, obj: dict):
    """Returns (credential, u_rv or None)."""
    try:
        if obj.get("format") != "credveil-credential/1":
            raise InvalidInput("unknown credential format")
        claims = order_claims(
            params,
            (Claim(key=c["key"], kind=c["kind"],
                   value=fe_from_hex(params, c["value"]))
             for c in obj["claims"]),
        )
        cred = Credential(
            issuer_id=fe_from_hex(params, obj["issuer_id"]),
            holder_id=fe_from_hex(params, obj["holder_id"]),
            claims=claims,
            signature=Signature(
                e=fe_from_hex(params, obj["signature"]["e"]),
                s=fe_from_hex(params, obj["signature"]["s"]),
            ),
        )
        u_rv = fe_from_hex(params, obj["u_rv"]) if "u_rv" in obj else None
    except (KeyError, TypeError) as exc:
        raise InvalidInput("malformed credential file") from exc
    return cred, u_rv


def save_credential(
    params: ProtocolParams, path, cred: Credential, u_rv: int | None = None
) -> None:
    with open(path, "w") as handle:
        json.dump(credential_to_obj(params, cred, u_rv), handle,
                  indent=2, sort_keys=True)
        handle.write("\n")


def load_credential(params: ProtocolParams, path):
    with open(path) as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidInput("malformed credential file") from exc
    return credential_from_obj(params, obj)
