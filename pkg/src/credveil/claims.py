"""Claim encoding and the predicate language.

Claims are flat key-value pairs.  Each value encodes to exactly one field
element: small signed integers embed directly (order preserved after
decoding), enumeration labels map through a registered code table, and
short strings embed length-prefixed.  Predicates are expression trees over
a single claim value: integer comparisons, set (non-)membership over
enumeration codes, and boolean AND/OR.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EncodingError, InvalidInput
from .params import ProtocolParams
from .hashing import Site, h1

INT_BOUND = 1 << 62
MAX_STRING_BYTES = 31

KINDS = ("int", "enum", "str")


@dataclass(frozen=True)
class EnumTable:
    """Registered enumeration: label -> positive code."""

    name: str
    codes: tuple[str, ...]

    def code(self, label: str) -> int:
        try:
            return self.codes.index(label) + 1
        except ValueError:
            raise EncodingError(f"label {label!r} not in enum {self.name!r}") from None

    def label(self, code: int) -> str:
        if not 1 <= code <= len(self.codes):
            raise EncodingError(f"code {code} not in enum {self.name!r}")
        return self.codes[code - 1]


def encode_string(params: ProtocolParams, text: str) -> int:
    raw = text.encode()
    if len(raw) > MAX_STRING_BYTES:
        raise EncodingError("string exceeds 31 bytes")
    # length prefix keeps the embedding injective; value < 2^253 < p
    return int.from_bytes(bytes([len(raw)]) + raw, "big")


def encode_claim_value(params: ProtocolParams, kind: str, value) -> int:
    """Encode one claim value into a field element, injectively per kind."""
    if kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise EncodingError("int claim needs an int value")
        if abs(value) >= INT_BOUND:
            raise EncodingError("integer claim out of range")
        return value % params.prime
    if kind == "enum":
        if not isinstance(value, int) or value <= 0:
            raise EncodingError("enum claim needs a registered positive code")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise EncodingError("str claim needs a str value")
        return encode_string(params, value)
    raise EncodingError(f"unknown claim kind {kind!r}")


def decode_int(params: ProtocolParams, encoded: int) -> int:
    """Inverse of the signed-integer embedding."""
    return encoded if encoded < INT_BOUND else encoded - params.prime


@dataclass(frozen=True)
class Claim:
    key: str
    kind: str
    value: int  # already encoded field element

    def __post_init__(self) -> None:
        if not self.key:
            raise EncodingError("claim key must be nonempty")
        if self.kind not in KINDS:
            raise EncodingError(f"unknown claim kind {self.kind!r}")

    @classmethod
    def of(cls, params: ProtocolParams, key: str, kind: str, value) -> "Claim":
        return cls(key=key, kind=kind, value=encode_claim_value(params, kind, value))

    def key_digest(self, params: ProtocolParams) -> int:
        return h1(params, [encode_string(params, self.key)], Site.CLAIM)


# --- predicate language ----------------------------------------------------

_CMP_OPS = ("<", "<=", "==", "!=", ">=", ">")


@dataclass(frozen=True)
class Cmp:
    op: str
    constant: int

    def evaluate(self, params: ProtocolParams, claim: Claim) -> bool:
        if claim.kind == "int":
            lhs = decode_int(params, claim.value)
        else:
            lhs = claim.value
        rhs = self.constant
        return {
            "<": lhs < rhs,
            "<=": lhs <= rhs,
            "==": lhs == rhs,
            "!=": lhs != rhs,
            ">=": lhs >= rhs,
            ">": lhs > rhs,
        }[self.op]

    def to_obj(self) -> dict:
        return {"op": self.op, "constant": self.constant}


@dataclass(frozen=True)
class Membership:
    codes: tuple[int, ...]
    member: bool  # False for non-membership

    def evaluate(self, params: ProtocolParams, claim: Claim) -> bool:
        return (claim.value in self.codes) == self.member

    def to_obj(self) -> dict:
        return {
            "op": "in" if self.member else "not-in",
            "codes": list(self.codes),
        }


@dataclass(frozen=True)
class Bool:
    op: str  # "and" | "or"
    left: object
    right: object

    def evaluate(self, params: ProtocolParams, claim: Claim) -> bool:
        l = self.left.evaluate(params, claim)
        r = self.right.evaluate(params, claim)
        return (l and r) if self.op == "and" else (l or r)

    def to_obj(self) -> dict:
        return {"op": self.op, "left": self.left.to_obj(), "right": self.right.to_obj()}


def predicate_from_obj(obj: dict):
    """Rebuild a predicate tree from its public description."""
    op = obj.get("op")
    if op in _CMP_OPS:
        return Cmp(op=op, constant=int(obj["constant"]))
    if op in ("in", "not-in"):
        return Membership(codes=tuple(int(c) for c in obj["codes"]), member=op == "in")
    if op in ("and", "or"):
        return Bool(op=op, left=predicate_from_obj(obj["left"]),
                    right=predicate_from_obj(obj["right"]))
    raise InvalidInput(f"unknown predicate op {op!r}")
