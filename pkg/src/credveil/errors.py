"""Protocol error hierarchy.

Every rejection surfaced by a ledger, verifier, or the scenario harness is a
named exception so scripts can assert on the exact failure mode.
"""


class ProtocolError(Exception):
    """Base class for all protocol-level failures."""

    #: short stable name used in scenario scripts and ledger logs
    code = "ProtocolError"


class InvalidInput(ProtocolError):
    code = "InvalidInput"


class InvalidScalar(ProtocolError):
    code = "InvalidScalar"


class InvalidSignature(ProtocolError):
    code = "InvalidSignature"


class EncodingError(ProtocolError):
    code = "EncodingError"


class UnknownRelation(ProtocolError):
    code = "UnknownRelation"


class UnsatisfiedRelation(ProtocolError):
    code = "UnsatisfiedRelation"


class SchemaError(ProtocolError):
    code = "SchemaError"


class RelationMismatch(ProtocolError):
    code = "RelationMismatch"


class CapacityExceeded(ProtocolError):
    code = "CapacityExceeded"


class NotFound(ProtocolError):
    code = "NotFound"


class StaleRoot(ProtocolError):
    code = "StaleRoot"


class Revoked(ProtocolError):
    code = "Revoked"


class ChallengeMismatch(ProtocolError):
    code = "ChallengeMismatch"


class Conflict(ProtocolError):
    code = "Conflict"


class AlreadyAssociated(ProtocolError):
    code = "AlreadyAssociated"


class StaleAssociation(ProtocolError):
    code = "StaleAssociation"


class DuplicateNullifier(ProtocolError):
    code = "DuplicateNullifier"


class Blocked(ProtocolError):
    code = "Blocked"


class Unauthorized(ProtocolError):
    code = "Unauthorized"


class IssuanceAuditError(ProtocolError):
    code = "IssuanceAuditError"


class ScriptError(ProtocolError):
    code = "ScriptError"


class LogError(ProtocolError):
    code = "LogError"


#: map from stable code to exception class, for scenario expectation matching
BY_CODE = {
    cls.code: cls
    for cls in list(globals().values())
    if isinstance(cls, type) and issubclass(cls, ProtocolError)
}
