"""Field element validation and serialization.

Field elements are plain Python ints in [0, p).  This module owns the
boundary checks and the canonical hex encoding (lowercase, fixed width,
big-endian).
"""

from __future__ import annotations

from .errors import InvalidInput
from .params import ProtocolParams


def check_fe(params: ProtocolParams, value: int) -> int:
    """Validate that ``value`` is a canonical field element."""
    if not isinstance(value, int) or isinstance(value, bool):
        raise InvalidInput(f"field element must be int, got {type(value).__name__}")
    if not 0 <= value < params.prime:
        raise InvalidInput("field element out of range")
    return value


def fe_to_hex(params: ProtocolParams, value: int) -> str:
    check_fe(params, value)
    return format(value, f"0{params.hex_width}x")


def fe_from_hex(params: ProtocolParams, text: str) -> int:
    if len(text) != params.hex_width or text != text.lower():
        raise InvalidInput("malformed field element encoding")
    try:
        value = int(text, 16)
    except ValueError as exc:
        raise InvalidInput("malformed field element encoding") from exc
    return check_fe(params, value)


def fe_to_bytes(params: ProtocolParams, value: int) -> bytes:
    check_fe(params, value)
    return value.to_bytes((params.hex_width + 1) // 2, "big")
