"""Deployment parameters.

One :class:`ProtocolParams` instance is threaded through every component: the
field prime, the prime-order group used for keys and signatures, Merkle tree
depth, the recent-root window width, and the protocol mode flags.  All values
are configuration; the defaults below are a desk-scale instantiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# 256-bit prime q with P = 2q + 1 also prime (safe prime).  The quadratic
# residues mod P form a group of prime order q generated by 4.  q doubles as
# the field prime for every hash, commitment, identifier, and nullifier.
DEFAULT_FIELD_PRIME = 0x800000000000000000000000000000000000000000000000000000000001C197
DEFAULT_GROUP_MODULUS = 2 * DEFAULT_FIELD_PRIME + 1
DEFAULT_GROUP_GENERATOR = 4

DEFAULT_TREE_DEPTH = 16
DEFAULT_ROOT_WINDOW = 64


@dataclass(frozen=True)
class ProtocolParams:
    """Immutable deployment configuration shared by all actors."""

    prime: int = DEFAULT_FIELD_PRIME
    group_modulus: int = DEFAULT_GROUP_MODULUS
    group_generator: int = DEFAULT_GROUP_GENERATOR
    tree_depth: int = DEFAULT_TREE_DEPTH
    root_window: int = DEFAULT_ROOT_WINDOW
    #: associated identifiers carry a refreshable random value by default
    randomized_association: bool = True

    def __post_init__(self) -> None:
        if self.prime.bit_length() < 128:
            raise ValueError("field prime must be at least 128 bits")
        if self.group_modulus != 2 * self.prime + 1:
            raise ValueError("group modulus must be the safe prime 2p + 1")

    @property
    def hex_width(self) -> int:
        """Fixed serialization width of one field element, in hex digits."""
        return (self.prime.bit_length() + 3) // 4

    def describe(self) -> dict:
        """Config header written into ledger logs."""
        return {
            "prime": format(self.prime, "x"),
            "tree_depth": self.tree_depth,
            "root_window": self.root_window,
            "randomized_association": self.randomized_association,
        }


DEFAULT_PARAMS = ProtocolParams()
