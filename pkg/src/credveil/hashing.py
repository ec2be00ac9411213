"""The two protocol hash functions.

``h1`` maps an ordered tuple of field elements to one field element and is
tagged with a usage site so distinct protocol contexts can never collide.
``h2`` is the dedicated 2-to-1 compression for Merkle interior nodes.

Both are instantiated as a keyed compression (BLAKE2b over fixed-width
big-endian limbs, reduced mod p).  Fixed-width encoding makes the input
tuple prefix-free for a given site, and the 512-bit digest makes the
mod-p reduction bias negligible.
"""

from __future__ import annotations

import hashlib
from enum import Enum
from functools import lru_cache
from typing import Sequence

from .errors import InvalidInput
from .fields import check_fe, fe_to_bytes
from .params import ProtocolParams


class Site(str, Enum):
    """Domain tags, one per protocol usage site of h1."""

    CRED = "cred"            # canonical credential digest
    COMMIT = "commit"        # commitment scheme
    SIG = "sig"              # signature challenge
    IDENTITY = "identity"    # VDR identity leaves v_id
    REGISTRATION = "reg"     # h_id leaves and n_reg nullifiers
    ASSOCIATION = "assoc"    # id_a leaves and n_a nullifiers
    REVOCATION = "rev"       # h_rv leaves and n_rv nullifiers
    CAMPAIGN = "campaign"    # per-campaign credential nullifiers n_s
    CLAIM = "claim"          # claim key / string value encoding
    STATE = "state"          # ledger state digests


_H2_TAG = b"credveil/h2"


def h1(params: ProtocolParams, inputs: Sequence[int], site: Site) -> int:
    """Hash an ordered, non-empty tuple of field elements into Z_p."""
    if len(inputs) == 0:
        raise InvalidInput("h1 requires at least one input")
    hasher = hashlib.blake2b(b"credveil/h1/" + site.value.encode())
    for value in inputs:
        hasher.update(fe_to_bytes(params, value))
    return int.from_bytes(hasher.digest(), "big") % params.prime


def h2(params: ProtocolParams, left: int, right: int) -> int:
    """2-to-1 compression for Merkle interior nodes."""
    check_fe(params, left)
    check_fe(params, right)
    hasher = hashlib.blake2b(_H2_TAG)
    hasher.update(fe_to_bytes(params, left))
    hasher.update(fe_to_bytes(params, right))
    return int.from_bytes(hasher.digest(), "big") % params.prime


@lru_cache(maxsize=None)
def zero_hashes(params: ProtocolParams, depth: int) -> tuple:
    """Roots of all-padding subtrees: level 0 is the zero leaf."""
    nodes = [0]
    for _ in range(depth):
        nodes.append(h2(params, nodes[-1], nodes[-1]))
    return tuple(nodes)
