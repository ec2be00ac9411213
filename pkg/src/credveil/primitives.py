"""Commitments, key pairs, and the issuer signature scheme.

The commitment is a hash commitment: commit(m, u) = h1([m, u], COMMIT).
Keys live in the prime-order subgroup of quadratic residues mod the safe
prime 2p + 1; signatures are Schnorr in challenge/response form, over the
canonical credential digest.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InvalidScalar, InvalidSignature
from .fields import check_fe
from .hashing import Site, h1
from .params import ProtocolParams


@dataclass(frozen=True)
class Commitment:
    value: int


@dataclass(frozen=True)
class Signature:
    """Schnorr signature (challenge e, response s), both field elements."""

    e: int
    s: int


@dataclass(frozen=True)
class KeyPair:
    sk: int
    pk: int  # group element in [1, 2p + 1)


def commit(params: ProtocolParams, message: int, opening: int) -> Commitment:
    return Commitment(h1(params, [message, opening], Site.COMMIT))


def open_commitment(
    params: ProtocolParams, message: int, commitment: Commitment, opening: int
) -> bool:
    return commit(params, message, opening) == commitment


def pk_limbs(params: ProtocolParams, pk: int) -> tuple[int, int]:
    """Split a group element into two field elements for hashing/serialization."""
    return pk % params.prime, pk // params.prime


def pk_from_limbs(params: ProtocolParams, lo: int, hi: int) -> int:
    check_fe(params, lo)
    check_fe(params, hi)
    pk = hi * params.prime + lo
    if not 1 <= pk < params.group_modulus:
        raise InvalidScalar("group element out of range")
    return pk


def pubkey_of(params: ProtocolParams, sk: int) -> int:
    """Derive the public key g^sk; scalars are in [1, p)."""
    if not isinstance(sk, int) or not 1 <= sk < params.prime:
        raise InvalidScalar("secret scalar must be in [1, p)")
    return pow(params.group_generator, sk, params.group_modulus)


def keygen(params: ProtocolParams, rng: random.Random) -> KeyPair:
    sk = rng.randrange(1, params.prime)
    return KeyPair(sk=sk, pk=pubkey_of(params, sk))


def sign(params: ProtocolParams, sk: int, message: int) -> Signature:
    """Sign a field-element digest; the nonce is derived deterministically
    from (sk, message) so signing needs no RNG."""
    check_fe(params, message)
    if not 1 <= sk < params.prime:
        raise InvalidScalar("secret scalar must be in [1, p)")
    k = h1(params, [sk, message], Site.SIG)
    if k == 0:
        k = 1
    r = pow(params.group_generator, k, params.group_modulus)
    e = _challenge(params, r, message)
    s = (k + e * sk) % params.prime
    return Signature(e=e, s=s)


def verify_sign(
    params: ProtocolParams, pk: int, sig: Signature, message: int
) -> bool:
    if not isinstance(sig, Signature):
        raise InvalidSignature("malformed signature")
    try:
        check_fe(params, sig.e)
        check_fe(params, sig.s)
        check_fe(params, message)
    except Exception as exc:
        raise InvalidSignature("malformed signature encoding") from exc
    if not 1 <= pk < params.group_modulus:
        return False
    # r' = g^s * pk^(-e); accept iff the challenge recomputes
    p_mod = params.group_modulus
    r = pow(params.group_generator, sig.s, p_mod) * pow(
        pow(pk, sig.e, p_mod), p_mod - 2, p_mod
    ) % p_mod
    return _challenge(params, r, message) == sig.e


def signature_digest(params: ProtocolParams, sig: Signature) -> int:
    """Field-element digest of a signature, used when the signature is
    masked out of the public transcript."""
    return h1(params, [sig.e, sig.s], Site.SIG)


def _challenge(params: ProtocolParams, r: int, message: int) -> int:
    lo, hi = pk_limbs(params, r)
    return h1(params, [lo, hi, message], Site.SIG)
