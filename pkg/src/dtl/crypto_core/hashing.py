"""Hash-based primitives: domain-separated hash, PRF, tagging scheme, commitment.

All of them sit on SHA-256 with a one-byte domain prefix and are modelled as
random oracles. Digests are never truncated.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from enum import IntEnum
from typing import NewType, Optional

from ..encoding import Writer
from ..errors import InvalidKey, RangeViolation
from .params import DEFAULT_RANGE_BITS

DIGEST_SIZE = 32

CoinPublicKey = NewType("CoinPublicKey", bytes)
Tag = NewType("Tag", bytes)


class Domain(IntEnum):
    PRF_KGEN = 0x01
    PRF_TAG = 0x02
    COMMIT = 0x03
    MT_LEAF = 0x04
    MT_NODE = 0x05
    MT_EMPTY = 0x06
    NIZK_MAC = 0x07
    TRANSCRIPT = 0x08


def H(domain: Domain, *parts: bytes) -> bytes:
    """Hash of ``domain || parts`` where each part is raw (callers pre-encode)."""
    h = hashlib.sha256(bytes((domain,)))
    for p in parts:
        h.update(p)
    return h.digest()


def prf_eval(key: bytes, data: bytes, *, domain: Domain = Domain.PRF_TAG,
             lambda_bits: int = 128) -> bytes:
    if len(key) != lambda_bits // 8:
        raise InvalidKey(f"PRF key must be {lambda_bits // 8} bytes, got {len(key)}")
    return H(domain, Writer().var(key).var(data).getvalue())


@dataclass(frozen=True)
class CoinSecret:
    """Secret of one coin. ``data`` is only set in arbitrary-data mode."""

    k: bytes
    r: bytes
    data: Optional[int] = None

    def __repr__(self) -> str:  # keep secrets out of logs
        return f"CoinSecret(k=<{len(self.k)}B>, r=<{len(self.r)}B>, data={self.data!r})"

    def without_data(self) -> "CoinSecret":
        return CoinSecret(self.k, self.r)

    def encode(self) -> bytes:
        w = Writer().var(self.k).var(self.r)
        if self.data is None:
            w.u8(0)
        else:
            w.u8(1).u64(self.data)
        return w.getvalue()


def _check_secret(csk: CoinSecret, lambda_bits: int) -> None:
    n = lambda_bits // 8
    if len(csk.k) != n or len(csk.r) != n:
        raise InvalidKey(f"coin secret components must be {n} bytes")


def tag_kgen(csk: CoinSecret, lambda_bits: int = 128) -> CoinPublicKey:
    """cpk = F(k, r) under the key-generation domain."""
    _check_secret(csk, lambda_bits)
    return CoinPublicKey(prf_eval(csk.k, csk.r, domain=Domain.PRF_KGEN, lambda_bits=lambda_bits))


def tag_eval(csk: CoinSecret, lambda_bits: int = 128) -> Tag:
    """tag = F(k, 0^lambda); depends on k only."""
    _check_secret(csk, lambda_bits)
    zero = bytes(lambda_bits // 8)
    return Tag(prf_eval(csk.k, zero, domain=Domain.PRF_TAG, lambda_bits=lambda_bits))


def commit(data: int, randomness: bytes, range_bits: int = DEFAULT_RANGE_BITS) -> CoinPublicKey:
    if not 0 <= data < (1 << range_bits):
        raise RangeViolation(f"data {data} outside [0, 2^{range_bits})")
    if len(randomness) != DIGEST_SIZE:
        raise InvalidKey("commitment randomness must be a 32-byte digest")
    return CoinPublicKey(H(Domain.COMMIT, Writer().u64(data).fixed(randomness, DIGEST_SIZE).getvalue()))


def commit_verify(data: int, cm: bytes, randomness: bytes,
                  range_bits: int = DEFAULT_RANGE_BITS) -> int:
    try:
        expected = commit(data, randomness, range_bits)
    except (RangeViolation, InvalidKey):
        return 0
    return int(hmac.compare_digest(expected, cm))
