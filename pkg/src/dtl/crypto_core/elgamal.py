"""Exponential ElGamal: additively homomorphic, small-plaintext decryption.

    c1 = G^r,  c2 = G^m * ek^r,  ek = G^dk

Decryption recovers G^m and solves the discrete log with baby-step/giant-step
over ``[0, 2^range_bits)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from ..encoding import Writer
from ..errors import DecodeFailure, EncodingError, RangeViolation
from . import backend, group
from .hashing import Domain, H
from .params import DEFAULT_RANGE_BITS


def derive(dk: int) -> int:
    return group.g_pow(dk)


@dataclass(frozen=True)
class HomKeypair:
    dk: int
    ek: int

    def __post_init__(self) -> None:
        if not 0 < self.dk < group.Q:
            raise ValueError("decryption key must be a nonzero scalar")

    def __repr__(self) -> str:
        return f"HomKeypair(dk=<hidden>, ek=0x{self.ek:x}"[:40] + "...)"


@dataclass(frozen=True)
class HomCiphertext:
    c1: int
    c2: int

    def __add__(self, other: "HomCiphertext") -> "HomCiphertext":
        return hom_add(self, other)

    def __neg__(self) -> "HomCiphertext":
        return hom_neg(self)

    def __sub__(self, other: "HomCiphertext") -> "HomCiphertext":
        return hom_add(self, hom_neg(other))

    def encode(self) -> bytes:
        return group.encode_element(self.c1) + group.encode_element(self.c2)

    def __deepcopy__(self, memo):
        return self

    @classmethod
    def decode(cls, b: bytes) -> "HomCiphertext":
        if len(b) != 2 * group.ELEMENT_BYTES:
            raise EncodingError("ciphertext must be 512 bytes")
        n = group.ELEMENT_BYTES
        return cls(group.decode_element(b[:n]), group.decode_element(b[n:]))


CIPHERTEXT_BYTES = 2 * group.ELEMENT_BYTES
ZERO_CIPHERTEXT = HomCiphertext(group.IDENTITY, group.IDENTITY)


def hom_kgen(seed: bytes) -> HomKeypair:
    ctr = 0
    while True:
        d = H(Domain.TRANSCRIPT, Writer().text("hom-kgen").var(seed).u32(ctr).getvalue())
        dk = int.from_bytes(d, "little") % group.Q
        if dk:
            return HomKeypair(dk, derive(dk))
        ctr += 1  # pragma: no cover


def _check_plaintext(m: int, range_bits: int) -> None:
    if not 0 <= m < (1 << range_bits):
        raise RangeViolation(f"plaintext {m} outside [0, 2^{range_bits})")


@lru_cache(maxsize=8192)
def hom_enc(ek: int, m: int, r_enc: int, range_bits: int = DEFAULT_RANGE_BITS) -> HomCiphertext:
    _check_plaintext(m, range_bits)
    return HomCiphertext(group.g_pow(r_enc), group.mul(group.g_pow(m), group.pow_(ek, r_enc)))


def hom_add(a: HomCiphertext, b: HomCiphertext) -> HomCiphertext:
    return HomCiphertext(group.mul(a.c1, b.c1), group.mul(a.c2, b.c2))


def hom_neg(c: HomCiphertext) -> HomCiphertext:
    return HomCiphertext(group.inv(c.c1), group.inv(c.c2))


def _unmask(dk: int, c: HomCiphertext) -> int:
    """G^m = c2 / c1^dk."""
    return group.mul(c.c2, group.inv(group.pow_(c.c1, dk)))


def decrypts_to(dk: int, c: HomCiphertext, m: int, range_bits: int = DEFAULT_RANGE_BITS) -> bool:
    """Check ``Dec(dk, c) == m`` without a discrete-log search."""
    if not 0 <= m < (1 << range_bits):
        return False
    return _unmask(dk, c) == group.g_pow(m)


@lru_cache(maxsize=4)
def _bsgs_tables(range_bits: int):
    step = 1 << math.ceil(range_bits / 2)
    baby = {}
    x = backend.num(1)
    g = backend.num(group.G)
    p = backend.num(group.P)
    for j in range(step):
        baby[int(x)] = j
        x = x * g % p
    giant = group.inv(group.g_pow(step))
    return step, baby, giant


def hom_dec(dk: int, c: HomCiphertext, range_bits: int = DEFAULT_RANGE_BITS) -> int:
    step, baby, giant = _bsgs_tables(range_bits)
    limit = 1 << range_bits
    p = backend.num(group.P)
    gi = backend.num(giant)
    h = backend.num(_unmask(dk, c))
    for i in range((limit + step - 1) // step):
        j = baby.get(int(h))
        if j is not None:
            m = i * step + j
            if m < limit:
                return m
            break
        h = h * gi % p
    raise DecodeFailure(f"plaintext not in [0, 2^{range_bits})")


def encode_ek(ek: int) -> bytes:
    return group.encode_element(ek)


def parse_ek(m: bytes) -> int:
    """Leading encryption key of an application message ``ek || aux``."""
    if len(m) < group.ELEMENT_BYTES:
        raise EncodingError("message too short to carry an encryption key")
    ek = group.decode_element(m[:group.ELEMENT_BYTES])
    if ek == group.IDENTITY:
        raise EncodingError("identity is not a valid encryption key")
    return ek
