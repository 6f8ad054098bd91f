"""The two data tumbling schemes: Setup, Create, Accumulate, Redeem, Verify.

``fixed`` mode: every coin carries the same data, ``cpk = TagKGen(k, r)``.
``arbitrary`` mode: ``cpk = Commit(data, TagKGen(k, r))`` and redemption
re-encrypts ``data`` under the encryption key that leads the message ``m``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

from .crypto_core import (
    AccumulatorState,
    CoinPublicKey,
    CoinSecret,
    HomCiphertext,
    SecParams,
    Tag,
    commit,
    hom_enc,
    mt_build,
    parse_ek,
    tag_eval,
    tag_kgen,
    tree_for,
)
from .crypto_core import group
from .errors import EncodingError, MalformedMessage, ModeMismatch, RangeViolation
from .proof_system import (
    ArbRedeemStmt,
    ArbRedeemWit,
    FixedRedeemStmt,
    FixedRedeemWit,
    NizkKeys,
    Proof,
    RelationId,
    nizk_prove,
    nizk_setup,
    nizk_verify,
)


class Mode(str, Enum):
    FIXED = "fixed"
    ARBITRARY = "arbitrary"

    @property
    def relation(self) -> RelationId:
        return RelationId.FIXED_REDEEM if self is Mode.FIXED else RelationId.ARB_REDEEM


@dataclass(frozen=True)
class DtlParams:
    mode: Mode
    sec: SecParams
    keys: NizkKeys = field(repr=False)
    fixed_data: Optional[int] = None

    def __post_init__(self) -> None:
        if (self.fixed_data is not None) != (self.mode is Mode.FIXED):
            raise ModeMismatch("fixed_data must be set exactly in fixed mode")

    def __deepcopy__(self, memo):
        return self


@dataclass(frozen=True)
class RedeemResult:
    tag: Tag
    proof: Proof
    ciphertext: Optional[HomCiphertext] = None


def dtl_setup(mode: Union[Mode, str], sec: Optional[SecParams] = None,
              seed: Union[bytes, int, str] = 0, fixed_data: Optional[int] = None) -> DtlParams:
    mode = Mode(mode)
    sec = sec or SecParams()
    if mode is Mode.FIXED and fixed_data is None:
        fixed_data = 1
    keys = nizk_setup(mode.relation, seed)
    return DtlParams(mode, sec, keys, fixed_data)


def dtl_create(params: DtlParams, data: Optional[int] = None, *,
               rng: random.Random) -> tuple[CoinPublicKey, CoinSecret]:
    n = params.sec.key_bytes
    if params.mode is Mode.FIXED:
        if data is not None:
            raise ModeMismatch("fixed-mode coins carry no per-coin data")
        csk = CoinSecret(rng.randbytes(n), rng.randbytes(n))
        return tag_kgen(csk, params.sec.lambda_bits), csk
    if data is None:
        raise ModeMismatch("arbitrary-mode coins need data")
    bits = params.sec.plaintext_range_bits
    if not isinstance(data, int) or not 0 <= data < (1 << bits):
        raise RangeViolation(f"data {data!r} outside [0, 2^{bits})")
    csk = CoinSecret(rng.randbytes(n), rng.randbytes(n), data)
    inner = tag_kgen(csk.without_data(), params.sec.lambda_bits)
    return commit(data, inner, bits), csk


def coin_public_key(params: DtlParams, csk: CoinSecret) -> CoinPublicKey:
    """Recompute the public key a secret was created with."""
    lam = params.sec.lambda_bits
    if params.mode is Mode.FIXED:
        return tag_kgen(csk.without_data(), lam)
    return commit(csk.data, tag_kgen(csk.without_data(), lam), params.sec.plaintext_range_bits)


def dtl_accumulate(params: DtlParams, cpks: Sequence[bytes]) -> AccumulatorState:
    return mt_build(cpks, params.sec.tree_depth)


def dtl_redeem(params: DtlParams, cpks: Sequence[bytes], csk: CoinSecret, m: bytes, *,
               rng: Optional[random.Random] = None) -> Optional[RedeemResult]:
    """Prove ownership of one coin in ``cpks`` bound to ``m``; ``None`` if not a member."""
    sec = params.sec
    if params.mode is Mode.FIXED:
        if csk.data is not None:
            raise ModeMismatch("fixed-mode secret must not carry data")
    else:
        if csk.data is None:
            raise ModeMismatch("arbitrary-mode secret must carry data")
        try:
            ek = parse_ek(m)
        except EncodingError as exc:
            raise MalformedMessage(str(exc)) from exc
        if rng is None:
            raise ValueError("arbitrary-mode redeem needs an rng for encryption randomness")

    cpk = coin_public_key(params, csk)
    tree = tree_for(cpks, sec.tree_depth)
    j = tree.index_of(cpk)
    if j < 0:
        return None
    path = tree.prove(j)
    st = tree.state
    tag = tag_eval(csk.without_data(), sec.lambda_bits)

    if params.mode is Mode.FIXED:
        stmt = FixedRedeemStmt(st, tag, bytes(m))
        proof = nizk_prove(params.keys, RelationId.FIXED_REDEEM, stmt,
                           FixedRedeemWit(j, csk, path), sec)
        return RedeemResult(tag, proof)

    r_enc = rng.randrange(1, group.Q)
    c = hom_enc(ek, csk.data, r_enc, sec.plaintext_range_bits)
    stmt = ArbRedeemStmt(st, tag, bytes(m), c)
    wit = ArbRedeemWit(csk.k, csk.r, csk.data, path, r_enc, j)
    proof = nizk_prove(params.keys, RelationId.ARB_REDEEM, stmt, wit, sec)
    return RedeemResult(tag, proof, c)


def dtl_verify(params: DtlParams, st: AccumulatorState, tag: bytes, proof: Proof, m: bytes,
               c: Optional[HomCiphertext] = None) -> int:
    if params.mode is Mode.FIXED:
        if c is not None:
            return 0
        stmt = FixedRedeemStmt(st, Tag(tag), bytes(m))
    else:
        if c is None:
            return 0
        try:
            parse_ek(m)
        except EncodingError:
            return 0
        stmt = ArbRedeemStmt(st, Tag(tag), bytes(m), c)
    return nizk_verify(params.keys, params.mode.relation, stmt, proof)


def verify_result(params: DtlParams, st: AccumulatorState, result: RedeemResult, m: bytes) -> int:
    return dtl_verify(params, st, result.tag, result.proof, m, result.ciphertext)
