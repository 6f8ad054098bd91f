"""Relations checked in the clear, and the reference NIZK backend.

The reference backend is a designated-setup MAC: whoever holds the setup key
checks the relation on the witness and then authenticates the canonical
statement encoding. Proofs depend on the statement only, so they carry no
information about the witness. Soundness holds against anyone without the
setup key. It is *not* a SNARK. Swap in a real backend through
:class:`NizkBackend` when one is available.
"""

from __future__ import annotations

import hmac
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Protocol, Union

from .crypto_core import (
    AccumulatorState,
    CoinPublicKey,
    CoinSecret,
    Domain,
    H,
    HomCiphertext,
    MerklePath,
    SecParams,
    Tag,
    commit,
    decrypts_to,
    derive,
    encode_ek,
    hom_enc,
    mt_verify,
    parse_ek,
    prf_eval,
    tag_eval,
    tag_kgen,
)
from .crypto_core import group
from .encoding import Writer
from .errors import DtlError, RelationMismatch, UnsatisfiedRelation

PROOF_BYTES = 32
MAC_BACKEND_ID = "mac-ref/v1"


class RelationId(IntEnum):
    FIXED_REDEEM = 1
    ARB_REDEEM = 2
    EQUALITY = 3
    REVEAL = 4


# -- statements --------------------------------------------------------------

@dataclass(frozen=True)
class FixedRedeemStmt:
    st: AccumulatorState
    tag: Tag
    m: bytes

    def encode(self) -> bytes:
        return (Writer().u8(RelationId.FIXED_REDEEM).raw(self.st.encode())
                .fixed(self.tag, 32).var(self.m).getvalue())


@dataclass(frozen=True)
class ArbRedeemStmt:
    st: AccumulatorState
    tag: Tag
    m: bytes
    c: HomCiphertext

    def encode(self) -> bytes:
        return (Writer().u8(RelationId.ARB_REDEEM).raw(self.st.encode())
                .fixed(self.tag, 32).var(self.m).raw(self.c.encode()).getvalue())


@dataclass(frozen=True)
class EqualityStmt:
    c_bal: HomCiphertext
    c_transfer: HomCiphertext
    cpk: CoinPublicKey
    ek_sender: int

    def encode(self) -> bytes:
        return (Writer().u8(RelationId.EQUALITY).raw(self.c_bal.encode())
                .raw(self.c_transfer.encode()).fixed(self.cpk, 32)
                .raw(encode_ek(self.ek_sender)).getvalue())


@dataclass(frozen=True)
class RevealStmt:
    ek: int
    c: HomCiphertext
    bal: int

    def encode(self) -> bytes:
        return (Writer().u8(RelationId.REVEAL).raw(encode_ek(self.ek))
                .raw(self.c.encode()).u64(self.bal).getvalue())


Statement = Union[FixedRedeemStmt, ArbRedeemStmt, EqualityStmt, RevealStmt]


# -- witnesses ---------------------------------------------------------------

@dataclass(frozen=True)
class FixedRedeemWit:
    index: int
    csk: CoinSecret
    path: MerklePath


@dataclass(frozen=True)
class ArbRedeemWit:
    k: bytes
    r: bytes
    data: int
    path: MerklePath
    r_enc: int
    index: int


@dataclass(frozen=True)
class EqualityWit:
    bal: int
    dk: int
    csk: CoinSecret  # data field carries the deposited amount


@dataclass(frozen=True)
class RevealWit:
    dk: int


Witness = Union[FixedRedeemWit, ArbRedeemWit, EqualityWit, RevealWit]

_VARIANTS = {
    RelationId.FIXED_REDEEM: (FixedRedeemStmt, FixedRedeemWit),
    RelationId.ARB_REDEEM: (ArbRedeemStmt, ArbRedeemWit),
    RelationId.EQUALITY: (EqualityStmt, EqualityWit),
    RelationId.REVEAL: (RevealStmt, RevealWit),
}


def _in_range(x: int, bits: int) -> bool:
    return isinstance(x, int) and 0 <= x < (1 << bits)


def _fixed_redeem(stmt: FixedRedeemStmt, wit: FixedRedeemWit, sec: SecParams) -> bool:
    cpk = tag_kgen(wit.csk, sec.lambda_bits)
    return (
        wit.index < stmt.st.leaf_count
        and bool(mt_verify(wit.index, cpk, stmt.st.root, wit.path))
        and stmt.tag == tag_eval(wit.csk, sec.lambda_bits)
    )


def _arb_redeem(stmt: ArbRedeemStmt, wit: ArbRedeemWit, sec: SecParams) -> bool:
    bits = sec.plaintext_range_bits
    if not _in_range(wit.data, bits):  # predicate P
        return False
    ek = parse_ek(stmt.m)
    csk = CoinSecret(wit.k, wit.r)
    inner = tag_kgen(csk, sec.lambda_bits)
    cpk = commit(wit.data, inner, bits)
    return (
        wit.index < stmt.st.leaf_count
        and bool(mt_verify(wit.index, cpk, stmt.st.root, wit.path))
        and stmt.tag == tag_eval(csk, sec.lambda_bits)
        and stmt.c == hom_enc(ek, wit.data, wit.r_enc % group.Q, bits)
    )


def _equality(stmt: EqualityStmt, wit: EqualityWit, sec: SecParams) -> bool:
    bits = sec.plaintext_range_bits
    amt = wit.csk.data
    if amt is None or not _in_range(amt, bits) or not _in_range(wit.bal, bits):
        return False
    if not 0 < wit.dk < group.Q or derive(wit.dk) != stmt.ek_sender:
        return False
    if not 0 <= amt <= wit.bal:
        return False
    inner = tag_kgen(wit.csk.without_data(), sec.lambda_bits)
    return (
        stmt.cpk == commit(amt, inner, bits)
        and decrypts_to(wit.dk, stmt.c_bal, wit.bal, bits)
        and decrypts_to(wit.dk, stmt.c_transfer, amt, bits)
    )


def _reveal(stmt: RevealStmt, wit: RevealWit, sec: SecParams) -> bool:
    bits = sec.plaintext_range_bits
    if not 0 < wit.dk < group.Q or derive(wit.dk) != stmt.ek:
        return False
    return _in_range(stmt.bal, bits) and decrypts_to(wit.dk, stmt.c, stmt.bal, bits)


_CHECKS = {
    RelationId.FIXED_REDEEM: _fixed_redeem,
    RelationId.ARB_REDEEM: _arb_redeem,
    RelationId.EQUALITY: _equality,
    RelationId.REVEAL: _reveal,
}


def relation_eval(rel: RelationId, stmt: Statement, wit: Witness,
                  sec: Optional[SecParams] = None) -> int:
    stmt_t, wit_t = _VARIANTS[RelationId(rel)]
    if not isinstance(stmt, stmt_t) or not isinstance(wit, wit_t):
        raise RelationMismatch(
            f"{rel.name} expects {stmt_t.__name__}/{wit_t.__name__}, "
            f"got {type(stmt).__name__}/{type(wit).__name__}")
    try:
        return int(_CHECKS[rel](stmt, wit, sec or SecParams()))
    except DtlError:
        # malformed pieces (bad key length, out-of-range data, bad ek) just fail the relation
        return 0


# -- NIZK --------------------------------------------------------------------

@dataclass(frozen=True)
class Proof:
    bytes: bytes
    backend_id: str = MAC_BACKEND_ID

    def encode(self) -> bytes:
        return Writer().text(self.backend_id).var(self.bytes).getvalue()


@dataclass(frozen=True)
class NizkKeys:
    """Proving and verification key. For the MAC backend they are the same secret."""

    relation: RelationId
    prv_key: bytes
    vrfy_key: bytes

    def __repr__(self) -> str:
        return f"NizkKeys(relation={self.relation.name}, key=<hidden>)"

    def __deepcopy__(self, memo):
        return self


class NizkBackend(Protocol):
    backend_id: str

    def setup(self, rel: RelationId, seed: bytes) -> NizkKeys: ...

    def prove(self, keys: NizkKeys, rel: RelationId, stmt: Statement, wit: Witness,
              sec: Optional[SecParams] = None) -> Proof: ...

    def verify(self, keys: NizkKeys, rel: RelationId, stmt: Statement, proof: Proof) -> int: ...


def _seed_bytes(seed: Union[bytes, int, str]) -> bytes:
    if isinstance(seed, bytes):
        return seed
    if isinstance(seed, int):
        return Writer().u64(seed).getvalue()
    return seed.encode("utf-8")


class MacNizk:
    backend_id = MAC_BACKEND_ID

    def setup(self, rel: RelationId, seed: Union[bytes, int, str]) -> NizkKeys:
        rel = RelationId(rel)
        key = H(Domain.TRANSCRIPT,
                Writer().text("nizk-setup").u8(rel).var(_seed_bytes(seed)).getvalue())[:16]
        return NizkKeys(rel, key, key)

    def _mac(self, key: bytes, rel: RelationId, stmt: Statement) -> bytes:
        return prf_eval(key, bytes((rel,)) + stmt.encode(), domain=Domain.NIZK_MAC)

    def prove(self, keys: NizkKeys, rel: RelationId, stmt: Statement, wit: Witness,
              sec: Optional[SecParams] = None) -> Proof:
        rel = RelationId(rel)
        if keys.relation != rel:
            raise RelationMismatch(f"keys are for {keys.relation.name}, not {rel.name}")
        if not relation_eval(rel, stmt, wit, sec):
            raise UnsatisfiedRelation(f"witness does not satisfy {rel.name}")
        return Proof(self._mac(keys.prv_key, rel, stmt))

    def verify(self, keys: NizkKeys, rel: RelationId, stmt: Statement, proof: Proof) -> int:
        if keys.relation != rel or proof.backend_id != self.backend_id:
            return 0
        if len(proof.bytes) != PROOF_BYTES:
            return 0
        try:
            expected = self._mac(keys.vrfy_key, RelationId(rel), stmt)
        except DtlError:
            return 0
        return int(hmac.compare_digest(expected, proof.bytes))


DEFAULT_BACKEND: NizkBackend = MacNizk()


def nizk_setup(rel: RelationId, seed: Union[bytes, int, str]) -> NizkKeys:
    return DEFAULT_BACKEND.setup(rel, seed)


def nizk_prove(keys: NizkKeys, rel: RelationId, stmt: Statement, wit: Witness,
               sec: Optional[SecParams] = None) -> Proof:
    return DEFAULT_BACKEND.prove(keys, rel, stmt, wit, sec)


def nizk_verify(keys: NizkKeys, rel: RelationId, stmt: Statement, proof: Proof) -> int:
    return DEFAULT_BACKEND.verify(keys, rel, stmt, proof)
