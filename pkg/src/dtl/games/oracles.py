"""CreateO / RedeemO, the public view handed to adversaries, and transcripts."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from ..crypto_core import (
    AccumulatorState,
    CoinSecret,
    Domain,
    H,
    HomCiphertext,
    SecParams,
    encode_ek,
    group,
)
from ..encoding import Writer
from ..errors import DtlError
from ..proof_system import Proof, Statement, Witness, nizk_prove
from ..scheme import (
    DtlParams,
    Mode,
    RedeemResult,
    coin_public_key,
    dtl_accumulate,
    dtl_create,
    dtl_redeem,
    dtl_verify,
)


@dataclass(frozen=True)
class Claim:
    """What an adversary submits for verification: (tag, proof, m) plus c in arbitrary mode."""

    tag: bytes
    proof: Proof
    m: bytes
    c: Optional[HomCiphertext] = None

    @classmethod
    def of(cls, res: RedeemResult, m: bytes) -> "Claim":
        return cls(res.tag, res.proof, m, res.ciphertext)

    def encode(self) -> bytes:
        w = Writer().var(self.tag).raw(self.proof.encode()).var(self.m)
        w.u8(self.c is not None)
        if self.c is not None:
            w.raw(self.c.encode())
        return w.getvalue()


@dataclass(frozen=True)
class RedeemRecord:
    st: AccumulatorState
    cpk: bytes
    tag: bytes
    proof: Proof
    m: bytes


@dataclass
class OracleLog:
    C: dict = field(default_factory=dict)  # cpk -> csk
    R: list = field(default_factory=list)  # RedeemRecord, append-only

    def created(self, cpk: bytes) -> bool:
        return cpk in self.C

    def redeemed(self, st: AccumulatorState, tag: bytes, m: bytes) -> bool:
        """(st, ., tag, ., m) in R."""
        return any(r.st == st and r.tag == tag and r.m == m for r in self.R)

    def touched(self, cpk: bytes) -> bool:
        """(., cpk, ., ., .) in R."""
        return any(r.cpk == cpk for r in self.R)


class Transcript:
    def __init__(self, game: str, adversary: str, seed: int) -> None:
        self._w = Writer().text(game).text(adversary).u64(seed)

    def add(self, label: str, data: bytes) -> None:
        self._w.text(label).var(data)

    def digest(self) -> bytes:
        return H(Domain.TRANSCRIPT, b"game", self._w.getvalue())


class PublicView:
    """Everything an adversary may use: public parameters, verification, a
    relation-checking prover and honest local coin creation. The NIZK setup
    key stays inside; proofs exist only for satisfied relations."""

    def __init__(self, params: DtlParams, rng: random.Random) -> None:
        self._params = params
        self.rng = rng

    @property
    def mode(self) -> Mode:
        return self._params.mode

    @property
    def sec(self) -> SecParams:
        return self._params.sec

    @property
    def fixed_data(self) -> Optional[int]:
        return self._params.fixed_data

    def accumulate(self, cpks) -> AccumulatorState:
        return dtl_accumulate(self._params, cpks)

    def verify(self, st: AccumulatorState, claim: Claim) -> int:
        try:
            return dtl_verify(self._params, st, claim.tag, claim.proof, claim.m, claim.c)
        except DtlError:
            return 0

    def create(self, data: Optional[int] = None) -> tuple[bytes, CoinSecret]:
        if self.mode is Mode.FIXED:
            data = None
        elif data is None:
            data = 1
        return dtl_create(self._params, data, rng=self.rng)

    def public_key(self, csk: CoinSecret) -> bytes:
        return coin_public_key(self._params, csk)

    def redeem(self, cpks, csk: CoinSecret, m: bytes) -> Optional[Claim]:
        res = dtl_redeem(self._params, cpks, csk, m, rng=self.rng)
        return None if res is None else Claim.of(res, m)

    def prove(self, stmt: Statement, wit: Witness) -> Proof:
        """Prover oracle: raises UnsatisfiedRelation on a bad witness."""
        return nizk_prove(self._params.keys, self.mode.relation, stmt, wit, self.sec)

    def random_message(self) -> bytes:
        if self.mode is Mode.FIXED:
            return self.rng.randbytes(32)
        return encode_ek(group.g_pow(self.rng.randrange(1, group.Q))) + self.rng.randbytes(8)


class Oracles:
    def __init__(self, params: DtlParams, rng: random.Random, log: Optional[OracleLog] = None) -> None:
        self._params = params
        self.rng = rng
        self.log = log if log is not None else OracleLog()

    def create(self, data: Optional[int] = None) -> bytes:
        """CreateO(data)."""
        if self._params.mode is Mode.FIXED:
            data = None
        elif data is None:
            data = 1
        cpk, csk = dtl_create(self._params, data, rng=self.rng)
        self.log.C.setdefault(cpk, csk)
        return cpk

    def redeem(self, cpks, i: int, m: bytes) -> Optional[Claim]:
        """RedeemO(cpks, i, m) with 0-based ``i``; ``None`` plays the role of bottom."""
        cpks = list(cpks)
        if not 0 <= i < len(cpks) or cpks[i] not in self.log.C:
            return None
        csk = self.log.C[cpks[i]]
        try:
            res = dtl_redeem(self._params, cpks, csk, m, rng=self.rng)
        except DtlError:
            return None
        if res is None:  # pragma: no cover - cpk is in the list by construction
            return None
        st = dtl_accumulate(self._params, cpks)
        self.log.R.append(RedeemRecord(st, cpks[i], res.tag, res.proof, bytes(m)))
        return Claim.of(res, m)


def create_oracle(oracles: Oracles, data: Optional[int] = None) -> bytes:
    return oracles.create(data)


def redeem_oracle(oracles: Oracles, cpks, i: int, m: bytes) -> Optional[Claim]:
    return oracles.redeem(cpks, i, m)
