"""Tagged contract-call payloads and their canonical binary codec."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import ClassVar, Optional, Union

from .crypto_core import AccumulatorState, HomCiphertext, SecParams, group
from .encoding import Reader, Writer
from .errors import EncodingError
from .proof_system import Proof
from .scheme import Mode


# field codecs keyed by annotation string
def _w_state(w: Writer, v: AccumulatorState) -> None:
    w.raw(v.encode())


def _r_state(r: Reader) -> AccumulatorState:
    return AccumulatorState(r.fixed(32), r.u64())


def _w_proof(w: Writer, v: Proof) -> None:
    w.text(v.backend_id).var(v.bytes)


def _r_proof(r: Reader) -> Proof:
    backend_id = r.text()
    return Proof(r.var(), backend_id)


def _r_ct(r: Reader) -> HomCiphertext:
    return HomCiphertext.decode(r.fixed(2 * group.ELEMENT_BYTES))


def _w_sec(w: Writer, v: SecParams) -> None:
    w.raw(v.encode())


def _r_sec(r: Reader) -> SecParams:
    try:
        return SecParams(r.u32(), r.u32(), r.u32(), r.u32())
    except ValueError as exc:
        raise EncodingError(str(exc)) from exc


_CODECS = {
    "bytes": (lambda w, v: w.var(v), lambda r: r.var()),
    "int": (lambda w, v: w.u64(v), lambda r: r.u64()),
    "element": (lambda w, v: w.uint(v, group.ELEMENT_BYTES), lambda r: group.decode_element(r.fixed(group.ELEMENT_BYTES))),
    "AccumulatorState": (_w_state, _r_state),
    "Proof": (_w_proof, _r_proof),
    "HomCiphertext": (lambda w, v: w.raw(v.encode()), _r_ct),
    "SecParams": (_w_sec, _r_sec),
    "Mode": (lambda w, v: w.text(v.value), lambda r: Mode(r.text())),
}

element = int  # annotation marker: a validated group element


class Call:
    kind: ClassVar[int]

    def encode(self) -> bytes:
        w = Writer().u8(self.kind)
        for f in fields(self):
            _CODECS[f.type][0](w, getattr(self, f.name))
        return w.getvalue()


_REGISTRY: dict[int, type] = {}


def call_type(kind: int):
    """Register a frozen call dataclass under a one-byte kind."""
    def deco(cls):
        cls.kind = kind
        _REGISTRY[kind] = cls
        return dataclass(frozen=True)(cls)
    return deco


@call_type(1)
class DeployTumbler(Call):
    mode: Mode
    sec: SecParams
    setup_seed: bytes
    amt_fixed: int


@call_type(2)
class DeployVote(Call):
    sec: SecParams
    setup_seed: bytes


@call_type(3)
class Deposit(Call):
    cpk: bytes  # fixed mode: cpk; arbitrary mode: the inner key cpk'


@call_type(4)
class Withdraw(Call):
    st: AccumulatorState
    tag: bytes
    proof: Proof
    m: bytes


@call_type(5)
class ConfidentialDeposit(Call):
    c_transfer: HomCiphertext
    cpk: bytes
    ek_sender: element
    proof: Proof


@call_type(6)
class UCWithdraw(Call):
    st: AccumulatorState
    tag: bytes
    proof: Proof
    c: HomCiphertext
    m: bytes


@call_type(7)
class RegisterCandidate(Call):
    ek: element


@call_type(8)
class AdvanceStage(Call):
    pass


@call_type(9)
class Register(Call):
    cpk_inner: bytes
    vote_power: int


@call_type(10)
class Vote(Call):
    st: AccumulatorState
    tag: bytes
    proof: Proof
    c: HomCiphertext
    m: bytes


@call_type(11)
class Reveal(Call):
    ek: element
    bal: int
    proof: Proof


Payload = Optional[Call]


def encode_payload(p: Payload) -> bytes:
    return b"\x00" if p is None else p.encode()


def decode_payload(r: Reader) -> Payload:
    kind = r.u8()
    if kind == 0:
        return None
    cls = _REGISTRY.get(kind)
    if cls is None:
        raise EncodingError(f"unknown call kind {kind}")
    return cls(**{f.name: _CODECS[f.type][1](r) for f in fields(cls)})


CallTypes = Union[DeployTumbler, DeployVote, Deposit, Withdraw, ConfidentialDeposit, UCWithdraw,
                  RegisterCandidate, AdvanceStage, Register, Vote, Reveal]
