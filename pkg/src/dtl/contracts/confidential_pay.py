"""Unlinkable confidential payment: tumbler in arbitrary mode plus encrypted balances.

Transparent deposit puts ``amt`` tokens in the pool and commits to it.
Confidential deposit burns an encrypted amount from an account instead.
Withdrawal funds the encryption key leading ``m`` with a fresh ciphertext.
"""

from __future__ import annotations

from ..calls import ConfidentialDeposit, DeployTumbler, Deposit, UCWithdraw
from ..crypto_core import commit, encode_ek, parse_ek
from ..encoding import Writer
from ..errors import AmountMismatch, EncodingError, InvalidProof, MalformedMessage, UnknownTarget
from ..ledger import CallContext, Contract
from ..proof_system import EqualityStmt, RelationId, nizk_verify
from ..scheme import Mode
from .tumbler import ConfState, TumblerState


class ConfidentialPay(Contract):
    kind = "confidential-pay"

    def __init__(self, tumbler: TumblerState, equality_keys) -> None:
        super().__init__()
        self.tumbler = tumbler
        self.conf = ConfState()
        self.equality_keys = equality_keys

    @classmethod
    def deploy(cls, ctx: CallContext, call: DeployTumbler) -> "ConfidentialPay":
        params = ctx.setup.dtl_params(Mode.ARBITRARY, call.sec, call.setup_seed)
        return cls(TumblerState(params), ctx.setup.keys(RelationId.EQUALITY, call.setup_seed))

    def handle(self, ctx: CallContext, call) -> None:
        if isinstance(call, Deposit):
            self.transparent_deposit(ctx, call.cpk)
        elif isinstance(call, ConfidentialDeposit):
            self.confidential_deposit(ctx, call)
        elif isinstance(call, UCWithdraw):
            self.uc_withdraw(ctx, call)
        else:
            raise UnknownTarget(f"{self.kind} has no entry point for {type(call).__name__}")

    @property
    def range_bits(self) -> int:
        return self.tumbler.params.sec.plaintext_range_bits

    def transparent_deposit(self, ctx: CallContext, cpk_inner: bytes) -> None:
        amt = ctx.value
        if not 0 < amt < 1 << self.range_bits:
            raise AmountMismatch(f"deposit amount {amt} outside (0, 2^{self.range_bits})")
        if len(cpk_inner) != 32:
            raise MalformedMessage("coin public key must be 32 bytes")
        self.tumbler.accept_deposit(ctx, commit(amt, cpk_inner, self.range_bits))

    def confidential_deposit(self, ctx: CallContext, call: ConfidentialDeposit) -> None:
        if ctx.value:
            raise AmountMismatch("confidential deposit carries no transparent value")
        c_bal = self.conf.read(call.ek_sender)
        stmt = EqualityStmt(c_bal, call.c_transfer, call.cpk, call.ek_sender)
        if not nizk_verify(self.equality_keys, RelationId.EQUALITY, stmt, call.proof):
            raise InvalidProof("equality proof rejected")
        self.tumbler.accept_deposit(ctx, call.cpk)
        self.conf.burn(call.ek_sender, call.c_transfer)

    def uc_withdraw(self, ctx: CallContext, call: UCWithdraw) -> None:
        if ctx.value:
            raise AmountMismatch("withdraw carries no value")
        self.tumbler.check_redeem(call.st, call.tag, call.proof, call.m, call.c)
        try:
            ek = parse_ek(call.m)
        except EncodingError as exc:  # pragma: no cover - verify already parsed it
            raise MalformedMessage(str(exc)) from exc
        self.conf.fund(ek, call.c)
        ctx.emit("UCWithdraw", Writer().fixed(call.tag, 32).raw(encode_ek(ek)).getvalue())

    def encode_state(self) -> bytes:
        return self.tumbler.encode_state() + self.conf.encode_state()
