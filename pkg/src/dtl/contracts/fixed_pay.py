"""Unlinkable fixed-amount payment: deposit ``amt_fixed``, withdraw it to any address."""

from __future__ import annotations

from ..calls import DeployTumbler, Deposit, Withdraw
from ..encoding import Writer
from ..errors import AmountMismatch, MalformedMessage, UnknownTarget
from ..ledger import ADDRESS_BYTES, CallContext, Contract
from ..scheme import Mode
from .tumbler import TumblerState


class FixedPay(Contract):
    kind = "fixed-pay"

    def __init__(self, tumbler: TumblerState, amt_fixed: int) -> None:
        super().__init__()
        self.tumbler = tumbler
        self.amt_fixed = amt_fixed

    @classmethod
    def deploy(cls, ctx: CallContext, call: DeployTumbler) -> "FixedPay":
        if call.amt_fixed <= 0:
            raise AmountMismatch("fixed amount must be positive")
        params = ctx.setup.dtl_params(Mode.FIXED, call.sec, call.setup_seed, call.amt_fixed)
        return cls(TumblerState(params), call.amt_fixed)

    def handle(self, ctx: CallContext, call) -> None:
        if isinstance(call, Deposit):
            self.accept_deposit(ctx, call.cpk)
        elif isinstance(call, Withdraw):
            self.issue_withdraw(ctx, call)
        else:
            raise UnknownTarget(f"{self.kind} has no entry point for {type(call).__name__}")

    def accept_deposit(self, ctx: CallContext, cpk: bytes) -> None:
        if ctx.value != self.amt_fixed:
            raise AmountMismatch(f"deposit must be exactly {self.amt_fixed}, got {ctx.value}")
        self.tumbler.accept_deposit(ctx, cpk)

    def issue_withdraw(self, ctx: CallContext, call: Withdraw) -> None:
        if ctx.value:
            raise AmountMismatch("withdraw carries no value")
        self.tumbler.check_redeem(call.st, call.tag, call.proof, call.m)
        if len(call.m) < ADDRESS_BYTES:
            raise MalformedMessage("message must start with the recipient address")
        recipient = call.m[:ADDRESS_BYTES]
        ctx.pay(recipient, self.amt_fixed)
        ctx.emit("Withdraw", Writer().fixed(call.tag, 32).fixed(recipient, ADDRESS_BYTES)
                 .u64(self.amt_fixed).getvalue())

    def encode_state(self) -> bytes:
        return Writer().u64(self.amt_fixed).raw(self.tumbler.encode_state()).getvalue()
