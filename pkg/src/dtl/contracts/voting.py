"""Unlinkable weighted voting on top of the arbitrary-data tumbler.

Stages run Setup -> Registration -> Voting -> Reveal and only the deployer
advances them. Candidates register an encryption key during Setup. Voters
escrow ``vote_power`` tokens to register a committed coin, then redeem it
toward one candidate's key; the candidate's encrypted tally grows
homomorphically and is opened with a reveal proof at the end.
"""

from __future__ import annotations

from enum import IntEnum

from ..calls import AdvanceStage, DeployVote, Register, RegisterCandidate, Reveal, Vote
from ..crypto_core import ZERO_CIPHERTEXT, commit, encode_ek, group, parse_ek
from ..encoding import Writer
from ..errors import (
    AmountMismatch,
    DuplicateAccount,
    EncodingError,
    InvalidProof,
    MalformedMessage,
    RangeViolation,
    Unauthorized,
    UnknownCandidate,
    UnknownTarget,
    WrongStage,
)
from ..ledger import CallContext, Contract
from ..proof_system import RelationId, RevealStmt, nizk_verify
from ..scheme import Mode
from .tumbler import ConfState, TumblerState


class Stage(IntEnum):
    SETUP = 0
    REGISTRATION = 1
    VOTING = 2
    REVEAL = 3


class Voting(Contract):
    kind = "vote"

    def __init__(self, owner: bytes, tumbler: TumblerState, reveal_keys) -> None:
        super().__init__()
        self.owner = owner
        self.stage = Stage.SETUP
        self.candidates: list[int] = []
        self.tumbler = tumbler
        self.conf = ConfState()
        self.revealed: dict[int, int] = {}
        self.reveal_keys = reveal_keys

    @classmethod
    def deploy(cls, ctx: CallContext, call: DeployVote) -> "Voting":
        params = ctx.setup.dtl_params(Mode.ARBITRARY, call.sec, call.setup_seed)
        return cls(ctx.sender, TumblerState(params), ctx.setup.keys(RelationId.REVEAL, call.setup_seed))

    def handle(self, ctx: CallContext, call) -> None:
        if isinstance(call, RegisterCandidate):
            self.register_candidate(ctx, call.ek)
        elif isinstance(call, AdvanceStage):
            self.advance_stage(ctx)
        elif isinstance(call, Register):
            self.accept_registration(ctx, call.cpk_inner, call.vote_power)
        elif isinstance(call, Vote):
            self.accept_vote(ctx, call)
        elif isinstance(call, Reveal):
            self.accept_reveal(ctx, call)
        else:
            raise UnknownTarget(f"{self.kind} has no entry point for {type(call).__name__}")

    def get_stage(self) -> Stage:
        return self.stage

    def _require(self, stage: Stage) -> None:
        if self.stage != stage:
            raise WrongStage(f"needs stage {stage.name}, currently {self.stage.name}")

    def register_candidate(self, ctx: CallContext, ek: int) -> None:
        self._require(Stage.SETUP)
        if ek == group.IDENTITY:
            raise MalformedMessage("identity is not a valid encryption key")
        if ek in self.conf.accounts:
            raise DuplicateAccount("candidate already registered")
        self.candidates.append(ek)
        self.conf.accounts[ek] = ZERO_CIPHERTEXT
        ctx.emit("Candidate", encode_ek(ek))

    def advance_stage(self, ctx: CallContext) -> None:
        if ctx.sender != self.owner:
            raise Unauthorized("only the deployer advances stages")
        if self.stage == Stage.REVEAL:
            raise WrongStage("already in the final stage")
        self.stage = Stage(self.stage + 1)
        ctx.emit("Stage", Writer().u8(self.stage).getvalue())

    def accept_registration(self, ctx: CallContext, cpk_inner: bytes, vote_power: int) -> None:
        self._require(Stage.REGISTRATION)
        bits = self.tumbler.params.sec.plaintext_range_bits
        if not 0 < vote_power < 1 << bits:
            raise RangeViolation(f"vote power {vote_power} outside (0, 2^{bits})")
        if ctx.value != vote_power:
            raise AmountMismatch(f"registration must escrow exactly {vote_power}")
        if len(cpk_inner) != 32:
            raise MalformedMessage("coin public key must be 32 bytes")
        self.tumbler.accept_deposit(ctx, commit(vote_power, cpk_inner, bits))

    def accept_vote(self, ctx: CallContext, call: Vote) -> None:
        self._require(Stage.VOTING)
        if ctx.value:
            raise AmountMismatch("vote carries no value")
        try:
            ek = parse_ek(call.m)
        except EncodingError as exc:
            raise MalformedMessage(str(exc)) from exc
        if ek not in self.candidates:
            raise UnknownCandidate("vote for an unregistered key")
        self.tumbler.check_redeem(call.st, call.tag, call.proof, call.m, call.c)
        self.conf.fund(ek, call.c)
        ctx.emit("Vote", Writer().fixed(call.tag, 32).getvalue())

    def accept_reveal(self, ctx: CallContext, call: Reveal) -> None:
        self._require(Stage.REVEAL)
        if call.ek not in self.candidates:
            raise UnknownCandidate("reveal for an unregistered key")
        stmt = RevealStmt(call.ek, self.conf.read(call.ek), call.bal)
        if not nizk_verify(self.reveal_keys, RelationId.REVEAL, stmt, call.proof):
            raise InvalidProof("reveal proof rejected")
        self.revealed[call.ek] = call.bal
        ctx.emit("Reveal", Writer().raw(encode_ek(call.ek)).u64(call.bal).getvalue())

    def encode_state(self) -> bytes:
        w = Writer().fixed(self.owner, 20).u8(self.stage).u32(len(self.candidates))
        for ek in self.candidates:
            w.raw(encode_ek(ek))
        w.raw(self.tumbler.encode_state()).raw(self.conf.encode_state())
        w.u32(len(self.revealed))
        for ek in sorted(self.revealed):
            w.raw(encode_ek(ek)).u64(self.revealed[ek])
        return w.getvalue()


def vote_get_stage(vote: Voting) -> Stage:
    return vote.get_stage()
