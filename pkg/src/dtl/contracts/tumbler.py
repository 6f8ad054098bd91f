"""State shared by the application contracts: the tumbler and the confidential balances."""

from __future__ import annotations

from collections import deque
from typing import Optional

from ..crypto_core import (
    ZERO_CIPHERTEXT,
    AccumulatorState,
    HomCiphertext,
    IncrementalMerkleTree,
    encode_ek,
)
from ..encoding import Writer
from ..errors import DoubleRedeem, InvalidProof, MalformedMessage, StaleRoot, UnknownAccount
from ..proof_system import Proof
from ..scheme import DtlParams, dtl_verify


class TumblerState:
    """AccHistory, the k-root withdraw window and the spent-tag list."""

    def __init__(self, params: DtlParams) -> None:
        self.params = params
        self.acc_history: list[bytes] = []
        self.tree = IncrementalMerkleTree(params.sec.tree_depth)
        self.acc_list_wdr: deque[AccumulatorState] = deque(maxlen=params.sec.root_window_k)
        self.tag_list: set[bytes] = set()

    def accept_deposit(self, ctx, leaf: bytes) -> AccumulatorState:
        if not isinstance(leaf, bytes) or len(leaf) != 32:
            raise MalformedMessage("coin public key must be 32 bytes")
        st = self.tree.insert(leaf)
        self.acc_history.append(leaf)
        self.acc_list_wdr.append(st)
        ctx.emit("Deposit", Writer().fixed(leaf, 32).u64(st.leaf_count - 1).raw(st.encode()).getvalue())
        return st

    def accepts_root(self, st: AccumulatorState) -> bool:
        return st in self.acc_list_wdr

    def check_redeem(self, st: AccumulatorState, tag: bytes, proof: Proof, m: bytes,
                     c: Optional[HomCiphertext] = None) -> None:
        """Window, fresh tag, then proof. Records the tag only if all three pass."""
        if not self.accepts_root(st):
            raise StaleRoot("root not among the recent accumulator states")
        if tag in self.tag_list:
            raise DoubleRedeem("tag already spent")
        if not dtl_verify(self.params, st, tag, proof, m, c):
            raise InvalidProof("redeem proof rejected")
        self.tag_list.add(tag)

    def encode_state(self) -> bytes:
        w = Writer().text(self.params.mode.value).raw(self.params.sec.encode())
        w.u32(len(self.acc_history))
        for x in self.acc_history:
            w.fixed(x, 32)
        w.u32(len(self.acc_list_wdr))
        for st in self.acc_list_wdr:
            w.raw(st.encode())
        w.u32(len(self.tag_list))
        for t in sorted(self.tag_list):
            w.fixed(t, 32)
        return w.getvalue()


class ConfState:
    """Per-ek encrypted balances with Fund/Burn."""

    def __init__(self) -> None:
        self.accounts: dict[int, HomCiphertext] = {}

    def fund(self, ek: int, c: HomCiphertext) -> None:
        # absent accounts start at an encryption of zero
        self.accounts[ek] = self.accounts.get(ek, ZERO_CIPHERTEXT) + c

    def burn(self, ek: int, c: HomCiphertext) -> None:
        if ek not in self.accounts:
            raise UnknownAccount("no confidential account for this key")
        self.accounts[ek] = self.accounts[ek] - c

    def read(self, ek: int) -> HomCiphertext:
        if ek not in self.accounts:
            raise UnknownAccount("no confidential account for this key")
        return self.accounts[ek]

    def encode_state(self) -> bytes:
        w = Writer().u32(len(self.accounts))
        for ek in sorted(self.accounts):
            w.raw(encode_ek(ek)).raw(self.accounts[ek].encode())
        return w.getvalue()


def conf_fund(conf: ConfState, ek: int, c: HomCiphertext) -> None:
    conf.fund(ek, c)


def conf_burn(conf: ConfState, ek: int, c: HomCiphertext) -> None:
    conf.burn(ek, c)


def conf_read(conf: ConfState, ek: int) -> HomCiphertext:
    return conf.read(ek)
