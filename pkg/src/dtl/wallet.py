"""Client-side helpers that build transactions for the hosted applications.

Wallets read public contract state (AccHistory, stored ciphertexts) and use
the trusted-setup keys held by the ledger registry to prove.
"""

from __future__ import annotations

import random
from typing import Optional

from .calls import (
    AdvanceStage,
    ConfidentialDeposit,
    DeployTumbler,
    DeployVote,
    Deposit,
    Register,
    RegisterCandidate,
    Reveal,
    UCWithdraw,
    Vote,
    Withdraw,
)
from .crypto_core import (
    CoinSecret,
    HomKeypair,
    SecParams,
    encode_ek,
    group,
    hom_dec,
    hom_enc,
    tag_kgen,
)
from .errors import DtlError
from .ledger import Address, LedgerState, Transaction
from .proof_system import (
    EqualityStmt,
    EqualityWit,
    RelationId,
    RevealStmt,
    RevealWit,
    nizk_prove,
)
from .scheme import DtlParams, Mode, dtl_accumulate, dtl_create, dtl_redeem


def deploy_fixed_pay(sender: Address, amt_fixed: int, sec: Optional[SecParams] = None,
                     setup_seed: bytes = b"fixed-pay") -> Transaction:
    return Transaction(sender, b"", 0, DeployTumbler(Mode.FIXED, sec or SecParams(), setup_seed, amt_fixed))


def deploy_confidential_pay(sender: Address, sec: Optional[SecParams] = None,
                            setup_seed: bytes = b"confidential-pay") -> Transaction:
    return Transaction(sender, b"", 0, DeployTumbler(Mode.ARBITRARY, sec or SecParams(), setup_seed, 0))


def deploy_vote(sender: Address, sec: Optional[SecParams] = None,
                setup_seed: bytes = b"vote") -> Transaction:
    return Transaction(sender, b"", 0, DeployVote(sec or SecParams(), setup_seed))


class _Wallet:
    def __init__(self, ledger: LedgerState, contract_id: bytes, rng: random.Random) -> None:
        self.ledger = ledger
        self.cid = contract_id
        self.rng = rng

    @property
    def contract(self):
        # re-read every time: a rolled-back tx swaps in the snapshot object
        return self.ledger.contract(self.cid)

    @property
    def params(self) -> DtlParams:
        return self.contract.tumbler.params

    def history(self, upto: Optional[int] = None) -> list[bytes]:
        """AccHistory, optionally truncated to the first ``upto`` leaves."""
        h = self.contract.tumbler.acc_history
        return list(h if upto is None else h[:upto])

    def _redeem(self, csk: CoinSecret, m: bytes, upto: Optional[int]):
        cpks = self.history(upto)
        res = dtl_redeem(self.params, cpks, csk, m, rng=self.rng)
        if res is None:
            raise DtlError("coin is not in the accumulated history")
        return dtl_accumulate(self.params, cpks), res


class FixedPayWallet(_Wallet):
    def deposit(self, sender: Address) -> tuple[Transaction, CoinSecret]:
        cpk, csk = dtl_create(self.params, rng=self.rng)
        return Transaction(sender, self.cid, self.contract.amt_fixed, Deposit(cpk)), csk

    def withdraw(self, sender: Address, csk: CoinSecret, recipient: Address, aux: bytes = b"",
                 upto: Optional[int] = None) -> Transaction:
        m = bytes(recipient) + aux
        st, res = self._redeem(csk, m, upto)
        return Transaction(sender, self.cid, 0, Withdraw(st, res.tag, res.proof, m))


class ConfidentialWallet(_Wallet):
    def deposit(self, sender: Address, amt: int) -> tuple[Transaction, CoinSecret]:
        """Transparent deposit of ``amt`` tokens."""
        _, csk = dtl_create(self.params, amt, rng=self.rng)
        inner = tag_kgen(csk.without_data(), self.params.sec.lambda_bits)
        return Transaction(sender, self.cid, amt, Deposit(inner)), csk

    def balance(self, kp: HomKeypair) -> int:
        return hom_dec(kp.dk, self.contract.conf.read(kp.ek), self.params.sec.plaintext_range_bits)

    def confidential_deposit(self, sender: Address, kp: HomKeypair, amt: int,
                             bal: Optional[int] = None) -> tuple[Transaction, CoinSecret]:
        """Burn ``amt`` from the encrypted balance of ``kp`` into a fresh coin.

        Raises UnsatisfiedRelation at prove time unless ``0 <= amt <= bal``.
        """
        bits = self.params.sec.plaintext_range_bits
        c_bal = self.contract.conf.read(kp.ek)
        if bal is None:
            bal = hom_dec(kp.dk, c_bal, bits)
        cpk, csk = dtl_create(self.params, amt, rng=self.rng)
        c_transfer = hom_enc(kp.ek, amt, self.rng.randrange(1, group.Q), bits)
        stmt = EqualityStmt(c_bal, c_transfer, cpk, kp.ek)
        proof = nizk_prove(self.contract.equality_keys, RelationId.EQUALITY, stmt,
                           EqualityWit(bal, kp.dk, csk), self.params.sec)
        return Transaction(sender, self.cid, 0, ConfidentialDeposit(c_transfer, cpk, kp.ek, proof)), csk

    def withdraw(self, sender: Address, csk: CoinSecret, ek_recv: int, aux: bytes = b"",
                 upto: Optional[int] = None) -> Transaction:
        m = encode_ek(ek_recv) + aux
        st, res = self._redeem(csk, m, upto)
        return Transaction(sender, self.cid, 0, UCWithdraw(st, res.tag, res.proof, res.ciphertext, m))


class VoteWallet(_Wallet):
    def register_candidate(self, sender: Address, ek: int) -> Transaction:
        return Transaction(sender, self.cid, 0, RegisterCandidate(ek))

    def advance(self, sender: Address) -> Transaction:
        return Transaction(sender, self.cid, 0, AdvanceStage())

    def register(self, sender: Address, power: int) -> tuple[Transaction, CoinSecret]:
        _, csk = dtl_create(self.params, power, rng=self.rng)
        inner = tag_kgen(csk.without_data(), self.params.sec.lambda_bits)
        return Transaction(sender, self.cid, power, Register(inner, power)), csk

    def vote(self, sender: Address, csk: CoinSecret, ek_candidate: int,
             upto: Optional[int] = None) -> Transaction:
        m = encode_ek(ek_candidate)
        st, res = self._redeem(csk, m, upto)
        return Transaction(sender, self.cid, 0, Vote(st, res.tag, res.proof, res.ciphertext, m))

    def tally(self, kp: HomKeypair) -> int:
        return hom_dec(kp.dk, self.contract.conf.read(kp.ek), self.params.sec.plaintext_range_bits)

    def reveal(self, sender: Address, kp: HomKeypair, bal: Optional[int] = None) -> Transaction:
        """Reveal the tally of ``kp``. A ``bal`` override keeps the honest proof, so it fails."""
        c = self.contract.conf.read(kp.ek)
        true_bal = hom_dec(kp.dk, c, self.params.sec.plaintext_range_bits)
        proof = nizk_prove(self.contract.reveal_keys, RelationId.REVEAL,
                           RevealStmt(kp.ek, c, true_bal), RevealWit(kp.dk), self.params.sec)
        return Transaction(sender, self.cid, 0, Reveal(kp.ek, true_bal if bal is None else bal, proof))
