from __future__ import annotations

import random

import pytest

from dtl.calls import Call, Deposit, call_type
from dtl.errors import DuplicateAccount, EncodingError
from dtl.ledger import (
    Contract,
    LedgerState,
    ReplayLog,
    Transaction,
    address,
    apply_tx,
    genesis,
    read_events,
    register_factory,
    replay,
)
from dtl.wallet import FixedPayWallet, deploy_fixed_pay

A, B, C = address("a"), address("b"), address("c")


# a contract that pays out, logs, and then optionally crashes mid-call

@call_type(200)
class DeployFaulty(Call):
    seed: int


@call_type(201)
class Poke(Call):
    to: bytes
    amount: int
    crash: int


class Faulty(Contract):
    kind = "faulty"

    def __init__(self) -> None:
        super().__init__()
        self.counter = 0
        self.log = []

    def handle(self, ctx, call) -> None:
        ctx.pay(call.to, call.amount)
        ctx.emit("Poke", bytes([call.crash]))
        self.counter += 1
        self.log.append(call.amount)
        if call.crash:
            raise RuntimeError("injected fault")

    def encode_state(self) -> bytes:
        return self.counter.to_bytes(8, "big")


register_factory(DeployFaulty, lambda ctx, call: Faulty())


def test_genesis():
    assert LedgerState.genesis([]).total_supply() == 0
    s = genesis([(A, 10), (B, 5)])
    assert s.total_supply() == 15 and s.balance(A) == 10
    with pytest.raises(DuplicateAccount):
        genesis([(A, 1), (A, 2)])


def test_genesis_digest_deterministic():
    assert genesis([(A, 3)]).digest() == genesis([(A, 3)]).digest()
    assert genesis([(A, 3)]).digest() != genesis([(A, 4)]).digest()


def test_transfer_moves_exactly():
    s = genesis([(A, 10), (B, 0)])
    s, rec = apply_tx(s, Transaction(A, B, 5))
    assert rec.ok and s.balance(A) == 5 and s.balance(B) == 5
    # to a fresh address creates it
    assert s.apply(Transaction(A, C, 1)).ok and s.balance(C) == 1


def test_rejections_leave_state():
    s = genesis([(A, 10)])
    d = s.digest()
    for tx, err in [
        (Transaction(A, B, 11), "InsufficientFunds"),
        (Transaction(C, A, 1), "UnknownAccount"),
        (Transaction(A, B, 1, Deposit(bytes(32))), "UnknownTarget"),
        (Transaction(A, B, -1), "MalformedMessage"),
    ]:
        rec = s.apply(tx)
        assert not rec.ok and rec.error == err
    assert s.balances == {A: 10}
    assert s.tx_count == 4 and s.digest() != d  # log grows even for rejected txs


def test_atomicity_with_fault_injection():
    s = genesis([(A, 100)])
    cid = s.apply(Transaction(A, b"", 20, DeployFaulty(0))).contract_id
    assert s.contract(cid).pool == 20
    assert s.apply(Transaction(A, cid, 0, Poke(B, 5, 0))).ok
    before = (dict(s.balances), s.contract(cid).pool, len(s.events), s.contract(cid).counter)
    rec = s.apply(Transaction(A, cid, 7, Poke(C, 9, 1)))
    assert not rec.ok and rec.error == "RuntimeError"
    c = s.contract(cid)
    assert (dict(s.balances), c.pool, len(s.events), c.counter) == before
    assert c.log == [5]
    assert s.total_supply() == 100


def test_contract_call_needs_payload():
    s = genesis([(A, 100)])
    cid = s.apply(Transaction(A, b"", 0, DeployFaulty(0))).contract_id
    rec = s.apply(Transaction(A, cid, 3))
    assert rec.error == "MalformedMessage" and s.balance(A) == 100


def test_conservation_random_txs():
    rng = random.Random(11)
    users = [address(f"u{i}") for i in range(6)]
    s = genesis([(u, 1000) for u in users])
    supply = s.total_supply()
    cid = s.apply(deploy_fixed_pay(users[0], 10)).contract_id
    w = FixedPayWallet(s, cid, rng)
    coins = []
    for _ in range(1000):
        kind = rng.random()
        u = rng.choice(users)
        if kind < 0.5:
            s.apply(Transaction(u, rng.choice(users + [address("x")]), rng.randrange(0, 40)))
        elif kind < 0.75:
            tx, csk = w.deposit(u)
            if rng.random() < 0.1:
                tx = Transaction(u, cid, 9, tx.payload)  # wrong amount
            if s.apply(tx).ok:
                coins.append(csk)
        elif coins:
            csk = coins.pop(rng.randrange(len(coins)))
            s.apply(w.withdraw(u, csk, rng.choice(users)))
        assert s.total_supply() == supply
    assert s.contract(cid).pool == 10 * len(coins)


def test_events_and_filters():
    s = genesis([(A, 100)])
    cid = s.apply(deploy_fixed_pay(A, 10)).contract_id
    other = s.apply(deploy_fixed_pay(A, 10)).contract_id
    w = FixedPayWallet(s, cid, random.Random(0))
    rec = s.apply(w.deposit(A)[0])
    assert [e.label for e in rec.events] == ["Deposit"]
    assert len(read_events(s, cid, "Deposit")) == 1
    assert read_events(s, other, "Deposit") == []
    assert len(read_events(s, label="Deploy")) == 2
    assert genesis().read_events() == []


def test_tx_roundtrip():
    tx = Transaction(A, B, 7, Poke(C, 3, 1))
    assert Transaction.decode(tx.encode()) == tx
    with pytest.raises(EncodingError):
        Transaction.decode(tx.encode() + b"\x00")


def _demo_ledger():
    rng = random.Random(5)
    s = genesis([(A, 100), (B, 0)])
    cid = s.apply(deploy_fixed_pay(A, 10)).contract_id
    w = FixedPayWallet(s, cid, rng)
    secrets = []
    for _ in range(3):
        tx, csk = w.deposit(A)
        s.apply(tx)
        secrets.append(csk)
    for csk in secrets:
        s.apply(w.withdraw(A, csk, B))
    s.apply(w.withdraw(A, secrets[0], B))  # rejected double redeem is replayed too
    return s


def test_replay_roundtrip():
    s = _demo_ledger()
    state, match = replay(s.encode_log())
    assert match and state.digest() == s.digest()
    assert state.balance(B) == 30


def test_replay_flipped_byte_mismatch():
    blob = bytearray(_demo_ledger().encode_log())
    blob[len(blob) // 2] ^= 0x01
    try:
        _, match = replay(bytes(blob))
    except EncodingError:
        match = False
    assert not match


def test_replay_empty_log_is_genesis():
    s = genesis([(A, 9)])
    state, match = replay(s.encode_log())
    assert match and state.digest() == genesis([(A, 9)]).digest()
    log = ReplayLog.decode(s.encode_log())
    assert log.txs == []


def test_replay_rejects_garbage():
    with pytest.raises(EncodingError):
        ReplayLog.decode(b"nope")
    good = genesis([(A, 1)]).encode_log()
    with pytest.raises(EncodingError):
        ReplayLog.decode(good[:6] + b"\x09" + good[7:])
