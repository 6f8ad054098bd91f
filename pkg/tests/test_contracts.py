import random
from dataclasses import replace

import pytest

from dtl.contracts.tumbler import ConfState, conf_burn, conf_fund, conf_read
from dtl.contracts.voting import Stage, vote_get_stage
from dtl.crypto_core import (
    ZERO_CIPHERTEXT,
    SecParams,
    commit,
    group,
    hom_dec,
    hom_enc,
    hom_kgen,
    tag_kgen,
)
from dtl.errors import UnknownAccount, UnsatisfiedRelation
from dtl.ledger import LedgerState, Transaction, address
from dtl.calls import Deposit, Register
from dtl.wallet import (
    ConfidentialWallet,
    FixedPayWallet,
    VoteWallet,
    deploy_confidential_pay,
    deploy_fixed_pay,
    deploy_vote,
)

ALICE, BOB, CAROL = address("alice"), address("bob"), address("carol")


def fixed(k=30):
    s = LedgerState.genesis([(ALICE, 1000), (BOB, 0), (CAROL, 50)])
    cid = s.apply(deploy_fixed_pay(ALICE, 10, SecParams(root_window_k=k))).contract_id
    return s, cid, FixedPayWallet(s, cid, random.Random(1))


def confidential():
    s = LedgerState.genesis([(ALICE, 10**6), (BOB, 0)])
    cid = s.apply(deploy_confidential_pay(ALICE)).contract_id
    return s, cid, ConfidentialWallet(s, cid, random.Random(2))


# -- fixed-amount payment ------------------------------------------------------

def test_fixed_deposit():
    s, cid, w = fixed()
    rec = s.apply(w.deposit(ALICE)[0])
    assert rec.ok
    c = s.contract(cid)
    assert c.pool == 10 and len(c.tumbler.acc_history) == 1 and s.balance(ALICE) == 990


def test_fixed_deposit_wrong_value():
    s, cid, w = fixed()
    tx, _ = w.deposit(ALICE)
    d = s.contract(cid).encode_state()
    rec = s.apply(Transaction(ALICE, cid, 9, tx.payload))
    assert rec.error == "AmountMismatch"
    assert s.contract(cid).encode_state() == d and s.balance(ALICE) == 1000


def test_fixed_withdraw_pays_exactly_and_once():
    s, cid, w = fixed()
    tx, csk = w.deposit(ALICE)
    s.apply(tx)
    wd = w.withdraw(CAROL, csk, BOB)
    assert s.apply(wd).ok
    assert s.balance(BOB) == 10 and s.balance(CAROL) == 50 and s.contract(cid).pool == 0
    assert s.apply(wd).error == "DoubleRedeem"
    assert s.balance(BOB) == 10


def test_fixed_recipient_swap_rejected():
    s, cid, w = fixed()
    tx, csk = w.deposit(ALICE)
    s.apply(tx)
    wd = w.withdraw(ALICE, csk, BOB)
    swapped = Transaction(ALICE, cid, 0, replace(wd.payload, m=bytes(CAROL)))
    assert s.apply(swapped).error == "InvalidProof"
    assert s.balance(CAROL) == 50


def test_window_oracle_small_k():
    k = 3
    for j in range(k + 3):
        s, cid, w = fixed(k)
        tx, csk = w.deposit(ALICE)
        s.apply(tx)
        for _ in range(j):
            s.apply(w.deposit(ALICE)[0])
        rec = s.apply(w.withdraw(ALICE, csk, BOB, upto=1))
        assert rec.ok == (j <= k - 1), j
        if not rec.ok:
            assert rec.error == "StaleRoot"


def test_duplicate_cpk_strands_second_deposit():
    s, cid, w = fixed()
    tx, csk = w.deposit(ALICE)
    s.apply(tx)
    s.apply(tx)
    assert s.contract(cid).pool == 20
    assert s.apply(w.withdraw(ALICE, csk, BOB)).ok
    assert s.apply(w.withdraw(ALICE, csk, BOB)).error == "DoubleRedeem"
    assert s.contract(cid).pool == 10


# -- confidential payment --------------------------------------------------------

def test_transparent_deposit_then_uc_withdraw_decrypts():
    s, cid, w = confidential()
    kp = hom_kgen(b"bob-key")
    tx, csk = w.deposit(ALICE, 7)
    assert s.apply(tx).ok
    wd = w.withdraw(ALICE, csk, kp.ek)
    assert s.apply(wd).ok
    assert w.balance(kp) == 7
    assert s.apply(wd).error == "DoubleRedeem"


def test_uc_withdraw_stale_root():
    s = LedgerState.genesis([(ALICE, 10**6)])
    cid = s.apply(deploy_confidential_pay(ALICE, SecParams(root_window_k=2))).contract_id
    w = ConfidentialWallet(s, cid, random.Random(3))
    tx, csk = w.deposit(ALICE, 5)
    s.apply(tx)
    s.apply(w.deposit(ALICE, 1)[0])
    s.apply(w.deposit(ALICE, 1)[0])
    assert s.apply(w.withdraw(ALICE, csk, hom_kgen(b"x").ek, upto=1)).error == "StaleRoot"


def test_confidential_deposit_decrements_balance():
    s, cid, w = confidential()
    kp = hom_kgen(b"carol-key")
    tx, csk = w.deposit(ALICE, 10)
    s.apply(tx)
    s.apply(w.withdraw(ALICE, csk, kp.ek))
    tx, coin = w.confidential_deposit(ALICE, kp, 4)
    assert s.apply(tx).ok
    assert w.balance(kp) == 6
    assert s.contract(cid).pool == 10
    with pytest.raises(UnsatisfiedRelation):
        w.confidential_deposit(ALICE, kp, 7)
    # the coin pays out to another key
    other = hom_kgen(b"dave-key")
    assert s.apply(w.withdraw(ALICE, coin, other.ek)).ok
    assert w.balance(other) == 4


def test_confidential_deposit_rejects_value_and_forged_cpk():
    s, cid, w = confidential()
    kp = hom_kgen(b"k")
    tx, csk = w.deposit(ALICE, 10)
    s.apply(tx)
    s.apply(w.withdraw(ALICE, csk, kp.ek))
    tx, coin = w.confidential_deposit(ALICE, kp, 3)
    assert s.apply(replace(tx, value=1)).error == "AmountMismatch"
    inner = tag_kgen(coin.without_data())
    forged = replace(tx.payload, cpk=commit(9, inner))
    assert s.apply(Transaction(ALICE, cid, 0, forged)).error == "InvalidProof"
    assert w.balance(kp) == 10


def test_transparent_deposit_range():
    s = LedgerState.genesis([(ALICE, 10**6)])
    cid = s.apply(deploy_confidential_pay(ALICE, SecParams(plaintext_range_bits=8))).contract_id
    for value in (0, 256):
        assert s.apply(Transaction(ALICE, cid, value, Deposit(bytes(32)))).error == "AmountMismatch"
    assert s.apply(Transaction(ALICE, cid, 255, Deposit(bytes(32)))).ok


def test_conf_fund_burn():
    conf = ConfState()
    kp = hom_kgen(b"acct")
    with pytest.raises(UnknownAccount):
        conf_read(conf, kp.ek)
    with pytest.raises(UnknownAccount):
        conf_burn(conf, kp.ek, ZERO_CIPHERTEXT)
    c = hom_enc(kp.ek, 5, 9)
    conf_fund(conf, kp.ek, c)
    conf_fund(conf, kp.ek, hom_enc(kp.ek, 0, 4))
    assert hom_dec(kp.dk, conf_read(conf, kp.ek)) == 5
    before = conf_read(conf, kp.ek)
    conf_fund(conf, kp.ek, hom_enc(kp.ek, 3, 2))
    conf_burn(conf, kp.ek, hom_enc(kp.ek, 3, 2))
    assert conf_read(conf, kp.ek) == before
    assert before != c  # E(0) re-randomizes but keeps the plaintext

    rng = random.Random(8)
    total = 5
    for _ in range(30):
        a = rng.randrange(100)
        total += a
        conf_fund(conf, kp.ek, hom_enc(kp.ek, a, rng.randrange(1, group.Q)))
    assert hom_dec(kp.dk, conf_read(conf, kp.ek)) == total


# -- voting -----------------------------------------------------------------------

def voting():
    voters = [address(f"v{i}") for i in range(3)]
    s = LedgerState.genesis([(ALICE, 0)] + [(v, 100) for v in voters])
    cid = s.apply(deploy_vote(ALICE)).contract_id
    return s, cid, VoteWallet(s, cid, random.Random(4)), voters


def test_vote_full_flow():
    s, cid, w, voters = voting()
    yes, no = hom_kgen(b"yes"), hom_kgen(b"no")
    assert s.apply(w.register_candidate(ALICE, yes.ek)).ok
    assert s.apply(w.register_candidate(ALICE, no.ek)).ok
    assert s.apply(w.register_candidate(ALICE, no.ek)).error == "DuplicateAccount"
    assert s.apply(w.advance(ALICE)).ok
    assert vote_get_stage(s.contract(cid)) is Stage.REGISTRATION
    assert s.apply(w.register_candidate(ALICE, hom_kgen(b"late").ek)).error == "WrongStage"

    tx5, c5 = w.register(voters[0], 5)
    tx3, c3 = w.register(voters[1], 3)
    assert s.apply(tx5).ok and s.apply(tx3).ok
    c = s.contract(cid)
    assert len(c.tumbler.acc_history) == 2 and c.pool == 8
    assert c.tumbler.acc_history[1] == commit(3, tag_kgen(c3.without_data()))
    assert s.apply(w.reveal(ALICE, yes)).error == "WrongStage"
    assert s.apply(w.advance(voters[0])).error == "Unauthorized"
    assert s.apply(w.advance(ALICE)).ok

    assert s.apply(w.vote(voters[2], c5, yes.ek)).ok
    assert w.tally(yes) == 5
    assert s.apply(w.vote(voters[2], c5, no.ek)).error == "DoubleRedeem"
    assert s.apply(w.vote(voters[1], c3, hom_kgen(b"ghost").ek)).error == "UnknownCandidate"
    assert s.apply(w.vote(voters[1], c3, no.ek)).ok
    late, _ = w.register(voters[2], 2)
    assert s.apply(late).error == "WrongStage"

    assert s.apply(w.advance(ALICE)).ok
    for kp, t in ((yes, 5), (no, 3)):
        for delta in (-1, 1):
            assert s.apply(w.reveal(ALICE, kp, bal=t + delta)).error == "InvalidProof"
        assert s.apply(w.reveal(ALICE, kp)).ok
        assert s.contract(cid).revealed[kp.ek] == t
    assert s.apply(w.advance(ALICE)).error == "WrongStage"


def test_vote_registration_checks():
    s, cid, w, voters = voting()
    s.apply(w.advance(ALICE))
    tx, _ = w.register(voters[0], 4)
    assert s.apply(replace(tx, value=3)).error == "AmountMismatch"
    bad = Transaction(voters[0], cid, 0, Register(tx.payload.cpk_inner, 0))
    assert s.apply(bad).error == "RangeViolation"
    assert s.balance(voters[0]) == 100


def test_stages_advance_once_each():
    s, cid, w, _ = voting()
    seen = [vote_get_stage(s.contract(cid))]
    while s.apply(w.advance(ALICE)).ok:
        seen.append(vote_get_stage(s.contract(cid)))
    assert seen == [Stage.SETUP, Stage.REGISTRATION, Stage.VOTING, Stage.REVEAL]
