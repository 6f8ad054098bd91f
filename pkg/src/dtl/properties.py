"""Property oracles over the whole stack.

Each check runs a randomized experiment under a seed and returns a
:class:`PropertyResult`. The CLI ``oracles`` command and the acceptance
suite both drive these.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

from .crypto_core import (
    AccumulatorState,
    HomCiphertext,
    IncrementalMerkleTree,
    MerkleTree,
    SecParams,
    hom_dec,
    hom_kgen,
)
from .errors import DtlError, EncodingError, UnsatisfiedRelation
from .games.oracles import Claim
from .ledger import LedgerState, address
from .scheme import Mode, dtl_accumulate, dtl_create, dtl_redeem, dtl_setup, dtl_verify
from .wallet import (
    ConfidentialWallet,
    FixedPayWallet,
    VoteWallet,
    deploy_confidential_pay,
    deploy_fixed_pay,
    deploy_vote,
)


@dataclass(frozen=True)
class PropertyResult:
    name: str
    ok: bool
    cases: int
    failures: int
    seconds: float
    detail: str = ""

    def record(self) -> str:
        return (f"property={self.name} cases={self.cases} failures={self.failures} "
                f"seconds={self.seconds:.2f} result={'PASS' if self.ok else 'FAIL'}"
                + (f" {self.detail}" if self.detail else ""))


def _timed(name: str, fn: Callable[[], tuple[int, int, str]], extra_ok=None) -> PropertyResult:
    t0 = time.perf_counter()
    cases, failures, detail = fn()
    ok = failures == 0 and (extra_ok is None or extra_ok())
    return PropertyResult(name, ok, cases, failures, time.perf_counter() - t0, detail)


def _m(mode: Mode, rng: random.Random, ek: int) -> bytes:
    from .crypto_core import encode_ek

    return rng.randbytes(20) if mode is Mode.FIXED else encode_ek(ek) + rng.randbytes(4)


# -- correctness -------------------------------------------------------------

CORRECTNESS_NS = (1, 2, 17, 256, 1024)


def check_correctness(pipelines: int = 100, ns=CORRECTNESS_NS, redeems_per_pipeline: Optional[int] = None,
                      seed: int = 0) -> PropertyResult:
    """Honest redeem always verifies. Per mode, ``pipelines`` pipelines cycle
    through ``ns``. Every coin is redeemed unless ``redeems_per_pipeline`` caps it
    (first and last coin plus random others)."""

    def run():
        rng = random.Random(seed)
        ek = hom_kgen(b"correctness").ek
        cases = failures = 0
        for mode in Mode:
            params = dtl_setup(mode, seed=seed)
            for p in range(pipelines):
                n = ns[p % len(ns)]
                coins = [dtl_create(params, None if mode is Mode.FIXED else rng.randrange(0, 1 << 32),
                                    rng=rng) for _ in range(n)]
                cpks = [c[0] for c in coins]
                st = dtl_accumulate(params, cpks)
                if redeems_per_pipeline is None:
                    picks = range(n)
                else:
                    picks = {0, n - 1} | {rng.randrange(n) for _ in range(redeems_per_pipeline - 2)}
                for i in sorted(picks):
                    m = _m(mode, rng, ek)
                    res = dtl_redeem(params, cpks, coins[i][1], m, rng=rng)
                    cases += 1
                    if res is None or dtl_verify(params, st, res.tag, res.proof, m, res.ciphertext) != 1:
                        failures += 1
        return cases, failures, f"pipelines_per_mode={pipelines} ns={list(ns)}"

    return _timed("correctness", run)


# -- incremental vs batch Merkle ---------------------------------------------

def check_merkle_incremental(sequences: int = 200, max_len: int = 512, depths=(4, 10, 20),
                             seed: int = 0) -> PropertyResult:
    def run():
        rng = random.Random(seed)
        failures = 0
        for s in range(sequences):
            depth = depths[s % len(depths)]
            n = rng.randrange(0, min(max_len, 1 << depth) + 1)
            leaves = [rng.randbytes(32) for _ in range(n)]
            t = IncrementalMerkleTree(depth)
            for leaf in leaves:
                t.insert(leaf)
            if t.root != MerkleTree(leaves, depth).root:
                failures += 1
        return sequences, failures, f"depths={list(depths)} max_len={max_len}"

    return _timed("merkle-incremental", run)


# -- double redeem and the root window ---------------------------------------

def _fixed_pool(k: int, seed: int):
    rng = random.Random(seed)
    alice = address("alice")
    ledger = LedgerState.genesis([(alice, 10**9)])
    cid = ledger.apply(deploy_fixed_pay(alice, 10, SecParams(root_window_k=k))).contract_id
    return ledger, FixedPayWallet(ledger, cid, rng), alice


def check_double_redeem(trials: int = 100, seed: int = 0) -> PropertyResult:
    def run():
        rng = random.Random(seed)
        failures = 0
        for t in range(trials):
            ledger, w, alice = _fixed_pool(30, seed * 7919 + t)
            secrets = []
            for _ in range(rng.randrange(1, 6)):
                tx, csk = w.deposit(alice)
                ledger.apply(tx)
                secrets.append(csk)
            bob = address(f"bob{t}")
            tx = w.withdraw(alice, rng.choice(secrets), bob)
            if not ledger.apply(tx).ok:
                failures += 1
                continue
            again = ledger.apply(tx)
            if again.ok or again.error != "DoubleRedeem":
                failures += 1
        return trials, failures, ""

    return _timed("double-redeem", run)


def check_window(k: int = 30, extra: int = 5, seed: int = 0) -> PropertyResult:
    """A proof against root i must pass after j <= k-1 later deposits and fail at j >= k."""

    def run():
        failures = 0
        bad = []
        for j in range(k + extra + 1):
            ledger, w, alice = _fixed_pool(k, seed)
            tx, csk = w.deposit(alice)
            ledger.apply(tx)
            i = len(w.history())
            for _ in range(j):
                ledger.apply(w.deposit(alice)[0])
            rec = ledger.apply(w.withdraw(alice, csk, address("bob"), upto=i))
            expect_ok = j <= k - 1
            if rec.ok != expect_ok or (not rec.ok and rec.error != "StaleRoot"):
                failures += 1
                bad.append(j)
        return k + extra + 1, failures, f"k={k} j=0..{k + extra}" + (f" bad={bad}" if bad else "")

    return _timed("root-window", run)


# -- statement binding -------------------------------------------------------

def _flip(b: bytes, rng: random.Random) -> bytes:
    i = rng.randrange(len(b))
    return b[:i] + bytes([b[i] ^ rng.randrange(1, 256)]) + b[i + 1:]


def _mutate(claim: Claim, st: AccumulatorState, fld: str, rng: random.Random):
    """One random single-byte change to one statement field. ``None`` if the
    mutated bytes no longer parse (which the verifier rejects anyway)."""
    if fld == "st":
        enc = _flip(st.encode(), rng)
        return claim, AccumulatorState(enc[:32], int.from_bytes(enc[32:], "big"))
    if fld == "tag":
        return replace(claim, tag=_flip(claim.tag, rng)), st
    if fld == "m":
        return replace(claim, m=_flip(claim.m, rng)), st
    try:
        return replace(claim, c=HomCiphertext.decode(_flip(claim.c.encode(), rng))), st
    except EncodingError:
        return None


def check_binding(mutations: int = 1000, seed: int = 0) -> PropertyResult:
    """Every single-byte mutation of a verifying statement must fail (per mode)."""

    def run():
        rng = random.Random(seed)
        ek = hom_kgen(b"binding").ek
        failures = cases = undecodable = 0
        for mode in Mode:
            params = dtl_setup(mode, seed=seed)
            fields = ("st", "tag", "m") if mode is Mode.FIXED else ("st", "tag", "m", "c")
            base = []
            for _ in range(8):
                coins = [dtl_create(params, None if mode is Mode.FIXED else rng.randrange(1, 500), rng=rng)
                         for _ in range(rng.randrange(1, 9))]
                cpks = [c[0] for c in coins]
                m = _m(mode, rng, ek)
                res = dtl_redeem(params, cpks, rng.choice(coins)[1], m, rng=rng)
                claim = Claim.of(res, m)
                st = dtl_accumulate(params, cpks)
                assert dtl_verify(params, st, claim.tag, claim.proof, claim.m, claim.c) == 1
                base.append((claim, st))
            for i in range(mutations):
                claim, st = base[i % len(base)]
                out = _mutate(claim, st, fields[i % len(fields)], rng)
                cases += 1
                if out is None:
                    undecodable += 1
                    continue
                mc, mst = out
                try:
                    ok = dtl_verify(params, mst, mc.tag, mc.proof, mc.m, mc.c)
                except DtlError:
                    ok = 0
                if ok:
                    failures += 1
        return cases, failures, f"undecodable_c={undecodable}"

    return _timed("statement-binding", run)


# -- homomorphic conservation ------------------------------------------------

def check_confidential_conservation(ops: int = 50, seed: int = 0) -> PropertyResult:
    """Random transparent deposits, withdraws and confidential deposits; the
    decrypted balances plus unspent coin amounts must equal the pool at every step."""

    def run():
        rng = random.Random(seed)
        bits = SecParams().plaintext_range_bits
        users = [address(f"u{i}") for i in range(4)]
        ledger = LedgerState.genesis([(u, 10**6) for u in users])
        supply = ledger.total_supply()
        cid = ledger.apply(deploy_confidential_pay(users[0])).contract_id
        w = ConfidentialWallet(ledger, cid, rng)
        keys = [hom_kgen(f"conf{seed}:{i}".encode()) for i in range(3)]
        clear = {kp.ek: 0 for kp in keys}  # plaintext shadow of each encrypted balance
        coins: list = []  # (csk, amount) not yet withdrawn
        failures = 0
        kinds = {"deposit": 0, "withdraw": 0, "conf-deposit": 0}
        for _ in range(ops):
            choices = ["deposit"] + (["withdraw"] if coins else []) + \
                      (["conf-deposit"] if any(clear.values()) else [])
            kind = rng.choice(choices)
            kinds[kind] += 1
            sender = rng.choice(users)
            if kind == "deposit":
                amt = rng.randrange(1, 1000)
                tx, csk = w.deposit(sender, amt)
                if ledger.apply(tx).ok:
                    coins.append((csk, amt))
                else:
                    failures += 1
            elif kind == "withdraw":
                csk, amt = coins.pop(rng.randrange(len(coins)))
                kp = rng.choice(keys)
                if ledger.apply(w.withdraw(sender, csk, kp.ek)).ok:
                    clear[kp.ek] += amt
                else:
                    failures += 1
            else:
                kp = rng.choice([k for k in keys if clear[k.ek]])
                amt = rng.randrange(1, clear[kp.ek] + 1)
                tx, csk = w.confidential_deposit(sender, kp, amt, bal=clear[kp.ek])
                if ledger.apply(tx).ok:
                    clear[kp.ek] -= amt
                    coins.append((csk, amt))
                else:
                    failures += 1
            pool = ledger.contract(cid).pool
            if sum(clear.values()) + sum(a for _, a in coins) != pool or ledger.total_supply() != supply:
                failures += 1
        conf = ledger.contract(cid).conf
        for kp in keys:
            if kp.ek in conf.accounts and hom_dec(kp.dk, conf.accounts[kp.ek], bits) != clear[kp.ek]:
                failures += 1
        detail = " ".join(f"{k}={v}" for k, v in kinds.items()) + f" pool={ledger.contract(cid).pool}"
        return ops, failures, detail

    return _timed("confidential-conservation", run)


def check_vote_conservation(voters: int = 20, candidates: int = 2, seed: int = 0) -> PropertyResult:
    """Tallies sum to the spent power; reveals off by one are rejected."""

    def run():
        rng = random.Random(seed)
        chair = address("chair")
        names = [address(f"voter{i}") for i in range(voters)]
        ledger = LedgerState.genesis([(chair, 0)] + [(a, 1000) for a in names])
        cid = ledger.apply(deploy_vote(chair)).contract_id
        w = VoteWallet(ledger, cid, rng)
        cands = [hom_kgen(f"cand{seed}:{i}".encode()) for i in range(candidates)]
        failures = 0
        for kp in cands:
            failures += not ledger.apply(w.register_candidate(chair, kp.ek)).ok
        failures += not ledger.apply(w.advance(chair)).ok
        secrets = []
        for a in names:
            power = rng.randint(1, 100)
            tx, csk = w.register(a, power)
            failures += not ledger.apply(tx).ok
            secrets.append((a, csk, power))
        failures += not ledger.apply(w.advance(chair)).ok
        spent = 0
        expected = {kp.ek: 0 for kp in cands}
        for a, csk, power in secrets:
            kp = rng.choice(cands)
            if ledger.apply(w.vote(a, csk, kp.ek)).ok:
                spent += power
                expected[kp.ek] += power
            else:
                failures += 1
        failures += not ledger.apply(w.advance(chair)).ok
        tallies = [w.tally(kp) for kp in cands]
        if sum(tallies) != spent or tallies != [expected[kp.ek] for kp in cands]:
            failures += 1
        perturbed = 0
        for kp, t in zip(cands, tallies):
            for delta in (-1, 1):
                rec = ledger.apply(w.reveal(chair, kp, bal=t + delta))
                perturbed += 1
                if rec.ok or rec.error != "InvalidProof":
                    failures += 1
            failures += not ledger.apply(w.reveal(chair, kp)).ok
        return voters + perturbed, failures, f"spent={spent} tallies={tallies} perturbed_reveals={perturbed}"

    return _timed("vote-conservation", run)


# -- relation boundary 0 <= amt <= bal ----------------------------------------

def check_equality_boundary(trials: int = 50, seed: int = 0) -> PropertyResult:
    """amt = bal is accepted on chain; amt = bal + 1 is refused by the prover."""

    def run():
        rng = random.Random(seed)
        alice = address("alice")
        ledger = LedgerState.genesis([(alice, 10**12)])
        cid = ledger.apply(deploy_confidential_pay(alice)).contract_id
        w = ConfidentialWallet(ledger, cid, rng)
        failures = 0
        for t in range(trials):
            kp = hom_kgen(f"eq{seed}:{t}".encode())
            bal = rng.randrange(1, 10**6)
            tx, csk = w.deposit(alice, bal)
            ledger.apply(tx)
            failures += not ledger.apply(w.withdraw(alice, csk, kp.ek)).ok
            try:
                w.confidential_deposit(alice, kp, bal + 1, bal=bal)
                failures += 1
            except UnsatisfiedRelation:
                pass
            tx, _ = w.confidential_deposit(alice, kp, bal, bal=bal)
            failures += not ledger.apply(tx).ok
        return trials, failures, ""

    return _timed("equality-boundary", run)


ALL_CHECKS: dict[str, Callable[..., PropertyResult]] = {
    "correctness": check_correctness,
    "merkle-incremental": check_merkle_incremental,
    "double-redeem": check_double_redeem,
    "root-window": check_window,
    "statement-binding": check_binding,
    "confidential-conservation": check_confidential_conservation,
    "vote-conservation": check_vote_conservation,
    "equality-boundary": check_equality_boundary,
}


def run_checks(names: Optional[list] = None, seed: int = 0) -> list[PropertyResult]:
    return [ALL_CHECKS[n](seed=seed) for n in (names or list(ALL_CHECKS))]
