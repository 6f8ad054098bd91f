"""Built-in attack strategies. Every one of them is expected to lose."""

from __future__ import annotations

from typing import Optional

from ..crypto_core import CoinSecret, backend, group, tree_for
from ..errors import DtlError
from ..proof_system import ArbRedeemStmt, ArbRedeemWit, FixedRedeemStmt, FixedRedeemWit, Proof
from ..scheme import Mode
from .oracles import Claim, Oracles, PublicView

DEFAULT_GUESSES = 10_000


def _random_claim(view: PublicView, m: bytes, c=None) -> Claim:
    return Claim(view.rng.randbytes(32), Proof(view.rng.randbytes(32)), m,
                 c if view.mode is Mode.ARBITRARY else None)


def _forge(view: PublicView, st, m: bytes, guesses: int, tag: Optional[bytes] = None, c=None) -> Claim:
    """Random proofs (and tags unless fixed) until one verifies; returns the last guess otherwise."""
    claim = None
    for _ in range(guesses):
        claim = _random_claim(view, m, c)
        if tag is not None:
            claim = Claim(tag, claim.proof, m, claim.c)
        if view.verify(st, claim):
            break
    return claim


def _data(view: PublicView) -> Optional[int]:
    return None if view.mode is Mode.FIXED else view.rng.randrange(1, 1000)


def _honest_coins(view: PublicView, n: int):
    coins = [view.create(_data(view)) for _ in range(n)]
    return [c[0] for c in coins], [c[1] for c in coins]


# -- one-more-redeem ---------------------------------------------------------

class HonestDuplicator:
    """Redeems each of its n coins, then redeems one again under a new message."""

    name = "honest-duplicator"

    def one_more_redeem(self, view: PublicView, oracles=None):
        cpks, csks = _honest_coins(view, 3)
        claims = [view.redeem(cpks, csk, view.random_message()) for csk in csks]
        claims.append(view.redeem(cpks, csks[0], view.random_message()))
        return cpks, claims


class KeyReuse:
    """Same k under two r values: two distinct leaves, but one tag."""

    name = "key-reuse"

    def one_more_redeem(self, view: PublicView, oracles=None):
        k = view.rng.randbytes(view.sec.key_bytes)
        data = _data(view)
        a = CoinSecret(k, view.rng.randbytes(view.sec.key_bytes), data)
        b = CoinSecret(k, view.rng.randbytes(view.sec.key_bytes), data)
        cpks = [view.public_key(a), view.public_key(b)]
        claims = [view.redeem(cpks, a, view.random_message()),
                  view.redeem(cpks, b, view.random_message()),
                  view.redeem(cpks, b, view.random_message())]
        return cpks, claims


class RandomForger:
    """Honest claims for its own coins plus one extra claim guessed at random."""

    name = "random-forger"

    def __init__(self, guesses: int = DEFAULT_GUESSES) -> None:
        self.guesses = guesses

    def one_more_redeem(self, view: PublicView, oracles=None):
        cpks, csks = _honest_coins(view, 2)
        claims = [view.redeem(cpks, csk, view.random_message()) for csk in csks]
        st = view.accumulate(cpks)
        claims.append(_forge(view, st, view.random_message(), self.guesses, c=claims[0].c))
        return cpks, claims

    def theft(self, view: PublicView, oracles: Oracles):
        cpks = [oracles.create(_data(view)) for _ in range(2)]
        st = view.accumulate(cpks)
        seen = oracles.redeem(cpks, 0, view.random_message())
        return cpks, _forge(view, st, view.random_message(), self.guesses, c=seen.c)


class InvalidWitness:
    """Asks the prover for a coin it never accumulated, borrowing another leaf's path."""

    name = "invalid-witness"

    def one_more_redeem(self, view: PublicView, oracles=None):
        cpks, csks = _honest_coins(view, 2)
        claims = [view.redeem(cpks, csk, view.random_message()) for csk in csks]
        stray = CoinSecret(view.rng.randbytes(16), view.rng.randbytes(16),
                           None if view.mode is Mode.FIXED else 5)
        path = tree_for(cpks, view.sec.tree_depth).prove(0)
        st = view.accumulate(cpks)
        m = view.random_message()
        tag = view.rng.randbytes(32)
        try:
            if view.mode is Mode.FIXED:
                proof = view.prove(FixedRedeemStmt(st, tag, m), FixedRedeemWit(0, stray, path))
                claims.append(Claim(tag, proof, m))
            else:
                c = claims[0].c
                wit = ArbRedeemWit(stray.k, stray.r, stray.data, path, 1, 0)
                proof = view.prove(ArbRedeemStmt(st, tag, m, c), wit)
                claims.append(Claim(tag, proof, m, c))
        except DtlError:
            claims.append(_random_claim(view, m, claims[0].c))
        return cpks, claims


class OracleRedeemer:
    """One-more-redeem with CreateO/RedeemO: asks RedeemO for n+1 redemptions of n coins."""

    name = "oracle-redeemer"

    def one_more_redeem(self, view: PublicView, oracles: Oracles):
        cpks = [oracles.create(_data(view)) for _ in range(2)]
        claims = [oracles.redeem(cpks, i, view.random_message()) for i in (0, 1, 0)]
        return cpks, claims


# -- theft -------------------------------------------------------------------

class ProofReplay:
    name = "proof-replay"

    def theft(self, view: PublicView, oracles: Oracles):
        cpks = [oracles.create(_data(view)) for _ in range(2)]
        return cpks, oracles.redeem(cpks, 1, view.random_message())


class MessageSubstitution:
    """Takes a RedeemO answer and points it at its own recipient."""

    name = "m-substitution"

    def theft(self, view: PublicView, oracles: Oracles):
        cpks = [oracles.create(_data(view)) for _ in range(2)]
        got = oracles.redeem(cpks, 0, view.random_message())
        mine = view.random_message()
        return cpks, Claim(got.tag, got.proof, mine, got.c)


# -- non-slanderability ------------------------------------------------------

class TagCopy:
    """Learns the victim's tag through RedeemO and forges a proof for a new message."""

    name = "tag-copy"

    def __init__(self, guesses: int = DEFAULT_GUESSES) -> None:
        self.guesses = guesses

    def nslander(self, view: PublicView, oracles: Oracles):
        cpk = oracles.create(_data(view))
        cpk_star, _ = view.create(_data(view))
        pair = [cpk, cpk_star]
        seen = oracles.redeem(pair, 0, view.random_message())
        st = view.accumulate(pair)
        return cpk, cpk_star, _forge(view, st, view.random_message(), self.guesses,
                                     tag=seen.tag, c=seen.c)


class OwnCoin:
    """Redeems its own coin next to the victim's; valid proof, wrong tag."""

    name = "own-coin"

    def nslander(self, view: PublicView, oracles: Oracles):
        cpk = oracles.create(_data(view))
        cpk_star, csk_star = view.create(_data(view))
        return cpk, cpk_star, view.redeem([cpk, cpk_star], csk_star, view.random_message())


class SlanderReplay:
    """Submits the victim's own RedeemO answer verbatim."""

    name = "slander-replay"

    def nslander(self, view: PublicView, oracles: Oracles):
        cpk = oracles.create(_data(view))
        cpk_star, _ = view.create(_data(view))
        return cpk, cpk_star, oracles.redeem([cpk, cpk_star], 0, view.random_message())


# -- unlinkability -----------------------------------------------------------

def _popcount_xor(a: bytes, b: bytes) -> int:
    return bin(int.from_bytes(a, "big") ^ int.from_bytes(b[:len(a)], "big")).count("1")


class CoinFlip:
    name = "coin-flip"

    def unlink_choose(self, view: PublicView, m: bytes):
        return 1, 2

    def unlink_guess(self, view, oracles, cpk0, cpk1, first: Claim, second: Claim) -> int:
        return view.rng.randrange(2)


class ByteMatching:
    """Pairs tags and proofs with the deposit record they resemble most bitwise."""

    name = "byte-matching"

    def unlink_choose(self, view: PublicView, m: bytes):
        return 7, 7

    def unlink_guess(self, view, oracles, cpk0, cpk1, first: Claim, second: Claim) -> int:
        def score(x: Claim, cpk: bytes) -> int:
            return _popcount_xor(x.tag, cpk) + _popcount_xor(x.proof.bytes, cpk)
        straight = score(first, cpk0) + score(second, cpk1)
        crossed = score(first, cpk1) + score(second, cpk0)
        return 0 if straight <= crossed else 1


class DataLeak:
    """Chooses distinct data and looks for it in the re-encrypted ciphertexts.

    Tests quadratic residuosity of c2 / G^data, which would leak a bit of the
    plaintext in the full group Z_P^*. In fixed mode, where there is no
    ciphertext, it falls back to the parity of the proof bytes.
    """

    name = "data-leak"

    def unlink_choose(self, view: PublicView, m: bytes):
        d0, d1 = 0, (1 << view.sec.plaintext_range_bits) - 1
        self._unmask = (group.inv(group.g_pow(d0)), group.inv(group.g_pow(d1)))
        return d0, d1

    @staticmethod
    def _is_qr(x: int) -> bool:
        return backend.jacobi(x, group.P) == 1

    def unlink_guess(self, view, oracles, cpk0, cpk1, first: Claim, second: Claim) -> int:
        if first.c is None:
            return first.proof.bytes[0] & 1
        g0, g1 = self._unmask
        straight = self._is_qr(group.mul(first.c.c2, g0)) + self._is_qr(group.mul(second.c.c2, g1))
        crossed = self._is_qr(group.mul(first.c.c2, g1)) + self._is_qr(group.mul(second.c.c2, g0))
        return 0 if straight >= crossed else 1


ONE_MORE_REDEEM = (HonestDuplicator, RandomForger, KeyReuse, InvalidWitness)
ONE_MORE_REDEEM_ORACLE = (OracleRedeemer,)
THEFT = (ProofReplay, MessageSubstitution, RandomForger)
NSLANDER = (TagCopy, OwnCoin, SlanderReplay)
UNLINK = (ByteMatching, CoinFlip, DataLeak)
