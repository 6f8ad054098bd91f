"""The four experiments, run against pluggable adversaries.

Adversary exceptions count as a loss. Everything is driven by one
``random.Random(seed)`` so identical seeds give identical transcripts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional, Protocol

from ..errors import RangeViolation
from ..encoding import Writer
from ..scheme import DtlParams, Mode, dtl_accumulate, dtl_create, dtl_redeem
from .oracles import Claim, OracleLog, Oracles, PublicView, Transcript


@dataclass(frozen=True)
class GameOutcome:
    game: str
    adversary: str
    seed: int
    win: bool
    trials: int
    digest: bytes
    wins: int = 0
    advantage: Optional[float] = None
    note: str = ""

    def record(self) -> str:
        """One structured line with a stable field order."""
        adv = "-" if self.advantage is None else f"{self.advantage:.4f}"
        return (f"game={self.game} adversary={self.adversary} seed={self.seed} "
                f"trials={self.trials} wins={self.wins} advantage={adv} "
                f"result={'WIN' if self.win else 'loss'} digest={self.digest.hex()[:16]}")


class Adversary(Protocol):
    name: str


def unlink_tolerance(trials: int) -> float:
    """3-sigma bound on |rate - 1/2| for Binomial(trials, 1/2), rounded up to 0.01."""
    return math.ceil(100 * 1.5 / math.sqrt(trials) - 1e-9) / 100


def _verify_all(view: PublicView, st, claims) -> bool:
    return all(view.verify(st, c) == 1 for c in claims)


def run_one_more_redeem(params: DtlParams, adversary, seed: int, *,
                        with_oracles: bool = False) -> GameOutcome:
    """Win iff n+1 claims all verify against Accumulate(cpks) with pairwise distinct tags.

    ``with_oracles`` also hands the adversary CreateO/RedeemO (a stronger variant).
    """
    rng = random.Random(seed)
    view = PublicView(params, rng)
    oracles = Oracles(params, rng) if with_oracles else None
    game = "one-more-redeem" + ("+oracles" if with_oracles else "")
    tr = Transcript(game, adversary.name, seed)
    win = False
    note = ""
    try:
        cpks, claims = adversary.one_more_redeem(view, oracles)
        cpks, claims = list(cpks), list(claims)
        w = Writer().u32(len(cpks))
        for x in cpks:
            w.var(x)
        tr.add("cpks", w.getvalue())
        for c in claims:
            tr.add("claim", c.encode())
        st = dtl_accumulate(params, cpks)
        b0 = len(claims) == len(cpks) + 1 and _verify_all(view, st, claims)
        tags = [c.tag for c in claims]
        b1 = len(set(tags)) == len(tags)
        win = b0 and b1
    except Exception as exc:  # adversary failure is a loss
        note = type(exc).__name__
        tr.add("error", note.encode())
    tr.add("win", bytes([win]))
    return GameOutcome(game, adversary.name, seed, win, 1, tr.digest(), int(win), note=note)


def run_theft(params: DtlParams, adversary, seed: int) -> GameOutcome:
    """Win iff a verifying claim over CreateO-only coins is fresh with respect to R."""
    rng = random.Random(seed)
    view = PublicView(params, rng)
    oracles = Oracles(params, rng)
    tr = Transcript("theft", adversary.name, seed)
    win = False
    note = ""
    try:
        cpks, claim = adversary.theft(view, oracles)
        cpks = list(cpks)
        for x in cpks:
            tr.add("cpk", x)
        tr.add("claim", claim.encode())
        st = dtl_accumulate(params, cpks)
        b0 = view.verify(st, claim) == 1
        b1 = all(oracles.log.created(x) for x in cpks)
        b2 = not oracles.log.redeemed(st, claim.tag, claim.m)
        win = b0 and b1 and b2
    except Exception as exc:
        note = type(exc).__name__
        tr.add("error", note.encode())
    tr.add("win", bytes([win]))
    return GameOutcome("theft", adversary.name, seed, win, 1, tr.digest(), int(win), note=note)


def run_nslander(params: DtlParams, adversary, seed: int) -> GameOutcome:
    """Win iff the adversary's claim verifies under the tag the challenger's
    honest redemption of ``cpk`` produces, for a message not already in R."""
    rng = random.Random(seed)
    view = PublicView(params, rng)
    oracles = Oracles(params, rng)
    tr = Transcript("nslander", adversary.name, seed)
    win = False
    note = ""
    try:
        cpk, cpk_star, claim = adversary.nslander(view, oracles)
        tr.add("cpk", cpk)
        tr.add("cpk*", cpk_star)
        tr.add("claim", claim.encode())
        st = dtl_accumulate(params, [cpk, cpk_star])
        b0 = oracles.log.created(cpk)
        m = view.random_message()
        honest = oracles.redeem([cpk, cpk_star], 0, m)
        if b0 and honest is not None:
            tr.add("honest", honest.encode())
            b1 = honest.tag == claim.tag
            b2 = view.verify(st, claim) == 1
            b3 = not oracles.log.redeemed(st, honest.tag, claim.m)
            win = b1 and b2 and b3
    except Exception as exc:
        note = type(exc).__name__
        tr.add("error", note.encode())
    tr.add("win", bytes([win]))
    return GameOutcome("nslander", adversary.name, seed, win, 1, tr.digest(), int(win), note=note)


def run_unlink(params: DtlParams, adversary, seed: int, trials: int = 1000) -> GameOutcome:
    """Empirical |Pr[win] - 1/2| over ``trials`` independent runs.

    The challenge coins are entered into C, and a trial's win is voided when
    RedeemO was queried on either of them.
    In fixed mode both coins carry the fixed data whatever the adversary picks.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    view = PublicView(params, rng)
    tr = Transcript("unlink", adversary.name, seed)
    bits = params.sec.plaintext_range_bits
    wins = 0
    for _ in range(trials):
        oracles = Oracles(params, rng, OracleLog())
        m = view.random_message()
        b = rng.randrange(2)
        try:
            data0, data1 = adversary.unlink_choose(view, m)
            if params.mode is Mode.FIXED:
                data0 = data1 = None
            elif not all(isinstance(d, int) and 0 <= d < 1 << bits for d in (data0, data1)):
                raise RangeViolation("challenge data out of range")
            cpk0, csk0 = dtl_create(params, data0, rng=rng)
            cpk1, csk1 = dtl_create(params, data1, rng=rng)
            # reachable through RedeemO, so the freshness clause can actually bite
            oracles.log.C.setdefault(cpk0, csk0)
            oracles.log.C.setdefault(cpk1, csk1)
            cpks = [cpk0, cpk1]
            r0 = Claim.of(dtl_redeem(params, cpks, csk0, m, rng=rng), m)
            r1 = Claim.of(dtl_redeem(params, cpks, csk1, m, rng=rng), m)
            pair = (r0, r1) if b == 0 else (r1, r0)
            guess = adversary.unlink_guess(view, oracles, cpk0, cpk1, pair[0], pair[1])
            fresh = not oracles.log.touched(cpk0) and not oracles.log.touched(cpk1)
            won = guess == b and fresh
        except Exception:
            won = False
        wins += won
        tr.add("trial", bytes([b, won]))
    advantage = abs(wins / trials - 0.5)
    tol = unlink_tolerance(trials)
    return GameOutcome("unlink", adversary.name, seed, advantage > tol, trials, tr.digest(),
                       wins, advantage, note=f"tolerance={tol:.2f}")
