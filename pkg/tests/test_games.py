import random

import pytest

from dtl import Mode, dtl_setup
from dtl.games import (
    OracleLog,
    Oracles,
    PublicView,
    adversaries,
    create_oracle,
    redeem_oracle,
    run_nslander,
    run_one_more_redeem,
    run_suite,
    run_theft,
    run_unlink,
    unlink_tolerance,
)

PARAMS = {m: dtl_setup(m, seed=0) for m in Mode}


@pytest.fixture(params=list(Mode))
def pp(request):
    return PARAMS[request.param]


def test_tolerance_binomial_bound():
    assert unlink_tolerance(1000) == 0.05
    assert unlink_tolerance(100) == 0.15
    assert unlink_tolerance(10_000) == 0.02


def test_create_then_redeem_verifies(pp):
    rng = random.Random(1)
    o = Oracles(pp, rng)
    view = PublicView(pp, rng)
    cpks = [create_oracle(o, 5), create_oracle(o, 6)]
    m = view.random_message()
    claim = redeem_oracle(o, cpks, 1, m)
    assert view.verify(view.accumulate(cpks), claim) == 1
    (rec,) = o.log.R
    assert rec.cpk == cpks[1] and rec.tag == claim.tag and rec.m == m
    assert o.log.redeemed(view.accumulate(cpks), claim.tag, m)


def test_redeem_oracle_foreign_cpk_is_bottom(pp):
    rng = random.Random(2)
    o = Oracles(pp, rng)
    view = PublicView(pp, rng)
    mine = o.create()
    foreign, _ = view.create()
    assert o.redeem([mine, foreign], 1, view.random_message()) is None
    assert o.redeem([mine], 3, view.random_message()) is None
    assert o.log.R == []


ALL = [(run_one_more_redeem, a) for a in adversaries.ONE_MORE_REDEEM] + \
      [(run_theft, a) for a in adversaries.THEFT] + \
      [(run_nslander, a) for a in adversaries.NSLANDER]


@pytest.mark.parametrize("runner,cls", ALL, ids=lambda x: getattr(x, "name", getattr(x, "__name__", "")))
def test_shipped_adversaries_lose(pp, runner, cls):
    try:
        adv = cls(guesses=200)
    except TypeError:
        adv = cls()
    for seed in range(3):
        out = runner(pp, adv, seed)
        assert not out.win, out.record()


def test_oracle_variant_loses(pp):
    out = run_one_more_redeem(pp, adversaries.OracleRedeemer(), 0, with_oracles=True)
    assert not out.win


def test_digests_reproducible(pp):
    a = [o.digest for _, o in run_suite(4, 50, modes=(pp.mode,), params={pp.mode: pp}, guesses=20)]
    b = [o.digest for _, o in run_suite(4, 50, modes=(pp.mode,), params={pp.mode: pp}, guesses=20)]
    c = [o.digest for _, o in run_suite(5, 50, modes=(pp.mode,), params={pp.mode: pp}, guesses=20)]
    assert a == b
    assert a != c


class Crasher:
    name = "crasher"

    def one_more_redeem(self, view, oracles=None):
        raise RuntimeError("boom")

    def unlink_choose(self, view, m):
        raise RuntimeError("boom")


def test_adversary_exception_is_loss(pp):
    out = run_one_more_redeem(pp, Crasher(), 0)
    assert not out.win and out.note == "RuntimeError"
    assert run_unlink(pp, Crasher(), 0, trials=10).wins == 0


class ChallengeRedeemer:
    """Cheats: asks RedeemO for the challenge coins' tags and matches them."""

    name = "challenge-redeemer"

    def unlink_choose(self, view, m):
        return 3, 3

    def unlink_guess(self, view, oracles, cpk0, cpk1, first, second):
        got = oracles.redeem([cpk0, cpk1], 0, view.random_message())
        return 0 if got is not None and got.tag == first.tag else 1


def test_redeem_on_challenge_voids_win(pp):
    out = run_unlink(pp, ChallengeRedeemer(), 0, trials=50)
    assert out.wins == 0


class HonestPeek(ChallengeRedeemer):
    """Same guess logic, but without touching RedeemO: a coin flip in effect."""

    def unlink_guess(self, view, oracles, cpk0, cpk1, first, second):
        return view.rng.randrange(2)


def test_unlink_guessers_near_half(pp):
    out = run_unlink(pp, HonestPeek(), 1, trials=400)
    assert out.advantage <= unlink_tolerance(400)


def test_oracle_log_append_only(pp):
    log = OracleLog()
    rng = random.Random(3)
    o = Oracles(pp, rng, log)
    view = PublicView(pp, rng)
    cpks = [o.create() for _ in range(3)]
    sizes = []
    for i in range(3):
        o.redeem(cpks, i, view.random_message())
        sizes.append(len(log.R))
    assert sizes == [1, 2, 3]
    assert all(log.touched(x) for x in cpks)
