import random
from dataclasses import replace

import pytest

from dtl import (
    Mode,
    coin_public_key,
    dtl_accumulate,
    dtl_create,
    dtl_redeem,
    dtl_setup,
    dtl_verify,
    verify_result,
)
from dtl.crypto_core import (
    SecParams,
    commit_verify,
    encode_ek,
    hom_dec,
    hom_enc,
    hom_kgen,
    mt_build,
    tag_kgen,
)
from dtl.errors import MalformedMessage, ModeMismatch, RangeViolation

KP = hom_kgen(b"scheme-recv")


@pytest.fixture(params=list(Mode))
def params(request):
    return dtl_setup(request.param, SecParams(tree_depth=10), seed=1)


def _m(params, rng):
    return rng.randbytes(20) if params.mode is Mode.FIXED else encode_ek(KP.ek) + rng.randbytes(3)


def _data(params, rng):
    return None if params.mode is Mode.FIXED else rng.randrange(1000)


def test_setup_deterministic():
    a = dtl_setup(Mode.FIXED, seed=3)
    assert a == dtl_setup("fixed", seed=3)
    assert a.keys != dtl_setup(Mode.ARBITRARY, seed=3).keys


def test_create_fixed_and_arbitrary():
    rng = random.Random(0)
    fixed = dtl_setup(Mode.FIXED)
    cpk, csk = dtl_create(fixed, rng=rng)
    assert tag_kgen(csk) == cpk
    with pytest.raises(ModeMismatch):
        dtl_create(fixed, 7, rng=rng)

    arb = dtl_setup(Mode.ARBITRARY)
    cpk, csk = dtl_create(arb, 7, rng=rng)
    assert commit_verify(7, cpk, tag_kgen(csk.without_data())) == 1
    assert coin_public_key(arb, csk) == cpk
    with pytest.raises(ModeMismatch):
        dtl_create(arb, rng=rng)
    with pytest.raises(RangeViolation):
        dtl_create(arb, 1 << 32, rng=rng)


def test_accumulate(params):
    rng = random.Random(2)
    cpks = [dtl_create(params, _data(params, rng), rng=rng)[0] for _ in range(6)]
    assert dtl_accumulate(params, cpks) == mt_build(cpks, 10)
    assert dtl_accumulate(params, cpks[:1]).leaf_count == 1
    assert dtl_accumulate(params, cpks).root != dtl_accumulate(params, cpks[::-1]).root


def test_redeem_verify_and_mutations(params):
    rng = random.Random(3)
    coins = [dtl_create(params, _data(params, rng), rng=rng) for _ in range(5)]
    cpks = [c[0] for c in coins]
    st = dtl_accumulate(params, cpks)
    m = _m(params, rng)
    res = dtl_redeem(params, cpks, coins[3][1], m, rng=rng)
    assert verify_result(params, st, res, m) == 1
    # different recipient
    assert verify_result(params, st, res, _m(params, rng)) == 0
    # different leaf set
    assert verify_result(params, dtl_accumulate(params, cpks[:4]), res, m) == 0


def test_redeem_foreign_coin_is_bottom(params):
    rng = random.Random(4)
    cpks = [dtl_create(params, _data(params, rng), rng=rng)[0] for _ in range(3)]
    _, stranger = dtl_create(params, _data(params, rng), rng=rng)
    assert dtl_redeem(params, cpks, stranger, _m(params, rng), rng=rng) is None


def test_arbitrary_ciphertext_decrypts_to_data():
    rng = random.Random(5)
    params = dtl_setup(Mode.ARBITRARY)
    cpk, csk = dtl_create(params, 321, rng=rng)
    res = dtl_redeem(params, [cpk], csk, encode_ek(KP.ek), rng=rng)
    assert hom_dec(KP.dk, res.ciphertext) == 321


def test_arbitrary_needs_ek_in_m():
    rng = random.Random(6)
    params = dtl_setup(Mode.ARBITRARY)
    cpk, csk = dtl_create(params, 1, rng=rng)
    with pytest.raises(MalformedMessage):
        dtl_redeem(params, [cpk], csk, b"not an ek", rng=rng)
    st = dtl_accumulate(params, [cpk])
    res = dtl_redeem(params, [cpk], csk, encode_ek(KP.ek), rng=rng)
    assert dtl_verify(params, st, res.tag, res.proof, b"short", res.ciphertext) == 0
    assert dtl_verify(params, st, res.tag, res.proof, encode_ek(KP.ek), None) == 0


def test_fixed_verify_rejects_ciphertext():
    rng = random.Random(7)
    params = dtl_setup(Mode.FIXED)
    cpk, csk = dtl_create(params, rng=rng)
    res = dtl_redeem(params, [cpk], csk, b"x")
    st = dtl_accumulate(params, [cpk])
    c = hom_enc(KP.ek, 1, 5)
    assert dtl_verify(params, st, res.tag, res.proof, b"x") == 1
    assert dtl_verify(params, st, res.tag, res.proof, b"x", c) == 0


def test_same_k_two_r_same_tag(params):
    rng = random.Random(8)
    a = dtl_create(params, _data(params, rng), rng=rng)[1]
    b = replace(a, r=rng.randbytes(16))
    cpks = [coin_public_key(params, a), coin_public_key(params, b)]
    assert cpks[0] != cpks[1]
    ra = dtl_redeem(params, cpks, a, _m(params, rng), rng=rng)
    rb = dtl_redeem(params, cpks, b, _m(params, rng), rng=rng)
    assert ra.tag == rb.tag
