"""Primitive layer: PRF, tagging, commitment, Merkle accumulator, ElGamal."""

from .backend import ACCELERATED, BACKEND_NAME
from .elgamal import (
    CIPHERTEXT_BYTES,
    ZERO_CIPHERTEXT,
    HomCiphertext,
    HomKeypair,
    decrypts_to,
    derive,
    encode_ek,
    hom_add,
    hom_dec,
    hom_enc,
    hom_kgen,
    hom_neg,
    parse_ek,
)
from .hashing import (
    DIGEST_SIZE,
    CoinPublicKey,
    CoinSecret,
    Domain,
    H,
    Tag,
    commit,
    commit_verify,
    prf_eval,
    tag_eval,
    tag_kgen,
)
from .merkle import (
    EMPTY_LEAF,
    AccumulatorState,
    IncrementalMerkleTree,
    MerklePath,
    MerkleTree,
    empty_subtrees,
    mt_build,
    mt_insert,
    mt_prove,
    mt_verify,
    tree_for,
)
from .params import SecParams

__all__ = [name for name in dir() if not name.startswith("_")]
