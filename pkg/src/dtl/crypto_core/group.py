"""Prime-order subgroup of Z_P^* used for exponential ElGamal.

P is a 2048-bit prime, Q a 256-bit prime dividing P - 1, and G generates the
order-Q subgroup. Elements are plain ints in [1, P).
"""

from __future__ import annotations

from functools import lru_cache

from ..encoding import Reader, Writer
from ..errors import EncodingError
from . import backend

P = int(
    "dd06479c782d213b18fe8abdeab847a210c82939b07cb3bb9ed2dea7dc1e568e"
    "d58f89312a83a719a464e369c30624495fac7c7bf6f25f5b87788b6a9ad4faf1"
    "31eb40582b5135d0aedf3a9ef9ef0ceeee8bf8493ec3014d0f0269b8291f7264"
    "a2c5841941141017d2f78e156547ebdf9ff46e84a38d45fa08fd9713ebf992da"
    "7aaba92680f1cae6300fdcedb423c32d7c1bded4317016d9d632a5c336991c1c"
    "5c3c7b1bae41a2e816800767beaafc5ea1ee479c5b7685db7e47b40747629"
    "8bf4491145145f50d2aa96b91816429bf9f8ba68df949a6840fbae8f229aa73"
    "1a6709539c7310d14771b563cdb4f88f17c4ae0ec2a9d53279a367ee4cbc9d13"
    "7ff3",
    16,
)
Q = int("93eecd42b86e3a823f149433965e8c4a9753622cfc2942b782c581e177ef2ec9", 16)
G = int(
    "d08f91c360063c16f29c1dbe4aa46e2d0059a85415d20466e52573ad340f6a50"
    "4d0933e827d36f3f08403bc6a12a72cdbed0a23589b33968c541b163185e2266"
    "08c9285c2b36c792574edf9d3e3f6d2e58ab9124d82c4749b2201efae00addb0"
    "41c3f9a2c91fec1f0b573a044558d5e9edfa803d9f30e025309704d3b9c02bd5"
    "63b6469fd25005e8c3525d39e8beb63c08af79a9a060e09c9c88e8911d16e878"
    "05bf26d46b6e037e23df8c4a78a2fda448a5dca2fc682e62d7bd0d1115f3c8ca"
    "5875daa9d05bba85a0cb9bed9ffd0f2a2b63e7213dabf1ef6774ed903045b2e0"
    "0ec87c09d4f46a22f3dba52a5e9ecdd6826521150e7ef70d52e085189084e18e",
    16,
)

ELEMENT_BYTES = 256
IDENTITY = 1

_P = backend.num(P)
_WINDOW = 4
_N_WINDOWS = (Q.bit_length() + _WINDOW - 1) // _WINDOW


@lru_cache(maxsize=1)
def _g_table() -> tuple[tuple, ...]:
    rows = []
    base = backend.num(G)
    for _ in range(_N_WINDOWS):
        row = [backend.num(1)]
        for _ in range((1 << _WINDOW) - 1):
            row.append(row[-1] * base % _P)
        rows.append(tuple(row))
        base = row[-1] * base % _P
    return tuple(rows)


def g_pow(e: int) -> int:
    """G^e via a fixed-base windowed table."""
    e %= Q
    table = _g_table()
    acc = backend.num(1)
    i = 0
    mask = (1 << _WINDOW) - 1
    while e:
        d = e & mask
        if d:
            acc = acc * table[i][d] % _P
        e >>= _WINDOW
        i += 1
    return int(acc)


def pow_(x: int, e: int) -> int:
    return int(backend.powmod(backend.num(x), e % Q, _P))


def mul(a: int, b: int) -> int:
    return int(backend.num(a) * backend.num(b) % _P)


def inv(a: int) -> int:
    return int(backend.invert(backend.num(a), _P))


@lru_cache(maxsize=4096)
def is_element(x: int) -> bool:
    """Membership in the order-Q subgroup (identity included)."""
    if not isinstance(x, int) or not 1 <= x < P:
        return False
    return int(backend.powmod(backend.num(x), Q, _P)) == 1


def encode_element(x: int) -> bytes:
    return Writer().uint(x, ELEMENT_BYTES).getvalue()


def decode_element(b: bytes) -> int:
    if len(b) != ELEMENT_BYTES:
        raise EncodingError("group element must be 256 bytes")
    x = Reader(b).uint(ELEMENT_BYTES)
    if not is_element(x):
        raise EncodingError("not an element of the prime-order subgroup")
    return x
