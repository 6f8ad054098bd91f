"""Modular-arithmetic kernels with an accelerated and a pure-Python path.

The accelerated path uses gmpy2. Set ``DTL_PURE_PYTHON=1`` before import to
force the builtin ``pow``/``int`` path (used by the benchmark to compare both).
"""

from __future__ import annotations

import os

_FORCE_PURE = os.environ.get("DTL_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}

try:
    if _FORCE_PURE:
        raise ImportError
    import gmpy2 as _gmpy2
except ImportError:  # pragma: no cover - exercised via env flag in a subprocess
    _gmpy2 = None

ACCELERATED = _gmpy2 is not None
BACKEND_NAME = "gmpy2" if ACCELERATED else "pure-python"

if ACCELERATED:
    num = _gmpy2.mpz

    def powmod(base, exp, mod):
        return _gmpy2.powmod(base, exp, mod)

    def invert(x, mod):
        return _gmpy2.invert(x, mod)

else:
    num = int

    def powmod(base, exp, mod):
        return pow(base, exp, mod)

    def invert(x, mod):
        return pow(x, -1, mod)


def _jacobi_py(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0; the Legendre symbol when n is prime."""
    if ACCELERATED:
        return int(_gmpy2.jacobi(a, n))
    return _jacobi_py(int(a), int(n))
