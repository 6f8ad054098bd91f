"""Desk-scale timings: redeem/verify through the ledger, proof sizes, kernels.

Run ``python -m dtl.bench --kernels-json`` to get the kernel table for the
backend selected in the current process (the CLI uses this with
``DTL_PURE_PYTHON=1`` in a subprocess to compare backends).
"""

from __future__ import annotations

import json
import os
import random
import statistics
import subprocess
import sys
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

from .crypto_core import (
    BACKEND_NAME,
    IncrementalMerkleTree,
    SecParams,
    backend,
    group,
    hom_dec,
    hom_enc,
    hom_kgen,
)
from .crypto_core import merkle as _merkle
from .ledger import LedgerState, address
from .scheme import Mode, dtl_verify
from .wallet import ConfidentialWallet, FixedPayWallet, deploy_confidential_pay, deploy_fixed_pay

DEFAULT_DEPTHS = (20,)
DEFAULT_NS = (1, 17, 256, 1024)


@dataclass(frozen=True)
class BenchCell:
    mode: str
    depth: int
    n: int
    reps: int
    redeem_ms: float
    verify_ms: float
    apply_ms: float
    proof_bytes: int
    tx_bytes: int

    def record(self) -> str:
        return (f"mode={self.mode} depth={self.depth} n={self.n} reps={self.reps} "
                f"redeem_ms={self.redeem_ms:.3f} verify_ms={self.verify_ms:.3f} "
                f"apply_ms={self.apply_ms:.3f} total_ms={self.redeem_ms + self.apply_ms:.3f} "
                f"proof_bytes={self.proof_bytes} tx_bytes={self.tx_bytes}")


def _pool(mode: Mode, depth: int, n: int, seed: int):
    """A ledger holding one tumbling contract with ``n`` deposited coins."""
    rng = random.Random(seed)
    alice = address("bench-alice")
    ledger = LedgerState.genesis([(alice, 10**15)])
    sec = SecParams(tree_depth=depth)
    if mode is Mode.FIXED:
        cid = ledger.apply(deploy_fixed_pay(alice, 1, sec)).contract_id
        w = FixedPayWallet(ledger, cid, rng)
        make = lambda: w.deposit(alice)  # noqa: E731
    else:
        cid = ledger.apply(deploy_confidential_pay(alice, sec)).contract_id
        w = ConfidentialWallet(ledger, cid, rng)
        make = lambda: w.deposit(alice, rng.randrange(1, 1000))  # noqa: E731
    secrets = []
    for _ in range(n):
        tx, csk = make()
        rec = ledger.apply(tx)
        if not rec.ok:  # pragma: no cover
            raise RuntimeError(f"deposit failed: {rec.error}")
        secrets.append(csk)
    return ledger, w, secrets, alice


def bench_cell(mode: Mode, depth: int, n: int, reps: int = 5, seed: int = 0) -> BenchCell:
    """Median wall times of a full client redeem (tree rebuilt from the
    history, no cache), of proof verification alone, and of the ledger
    applying the withdraw (window, tag and proof checks plus the rollback
    snapshot, which copies the leaf history and so grows with n)."""
    ledger, w, secrets, relayer = _pool(mode, depth, n, seed)
    rng = random.Random(seed + 1)
    kp = hom_kgen(b"bench-recv")
    recipient = address("bench-bob")
    red, ver, app, sizes, tx_sizes = [], [], [], set(), set()
    for i in rng.sample(range(n), min(reps, n)):
        _merkle._cached_tree.cache_clear()
        t0 = time.perf_counter()
        if mode is Mode.FIXED:
            tx = w.withdraw(relayer, secrets[i], recipient)
        else:
            tx = w.withdraw(relayer, secrets[i], kp.ek)
        call = tx.payload
        t1 = time.perf_counter()
        good = dtl_verify(w.params, call.st, call.tag, call.proof, call.m, getattr(call, "c", None))
        t2 = time.perf_counter()
        rec = ledger.apply(tx)
        t3 = time.perf_counter()
        if good != 1:  # pragma: no cover
            raise RuntimeError("honest proof did not verify")
        if not rec.ok:  # pragma: no cover
            raise RuntimeError(f"withdraw failed: {rec.error} {rec.message}")
        red.append(t1 - t0)
        ver.append(t2 - t1)
        app.append(t3 - t2)
        sizes.add(len(tx.payload.proof.encode()))
        tx_sizes.add(len(tx.encode()))
    if len(sizes) != 1:  # pragma: no cover
        raise RuntimeError(f"proof sizes vary within a cell: {sorted(sizes)}")
    return BenchCell(mode.value, depth, n, len(red), 1000 * statistics.median(red),
                     1000 * statistics.median(ver), 1000 * statistics.median(app), sizes.pop(), max(tx_sizes))


def bench_grid(depths: Iterable[int] = DEFAULT_DEPTHS, ns: Iterable[int] = DEFAULT_NS,
               modes=(Mode.FIXED, Mode.ARBITRARY), reps: int = 5, seed: int = 0) -> list[BenchCell]:
    return [bench_cell(m, d, n, reps, seed) for m in modes for d in depths for n in ns
            if n <= 1 << d]


def slope_per_coin(cells: list[BenchCell], field: str = "verify_ms") -> float:
    """Least-squares slope of ``field`` against n (ms per extra coin)."""
    xs = [c.n for c in cells]
    ys = [getattr(c, field) for c in cells]
    if len(set(xs)) < 2:
        return 0.0
    return statistics.linear_regression(xs, ys).slope


# -- kernels -----------------------------------------------------------------

def _timeit(fn, reps: int) -> float:
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return 1e6 * (time.perf_counter() - t0) / reps


def kernel_timings(reps: int = 50, seed: int = 0) -> dict:
    """Microseconds per call for the arithmetic and hashing kernels."""
    rng = random.Random(seed)
    e = rng.randrange(1, group.Q)
    x = group.g_pow(rng.randrange(1, group.Q))
    kp = hom_kgen(b"kernel")
    c = hom_enc(kp.ek, 123_456, rng.randrange(1, group.Q))
    leaves = [rng.randbytes(32) for _ in range(64)]

    def inserts():
        t = IncrementalMerkleTree(20)
        for leaf in leaves:
            t.insert(leaf)

    return {
        "backend": BACKEND_NAME,
        "powmod_q_us": _timeit(lambda: backend.powmod(x, e, group.P), reps),
        "g_pow_us": _timeit(lambda: group.g_pow(e), reps),
        "invert_us": _timeit(lambda: group.inv(x), reps),
        "jacobi_us": _timeit(lambda: backend.jacobi(x, group.P), reps),
        "hom_enc_us": _timeit(lambda: hom_enc(kp.ek, 77, rng.randrange(1, group.Q)), reps),
        "hom_dec_us": _timeit(lambda: hom_dec(kp.dk, c), max(1, reps // 10)),
        "merkle_insert_d20_us": _timeit(inserts, max(1, reps // 10)) / len(leaves),
    }


def compare_backends(reps: int = 50, seed: int = 0) -> list[dict]:
    """Kernel tables for this process and for a pure-Python subprocess."""
    rows = [kernel_timings(reps, seed)]
    env = dict(os.environ, DTL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-m", "dtl.bench", "--kernels-json",
                          "--reps", str(reps), "--seed", str(seed)],
                         env=env, capture_output=True, text=True, check=True)
    rows.append(json.loads(out.stdout))
    return rows


def main(argv: Optional[list] = None) -> int:
    import argparse

    ap = argparse.ArgumentParser(prog="python -m dtl.bench")
    ap.add_argument("--kernels-json", action="store_true")
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if args.kernels_json:
        print(json.dumps(kernel_timings(args.reps, args.seed)))
        return 0
    for cell in bench_grid(reps=5, seed=args.seed):
        print(json.dumps(asdict(cell)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
