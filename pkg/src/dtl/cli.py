"""``dtl`` command-line driver.

    dtl demo fixed-pay [--scenario FILE] [--seed N] [--out LOG]
    dtl games [--seed N] [--trials T]
    dtl bench [--depths 20] [--ns 1,17,256,1024] [--compare-backends]
    dtl replay LOG
    dtl oracles [--seed N] [--only NAME]

Every command is deterministic under ``--seed`` apart from timing fields.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .errors import EncodingError
from .scenario import APPS, ScenarioError, bundled, load_scenario, run_scenario


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_demo(args) -> int:
    try:
        sc = load_scenario(args.scenario) if args.scenario else bundled(args.app)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if sc.app != args.app:
        print(f"error: scenario is for app {sc.app!r}, not {args.app!r}", file=sys.stderr)
        return 2
    if args.depth is not None:
        sc.params["tree_depth"] = args.depth
    if args.window_k is not None:
        sc.params["root_window_k"] = args.window_k
    try:
        report = run_scenario(sc, args.seed)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for line in report.lines():
        print(line)
    if args.out:
        report.ledger.save_log(args.out)
        print(f"replay_log={args.out}")
    return 0 if report.ok else 1


def cmd_games(args) -> int:
    from .games import run_suite, unlink_tolerance

    tol = unlink_tolerance(args.trials)
    print(f"unlink_trials={args.trials} unlink_tolerance={tol:.2f}")
    wins = 0
    for mode, outcome in run_suite(args.seed, args.trials, guesses=args.guesses):
        print(f"mode={mode.value} {outcome.record()}")
        wins += outcome.win
    print(f"unexpected_wins={wins} result={'OK' if wins == 0 else 'FAILED'}")
    return 0 if wins == 0 else 1


def cmd_bench(args) -> int:
    from .bench import bench_grid, compare_backends, kernel_timings, slope_per_coin
    from .scheme import Mode

    cells = bench_grid(args.depths, args.ns, reps=args.reps, seed=args.seed)
    for c in cells:
        print(c.record())
    for mode in Mode:
        for d in args.depths:
            row = [c for c in cells if c.mode == mode.value and c.depth == d]
            if row:
                sizes = sorted({c.proof_bytes for c in row})
                print(f"mode={mode.value} depth={d} verify_slope_ms_per_coin={slope_per_coin(row):.6f} "
                      f"proof_bytes_constant={'yes' if len(sizes) == 1 else 'NO'}")
    rows = compare_backends(args.reps * 10, args.seed) if args.compare_backends else [kernel_timings(args.reps * 10)]
    for r in rows:
        print(" ".join(f"{k}={v:.1f}" if isinstance(v, float) else f"{k}={v}" for k, v in r.items()))
    return 0


def cmd_replay(args) -> int:
    from .ledger import ReplayLog, replay

    try:
        log = ReplayLog.decode(Path(args.log).read_bytes())
        state, match = replay(log)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EncodingError as exc:
        print(f"verdict=mismatch reason=undecodable ({exc})")
        return 1
    print(f"transactions={len(log.txs)}")
    print(f"recorded_digest={log.digest.hex()}")
    print(f"replayed_digest={state.digest().hex()}")
    print(f"verdict={'match' if match else 'mismatch'}")
    return 0 if match else 1


def cmd_oracles(args) -> int:
    from .properties import ALL_CHECKS

    names = args.only or list(ALL_CHECKS)
    failed = 0
    for name in names:
        res = ALL_CHECKS[name](seed=args.seed)
        print(res.record())
        failed += not res.ok
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dtl", description="Data tumbling layer demos, games and benchmarks.")
    ap.add_argument("--version", action="version", version=f"dtl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", help="run an application scenario on the ledger simulator")
    p.add_argument("app", choices=APPS)
    p.add_argument("--scenario", type=Path, help="scenario file (default: the bundled one)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--depth", type=int, help="Merkle tree depth")
    p.add_argument("--window-k", type=int, help="number of recent roots accepted at withdraw")
    p.add_argument("--out", type=Path, help="write a replay log here")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("games", help="run every shipped adversary against every experiment")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000, help="unlinkability trials per adversary")
    p.add_argument("--guesses", type=int, default=10_000, help="random-forgery attempts")
    p.set_defaults(func=cmd_games)

    p = sub.add_parser("bench", help="redeem/verify timings and proof sizes")
    p.add_argument("--depths", type=_ints, default=[20])
    p.add_argument("--ns", type=_ints, default=[1, 17, 256, 1024])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--compare-backends", action="store_true",
                   help="also time the kernels with DTL_PURE_PYTHON=1 in a subprocess")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("replay", help="re-apply a replay log and compare state digests")
    p.add_argument("log", type=Path)
    p.set_defaults(func=cmd_replay)

    from .properties import ALL_CHECKS

    p = sub.add_parser("oracles", help="run the randomized property oracles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", action="append", choices=sorted(ALL_CHECKS))
    p.set_defaults(func=cmd_oracles)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
