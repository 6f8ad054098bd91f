"""Security experiments (one-more-redeem, theft, non-slanderability, unlinkability)."""

from typing import Iterator, Optional

from ..scheme import DtlParams, Mode, dtl_setup
from . import adversaries
from .experiments import (
    GameOutcome,
    run_nslander,
    run_one_more_redeem,
    run_theft,
    run_unlink,
    unlink_tolerance,
)
from .oracles import Claim, OracleLog, Oracles, PublicView, create_oracle, redeem_oracle


def run_suite(seed: int = 0, trials: int = 1000, modes=(Mode.FIXED, Mode.ARBITRARY),
              params: Optional[dict] = None, guesses: int = adversaries.DEFAULT_GUESSES
              ) -> Iterator[tuple[Mode, GameOutcome]]:
    """Every (game, shipped adversary) pair in each mode."""
    for mode in modes:
        pp: DtlParams = (params or {}).get(mode) or dtl_setup(mode, seed=seed)

        def make(cls):
            try:
                return cls(guesses=guesses)
            except TypeError:
                return cls()

        for cls in adversaries.ONE_MORE_REDEEM:
            yield mode, run_one_more_redeem(pp, make(cls), seed)
        for cls in adversaries.ONE_MORE_REDEEM_ORACLE:
            yield mode, run_one_more_redeem(pp, make(cls), seed, with_oracles=True)
        for cls in adversaries.THEFT:
            yield mode, run_theft(pp, make(cls), seed)
        for cls in adversaries.NSLANDER:
            yield mode, run_nslander(pp, make(cls), seed)
        for cls in adversaries.UNLINK:
            yield mode, run_unlink(pp, make(cls), seed, trials)


__all__ = [
    "Claim", "GameOutcome", "OracleLog", "Oracles", "PublicView", "adversaries", "create_oracle",
    "redeem_oracle", "run_nslander", "run_one_more_redeem", "run_suite", "run_theft", "run_unlink",
    "unlink_tolerance",
]
