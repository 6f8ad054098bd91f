"""Data Tumbling Layer: unlinkable redemption of accumulated coins, with a ledger simulator,
three hosted applications and executable security experiments."""

from .errors import DtlError
from .scheme import (
    DtlParams,
    Mode,
    RedeemResult,
    coin_public_key,
    dtl_accumulate,
    dtl_create,
    dtl_redeem,
    dtl_setup,
    dtl_verify,
    verify_result,
)

__version__ = "0.1.0"

__all__ = [
    "DtlError", "DtlParams", "Mode", "RedeemResult", "coin_public_key", "dtl_accumulate",
    "dtl_create", "dtl_redeem", "dtl_setup", "dtl_verify", "verify_result",
]
