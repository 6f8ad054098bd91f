"""Ledger-hosted applications: fixed payment, confidential payment, weighted voting."""

from ..calls import DeployTumbler, DeployVote
from ..ledger import register_factory
from ..scheme import Mode
from .confidential_pay import ConfidentialPay
from .fixed_pay import FixedPay
from .tumbler import ConfState, TumblerState, conf_burn, conf_fund, conf_read
from .voting import Stage, Voting, vote_get_stage


def _deploy_tumbler(ctx, call: DeployTumbler):
    if call.mode is Mode.FIXED:
        return FixedPay.deploy(ctx, call)
    return ConfidentialPay.deploy(ctx, call)


register_factory(DeployTumbler, _deploy_tumbler)
register_factory(DeployVote, Voting.deploy)

__all__ = [
    "ConfState", "ConfidentialPay", "FixedPay", "Stage", "TumblerState", "Voting",
    "conf_burn", "conf_fund", "conf_read", "vote_get_stage",
]
