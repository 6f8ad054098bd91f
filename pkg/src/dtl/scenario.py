"""Line-oriented scenario files for the demo applications.

    #dtl-scenario 1
    name   three-coins
    app    fixed-pay
    seed   7
    param  amt_fixed=10 tree_depth=20 root_window_k=30
    account alice 100
    deposit from=alice coin=c1
    withdraw coin=c1 to=carol via=bob

The first line is the magic plus a format version. ``#`` starts a comment.
Any action may carry ``expect=<ErrorName>`` to script a rejection; an
unscripted rejection marks the run as failed.
"""

from __future__ import annotations

import random
import shlex
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .crypto_core import HomKeypair, SecParams, hom_dec, hom_kgen
from .errors import DtlError
from .ledger import LedgerState, Receipt, Transaction, address
from .wallet import (
    ConfidentialWallet,
    FixedPayWallet,
    VoteWallet,
    deploy_confidential_pay,
    deploy_fixed_pay,
    deploy_vote,
)

MAGIC = "#dtl-scenario"
VERSION = 1
APPS = ("fixed-pay", "confidential-pay", "vote")

PARAM_KEYS = {"tree_depth", "root_window_k", "amt_fixed", "plaintext_range_bits"}

# verb -> (required keys, optional keys)
SCHEMA: dict[str, dict[str, tuple[set, set]]] = {
    "fixed-pay": {
        "deposit": ({"from", "coin"}, set()),
        "withdraw": ({"coin", "to"}, {"via", "upto"}),
        "transfer": ({"from", "to", "amount"}, set()),
    },
    "confidential-pay": {
        "keypair": ({"name"}, set()),
        "deposit": ({"from", "amount", "coin"}, set()),
        "conf-deposit": ({"key", "amount", "coin"}, {"via", "claim"}),
        "withdraw": ({"coin", "to"}, {"via", "upto"}),
        "transfer": ({"from", "to", "amount"}, set()),
    },
    "vote": {
        "keypair": ({"name"}, set()),
        "candidate": ({"key"}, {"via"}),
        "advance": (set(), {"via"}),
        "register": ({"from", "power", "coin"}, set()),
        "vote": ({"coin", "for"}, {"via", "upto"}),
        "reveal": ({"key"}, {"via", "claim"}),
    },
}


class ScenarioError(DtlError):
    def __init__(self, line: int, msg: str) -> None:
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class Action:
    line: int
    verb: str
    args: dict

    def get(self, key: str, default=None):
        return self.args.get(key, default)


@dataclass
class Scenario:
    name: str = "unnamed"
    app: str = ""
    seed: int = 0
    params: dict = field(default_factory=dict)
    accounts: list = field(default_factory=list)
    actions: list = field(default_factory=list)

    def sec(self) -> SecParams:
        p = self.params
        return SecParams(
            tree_depth=p.get("tree_depth", 20),
            root_window_k=p.get("root_window_k", 30),
            plaintext_range_bits=p.get("plaintext_range_bits", 32),
        )


def _int(line: int, key: str, v: str) -> int:
    try:
        x = int(v, 0)
    except ValueError:
        raise ScenarioError(line, f"{key} must be an integer, got {v!r}") from None
    if x < 0:
        raise ScenarioError(line, f"{key} must be non-negative")
    return x


def parse_scenario(text: str) -> Scenario:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise ScenarioError(1, f"missing header {MAGIC!r}")
    head = lines[0].split()
    if len(head) != 2 or head[1] != str(VERSION):
        raise ScenarioError(1, f"unsupported scenario version {head[1:]!r}")
    sc = Scenario()
    for no, raw in enumerate(lines[1:], start=2):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            toks = shlex.split(body)
        except ValueError as exc:
            raise ScenarioError(no, str(exc)) from None
        verb, rest = toks[0], toks[1:]
        if verb == "name":
            sc.name = " ".join(rest) or sc.name
        elif verb == "app":
            if len(rest) != 1 or rest[0] not in APPS:
                raise ScenarioError(no, f"app must be one of {', '.join(APPS)}")
            sc.app = rest[0]
        elif verb == "seed":
            if len(rest) != 1:
                raise ScenarioError(no, "seed takes one integer")
            sc.seed = _int(no, "seed", rest[0])
        elif verb == "param":
            for kv in rest:
                k, sep, v = kv.partition("=")
                if not sep or k not in PARAM_KEYS:
                    raise ScenarioError(no, f"unknown parameter {kv!r}")
                sc.params[k] = _int(no, k, v)
        elif verb == "account":
            if len(rest) != 2:
                raise ScenarioError(no, "account takes a name and a balance")
            sc.accounts.append((rest[0], _int(no, "balance", rest[1])))
        else:
            if not sc.app:
                raise ScenarioError(no, "actions need an earlier 'app' line")
            spec = SCHEMA[sc.app].get(verb)
            if spec is None:
                raise ScenarioError(no, f"unknown action {verb!r} for app {sc.app}")
            args = {}
            for kv in rest:
                k, sep, v = kv.partition("=")
                if not sep:
                    raise ScenarioError(no, f"expected key=value, got {kv!r}")
                args[k] = v
            required, optional = spec
            missing = required - args.keys()
            if missing:
                raise ScenarioError(no, f"{verb} is missing {', '.join(sorted(missing))}")
            extra = args.keys() - required - optional - {"expect"}
            if extra:
                raise ScenarioError(no, f"{verb} does not take {', '.join(sorted(extra))}")
            sc.actions.append(Action(no, verb, args))
    if not sc.app:
        raise ScenarioError(len(lines), "scenario declares no app")
    return sc


def load_scenario(path: Union[str, Path]) -> Scenario:
    return parse_scenario(Path(path).read_text())


def bundled(app: str) -> Scenario:
    text = resources.files("dtl").joinpath("scenarios", f"{app}.dtl").read_text()
    return parse_scenario(text)


@dataclass
class StepResult:
    line: int
    verb: str
    ok: bool
    expected: Optional[str]
    error: Optional[str]
    diff: dict

    @property
    def as_expected(self) -> bool:
        return self.ok if self.expected is None else self.error == self.expected


@dataclass
class ScenarioReport:
    scenario: Scenario
    ledger: LedgerState
    contract_id: bytes
    steps: list
    keys: dict
    totals: dict

    @property
    def ok(self) -> bool:
        return all(s.as_expected for s in self.steps)

    def lines(self) -> list[str]:
        out = [f"scenario={self.scenario.name} app={self.scenario.app} seed={self.scenario.seed}"]
        for s in self.steps:
            status = "ok" if s.ok else f"rejected:{s.error}"
            flag = "" if s.as_expected else "  UNEXPECTED"
            diff = " ".join(f"{k}{v:+d}" for k, v in s.diff.items())
            out.append(f"line {s.line:>3} {s.verb:<13} {status:<24} {diff}{flag}".rstrip())
        for k, v in self.totals.items():
            out.append(f"{k}={v}")
        out.append(f"events={len(self.ledger.events)} event_digest={self.ledger.events_digest().hex()}")
        out.append(f"state_digest={self.ledger.digest().hex()}")
        out.append(f"result={'OK' if self.ok else 'FAILED'}")
        return out


class _Runner:
    def __init__(self, sc: Scenario, seed: Optional[int]) -> None:
        self.sc = sc
        self.seed = sc.seed if seed is None else seed
        self.rng = random.Random(self.seed)
        self.names: dict[bytes, str] = {}
        self.coins: dict = {}
        self.coin_amount: dict[str, int] = {}
        self.spent: set[str] = set()
        self.keys: dict[str, HomKeypair] = {}

    def addr(self, name: str) -> bytes:
        a = address(name)
        self.names.setdefault(a, name)
        return a

    def keypair(self, name: str) -> HomKeypair:
        if name not in self.keys:
            self.keys[name] = hom_kgen(f"{self.seed}:{name}".encode())
        return self.keys[name]

    def snapshot(self, ledger: LedgerState, cid: bytes) -> dict:
        snap = {self.names.get(a, a.hex()[:8]): v for a, v in ledger.balances.items()}
        snap["<pool>"] = ledger.contract(cid).pool
        return snap


def run_scenario(sc: Scenario, seed: Optional[int] = None) -> ScenarioReport:
    r = _Runner(sc, seed)
    if not sc.accounts:
        raise ScenarioError(1, "scenario needs at least one account")
    owner = r.addr(sc.accounts[0][0])
    ledger = LedgerState.genesis([(r.addr(n), v) for n, v in sc.accounts])
    sec = sc.sec()
    if sc.app == "fixed-pay":
        deploy = deploy_fixed_pay(owner, sc.params.get("amt_fixed", 10), sec)
    elif sc.app == "confidential-pay":
        deploy = deploy_confidential_pay(owner, sec)
    else:
        deploy = deploy_vote(owner, sec)
    rec = ledger.apply(deploy)
    if not rec.ok:
        raise ScenarioError(1, f"deploy failed: {rec.error} {rec.message}")
    cid = rec.contract_id
    wallet_cls = {"fixed-pay": FixedPayWallet, "confidential-pay": ConfidentialWallet,
                  "vote": VoteWallet}[sc.app]
    w = wallet_cls(ledger, cid, r.rng)

    steps = []
    for act in sc.actions:
        before = r.snapshot(ledger, cid)
        try:
            rec = _dispatch(r, w, ledger, owner, act)
            ok, err = rec.ok, rec.error
        except ScenarioError:
            raise
        except DtlError as exc:  # client-side refusal (e.g. prover rejects amt > bal)
            ok, err = False, type(exc).__name__
        after = r.snapshot(ledger, cid)
        diff = {k: after.get(k, 0) - before.get(k, 0) for k in after if after.get(k, 0) != before.get(k, 0)}
        if ok and act.verb in ("withdraw", "vote"):
            r.spent.add(act.get("coin"))
        steps.append(StepResult(act.line, act.verb, ok, act.get("expect"), err, diff))

    return ScenarioReport(sc, ledger, cid, steps, r.keys, _totals(r, w, ledger, cid, sec))


def _dispatch(r: _Runner, w, ledger: LedgerState, owner: bytes, act: Action) -> Receipt:
    v, a = act.verb, act.args
    via = r.addr(a["via"]) if "via" in a else owner
    upto = _int(act.line, "upto", a["upto"]) if "upto" in a else None

    def coin(name):
        if name not in r.coins:
            raise ScenarioError(act.line, f"unknown coin {name!r}")
        return r.coins[name]

    if v == "keypair":
        r.keypair(a["name"])
        return Receipt(True, -1)
    if v == "transfer":
        return ledger.apply(Transaction(r.addr(a["from"]), r.addr(a["to"]),
                                        _int(act.line, "amount", a["amount"])))
    if v == "deposit":
        if isinstance(w, FixedPayWallet):
            tx, csk = w.deposit(r.addr(a["from"]))
        else:
            amt = _int(act.line, "amount", a["amount"])
            tx, csk = w.deposit(r.addr(a["from"]), amt)
            r.coin_amount[a["coin"]] = amt
        rec = ledger.apply(tx)
        if rec.ok:
            r.coins[a["coin"]] = csk
        return rec
    if v == "withdraw":
        if isinstance(w, FixedPayWallet):
            tx = w.withdraw(via, coin(a["coin"]), r.addr(a["to"]), upto=upto)
        else:
            tx = w.withdraw(via, coin(a["coin"]), r.keypair(a["to"]).ek, upto=upto)
        return ledger.apply(tx)
    if v == "conf-deposit":
        amt = _int(act.line, "amount", a["amount"])
        claim = _int(act.line, "claim", a["claim"]) if "claim" in a else None
        tx, csk = w.confidential_deposit(via, r.keypair(a["key"]), amt, bal=claim)
        rec = ledger.apply(tx)
        if rec.ok:
            r.coins[a["coin"]] = csk
            r.coin_amount[a["coin"]] = amt
        return rec
    if v == "candidate":
        return ledger.apply(w.register_candidate(via, r.keypair(a["key"]).ek))
    if v == "advance":
        return ledger.apply(w.advance(via))
    if v == "register":
        power = _int(act.line, "power", a["power"])
        tx, csk = w.register(r.addr(a["from"]), power)
        rec = ledger.apply(tx)
        if rec.ok:
            r.coins[a["coin"]] = csk
            r.coin_amount[a["coin"]] = power
        return rec
    if v == "vote":
        return ledger.apply(w.vote(via, coin(a["coin"]), r.keypair(a["for"]).ek, upto=upto))
    if v == "reveal":
        claim = _int(act.line, "claim", a["claim"]) if "claim" in a else None
        return ledger.apply(w.reveal(via, r.keypair(a["key"]), bal=claim))
    raise ScenarioError(act.line, f"unhandled action {v}")  # pragma: no cover


def _totals(r: _Runner, w, ledger: LedgerState, cid: bytes, sec: SecParams) -> dict:
    c = ledger.contract(cid)
    out = {f"balance[{r.names.get(a, a.hex()[:8])}]": v for a, v in sorted(
        ledger.balances.items(), key=lambda kv: r.names.get(kv[0], kv[0].hex()))}
    out["pool"] = c.pool
    out["deposits"] = len(c.tumbler.acc_history)
    out["spent_tags"] = len(c.tumbler.tag_list)
    bits = sec.plaintext_range_bits
    if r.sc.app == "confidential-pay":
        decrypted = 0
        for name in sorted(r.keys):
            kp = r.keys[name]
            if kp.ek in c.conf.accounts:
                bal = hom_dec(kp.dk, c.conf.accounts[kp.ek], bits)
                out[f"conf[{name}]"] = bal
                decrypted += bal
        outstanding = sum(v for k, v in r.coin_amount.items() if k in r.coins and k not in r.spent)
        out["outstanding_coins"] = outstanding
        out["conserved"] = "yes" if decrypted + outstanding == c.pool else "NO"
    elif r.sc.app == "vote":
        out["stage"] = c.stage.name
        for name in sorted(r.keys):
            kp = r.keys[name]
            if kp.ek in c.candidates:
                out[f"tally[{name}]"] = hom_dec(kp.dk, c.conf.accounts[kp.ek], bits)
                if kp.ek in c.revealed:
                    out[f"revealed[{name}]"] = c.revealed[kp.ek]
    return out
