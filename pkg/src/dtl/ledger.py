"""Deterministic single-writer ledger hosting the tumbler contracts.

The ledger is an honest sequencer: no blocks, no fees, no consensus.
Transactions apply strictly in order. A failing contract call rolls back every
balance, contract and event change; only the tx counter moves.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

from .calls import Call, DeployTumbler, DeployVote, Payload, decode_payload, encode_payload
from .crypto_core import Domain, H, SecParams
from .encoding import Reader, Writer
from .errors import (
    ContractError,
    DtlError,
    DuplicateAccount,
    EncodingError,
    InsufficientFunds,
    MalformedMessage,
    UnknownAccount,
    UnknownTarget,
)
from .proof_system import NizkKeys, RelationId, nizk_setup
from .scheme import DtlParams, Mode

ADDRESS_BYTES = 20
LOG_MAGIC = b"DTLLOG"
LOG_VERSION = 1

Address = bytes


def address(name: Union[str, bytes]) -> Address:
    """Deterministic 20-byte address for a human-readable principal."""
    raw = name.encode() if isinstance(name, str) else name
    return H(Domain.TRANSCRIPT, Writer().text("address").var(raw).getvalue())[:ADDRESS_BYTES]


def _check_address(a: bytes) -> None:
    if not isinstance(a, bytes) or len(a) != ADDRESS_BYTES:
        raise MalformedMessage("address must be 20 bytes")


@dataclass(frozen=True)
class Transaction:
    sender: Address
    target: bytes  # contract id, plain address, or b"" for a deploy
    value: int = 0
    payload: Payload = None

    def encode(self) -> bytes:
        return (Writer().fixed(self.sender, ADDRESS_BYTES).var(self.target).u64(self.value)
                .raw(encode_payload(self.payload)).getvalue())

    @classmethod
    def decode(cls, b: bytes) -> "Transaction":
        r = Reader(b)
        tx = cls(r.fixed(ADDRESS_BYTES), r.var(), r.u64(), decode_payload(r))
        r.done()
        return tx


@dataclass(frozen=True)
class Event:
    contract_id: bytes
    label: str
    payload: bytes
    tx_index: int = 0

    def encode(self) -> bytes:
        return (Writer().var(self.contract_id).text(self.label).var(self.payload)
                .u64(self.tx_index).getvalue())

    @classmethod
    def decode(cls, b: bytes) -> "Event":
        r = Reader(b)
        return cls(r.var(), r.text(), r.var(), r.u64())


@dataclass(frozen=True)
class Receipt:
    ok: bool
    tx_index: int
    error: Optional[str] = None
    message: str = ""
    events: tuple = ()
    contract_id: Optional[bytes] = None

    def __bool__(self) -> bool:
        return self.ok


class SetupRegistry:
    """Trusted setup: one key pair per (relation, seed), shared by contracts and provers."""

    def __init__(self) -> None:
        self._keys: dict[tuple[RelationId, bytes], NizkKeys] = {}

    def keys(self, rel: RelationId, seed: bytes) -> NizkKeys:
        k = (RelationId(rel), bytes(seed))
        if k not in self._keys:
            self._keys[k] = nizk_setup(k[0], k[1])
        return self._keys[k]

    def dtl_params(self, mode: Mode, sec: SecParams, seed: bytes,
                   fixed_data: Optional[int] = None) -> DtlParams:
        return DtlParams(Mode(mode), sec, self.keys(Mode(mode).relation, seed), fixed_data)

    def __deepcopy__(self, memo):
        return self


class Contract:
    """Base for ledger-hosted contracts. ``pool`` is the escrowed native token."""

    kind = "contract"

    def __init__(self) -> None:
        self.pool = 0

    def handle(self, ctx: "CallContext", call: Call) -> None:
        raise NotImplementedError

    def encode_state(self) -> bytes:
        return b""


class CallContext:
    def __init__(self, ledger: "LedgerState", contract_id: bytes, contract: Contract,
                 sender: Address, value: int) -> None:
        self.ledger = ledger
        self.contract_id = contract_id
        self.contract = contract
        self.sender = sender
        self.value = value

    @property
    def setup(self) -> SetupRegistry:
        return self.ledger.setup

    def pay(self, to: Address, amount: int) -> None:
        _check_address(to)
        if amount < 0 or self.contract.pool < amount:
            raise InsufficientFunds(f"pool holds {self.contract.pool}, cannot pay {amount}")
        self.contract.pool -= amount
        self.ledger.balances[to] = self.ledger.balances.get(to, 0) + amount

    def emit(self, label: str, payload: bytes = b"") -> None:
        self.ledger.events.append(Event(self.contract_id, label, payload, self.ledger.tx_count - 1))


Factory = Callable[[CallContext, Call], Contract]
FACTORIES: dict[type, Factory] = {}


def register_factory(call_cls: type, factory: Factory) -> None:
    FACTORIES[call_cls] = factory


def _load_builtin_contracts() -> None:
    if DeployTumbler not in FACTORIES or DeployVote not in FACTORIES:
        from . import contracts  # noqa: F401  (registers factories)


class LedgerState:
    def __init__(self) -> None:
        self.balances: dict[Address, int] = {}
        self.contracts: dict[bytes, Contract] = {}
        self.events: list[Event] = []
        self.tx_count = 0
        self.setup = SetupRegistry()
        self.genesis_accounts: tuple[tuple[Address, int], ...] = ()
        self.log: list[Transaction] = []

    @classmethod
    def genesis(cls, accounts: Iterable[tuple[Address, int]] = ()) -> "LedgerState":
        state = cls()
        accounts = tuple((bytes(a), int(v)) for a, v in accounts)
        for a, v in accounts:
            _check_address(a)
            if v < 0:
                raise ValueError("genesis balance must be non-negative")
            if a in state.balances:
                raise DuplicateAccount(f"address {a.hex()} listed twice")
            state.balances[a] = v
        state.genesis_accounts = accounts
        return state

    # -- queries -------------------------------------------------------------

    def balance(self, a: Address) -> int:
        return self.balances.get(a, 0)

    def contract(self, cid: bytes) -> Contract:
        return self.contracts[cid]

    def total_supply(self) -> int:
        return sum(self.balances.values()) + sum(c.pool for c in self.contracts.values())

    def read_events(self, contract_id: Optional[bytes] = None,
                    label: Optional[str] = None) -> list[Event]:
        return [e for e in self.events
                if (contract_id is None or e.contract_id == contract_id)
                and (label is None or e.label == label)]

    def events_digest(self) -> bytes:
        w = Writer().u32(len(self.events))
        for e in self.events:
            w.var(e.encode())
        return H(Domain.TRANSCRIPT, b"events", w.getvalue())

    def digest(self) -> bytes:
        w = Writer().u64(self.tx_count).u32(len(self.balances))
        for a in sorted(self.balances):
            w.fixed(a, ADDRESS_BYTES).u64(self.balances[a])
        w.u32(len(self.contracts))
        for cid in sorted(self.contracts):
            c = self.contracts[cid]
            w.var(cid).text(c.kind).u64(c.pool).var(c.encode_state())
        w.raw(self.events_digest())
        return H(Domain.TRANSCRIPT, b"ledger", w.getvalue())

    # -- transitions ---------------------------------------------------------

    def apply(self, tx: Transaction) -> Receipt:
        idx = self.tx_count
        self.tx_count += 1
        self.log.append(tx)
        saved_balances = dict(self.balances)
        n_events = len(self.events)
        saved: Optional[tuple[bytes, Contract]] = None
        new_id = None
        try:
            if not isinstance(tx.value, int) or tx.value < 0:
                raise MalformedMessage("value must be a non-negative integer")
            if tx.sender not in self.balances:
                raise UnknownAccount(f"sender {bytes(tx.sender).hex()} has no account")
            if self.balances[tx.sender] < tx.value:
                raise InsufficientFunds(f"sender holds {self.balances[tx.sender]} < {tx.value}")
            self.balances[tx.sender] -= tx.value

            if tx.target == b"":
                new_id = self._deploy(tx, idx)
            elif tx.target in self.contracts:
                c = self.contracts[tx.target]
                saved = (tx.target, copy.deepcopy(c))
                c.pool += tx.value  # escrow before dispatch
                if tx.payload is None:
                    raise MalformedMessage("contract call needs a payload")
                c.handle(CallContext(self, tx.target, c, tx.sender, tx.value), tx.payload)
            else:
                _check_address(tx.target)
                if tx.payload is not None:
                    raise UnknownTarget(f"no contract at {tx.target.hex()}")
                self.balances[tx.target] = self.balances.get(tx.target, 0) + tx.value
        except Exception as exc:  # never escapes the ledger boundary
            self.balances = saved_balances
            if saved is not None:
                self.contracts[saved[0]] = saved[1]
            if new_id is not None:
                self.contracts.pop(new_id, None)
            del self.events[n_events:]
            return Receipt(False, idx, type(exc).__name__, str(exc))
        return Receipt(True, idx, events=tuple(self.events[n_events:]), contract_id=new_id)

    def _deploy(self, tx: Transaction, idx: int) -> bytes:
        _load_builtin_contracts()
        factory = FACTORIES.get(type(tx.payload))
        if factory is None:
            raise UnknownTarget("deploy needs a registered deploy payload")
        cid = H(Domain.TRANSCRIPT, b"contract", tx.sender, Writer().u64(idx).getvalue())[:ADDRESS_BYTES]
        probe = Contract()
        ctx = CallContext(self, cid, probe, tx.sender, tx.value)
        contract = factory(ctx, tx.payload)
        contract.pool += tx.value
        self.contracts[cid] = contract
        ctx.contract = contract
        ctx.emit("Deploy", Writer().text(contract.kind).getvalue())
        return cid

    # -- replay logs ---------------------------------------------------------

    def encode_log(self) -> bytes:
        w = Writer().raw(LOG_MAGIC).u8(LOG_VERSION).u32(len(self.genesis_accounts))
        for a, v in self.genesis_accounts:
            w.fixed(a, ADDRESS_BYTES).u64(v)
        w.u32(len(self.log))
        for tx in self.log:
            w.var(tx.encode())
        return w.raw(self.digest()).getvalue()

    def save_log(self, path: Union[str, Path]) -> None:
        Path(path).write_bytes(self.encode_log())


def apply_tx(state: LedgerState, tx: Transaction) -> tuple[LedgerState, Receipt]:
    """Functional wrapper; the state is updated in place and returned."""
    return state, state.apply(tx)


def genesis(accounts: Iterable[tuple[Address, int]] = ()) -> LedgerState:
    return LedgerState.genesis(accounts)


def read_events(state: LedgerState, contract_id: Optional[bytes] = None,
                label: Optional[str] = None) -> list[Event]:
    return state.read_events(contract_id, label)


@dataclass
class ReplayLog:
    genesis: list = field(default_factory=list)
    txs: list = field(default_factory=list)
    digest: bytes = b""

    @classmethod
    def decode(cls, b: bytes) -> "ReplayLog":
        if not b.startswith(LOG_MAGIC):
            raise EncodingError("not a replay log (bad magic)")
        r = Reader(b[len(LOG_MAGIC):])
        version = r.u8()
        if version != LOG_VERSION:
            raise EncodingError(f"unsupported replay-log version {version}")
        gen = [(r.fixed(ADDRESS_BYTES), r.u64()) for _ in range(r.u32())]
        txs = [Transaction.decode(r.var()) for _ in range(r.u32())]
        digest = r.fixed(32)
        r.done()
        return cls(gen, txs, digest)


def replay(log: Union[bytes, ReplayLog]) -> tuple[LedgerState, bool]:
    """Re-apply a log from genesis; returns the state and whether digests match."""
    if isinstance(log, bytes):
        log = ReplayLog.decode(log)
    state = LedgerState.genesis(log.genesis)
    for tx in log.txs:
        state.apply(tx)
    return state, state.digest() == log.digest


__all__ = [
    "ADDRESS_BYTES", "Address", "CallContext", "Contract", "ContractError", "DtlError", "Event",
    "FACTORIES", "LedgerState", "Receipt", "ReplayLog", "SetupRegistry", "Transaction", "address",
    "apply_tx", "genesis", "read_events", "register_factory", "replay",
]
