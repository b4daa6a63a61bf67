"""Event-sourced node wrapping the market state machine.

The append-only log is the source of truth: line 0 is a genesis record
pinning the gas fee, fee sink, and genesis accounts, and every subsequent
line is one applied message (execute or admin) with its recorded outcome.
State is a pure fold over the log, so restarting a node replays the file and
lands on the identical state hash. Entries are flushed and fsynced before a
response is released (write-ahead), and sequence numbers are checked on
replay - a gap or a divergent outcome aborts startup with CorruptLog.

Queries never touch the log and never charge gas.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass

from .config import MODE_ASSERTION, NodeConfig
from .contract import Market
from .errors import CorruptLog, FaucetDisabled, MarketError
from .messages import (
    canonical_json,
    decode_amount,
    decode_message,
    encode_message,
    is_execute,
)

ADMIN_SENDER = "admin"


@dataclass
class LogEntry:
    sequence: int
    tick: int
    sender: str
    message: dict            # wire form
    attached: int
    outcome: dict            # {"status": "accepted", "receipt": ...} | {"status": "rejected", "code": ...}

    def to_wire(self) -> dict:
        return {
            "sequence": self.sequence,
            "tick": self.tick,
            "sender": self.sender,
            "message": self.message,
            "attached": str(self.attached),
            "outcome": self.outcome,
        }


def state_hash_of(market: Market) -> str:
    digest = hashlib.sha256(canonical_json(market.snapshot()).encode("utf-8"))
    return digest.hexdigest()


class Node:
    """Single-writer node: executes under one lock, logs before replying."""

    def __init__(self, config: NodeConfig):
        self.config = config
        self._lock = threading.RLock()
        self._sequence = 0
        path = config.log_path
        if os.path.exists(path) and os.path.getsize(path) > 0:
            self.market = self._replay_file(path)
        else:
            self.market = Market(gas_fee=config.gas_fee, fee_sink=config.fee_sink)
            for addr, amount in sorted(config.genesis.items()):
                self.market.ledger.create_account(addr, amount)
            self._log_fh = open(path, "a", encoding="utf-8")
            self._append_raw({
                "sequence": 0,
                "type": "genesis",
                "gas_fee": str(config.gas_fee),
                "fee_sink": config.fee_sink,
                "accounts": {a: str(v) for a, v in sorted(config.genesis.items())},
            })

    # --- log plumbing ----------------------------------------------------

    def _append_raw(self, record: dict) -> None:
        self._log_fh.write(canonical_json(record) + "\n")
        self._log_fh.flush()
        os.fsync(self._log_fh.fileno())

    def _append_entry(self, entry: LogEntry) -> None:
        self._sequence = entry.sequence
        self._append_raw(entry.to_wire())

    def _next_sequence(self) -> int:
        return self._sequence + 1

    def _replay_file(self, path: str) -> Market:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        market = self._fold(lines)
        self._log_fh = open(path, "a", encoding="utf-8")
        return market

    def _fold(self, lines: list[str]) -> Market:
        """Rebuild state from log lines, verifying sequences and outcomes."""
        if not lines:
            raise CorruptLog("empty log")
        try:
            genesis = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise CorruptLog(f"line 1 unparseable: {exc}") from exc
        if genesis.get("type") != "genesis" or genesis.get("sequence") != 0:
            raise CorruptLog("log does not start with a genesis record")
        market = Market(
            gas_fee=decode_amount(genesis["gas_fee"], "gas_fee"),
            fee_sink=genesis["fee_sink"],
        )
        for addr, amount in genesis.get("accounts", {}).items():
            market.ledger.create_account(addr, decode_amount(amount))
        sequence = 0
        for lineno, line in enumerate(lines[1:], start=2):
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptLog(f"line {lineno} unparseable: {exc}") from exc
            seq = raw.get("sequence")
            if seq != sequence + 1:
                raise CorruptLog(
                    f"line {lineno}: sequence {seq}, expected {sequence + 1}")
            sequence = seq
            if raw.get("tick") != market.clock:
                raise CorruptLog(f"line {lineno}: tick mismatch")
            outcome = self._apply(market, raw["sender"], raw["message"],
                                  decode_amount(raw["attached"], "attached"))
            if outcome != raw.get("outcome"):
                raise CorruptLog(f"line {lineno}: outcome diverged on replay")
        self._sequence = sequence
        return market

    @staticmethod
    def _apply(market: Market, sender: str, wire_msg: dict, attached: int) -> dict:
        """Deterministic application shared by live handling and replay."""
        try:
            msg = decode_message(wire_msg)
            mtype = msg["type"]
            if mtype == "tick":
                market.advance_clock(msg["dt"])
                return {"status": "accepted", "receipt": {"events": [
                    {"name": "clock_advanced",
                     "attributes": {"dt": str(msg["dt"]),
                                    "clock": str(market.clock)}}],
                    "transfers": []}}
            if mtype == "faucet":
                market.faucet(msg["addr"], msg["amount"])
                return {"status": "accepted", "receipt": {"events": [
                    {"name": "faucet", "attributes": {
                        "addr": msg["addr"], "amount": str(msg["amount"])}}],
                    "transfers": []}}
            receipt = market.execute(sender, attached, msg)
            return {"status": "accepted", "receipt": receipt.to_wire()}
        except MarketError as exc:
            return {"status": "rejected", "code": exc.code, "detail": exc.detail}

    # --- public surface ---------------------------------------------------

    def handle_execute(self, sender: str, funds, wire_msg: dict) -> dict:
        """Apply one execute message; the log entry lands before we return."""
        with self._lock:
            attached = decode_amount(funds, "funds")
            mtype = wire_msg.get("type") if isinstance(wire_msg, dict) else None
            if not is_execute(mtype):
                # don't let admin messages sneak in through the execute door
                return {"status": "rejected", "code": "MalformedMessage",
                        "detail": f"not an execute message: {mtype!r}"}
            entry = LogEntry(
                sequence=self._next_sequence(),
                tick=self.market.clock,
                sender=sender,
                message=wire_msg,
                attached=attached,
                outcome=self._apply(self.market, sender, wire_msg, attached),
            )
            self._append_entry(entry)
            return entry.outcome

    def admin_tick(self, dt: int) -> dict:
        with self._lock:
            wire = encode_message({"type": "tick", "dt": dt})
            return self._admin(wire)

    def admin_faucet(self, addr: str, amount) -> dict:
        with self._lock:
            if self.config.mode == MODE_ASSERTION:
                # policy refusal, not a protocol outcome: keep it out of the log
                exc = FaucetDisabled("faucet is disabled in assertion mode")
                return {"status": "rejected", "code": exc.code, "detail": exc.detail}
            wire = encode_message({
                "type": "faucet", "addr": addr,
                "amount": decode_amount(amount, "amount")})
            return self._admin(wire)

    def _admin(self, wire_msg: dict) -> dict:
        entry = LogEntry(
            sequence=self._next_sequence(),
            tick=self.market.clock,
            sender=ADMIN_SENDER,
            message=wire_msg,
            attached=0,
            outcome=self._apply(self.market, ADMIN_SENDER, wire_msg, 0),
        )
        self._append_entry(entry)
        return entry.outcome

    def handle_query(self, kind: str, arg=None):
        with self._lock:
            if kind == "goods":
                return {"goods": self.market.get_goods()}
            if kind == "orders":
                return {"orders": self.market.get_orders()}
            if kind == "order":
                return {"order": self.market.get_order_detail(arg)}
            if kind == "addresses":
                return {"addresses": self.market.get_addresses(arg)}
            if kind == "balance":
                return {"address": arg, "balance": str(self.market.get_balance(arg))}
            if kind == "stats":
                return self.market.get_stats(arg)
            raise ValueError(f"unknown query kind {kind!r}")

    def state_hash(self) -> str:
        with self._lock:
            return state_hash_of(self.market)

    def close(self) -> None:
        with self._lock:
            self._log_fh.close()

    @classmethod
    def replay(cls, log_path: str) -> "Node":
        """Rebuild a node purely from an existing log (must exist)."""
        if not os.path.exists(log_path) or os.path.getsize(log_path) == 0:
            raise CorruptLog(f"no log at {log_path}")
        return cls(NodeConfig(log_path=log_path))
