"""Node configuration: defaults < config file < environment < explicit flags."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import MalformedMessage, ParseError
from .messages import decode_amount


def _amount(value, what: str) -> int:
    try:
        return decode_amount(value, what)
    except MalformedMessage as exc:
        raise ParseError(exc.detail) from exc

ENV_PREFIX = "EMARKET_"

MODE_SANDBOX = "sandbox"
MODE_ASSERTION = "assertion"


@dataclass
class NodeConfig:
    log_path: str = "emarket.log"
    host: str = "127.0.0.1"
    port: int = 8990
    gas_fee: int = 1
    mode: str = MODE_SANDBOX
    fee_sink: str = "fee_sink"
    genesis: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in (MODE_SANDBOX, MODE_ASSERTION):
            raise ParseError(f"mode must be sandbox or assertion, got {self.mode!r}")


def _from_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    return raw


def _from_env(env) -> dict:
    out = {}
    mapping = {
        "LOG_PATH": "log_path",
        "HOST": "host",
        "PORT": "port",
        "GAS_FEE": "gas_fee",
        "MODE": "mode",
        "FEE_SINK": "fee_sink",
    }
    for suffix, key in mapping.items():
        value = env.get(ENV_PREFIX + suffix)
        if value is not None:
            out[key] = value
    return out


def load_config(path: str | None = None, env=None, **overrides) -> NodeConfig:
    """Merge config sources; `overrides` are command-line flags (highest)."""
    merged: dict = {}
    if path:
        merged.update(_from_file(path))
    merged.update(_from_env(env if env is not None else os.environ))
    merged.update({k: v for k, v in overrides.items() if v is not None})

    known = {"log_path", "host", "port", "gas_fee", "mode", "fee_sink", "genesis"}
    unknown = set(merged) - known
    if unknown:
        raise ParseError(f"unknown config keys: {sorted(unknown)}")

    if "port" in merged:
        merged["port"] = int(merged["port"])
    if "gas_fee" in merged:
        merged["gas_fee"] = _amount(merged["gas_fee"], "gas_fee")
    if "genesis" in merged:
        raw = merged["genesis"]
        if not isinstance(raw, dict):
            raise ParseError("genesis must map addresses to amounts")
        merged["genesis"] = {
            addr: _amount(amount, f"genesis[{addr}]")
            for addr, amount in raw.items()
        }
    return NodeConfig(**merged)
