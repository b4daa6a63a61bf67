"""Canonical tagged wire form for execute and admin messages.

One tag per back-end message, field names matching the contract operation
signatures. Token amounts travel as decimal strings so JavaScript clients
never lose integer precision; ids, ticks, and ratings are plain ints.
decode_message is strict: unknown tags, missing fields, or extra fields are
rejected with MalformedMessage so a mistyped client field never half-applies.
"""

from __future__ import annotations

import json

from .errors import MalformedMessage
from .sealedbox import SealedEnvelope, b64decode, b64encode

AMOUNT = "amount"
INT = "int"
STR = "str"
BYTES = "bytes"
ENVELOPE = "envelope"

EXECUTE_FIELDS: dict[str, dict[str, str]] = {
    "post_item": {"title": STR, "description": STR, "price": AMOUNT,
                  "obscured_address": STR},
    "reset_price": {"item_id": INT, "new_price": AMOUNT},
    "buy": {"item_id": INT, "buyer_obscured_address": STR},
    "bid_order": {"order_id": INT, "v_ship": AMOUNT, "v_time": AMOUNT,
                  "promised_delivery": INT, "public_key": BYTES,
                  "scheme_id": STR},
    "choose_bid": {"order_id": INT, "bid_index": INT},
    "upload_address": {"order_id": INT, "envelope": ENVELOPE},
    "discard_order": {"order_id": INT},
    "confirm": {"order_id": INT},
    "item_loss_broken": {"order_id": INT},
    "item_unsatisfied": {"order_id": INT},
    "return_confirm": {"order_id": INT},
    "submit_review": {"order_id": INT, "rating": INT, "text": STR},
}

ADMIN_FIELDS: dict[str, dict[str, str]] = {
    "tick": {"dt": INT},
    "faucet": {"addr": STR, "amount": AMOUNT},
}

MESSAGE_FIELDS = {**EXECUTE_FIELDS, **ADMIN_FIELDS}


def canonical_json(obj) -> str:
    """Deterministic encoding used for log lines and state hashing."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def decode_amount(value, what: str = "amount") -> int:
    """Accept a decimal string (canonical) or a non-negative int."""
    if isinstance(value, bool):
        raise MalformedMessage(f"{what} must be an amount, got a bool")
    if isinstance(value, int):
        if value < 0:
            raise MalformedMessage(f"{what} must be non-negative")
        return value
    if isinstance(value, str) and value.isdigit():
        return int(value)
    raise MalformedMessage(f"{what} must be a decimal string, got {value!r}")


def encode_amount(value: int) -> str:
    return str(value)


def decode_signed(value, what: str = "value") -> int:
    """Like decode_amount but allows a leading minus (report deltas)."""
    if isinstance(value, bool):
        raise MalformedMessage(f"{what} must be an integer, got a bool")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        body = value[1:] if value.startswith("-") else value
        if body.isdigit():
            return int(value)
    raise MalformedMessage(f"{what} must be a decimal string, got {value!r}")


def _decode_field(kind: str, value, name: str):
    if kind == AMOUNT:
        return decode_amount(value, name)
    if kind == INT:
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise MalformedMessage(f"{name} must be a non-negative int, got {value!r}")
        return value
    if kind == STR:
        if not isinstance(value, str):
            raise MalformedMessage(f"{name} must be a string, got {value!r}")
        return value
    if kind == BYTES:
        if not isinstance(value, str):
            raise MalformedMessage(f"{name} must be base64 text, got {value!r}")
        return b64decode(value)
    if kind == ENVELOPE:
        return SealedEnvelope.from_wire(value)
    raise AssertionError(f"unhandled field kind {kind}")


def _encode_field(kind: str, value):
    if kind == AMOUNT:
        return encode_amount(value)
    if kind == BYTES:
        return b64encode(value)
    if kind == ENVELOPE:
        return value.to_wire()
    return value


def decode_message(wire: dict) -> dict:
    """Wire dict -> internal dict (int amounts, bytes keys, envelope objects)."""
    if not isinstance(wire, dict):
        raise MalformedMessage("message must be an object")
    mtype = wire.get("type")
    if mtype not in MESSAGE_FIELDS:
        raise MalformedMessage(f"unknown message type {mtype!r}")
    fields = MESSAGE_FIELDS[mtype]
    extra = set(wire) - set(fields) - {"type"}
    if extra:
        raise MalformedMessage(f"{mtype}: unexpected fields {sorted(extra)}")
    out = {"type": mtype}
    for name, kind in fields.items():
        if name not in wire:
            raise MalformedMessage(f"{mtype}: missing field {name}")
        out[name] = _decode_field(kind, wire[name], name)
    return out


def encode_message(msg: dict) -> dict:
    """Internal dict -> wire dict; inverse of decode_message."""
    mtype = msg["type"]
    fields = MESSAGE_FIELDS[mtype]
    out = {"type": mtype}
    for name, kind in fields.items():
        out[name] = _encode_field(kind, msg[name])
    return out


def is_execute(mtype: str) -> bool:
    return mtype in EXECUTE_FIELDS
