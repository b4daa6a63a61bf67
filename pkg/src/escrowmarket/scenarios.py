"""Deterministic scripted scenarios with exact per-actor payoff assertions.

Every built-in encodes one of the adversarial situations the protocol is
designed to price out (plus the honest baselines): a scenario is a genesis,
a parameter binding, an ordered step list, and exact expected net token
deltas per actor. run_scenario drives the in-process state machine (no
network) and reports actual deltas, gas paid, final order states, and any
escrow residue; the zero-sum identity

    sum(actor deltas) + fee sink delta + escrow residue == 0

is asserted on every run.

Expected deltas in the built-ins are written as closed-form sums of the
individual fund-transfer legs, so each number is auditable by eye:
deposits out, payouts in, gas per message sent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import sealedbox
from .contract import Market
from .errors import ExpectationFailed, MarketError, ParseError, StepRejected
from .messages import (
    canonical_json,
    decode_amount,
    decode_message,
    decode_signed,
    encode_message,
)

EXPECT_ACCEPT = "accept"
EXPECT_REJECT = "reject"


@dataclass
class Step:
    sender: str | None = None      # None for a pure clock advance
    msg: dict | None = None        # internal message form
    attached: int = 0
    advance: int = 0               # ticks applied before the message
    expect: str = EXPECT_ACCEPT

    def to_wire(self) -> dict:
        out: dict = {}
        if self.advance:
            out["advance"] = self.advance
        if self.msg is not None:
            out["sender"] = self.sender
            out["msg"] = encode_message(self.msg)
            out["attached"] = str(self.attached)
            if self.expect != EXPECT_ACCEPT:
                out["expect"] = self.expect
        return out


@dataclass
class Scenario:
    name: str
    genesis: dict[str, int]
    params: "Params"
    steps: list[Step]
    expected_deltas: dict[str, int]
    expected_orders: dict[int, str]

    def to_wire(self) -> dict:
        return {
            "name": self.name,
            "genesis": {a: str(v) for a, v in self.genesis.items()},
            "params": self.params.to_wire(),
            "steps": [s.to_wire() for s in self.steps],
            "expect": {
                "deltas": {a: str(v) for a, v in self.expected_deltas.items()},
                "orders": {str(k): v for k, v in self.expected_orders.items()},
            },
        }

    def validate(self) -> None:
        for i, step in enumerate(self.steps):
            if step.msg is not None and step.sender not in self.genesis:
                raise ParseError(f"step {i}: undeclared actor {step.sender!r}")
        missing = set(self.genesis) - set(self.expected_deltas)
        if missing:
            raise ParseError(f"expectations missing actors: {sorted(missing)}")


@dataclass
class Params:
    v_item: int = 100
    v_ship: int = 8
    v_time: int = 5
    gas: int = 1
    promised_delivery: int = 10

    def to_wire(self) -> dict:
        return {
            "v_item": str(self.v_item),
            "v_ship": str(self.v_ship),
            "v_time": str(self.v_time),
            "gas": str(self.gas),
            "promised_delivery": self.promised_delivery,
        }

    @classmethod
    def from_wire(cls, wire: dict) -> "Params":
        return cls(
            v_item=decode_amount(wire["v_item"], "v_item"),
            v_ship=decode_amount(wire["v_ship"], "v_ship"),
            v_time=decode_amount(wire["v_time"], "v_time"),
            gas=decode_amount(wire["gas"], "gas"),
            promised_delivery=int(wire["promised_delivery"]),
        )


@dataclass
class PayoffReport:
    scenario: str
    deltas: dict[str, int]
    gas_paid: dict[str, int]
    fee_sink_delta: int
    order_states: dict[int, str]
    escrow_residue: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_wire(self) -> dict:
        return {
            "scenario": self.scenario,
            "deltas": {a: str(v) for a, v in sorted(self.deltas.items())},
            "gas_paid": {a: str(v) for a, v in sorted(self.gas_paid.items())},
            "fee_sink_delta": str(self.fee_sink_delta),
            "orders": {str(k): v for k, v in sorted(self.order_states.items())},
            "escrow_residue": str(self.escrow_residue),
            "failures": list(self.failures),
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_wire())


def run_scenario(scenario: Scenario, strict: bool = False) -> PayoffReport:
    """Apply every step in order and check expectations.

    Raises StepRejected if a must-succeed step is rejected; expectation
    mismatches are itemized in the report (and raised as ExpectationFailed
    when strict=True).
    """
    scenario.validate()
    params = scenario.params
    market = Market(gas_fee=params.gas)
    for actor, balance in scenario.genesis.items():
        market.ledger.create_account(actor, balance)
    initial = dict(market.ledger.accounts)
    gas_paid: dict[str, int] = {a: 0 for a in scenario.genesis}
    failures: list[str] = []

    for i, step in enumerate(scenario.steps):
        if step.advance:
            market.advance_clock(step.advance)
        if step.msg is None:
            continue
        sink_before = market.ledger.accounts[market.ledger.fee_sink]
        try:
            market.execute(step.sender, step.attached, step.msg)
            if step.expect == EXPECT_REJECT:
                failures.append(
                    f"step {i} ({step.msg['type']}) expected rejection, was accepted")
        except MarketError as exc:
            if step.expect == EXPECT_ACCEPT:
                raise StepRejected(
                    f"{scenario.name}: step {i} ({step.msg['type']}) "
                    f"rejected with {exc.code}: {exc.detail}") from exc
        finally:
            # rejections burn gas too; measure what actually reached the sink
            gas_paid[step.sender] += (
                market.ledger.accounts[market.ledger.fee_sink] - sink_before)

    deltas = {
        actor: market.ledger.accounts[actor] - initial[actor]
        for actor in scenario.genesis
    }
    fee_sink_delta = (market.ledger.accounts[market.ledger.fee_sink]
                      - initial[market.ledger.fee_sink])
    residue = market.escrow_total()
    assert sum(deltas.values()) + fee_sink_delta + residue == 0, \
        "token conservation broken"
    assert residue == market.ledger.accounts[market.contract_address], \
        "contract balance does not match open escrow"

    order_states = {oid: o.state.value for oid, o in market.orders.items()}
    for actor, expected in scenario.expected_deltas.items():
        if deltas.get(actor) != expected:
            failures.append(
                f"{actor}: expected delta {expected}, got {deltas.get(actor)}")
    for oid, expected in scenario.expected_orders.items():
        if order_states.get(oid) != expected:
            failures.append(
                f"order {oid}: expected {expected}, got {order_states.get(oid)}")

    report = PayoffReport(
        scenario=scenario.name,
        deltas=deltas,
        gas_paid=gas_paid,
        fee_sink_delta=fee_sink_delta,
        order_states=order_states,
        escrow_residue=residue,
        failures=failures,
    )
    if strict and failures:
        raise ExpectationFailed(f"{scenario.name}: " + "; ".join(failures))
    return report


# --- scenario files ------------------------------------------------------

def scenario_from_wire(wire: dict) -> Scenario:
    try:
        params = Params.from_wire(wire["params"])
        genesis = {a: decode_amount(v, f"genesis[{a}]")
                   for a, v in wire["genesis"].items()}
        steps = []
        for i, raw in enumerate(wire["steps"]):
            if not isinstance(raw, dict):
                raise ParseError(f"step {i}: must be an object")
            advance = raw.get("advance", 0)
            if "msg" in raw:
                steps.append(Step(
                    sender=raw["sender"],
                    msg=decode_message(raw["msg"]),
                    attached=decode_amount(raw.get("attached", 0), "attached"),
                    advance=advance,
                    expect=raw.get("expect", EXPECT_ACCEPT),
                ))
            else:
                steps.append(Step(advance=advance))
        expect = wire.get("expect", {})
        scenario = Scenario(
            name=wire["name"],
            genesis=genesis,
            params=params,
            steps=steps,
            expected_deltas={a: decode_signed(v, f"delta[{a}]")
                             for a, v in expect.get("deltas", {}).items()},
            expected_orders={int(k): v
                             for k, v in expect.get("orders", {}).items()},
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad scenario field: {exc!r}") from exc
    scenario.validate()
    return scenario


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        try:
            wire = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return scenario_from_wire(wire)


# --- built-in scenarios ----------------------------------------------------

_SELLER, _BUYER, _SHIPPER, _OTHER = "seller", "buyer", "shipper_x", "shipper_y"


def _genesis(params: Params, actors: list[str], price: int | None = None) -> dict:
    price = price if price is not None else params.v_item
    stake = price + 2 * params.v_ship + params.v_time + 20 * params.gas + price
    return {actor: stake for actor in actors}


def _keypair_for(actor: str) -> sealedbox.KeyPair:
    # deterministic per-actor keys keep scenario files reproducible
    return sealedbox.generate_keypair(seed=f"scenario-key:{actor}".encode())


def _envelope_for(actor: str, recipient: sealedbox.KeyPair,
                  text: str) -> sealedbox.SealedEnvelope:
    address = sealedbox.DetailedAddress((text,))
    return sealedbox.seal(address, recipient.public_key,
                          seed=f"scenario-seal:{actor}:{text}".encode())


def _post(sender, params, price=None) -> Step:
    return Step(sender=sender, msg={
        "type": "post_item", "title": "widget", "description": "a widget",
        "price": price if price is not None else params.v_item,
        "obscured_address": "north district",
    })


def _buy(sender, params, price=None) -> Step:
    price = price if price is not None else params.v_item
    return Step(sender=sender, attached=price, msg={
        "type": "buy", "item_id": 1, "buyer_obscured_address": "east district",
    })


def _bid(sender, params, v_ship, keypair) -> Step:
    return Step(sender=sender, attached=params.v_item + params.v_time, msg={
        "type": "bid_order", "order_id": 1, "v_ship": v_ship,
        "v_time": params.v_time, "promised_delivery": params.promised_delivery,
        "public_key": keypair.public_key,
        "scheme_id": sealedbox.SEALED_ENVELOPE_V1,
    })


def _choose(sender, params, index, v_ship) -> Step:
    return Step(sender=sender, attached=2 * v_ship, msg={
        "type": "choose_bid", "order_id": 1, "bid_index": index,
    })


def _upload(sender, recipient_keypair) -> Step:
    return Step(sender=sender, msg={
        "type": "upload_address", "order_id": 1,
        "envelope": _envelope_for(sender, recipient_keypair,
                                  f"{sender} exact address"),
    })


def _confirm(sender, advance=0) -> Step:
    return Step(sender=sender, advance=advance,
                msg={"type": "confirm", "order_id": 1})


def _simple(sender, mtype, advance=0, **extra) -> Step:
    return Step(sender=sender, advance=advance,
                msg={"type": mtype, "order_id": 1, **extra})


def _full_delivery_steps(params: Params, seller: str, buyer: str, shipper: str,
                         key: sealedbox.KeyPair, transit_ticks: int,
                         with_other: str | None = None) -> list[Step]:
    """post .. buy .. bid(s) .. choose .. uploads .. ship .. deliver."""
    steps = [_post(seller, params), _buy(buyer, params)]
    if with_other is not None:
        steps.append(_bid(with_other, params, params.v_ship + 2, _keypair_for(with_other)))
        steps.append(_bid(shipper, params, params.v_ship, key))
        steps.append(_choose(buyer, params, 1, params.v_ship))
    else:
        steps.append(_bid(shipper, params, params.v_ship, key))
        steps.append(_choose(buyer, params, 0, params.v_ship))
    steps += [
        _upload(buyer, key),
        _upload(seller, key),
        _confirm(seller),
        _confirm(shipper),
        _confirm(shipper, advance=transit_ticks),
    ]
    return steps


def honest_happy_path(params: Params) -> Scenario:
    """Two bids, buyer picks the cheaper, delivery on time, review left."""
    g = params.gas
    key = _keypair_for(_SHIPPER)
    steps = _full_delivery_steps(params, _SELLER, _BUYER, _SHIPPER, key,
                                 transit_ticks=max(params.promised_delivery - 1, 1),
                                 with_other=_OTHER)
    steps += [
        _confirm(_BUYER),
        _simple(_BUYER, "submit_review", rating=5, text="smooth trade"),
    ]
    return Scenario(
        name="honest_happy_path",
        genesis=_genesis(params, [_SELLER, _BUYER, _SHIPPER, _OTHER]),
        params=params,
        steps=steps,
        expected_deltas={
            # item paid, choose deposit partially recovered as the v_ship leg
            _BUYER: -params.v_item - 2 * params.v_ship + params.v_ship - 5 * g,
            _SHIPPER: params.v_ship - 3 * g,       # fee earned, deposit back
            _OTHER: -g,                            # losing bid fully refunded
            _SELLER: params.v_item - 3 * g,
        },
        expected_orders={1: "Completed"},
    )


def late_delivery(params: Params) -> Scenario:
    """Same trade, but delivery exceeds the promise: v_time flips to the buyer."""
    g = params.gas
    key = _keypair_for(_SHIPPER)
    steps = _full_delivery_steps(params, _SELLER, _BUYER, _SHIPPER, key,
                                 transit_ticks=params.promised_delivery + 2,
                                 with_other=_OTHER)
    steps += [
        _confirm(_BUYER),
        _simple(_BUYER, "submit_review", rating=2, text="late"),
    ]
    return Scenario(
        name="late_delivery",
        genesis=_genesis(params, [_SELLER, _BUYER, _SHIPPER, _OTHER]),
        params=params,
        steps=steps,
        expected_deltas={
            _BUYER: -params.v_item - params.v_ship + params.v_time - 5 * g,
            _SHIPPER: params.v_ship - params.v_time - 3 * g,
            _OTHER: -g,
            _SELLER: params.v_item - 3 * g,
        },
        expected_orders={1: "Completed"},
    )


def shipper_discard(params: Params) -> Scenario:
    """Seller posts junk; the shipper checks at pickup and walks away.

    Everyone gets their principal back; the would-be scammer paid gas for
    nothing and the item is relisted.
    """
    g = params.gas
    key = _keypair_for(_SHIPPER)
    steps = [
        _post(_SELLER, params),
        _buy(_BUYER, params),
        _bid(_SHIPPER, params, params.v_ship, key),
        _choose(_BUYER, params, 0, params.v_ship),
        _upload(_BUYER, key),
        _upload(_SELLER, key),
        _simple(_SHIPPER, "discard_order"),
    ]
    return Scenario(
        name="shipper_discard",
        genesis=_genesis(params, [_SELLER, _BUYER, _SHIPPER]),
        params=params,
        steps=steps,
        expected_deltas={
            _BUYER: -3 * g,     # v_item and 2*v_ship both come back
            _SHIPPER: -2 * g,   # deposit comes back
            _SELLER: -2 * g,
        },
        expected_orders={1: "Discarded"},
    )


def _return_flow(params: Params, name: str, seller: str, buyer: str,
                 shipper: str) -> Scenario:
    g = params.gas
    key = _keypair_for(shipper)
    steps = _full_delivery_steps(params, seller, buyer, shipper, key,
                                 transit_ticks=1)
    steps += [
        _simple(buyer, "item_unsatisfied"),
        _simple(seller, "return_confirm"),
    ]
    return Scenario(
        name=name,
        genesis=_genesis(params, [seller, buyer, shipper]),
        params=params,
        steps=steps,
        expected_deltas={
            # the return fee 2*v_ship stays with the shipper, never the buyer
            buyer: -2 * params.v_ship - 4 * g,
            shipper: 2 * params.v_ship - 3 * g,
            seller: -4 * g,
        },
        expected_orders={1: "Returned"},
    )


def buyer_forced_return(params: Params) -> Scenario:
    """A buyer returning out of spite still forfeits 2*v_ship plus gas."""
    return _return_flow(params, "buyer_forced_return", _SELLER, _BUYER, _SHIPPER)


def seller_shipper_collusion_return(params: Params) -> Scenario:
    """Seller ships junk, colluding shipper skips verification, buyer must
    return: the colluders pocket exactly the buyer's 2*v_ship minus gas.
    The token trace is the forced-return trace; the defense is the buyer's
    freedom to never pick that shipper again (and the public stats)."""
    return _return_flow(params, "seller_shipper_collusion_return",
                        "mal_seller", "victim_buyer", "mal_shipper")


def loss_broken_in_transit(params: Params) -> Scenario:
    """Item breaks in transit: shipper's deposit covers both other parties."""
    g = params.gas
    key = _keypair_for(_SHIPPER)
    steps = [
        _post(_SELLER, params),
        _buy(_BUYER, params),
        _bid(_SHIPPER, params, params.v_ship, key),
        _choose(_BUYER, params, 0, params.v_ship),
        _upload(_BUYER, key),
        _upload(_SELLER, key),
        _confirm(_SELLER),
        _confirm(_SHIPPER),
        _simple(_SHIPPER, "item_loss_broken", advance=1),
    ]
    return Scenario(
        name="loss_broken_in_transit",
        genesis=_genesis(params, [_SELLER, _BUYER, _SHIPPER]),
        params=params,
        steps=steps,
        expected_deltas={
            _BUYER: -3 * g,
            _SHIPPER: -params.v_item - 3 * g,   # deposit minus the v_time refund
            _SELLER: params.v_item - 3 * g,
        },
        expected_orders={1: "LossBroken"},
    )


def buyer_seller_phishing(params: Params) -> Scenario:
    """Colluders post a ridiculous item hoping a shipper bids; none does.

    The honest shipper simply declines, so the order is stuck in Created and
    the colluders are out their gas plus the buy deposit locked in escrow
    (there is no cancellation message).
    """
    g = params.gas
    price = 10 * params.v_item
    return Scenario(
        name="buyer_seller_phishing",
        genesis=_genesis(params, ["mal_seller", "mal_buyer", "honest_shipper"],
                         price=price),
        params=params,
        steps=[
            _post("mal_seller", params, price=price),
            _buy("mal_buyer", params, price=price),
        ],
        expected_deltas={
            "mal_seller": -g,
            "mal_buyer": -price - g,
            "honest_shipper": 0,
        },
        expected_orders={1: "Created"},
    )


def brushing_cost(params: Params) -> Scenario:
    """A fake-order ring boosting its own ratings pays full gas for every
    message: the ring's aggregate delta is exactly minus the total gas."""
    g = params.gas
    ring = ["ring_seller", "ring_buyer", "ring_shipper"]
    key = _keypair_for("ring_shipper")
    steps = _full_delivery_steps(params, *ring, key, transit_ticks=1)
    steps += [
        _confirm("ring_buyer"),
        _simple("ring_buyer", "submit_review", rating=5, text="great!"),
    ]
    return Scenario(
        name="brushing_cost",
        genesis=_genesis(params, ring),
        params=params,
        steps=steps,
        expected_deltas={
            "ring_buyer": -params.v_item - params.v_ship - 5 * g,
            "ring_shipper": params.v_ship - 3 * g,
            "ring_seller": params.v_item - 3 * g,
        },
        expected_orders={1: "Completed"},
    )


BUILTINS = {
    "honest_happy_path": honest_happy_path,
    "late_delivery": late_delivery,
    "shipper_discard": shipper_discard,
    "buyer_forced_return": buyer_forced_return,
    "loss_broken_in_transit": loss_broken_in_transit,
    "seller_shipper_collusion_return": seller_shipper_collusion_return,
    "buyer_seller_phishing": buyer_seller_phishing,
    "brushing_cost": brushing_cost,
}


def list_builtin() -> list[str]:
    return list(BUILTINS)


def builtin_scenario(name: str, params: Params | None = None) -> Scenario:
    if name not in BUILTINS:
        raise ParseError(f"no built-in scenario {name!r}; "
                         f"known: {', '.join(BUILTINS)}")
    return BUILTINS[name](params or Params())
