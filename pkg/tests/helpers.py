"""Shared test plumbing: an engine-independent payoff oracle, a brute-force
stats counter, and lifecycle drivers for setting up orders in known states.

The oracle deliberately re-derives every number from the per-message fund
legs (deposits, refunds, settlement splits, gas) without touching the
Market engine, so engine bugs cannot leak into expected values.
"""

from __future__ import annotations

from escrowmarket.contract import Market
from escrowmarket.sealedbox import SEALED_ENVELOPE_V1, SealedEnvelope

# canonical parameter set used by the worked examples: item 100, bids 10 and
# 8 (the 8 one gets chosen), time guarantee 5, gas 1, promised 10 ticks
P0 = {
    "v_item": 100,
    "v_ship_hi": 10,
    "v_ship": 8,
    "v_time": 5,
    "gas": 1,
    "promised": 10,
}

ACTORS = ("seller", "buyer", "shipper_x", "shipper_y", "outsider")


def fake_envelope(tag: bytes = b"opaque") -> SealedEnvelope:
    """The contract stores envelopes opaquely; tests that don't exercise
    crypto can use stand-ins."""
    return SealedEnvelope(SEALED_ENVELOPE_V1, tag + b"\x00" * 40, b"f" * 16)


def fake_key(tag: bytes = b"k") -> bytes:
    return tag * 4


# --- independent payoff oracle ---------------------------------------------


def oracle_payoffs(scenario) -> dict[str, int]:
    """Expected per-actor net deltas from summing fund legs per message."""
    params = scenario.params
    deltas: dict[str, int] = {a: 0 for a in scenario.genesis}
    items: dict[int, dict] = {}
    orders: dict[int, dict] = {}
    next_item = 1
    next_order = 1
    clock = 0

    for step in scenario.steps:
        clock += step.advance
        if step.msg is None:
            continue
        msg, sender = step.msg, step.sender
        deltas[sender] -= params.gas
        if step.expect == "reject":
            continue  # a rejection costs gas only
        mtype = msg["type"]
        if mtype == "post_item":
            items[next_item] = {"seller": sender, "price": msg["price"]}
            next_item += 1
        elif mtype == "buy":
            item = items[msg["item_id"]]
            deltas[sender] -= item["price"]
            orders[next_order] = {
                "item": msg["item_id"], "buyer": sender, "bids": [],
                "chosen": None, "uploads": 0, "seller_shipped": False,
                "shipper_shipped": False, "shipped": None, "delivered": None,
            }
            next_order += 1
        elif mtype == "bid_order":
            order = orders[msg["order_id"]]
            price = items[order["item"]]["price"]
            deltas[sender] -= price + msg["v_time"]
            order["bids"].append({
                "shipper": sender, "v_ship": msg["v_ship"],
                "v_time": msg["v_time"],
                "promised": msg["promised_delivery"],
            })
        elif mtype == "choose_bid":
            order = orders[msg["order_id"]]
            price = items[order["item"]]["price"]
            chosen = order["bids"][msg["bid_index"]]
            deltas[sender] -= 2 * chosen["v_ship"]
            for i, bid in enumerate(order["bids"]):
                if i != msg["bid_index"]:
                    deltas[bid["shipper"]] += price + bid["v_time"]
            order["chosen"] = chosen
        elif mtype == "upload_address":
            orders[msg["order_id"]]["uploads"] += 1
        elif mtype == "confirm":
            order = orders[msg["order_id"]]
            item = items[order["item"]]
            chosen = order["chosen"]
            if order["delivered"] is not None:
                # buyer settlement
                on_time = (order["delivered"] - order["shipped"]
                           <= chosen["promised"])
                deltas[order["buyer"]] += chosen["v_ship"]
                deltas[chosen["shipper"]] += chosen["v_ship"] + item["price"]
                deltas[item["seller"]] += item["price"]
                if on_time:
                    deltas[chosen["shipper"]] += chosen["v_time"]
                else:
                    deltas[order["buyer"]] += chosen["v_time"]
            elif order["shipped"] is not None:
                order["delivered"] = clock
            else:
                if sender == item["seller"]:
                    order["seller_shipped"] = True
                else:
                    order["shipper_shipped"] = True
                if order["seller_shipped"] and order["shipper_shipped"]:
                    order["shipped"] = clock
        elif mtype == "discard_order":
            order = orders[msg["order_id"]]
            item = items[order["item"]]
            chosen = order["chosen"]
            deltas[order["buyer"]] += item["price"] + 2 * chosen["v_ship"]
            deltas[chosen["shipper"]] += item["price"] + chosen["v_time"]
        elif mtype == "item_loss_broken":
            order = orders[msg["order_id"]]
            item = items[order["item"]]
            chosen = order["chosen"]
            deltas[order["buyer"]] += item["price"] + 2 * chosen["v_ship"]
            deltas[chosen["shipper"]] += chosen["v_time"]
            deltas[item["seller"]] += item["price"]
        elif mtype == "return_confirm":
            order = orders[msg["order_id"]]
            item = items[order["item"]]
            chosen = order["chosen"]
            deltas[order["buyer"]] += item["price"]
            deltas[chosen["shipper"]] += (2 * chosen["v_ship"] + item["price"]
                                          + chosen["v_time"])
        elif mtype in ("item_unsatisfied", "reset_price", "submit_review"):
            pass
        else:
            raise AssertionError(f"oracle does not know {mtype}")
    return deltas


# --- brute-force stats ------------------------------------------------------


def brute_force_stats(market: Market, addr: str) -> dict:
    """Recount reputation statistics from the public query surface only."""
    goods = {item["item_id"]: item for item in market.get_goods()}
    perfect = completed = total_chosen = 0
    satisfied = total_sold = 0
    for summary in market.get_orders():
        detail = market.get_order_detail(summary["order_id"])
        state = detail["state"]
        chosen = detail["chosen"]
        if chosen is not None and detail["bids"][chosen]["shipper"] == addr:
            total_chosen += 1
            if state == "Completed":
                completed += 1
                lag = detail["delivered_tick"] - detail["shipped_tick"]
                if lag <= detail["bids"][chosen]["promised_delivery"]:
                    perfect += 1
        if goods[detail["item_id"]]["seller"] == addr and state in (
                "Completed", "Returned", "LossBroken", "Discarded"):
            total_sold += 1
            if state == "Completed":
                satisfied += 1
    return {
        "address": addr,
        "as_shipper": {
            "completed": completed,
            "total_chosen": total_chosen,
            "perfect_ratio": [perfect, total_chosen],
        },
        "as_seller": {
            "satisfied": satisfied,
            "total_sold": total_sold,
            "satisfied_ratio": [satisfied, total_sold],
        },
    }


# --- lifecycle drivers ------------------------------------------------------


def funded_market(balance: int = 1000, gas_fee: int = 1,
                  actors=ACTORS) -> Market:
    market = Market(gas_fee=gas_fee)
    for actor in actors:
        market.ledger.create_account(actor, balance)
    return market


def post(market, seller="seller", price=P0["v_item"], obscured="north"):
    receipt = market.execute(seller, 0, {
        "type": "post_item", "title": "widget", "description": "a widget",
        "price": price, "obscured_address": obscured})
    return int(receipt.attr("item_id"))


def buy(market, buyer="buyer", item_id=1, price=P0["v_item"], obscured="east"):
    receipt = market.execute(buyer, price, {
        "type": "buy", "item_id": item_id, "buyer_obscured_address": obscured})
    return int(receipt.attr("order_id"))


def bid(market, shipper, order_id=1, v_ship=P0["v_ship"], v_time=P0["v_time"],
        promised=P0["promised"], price=P0["v_item"]):
    receipt = market.execute(shipper, price + v_time, {
        "type": "bid_order", "order_id": order_id, "v_ship": v_ship,
        "v_time": v_time, "promised_delivery": promised,
        "public_key": fake_key(shipper.encode()),
        "scheme_id": SEALED_ENVELOPE_V1})
    return int(receipt.attr("bid_index"))


def choose(market, buyer="buyer", order_id=1, index=0, v_ship=P0["v_ship"]):
    market.execute(buyer, 2 * v_ship, {
        "type": "choose_bid", "order_id": order_id, "bid_index": index})


def upload(market, sender, order_id=1):
    market.execute(sender, 0, {
        "type": "upload_address", "order_id": order_id,
        "envelope": fake_envelope(sender.encode())})


def confirm(market, sender, order_id=1):
    market.execute(sender, 0, {"type": "confirm", "order_id": order_id})


def two_bid_order(market, chosen="shipper_x") -> int:
    """P0 worked example: bids of 10 then 8, buyer picks the 8 one."""
    post(market)
    order_id = buy(market)
    bid(market, "shipper_y", order_id, v_ship=P0["v_ship_hi"])
    bid(market, "shipper_x", order_id, v_ship=P0["v_ship"])
    choose(market, index=1)
    assert chosen == "shipper_x"
    return order_id


def to_addresses_ready(market) -> int:
    order_id = two_bid_order(market)
    upload(market, "buyer", order_id)
    upload(market, "seller", order_id)
    return order_id


def to_in_transit(market) -> int:
    order_id = to_addresses_ready(market)
    confirm(market, "seller", order_id)
    confirm(market, "shipper_x", order_id)
    return order_id


def to_delivered(market, transit_ticks=3) -> int:
    order_id = to_in_transit(market)
    market.advance_clock(transit_ticks)
    confirm(market, "shipper_x", order_id)
    return order_id


def to_completed(market, transit_ticks=3) -> int:
    order_id = to_delivered(market, transit_ticks)
    confirm(market, "buyer", order_id)
    return order_id


def to_returning(market) -> int:
    order_id = to_delivered(market)
    market.execute("buyer", 0, {"type": "item_unsatisfied", "order_id": order_id})
    return order_id


def to_returned(market) -> int:
    order_id = to_returning(market)
    market.execute("seller", 0, {"type": "return_confirm", "order_id": order_id})
    return order_id


def assert_conservation(market: Market):
    """The global invariants every test can lean on."""
    assert market.ledger.total_balance() == market.ledger.total_minted
    assert (market.ledger.accounts[market.contract_address]
            == market.escrow_total())
    open_by_item: dict[int, int] = {}
    for order in market.orders.values():
        if order.is_terminal():
            assert order.escrow == 0, f"terminal order {order.order_id} holds escrow"
        else:
            open_by_item[order.item_id] = open_by_item.get(order.item_id, 0) + 1
    for item in market.listings.values():
        locked = item.status.value == "Locked"
        assert locked == (open_by_item.get(item.item_id, 0) == 1)
        assert open_by_item.get(item.item_id, 0) <= 1
