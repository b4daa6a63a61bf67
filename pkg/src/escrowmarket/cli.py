"""Role-oriented command line client plus node and scenario entry points.

Every role command is one wire message; sealing and opening of detailed
addresses happens strictly on this side of the wire, with keys from the
local keystore. Deposits are explicit flags on purpose, so a wrong-deposit
rejection can be exercised deliberately.
"""

from __future__ import annotations

import json
import os
import sys

import click
import httpx

from . import sealedbox
from .config import load_config
from .errors import MarketError
from .keystore import Keystore
from .messages import canonical_json
from .node import Node
from .report import render_text, write_report_files
from .scenarios import Params, builtin_scenario, list_builtin, load_scenario, run_scenario

DEFAULT_NODE_URL = "http://127.0.0.1:8990"
DEFAULT_KEYSTORE = os.path.join("~", ".emarket", "keys.json")


class CliError(click.ClickException):
    pass


class NodeClient:
    """Thin wrapper so every command is exactly one HTTP round trip."""

    def __init__(self, base_url: str, transport=None):
        self._client = httpx.Client(base_url=base_url, timeout=10.0,
                                    transport=transport)

    def execute(self, sender: str, msg: dict, funds: int = 0) -> dict:
        resp = self._client.post("/v1/execute", json={
            "sender": sender, "msg": msg, "funds": str(funds)})
        return self._outcome(resp)

    def query(self, path: str) -> dict:
        resp = self._client.get(f"/v1/query/{path}")
        return self._outcome(resp)

    def state_hash(self) -> dict:
        return self._outcome(self._client.get("/v1/state_hash"))

    def admin(self, path: str, body: dict) -> dict:
        return self._outcome(self._client.post(f"/v1/admin/{path}", json=body))

    @staticmethod
    def _outcome(resp: httpx.Response) -> dict:
        try:
            body = resp.json()
        except ValueError:
            raise CliError(f"node returned non-JSON ({resp.status_code})")
        if resp.status_code >= 400:
            code = body.get("code", f"HTTP{resp.status_code}")
            raise CliError(f"{code}: {body.get('detail', '')}")
        return body


def _emit(ctx, payload: dict, text: str | None = None) -> None:
    if ctx.obj["output"] == "json":
        click.echo(canonical_json(payload))
    else:
        click.echo(text if text is not None else canonical_json(payload))


def _client(ctx) -> NodeClient:
    if ctx.obj.get("client") is None:
        ctx.obj["client"] = NodeClient(ctx.obj["node_url"])
    return ctx.obj["client"]


def _keystore(ctx) -> Keystore:
    return Keystore(os.path.expanduser(ctx.obj["keystore"]))


def _result_id(outcome: dict, attr: str) -> str | None:
    for event in outcome.get("receipt", {}).get("events", []):
        if attr in event.get("attributes", {}):
            return event["attributes"][attr]
    return None


sender_option = click.option("--as", "sender", required=True,
                             envvar="EMARKET_SENDER",
                             help="Ledger address sending the message.")


@click.group()
@click.option("--node-url", default=DEFAULT_NODE_URL, envvar="EMARKET_NODE_URL",
              show_default=True, help="Base URL of the node.")
@click.option("--keystore", default=DEFAULT_KEYSTORE, envvar="EMARKET_KEYSTORE",
              show_default=True, help="Path of the local keypair file.")
@click.option("--output", type=click.Choice(["text", "json"]), default="text",
              help="Structured output uses the canonical wire encoding.")
@click.pass_context
def main(ctx, node_url, keystore, output):
    """Client, node, and scenario tooling for the escrow marketplace."""
    ctx.ensure_object(dict)
    ctx.obj.setdefault("node_url", node_url)
    ctx.obj.setdefault("keystore", keystore)
    ctx.obj.setdefault("output", output)
    ctx.obj.setdefault("client", ctx.obj.get("client"))


# --------------------------------------------------------------- seller ---

@main.group()
def seller():
    """Post items, confirm pickup, accept returns."""


@seller.command("post")
@sender_option
@click.option("--title", required=True)
@click.option("--desc", "description", default="")
@click.option("--price", required=True, type=int)
@click.option("--obscured", required=True, help="Coarse public location.")
@click.pass_context
def seller_post(ctx, sender, title, description, price, obscured):
    outcome = _client(ctx).execute(sender, {
        "type": "post_item", "title": title, "description": description,
        "price": str(price), "obscured_address": obscured})
    _emit(ctx, outcome, f"posted item {_result_id(outcome, 'item_id')}")


@seller.command("reset-price")
@sender_option
@click.option("--item", "item_id", required=True, type=int)
@click.option("--price", required=True, type=int)
@click.pass_context
def seller_reset_price(ctx, sender, item_id, price):
    outcome = _client(ctx).execute(sender, {
        "type": "reset_price", "item_id": item_id, "new_price": str(price)})
    _emit(ctx, outcome, f"item {item_id} price set to {price}")


def _upload_address_cmd(ctx, sender, order_id, recipient_key, scheme, lines,
                        envelope_json, seal_seed):
    if envelope_json:
        try:
            envelope = json.loads(envelope_json)
        except json.JSONDecodeError as exc:
            raise CliError(f"--envelope is not valid JSON: {exc}")
    else:
        if not recipient_key or not lines:
            raise CliError("need --recipient-key and --line (or --envelope)")
        address = sealedbox.DetailedAddress(tuple(lines))
        seed = bytes.fromhex(seal_seed) if seal_seed else None
        sealed = sealedbox.seal(address, sealedbox.b64decode(recipient_key),
                                scheme=scheme, seed=seed)
        envelope = sealed.to_wire()
    outcome = _client(ctx).execute(sender, {
        "type": "upload_address", "order_id": order_id, "envelope": envelope})
    _emit(ctx, outcome, f"sealed address uploaded for order {order_id}")


def _upload_options(fn):
    fn = click.option("--order", "order_id", required=True, type=int)(fn)
    fn = click.option("--recipient-key", default=None,
                      help="Chosen shipper's public key (base64), shown by "
                           "`buyer bids`.")(fn)
    fn = click.option("--scheme", default=sealedbox.SEALED_ENVELOPE_V1,
                      show_default=True)(fn)
    fn = click.option("--line", "lines", multiple=True,
                      help="Detailed address line (repeatable).")(fn)
    fn = click.option("--envelope", "envelope_json", default=None,
                      help="Pre-sealed envelope JSON (exact replay).")(fn)
    fn = click.option("--seal-seed", default=None,
                      help="Hex seed for a reproducible seal.")(fn)
    return fn


@seller.command("upload-address")
@sender_option
@_upload_options
@click.pass_context
def seller_upload_address(ctx, sender, order_id, recipient_key, scheme, lines,
                          envelope_json, seal_seed):
    _upload_address_cmd(ctx, sender, order_id, recipient_key, scheme, lines,
                        envelope_json, seal_seed)


@seller.command("confirm-shipped")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def seller_confirm_shipped(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {"type": "confirm", "order_id": order_id})
    _emit(ctx, outcome, f"seller confirmed shipping for order {order_id}")


@seller.command("return-confirm")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def seller_return_confirm(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {
        "type": "return_confirm", "order_id": order_id})
    _emit(ctx, outcome, f"return of order {order_id} confirmed")


# ---------------------------------------------------------------- buyer ---

@main.group()
def buyer():
    """Browse, buy, pick bids, confirm receipt, return, review."""


@buyer.command("browse")
@click.pass_context
def buyer_browse(ctx):
    body = _client(ctx).query("goods")
    lines = []
    for item in body["goods"]:
        lines.append(f"[{item['item_id']}] {item['title']}  "
                     f"price {item['price']}  {item['status']}  "
                     f"near {item['seller_obscured_address']}")
    _emit(ctx, body, "\n".join(lines) if lines else "(no items)")


@buyer.command("buy")
@sender_option
@click.option("--item", "item_id", required=True, type=int)
@click.option("--deposit", required=True, type=int,
              help="Must equal the item price exactly.")
@click.option("--obscured", required=True)
@click.pass_context
def buyer_buy(ctx, sender, item_id, deposit, obscured):
    outcome = _client(ctx).execute(sender, {
        "type": "buy", "item_id": item_id, "buyer_obscured_address": obscured,
    }, funds=deposit)
    _emit(ctx, outcome, f"order {_result_id(outcome, 'order_id')} created")


@buyer.command("bids")
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def buyer_bids(ctx, order_id):
    body = _client(ctx).query(f"order/{order_id}")
    order = body["order"]
    lines = []
    for i, bid in enumerate(order["bids"]):
        marker = " (chosen)" if order.get("chosen") == i else ""
        lines.append(
            f"bid {i}: shipper {bid['shipper']}  fee {bid['v_ship']}  "
            f"guarantee {bid['v_time']}  promise {bid['promised_delivery']} "
            f"ticks  choose-deposit {2 * int(bid['v_ship'])}{marker}\n"
            f"       key {bid['public_key']}  scheme {bid['scheme_id']}")
    _emit(ctx, body, "\n".join(lines) if lines else "(no bids)")


@buyer.command("choose")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.option("--bid", "bid_index", required=True, type=int)
@click.option("--deposit", required=True, type=int,
              help="Must equal twice the chosen bid's shipping fee.")
@click.pass_context
def buyer_choose(ctx, sender, order_id, bid_index, deposit):
    outcome = _client(ctx).execute(sender, {
        "type": "choose_bid", "order_id": order_id, "bid_index": bid_index,
    }, funds=deposit)
    _emit(ctx, outcome, f"bid {bid_index} chosen for order {order_id}")


@buyer.command("upload-address")
@sender_option
@_upload_options
@click.pass_context
def buyer_upload_address(ctx, sender, order_id, recipient_key, scheme, lines,
                         envelope_json, seal_seed):
    _upload_address_cmd(ctx, sender, order_id, recipient_key, scheme, lines,
                        envelope_json, seal_seed)


@buyer.command("confirm-received")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def buyer_confirm_received(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {"type": "confirm", "order_id": order_id})
    _emit(ctx, outcome, f"order {order_id} settled")


@buyer.command("return")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def buyer_return(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {
        "type": "item_unsatisfied", "order_id": order_id})
    _emit(ctx, outcome, f"return requested for order {order_id}")


@buyer.command("review")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.option("--rating", required=True, type=int)
@click.option("--text", default="")
@click.pass_context
def buyer_review(ctx, sender, order_id, rating, text):
    outcome = _client(ctx).execute(sender, {
        "type": "submit_review", "order_id": order_id, "rating": rating,
        "text": text})
    _emit(ctx, outcome, f"review stored for order {order_id}")


# --------------------------------------------------------------- shipper ---

@main.group()
def shipper():
    """Bid on orders, decrypt addresses locally, run deliveries."""


@shipper.command("orders")
@click.option("--all", "show_all", is_flag=True,
              help="Include orders past the bidding phase.")
@click.pass_context
def shipper_orders(ctx, show_all):
    body = _client(ctx).query("orders")
    lines = []
    for order in body["orders"]:
        if not show_all and order["state"] != "Created":
            continue
        lines.append(
            f"order {order['order_id']} item {order['item_id']} "
            f"[{order['state']}]  {order['seller_obscured_address']} -> "
            f"{order['buyer_obscured_address']}  bids {order['bid_count']}")
    _emit(ctx, body, "\n".join(lines) if lines else "(no open orders)")


@shipper.command("keygen")
@click.option("--key", "label", required=True, help="Keystore label.")
@click.option("--scheme", default=sealedbox.SEALED_ENVELOPE_V1, show_default=True)
@click.option("--seed", default=None, help="Hex seed for reproducible keys.")
@click.pass_context
def shipper_keygen(ctx, label, scheme, seed):
    store = _keystore(ctx)
    keypair = store.generate(label, scheme,
                             bytes.fromhex(seed) if seed else None)
    payload = {"label": label, "scheme": scheme,
               "public_key": sealedbox.b64encode(keypair.public_key)}
    _emit(ctx, payload,
          f"key '{label}' ready; public key {payload['public_key']}")


@shipper.command("bid")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.option("--ship", "v_ship", required=True, type=int, help="Shipping fee.")
@click.option("--time-guarantee", "v_time", required=True, type=int,
              help="Timeliness deposit component.")
@click.option("--promise", "promised", required=True, type=int,
              help="Promised delivery duration in ticks.")
@click.option("--key", "label", required=True, help="Keystore label to post.")
@click.option("--deposit", required=True, type=int,
              help="Must equal item price + time guarantee.")
@click.pass_context
def shipper_bid(ctx, sender, order_id, v_ship, v_time, promised, label, deposit):
    keypair = _keystore(ctx).get(label)
    outcome = _client(ctx).execute(sender, {
        "type": "bid_order", "order_id": order_id, "v_ship": str(v_ship),
        "v_time": str(v_time), "promised_delivery": promised,
        "public_key": sealedbox.b64encode(keypair.public_key),
        "scheme_id": keypair.scheme,
    }, funds=deposit)
    _emit(ctx, outcome,
          f"bid {_result_id(outcome, 'bid_index')} placed on order {order_id}")


@shipper.command("addresses")
@click.option("--order", "order_id", required=True, type=int)
@click.option("--key", "label", required=True)
@click.pass_context
def shipper_addresses(ctx, order_id, label):
    """Fetch both sealed envelopes and decrypt them locally."""
    keypair = _keystore(ctx).get(label)
    body = _client(ctx).query(f"addresses/{order_id}")
    addresses = body["addresses"]
    decrypted: dict = {}
    lines = []
    for side in ("buyer", "seller"):
        wire = addresses.get(f"{side}_envelope")
        if wire is None:
            decrypted[side] = None
            lines.append(f"{side}: (not uploaded yet)")
            continue
        envelope = sealedbox.SealedEnvelope.from_wire(wire)
        try:
            plain = sealedbox.open_envelope(envelope, keypair)
        except MarketError as exc:
            raise CliError(f"{exc.code}: {exc.detail}")
        decrypted[side] = list(plain.lines)
        lines.append(f"{side}: " + " / ".join(plain.lines))
    _emit(ctx, {"order_id": order_id, "decrypted": decrypted}, "\n".join(lines))


@shipper.command("discard")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def shipper_discard(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {
        "type": "discard_order", "order_id": order_id})
    _emit(ctx, outcome, f"order {order_id} discarded")


@shipper.command("confirm-shipped")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def shipper_confirm_shipped(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {"type": "confirm", "order_id": order_id})
    _emit(ctx, outcome, f"shipper confirmed shipping for order {order_id}")


@shipper.command("confirm-delivered")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def shipper_confirm_delivered(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {"type": "confirm", "order_id": order_id})
    _emit(ctx, outcome, f"delivery confirmed for order {order_id}")


@shipper.command("loss-broken")
@sender_option
@click.option("--order", "order_id", required=True, type=int)
@click.pass_context
def shipper_loss_broken(ctx, sender, order_id):
    outcome = _client(ctx).execute(sender, {
        "type": "item_loss_broken", "order_id": order_id})
    _emit(ctx, outcome, f"loss declared for order {order_id}")


# ---------------------------------------------------------------- common ---

@main.command("balance")
@click.option("--addr", required=True)
@click.pass_context
def balance(ctx, addr):
    body = _client(ctx).query(f"balance/{addr}")
    _emit(ctx, body, f"{addr}: {body['balance']}")


@main.command("stats")
@click.option("--addr", required=True)
@click.pass_context
def stats(ctx, addr):
    body = _client(ctx).query(f"stats/{addr}")
    ship, sold = body["as_shipper"], body["as_seller"]
    _emit(ctx, body,
          f"{addr} as shipper: {ship['completed']} completed of "
          f"{ship['total_chosen']} chosen, perfect "
          f"{ship['perfect_ratio'][0]}/{ship['perfect_ratio'][1]}\n"
          f"{addr} as seller: {sold['satisfied']} satisfied of "
          f"{sold['total_sold']} sold")


@main.command("tick")
@click.option("--dt", required=True, type=int)
@click.pass_context
def tick(ctx, dt):
    outcome = _client(ctx).admin("tick", {"dt": dt})
    _emit(ctx, outcome, f"clock advanced by {dt}")


@main.command("faucet")
@click.option("--addr", required=True)
@click.option("--amount", required=True, type=int)
@click.pass_context
def faucet(ctx, addr, amount):
    outcome = _client(ctx).admin("faucet", {"addr": addr, "amount": str(amount)})
    _emit(ctx, outcome, f"{addr} credited {amount}")


# ------------------------------------------------------------------ node ---

@main.group()
def node():
    """Run or inspect a node."""


@node.command("serve")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--listen", default=None, help="host:port")
@click.option("--log-path", default=None, type=click.Path())
@click.option("--gas", "gas_fee", default=None, type=int)
@click.option("--mode", default=None, type=click.Choice(["sandbox", "assertion"]))
def node_serve(config_path, listen, log_path, gas_fee, mode):
    """Start the HTTP node (blocks until interrupted)."""
    import uvicorn

    from .http_api import create_app

    overrides: dict = {"log_path": log_path, "gas_fee": gas_fee, "mode": mode}
    if listen:
        host, _, port = listen.partition(":")
        overrides["host"] = host or None
        overrides["port"] = int(port) if port else None
    try:
        cfg = load_config(config_path, **overrides)
        node_ = Node(cfg)
    except MarketError as exc:
        raise CliError(f"{exc.code}: {exc.detail}")
    click.echo(f"listening on http://{cfg.host}:{cfg.port}  "
               f"log={cfg.log_path} gas={cfg.gas_fee} mode={cfg.mode}",
               err=True)
    uvicorn.run(create_app(node_), host=cfg.host, port=cfg.port,
                log_level="warning")


@node.command("hash")
@click.option("--log-path", required=True, type=click.Path())
@click.pass_context
def node_hash(ctx, log_path):
    """Replay a log from genesis and print the resulting state hash."""
    try:
        replayed = Node.replay(log_path)
    except MarketError as exc:
        raise CliError(f"{exc.code}: {exc.detail}")
    digest = replayed.state_hash()
    replayed.close()
    _emit(ctx, {"state_hash": digest}, digest)


# -------------------------------------------------------------- scenario ---

@main.group()
def scenario():
    """Adversarial and baseline scripted scenarios."""


@scenario.command("list")
@click.pass_context
def scenario_list(ctx):
    names = list_builtin()
    _emit(ctx, {"scenarios": names}, "\n".join(names))


@scenario.command("run")
@click.argument("name", required=False)
@click.option("--file", "path", default=None, type=click.Path(),
              help="Run a scenario file instead of a built-in.")
@click.option("--report-dir", default=None, type=click.Path(),
              help="Write report.json / payoffs.csv / payoffs.png here.")
@click.pass_context
def scenario_run(ctx, name, path, report_dir):
    try:
        if path:
            sc = load_scenario(path)
        elif name:
            sc = builtin_scenario(name, Params())
        else:
            raise CliError("give a built-in name or --file")
        report = run_scenario(sc)
    except MarketError as exc:
        raise CliError(f"{exc.code}: {exc.detail}")
    if report_dir:
        write_report_files(report, report_dir)
    _emit(ctx, report.to_wire(), render_text(report))
    if not report.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
