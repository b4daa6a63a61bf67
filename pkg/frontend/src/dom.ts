// Thin browser shell: renders the three role panels and polls the node.
// All behavior lives in panels.ts; this file only draws and wires buttons.

import { NodeApi } from "./api.js";
import { BuyerPanel, SellerPanel, ShipperPanel } from "./panels.js";
import { chooseDeposit } from "./model.js";

const POLL_MS = 1500;

function el(tag: string, text = "", cls = ""): HTMLElement {
  const node = document.createElement(tag);
  if (text) node.textContent = text;
  if (cls) node.className = cls;
  return node;
}

function button(label: string, onClick: () => void): HTMLElement {
  const node = el("button", label) as HTMLButtonElement;
  node.addEventListener("click", () => {
    node.disabled = true; // optimistic disable while in flight
    Promise.resolve(onClick()).finally(() => (node.disabled = false));
  });
  return node;
}

function prompt1(label: string, fallback: string): string {
  return window.prompt(label, fallback) ?? fallback;
}

export function mount(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const nodeUrl = params.get("node") ?? "http://127.0.0.1:8990";
  const api = new NodeApi(nodeUrl);

  const who = params.get("as") ?? "alice";
  const role = params.get("role") ?? "buyer";
  const detailed = (params.get("address") ?? "1 Example St").split("|");

  const header = el("header");
  header.append(el("h1", `escrowmarket - ${role} panel (${who})`));
  const status = el("p", `node: ${nodeUrl}`);
  header.append(status);
  root.append(header);
  const body = el("main");
  root.append(body);

  const buyer = new BuyerPanel(api, who, detailed);
  const seller = new SellerPanel(api, who, detailed);
  const shipper = new ShipperPanel(api, who);

  async function redraw(): Promise<void> {
    const panel = role === "seller" ? seller : role === "shipper" ? shipper : buyer;
    try {
      await panel.refresh();
    } catch (err) {
      status.textContent = `node unreachable: ${String(err)}`;
      return;
    }
    body.replaceChildren();

    if (role === "buyer") {
      body.append(el("h2", "items"));
      for (const item of buyer.goods) {
        const row = el("div", `#${item.item_id} ${item.title} - ${item.price} ` +
          `[${item.status}] near ${item.seller_obscured_address} `, "row");
        if (buyer.availableActions().some(
            (a) => a.action === "buy" && a.itemId === item.item_id)) {
          row.append(button(`buy (deposit ${item.price})`, () =>
            buyer.buy(item.item_id, prompt1("your obscured address", "my district"))));
        }
        body.append(row);
      }
      body.append(el("h2", "my orders"));
      for (const order of buyer.orders.filter((o) => o.buyer === who)) {
        const row = el("div", `order ${order.order_id} [${order.state}] `, "row");
        const actions = buyer.availableActions()
          .filter((a) => a.orderId === order.order_id);
        for (const action of actions) {
          if (action.action === "choose") {
            order.bids.forEach((bid, i) => row.append(
              button(`choose bid ${i} by ${bid.shipper} (deposit ${chooseDeposit(bid)})`,
                     () => buyer.choose(order.order_id, i))));
          } else if (action.action === "upload-address") {
            row.append(button("seal + upload address",
                              () => buyer.uploadAddress(order.order_id)));
          } else if (action.action === "confirm-received") {
            row.append(button("confirm received",
                              () => buyer.confirmReceived(order.order_id)));
          } else if (action.action === "return") {
            row.append(button("return item",
                              () => buyer.requestReturn(order.order_id)));
          } else if (action.action === "review") {
            row.append(button("leave review", () => buyer.review(
              order.order_id, Number(prompt1("rating 1-5", "5")),
              prompt1("review text", ""))));
          }
        }
        body.append(row);
      }
    } else if (role === "seller") {
      body.append(el("h2", "post an item"));
      body.append(button("post item", () => seller.postItem({
        title: prompt1("title", "item"),
        description: prompt1("description", ""),
        price: prompt1("price", "100"),
        obscured: prompt1("obscured address (required)", "my district"),
      })));
      body.append(el("h2", "my listings"));
      for (const item of seller.goods.filter((g) => g.seller === who)) {
        const row = el("div",
          `#${item.item_id} ${item.title} - ${item.price} [${item.status}] `, "row");
        if (seller.availableActions().some(
            (a) => a.action === "reset-price" && a.itemId === item.item_id)) {
          row.append(button("reset price", () =>
            seller.resetPrice(item.item_id, prompt1("new price", item.price))));
        }
        body.append(row);
      }
      body.append(el("h2", "orders on my items"));
      for (const order of seller.orders) {
        const actions = seller.availableActions()
          .filter((a) => a.orderId === order.order_id);
        if (!actions.length) continue;
        const row = el("div", `order ${order.order_id} [${order.state}] `, "row");
        for (const action of actions) {
          if (action.action === "upload-address") {
            row.append(button("seal + upload address",
                              () => seller.uploadAddress(order.order_id)));
          } else if (action.action === "confirm-shipped") {
            row.append(button("confirm shipped",
                              () => seller.confirmShipped(order.order_id)));
          } else if (action.action === "return-confirm") {
            row.append(button("accept return",
                              () => seller.returnConfirm(order.order_id)));
          }
        }
        body.append(row);
      }
    } else {
      body.append(el("h2", "keys"));
      body.append(button("generate keypair", async () => {
        const pub = await shipper.keygen(prompt1("key label", "mykey"));
        window.alert(`public key (goes on-chain with your bid):\n${pub}`);
      }));
      body.append(el("h2", "open orders"));
      for (const { order, from, to } of shipper.openBoard()) {
        const row = el("div",
          `order ${order.order_id}: ${from} -> ${to}, bids ${order.bids.length} `,
          "row");
        if (shipper.availableActions().some(
            (a) => a.action === "bid" && a.orderId === order.order_id)) {
          row.append(button("bid", () => shipper.bid(order.order_id, {
            vShip: prompt1("shipping fee", "8"),
            vTime: prompt1("time guarantee", "5"),
            promised: Number(prompt1("promised ticks", "10")),
            keyLabel: prompt1("key label", "mykey"),
          })));
          row.append(el("span",
            ` (deposit = price + guarantee; e.g. ${shipper.requiredBidDeposit(order.order_id, "5")} at guarantee 5)`));
        }
        body.append(row);
      }
      body.append(el("h2", "my deliveries"));
      for (const order of shipper.orders) {
        const actions = shipper.availableActions()
          .filter((a) => a.orderId === order.order_id && a.action !== "bid");
        if (!actions.length) continue;
        const row = el("div", `order ${order.order_id} [${order.state}] `, "row");
        for (const action of actions) {
          if (action.action === "decrypt-addresses") {
            row.append(button("decrypt addresses", async () => {
              const { buyer: b, seller: s } = await shipper.decryptAddresses(
                order.order_id, prompt1("key label", "mykey"));
              window.alert(`pickup: ${s.join(", ")}\ndropoff: ${b.join(", ")}`);
            }));
          } else if (action.action === "confirm-shipped") {
            row.append(button("confirm shipped",
                              () => shipper.confirmShipped(order.order_id)));
          } else if (action.action === "confirm-delivered") {
            row.append(button("confirm delivered",
                              () => shipper.confirmDelivered(order.order_id)));
          } else if (action.action === "discard") {
            row.append(button("discard order",
                              () => shipper.discard(order.order_id)));
          } else if (action.action === "loss-broken") {
            row.append(button("declare loss/broken",
                              () => shipper.lossBroken(order.order_id)));
          }
        }
        body.append(row);
      }
    }
  }

  void redraw();
  setInterval(() => void redraw(), POLL_MS);
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) mount(root);
}
