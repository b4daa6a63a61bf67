// Role panel controllers. Each user-visible control maps to exactly one
// execute message; every method first re-checks the gate for the cached
// state, so a control that would be rejected by the node simply does not
// fire (and is never rendered). Sealing/opening of detailed addresses
// happens in here, client-side only.

import { NodeApi } from "./api.js";
import { openEnvelope, sealAddress, generateKeypair } from "./crypto.js";
import {
  buyerCanBuy,
  buyerOrderActions,
  chosenShipper,
  sellerCanResetPrice,
  sellerOrderActions,
  shipperOrderActions,
} from "./gating.js";
import type { Item, OrderDetail, Outcome } from "./model.js";
import { bidDeposit, chooseDeposit } from "./model.js";
import { KeyStore } from "./store.js";

export interface EnabledAction {
  action: string;
  orderId?: number;
  itemId?: number;
}

class PanelBase {
  goods: Item[] = [];
  orders: OrderDetail[] = [];
  lastOutcome: Outcome | null = null;

  constructor(
    readonly api: NodeApi,
    readonly me: string,
  ) {}

  async refresh(): Promise<void> {
    this.goods = await this.api.goods();
    const summaries = await this.api.orders();
    this.orders = await Promise.all(
      summaries.map((s) => this.api.orderDetail(s.order_id)),
    );
  }

  item(itemId: number): Item {
    const item = this.goods.find((g) => g.item_id === itemId);
    if (!item) throw new Error(`no item ${itemId} in view`);
    return item;
  }

  order(orderId: number): OrderDetail {
    const order = this.orders.find((o) => o.order_id === orderId);
    if (!order) throw new Error(`no order ${orderId} in view`);
    return order;
  }

  protected async exec(
    msg: Record<string, unknown>,
    funds = "0",
  ): Promise<Outcome> {
    const outcome = await this.api.execute(this.me, msg, funds);
    this.lastOutcome = outcome;
    return outcome;
  }

  protected gate(enabled: boolean, action: string): void {
    if (!enabled) throw new Error(`action '${action}' is not available`);
  }
}

export class BuyerPanel extends PanelBase {
  constructor(
    api: NodeApi,
    me: string,
    public detailedAddress: string[],
  ) {
    super(api, me);
  }

  availableActions(): EnabledAction[] {
    const out: EnabledAction[] = [];
    for (const item of this.goods) {
      if (buyerCanBuy(item, this.me)) {
        out.push({ action: "buy", itemId: item.item_id });
      }
    }
    for (const order of this.orders) {
      for (const action of buyerOrderActions(order, this.me)) {
        out.push({ action, orderId: order.order_id });
      }
    }
    return out;
  }

  // the buy dialog shows the required deposit: exactly the listed price
  requiredBuyDeposit(itemId: number): string {
    return this.item(itemId).price;
  }

  async buy(itemId: number, obscured: string): Promise<Outcome> {
    this.gate(buyerCanBuy(this.item(itemId), this.me), "buy");
    return this.exec(
      { type: "buy", item_id: itemId, buyer_obscured_address: obscured },
      this.requiredBuyDeposit(itemId),
    );
  }

  // the choose control shows 2 * v_ship for each bid
  requiredChooseDeposit(orderId: number, bidIndex: number): string {
    return chooseDeposit(this.order(orderId).bids[bidIndex]);
  }

  async choose(orderId: number, bidIndex: number): Promise<Outcome> {
    const order = this.order(orderId);
    this.gate(buyerOrderActions(order, this.me).includes("choose"), "choose");
    return this.exec(
      { type: "choose_bid", order_id: orderId, bid_index: bidIndex },
      this.requiredChooseDeposit(orderId, bidIndex),
    );
  }

  async uploadAddress(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    this.gate(
      buyerOrderActions(order, this.me).includes("upload-address"),
      "upload-address",
    );
    const bid = order.bids[order.chosen as number];
    const envelope = await sealAddress(this.detailedAddress, bid.public_key);
    return this.exec({ type: "upload_address", order_id: orderId, envelope });
  }

  async confirmReceived(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    this.gate(
      buyerOrderActions(order, this.me).includes("confirm-received"),
      "confirm-received",
    );
    return this.exec({ type: "confirm", order_id: orderId });
  }

  async requestReturn(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    this.gate(buyerOrderActions(order, this.me).includes("return"), "return");
    return this.exec({ type: "item_unsatisfied", order_id: orderId });
  }

  async review(orderId: number, rating: number, text: string): Promise<Outcome> {
    const order = this.order(orderId);
    this.gate(buyerOrderActions(order, this.me).includes("review"), "review");
    return this.exec({
      type: "submit_review",
      order_id: orderId,
      rating,
      text,
    });
  }
}

export class SellerPanel extends PanelBase {
  constructor(
    api: NodeApi,
    me: string,
    public detailedAddress: string[],
  ) {
    super(api, me);
  }

  availableActions(): EnabledAction[] {
    const out: EnabledAction[] = [{ action: "post" }]; // the form is always live
    for (const item of this.goods) {
      if (sellerCanResetPrice(item, this.me)) {
        out.push({ action: "reset-price", itemId: item.item_id });
      }
    }
    for (const order of this.orders) {
      const item = this.item(order.item_id);
      for (const action of sellerOrderActions(order, item, this.me)) {
        out.push({ action, orderId: order.order_id });
      }
    }
    return out;
  }

  async postItem(form: {
    title: string;
    description: string;
    price: string;
    obscured: string;
  }): Promise<Outcome> {
    this.gate(form.obscured.trim().length > 0, "post"); // obscured is required
    return this.exec({
      type: "post_item",
      title: form.title,
      description: form.description,
      price: form.price,
      obscured_address: form.obscured,
    });
  }

  async resetPrice(itemId: number, newPrice: string): Promise<Outcome> {
    this.gate(sellerCanResetPrice(this.item(itemId), this.me), "reset-price");
    return this.exec({ type: "reset_price", item_id: itemId, new_price: newPrice });
  }

  async uploadAddress(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(
      sellerOrderActions(order, item, this.me).includes("upload-address"),
      "upload-address",
    );
    const bid = order.bids[order.chosen as number];
    const envelope = await sealAddress(this.detailedAddress, bid.public_key);
    return this.exec({ type: "upload_address", order_id: orderId, envelope });
  }

  async confirmShipped(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(
      sellerOrderActions(order, item, this.me).includes("confirm-shipped"),
      "confirm-shipped",
    );
    return this.exec({ type: "confirm", order_id: orderId });
  }

  async returnConfirm(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(
      sellerOrderActions(order, item, this.me).includes("return-confirm"),
      "return-confirm",
    );
    return this.exec({ type: "return_confirm", order_id: orderId });
  }
}

export class ShipperPanel extends PanelBase {
  constructor(
    api: NodeApi,
    me: string,
    readonly keys = new KeyStore(),
  ) {
    super(api, me);
  }

  availableActions(): EnabledAction[] {
    const out: EnabledAction[] = [{ action: "keygen" }];
    for (const order of this.orders) {
      const item = this.item(order.item_id);
      for (const action of shipperOrderActions(order, item, this.me)) {
        out.push({ action, orderId: order.order_id });
      }
    }
    return out;
  }

  /** Orders still open for bids, with both obscured endpoints. */
  openBoard(): { order: OrderDetail; from: string; to: string }[] {
    return this.orders
      .filter((o) => o.state === "Created")
      .map((order) => ({
        order,
        from: this.item(order.item_id).seller_obscured_address,
        to: order.buyer_obscured_address,
      }));
  }

  async keygen(label: string): Promise<string> {
    const keypair = await generateKeypair();
    this.keys.save(label, keypair);
    return keypair.publicKey;
  }

  // the bid form shows the required deposit: item price + time guarantee
  requiredBidDeposit(orderId: number, vTime: string): string {
    return bidDeposit(this.item(this.order(orderId).item_id), vTime);
  }

  async bid(
    orderId: number,
    form: { vShip: string; vTime: string; promised: number; keyLabel: string },
  ): Promise<Outcome> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(shipperOrderActions(order, item, this.me).includes("bid"), "bid");
    const keypair = this.keys.load(form.keyLabel);
    if (!keypair) throw new Error(`no key '${form.keyLabel}' in this browser`);
    return this.exec(
      {
        type: "bid_order",
        order_id: orderId,
        v_ship: form.vShip,
        v_time: form.vTime,
        promised_delivery: form.promised,
        public_key: keypair.publicKey,
        scheme_id: keypair.scheme,
      },
      this.requiredBidDeposit(orderId, form.vTime),
    );
  }

  async decryptAddresses(
    orderId: number,
    keyLabel: string,
  ): Promise<{ buyer: string[]; seller: string[] }> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(
      shipperOrderActions(order, item, this.me).includes("decrypt-addresses"),
      "decrypt-addresses",
    );
    const keypair = this.keys.load(keyLabel);
    if (!keypair) throw new Error(`no key '${keyLabel}' in this browser`);
    const addresses = await this.api.addresses(orderId);
    return {
      buyer: await openEnvelope(addresses.buyer_envelope!, keypair),
      seller: await openEnvelope(addresses.seller_envelope!, keypair),
    };
  }

  private async gatedConfirm(orderId: number, action: string): Promise<Outcome> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(
      shipperOrderActions(order, item, this.me).includes(
        action as "confirm-shipped",
      ),
      action,
    );
    return this.exec({ type: "confirm", order_id: orderId });
  }

  async confirmShipped(orderId: number): Promise<Outcome> {
    return this.gatedConfirm(orderId, "confirm-shipped");
  }

  async confirmDelivered(orderId: number): Promise<Outcome> {
    return this.gatedConfirm(orderId, "confirm-delivered");
  }

  async discard(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(
      shipperOrderActions(order, item, this.me).includes("discard"),
      "discard",
    );
    return this.exec({ type: "discard_order", order_id: orderId });
  }

  async lossBroken(orderId: number): Promise<Outcome> {
    const order = this.order(orderId);
    const item = this.item(order.item_id);
    this.gate(
      shipperOrderActions(order, item, this.me).includes("loss-broken"),
      "loss-broken",
    );
    return this.exec({ type: "item_loss_broken", order_id: orderId });
  }
}
