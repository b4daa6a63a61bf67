// Action gating: for each (role, order state) pair, exactly the messages the
// contract would accept are enabled. Panels never render a control outside
// these sets, so a click can never surface a permission/state rejection.

import type { Item, OrderDetail } from "./model.js";

export type BuyerOrderAction = "choose" | "upload-address" | "confirm-received" | "return" | "review";
export type SellerOrderAction = "upload-address" | "confirm-shipped" | "return-confirm";
export type ShipperOrderAction =
  | "bid"
  | "discard"
  | "confirm-shipped"
  | "confirm-delivered"
  | "loss-broken"
  | "decrypt-addresses";

export function chosenShipper(order: OrderDetail): string | null {
  return order.chosen === null ? null : order.bids[order.chosen].shipper;
}

export function buyerCanBuy(item: Item, me: string): boolean {
  return item.status === "Available" && item.seller !== me;
}

export function sellerCanResetPrice(item: Item, me: string): boolean {
  return item.seller === me && item.status === "Available";
}

export function buyerOrderActions(order: OrderDetail, me: string): BuyerOrderAction[] {
  if (order.buyer !== me) return [];
  const actions: BuyerOrderAction[] = [];
  if (order.state === "Created" && order.bids.length > 0) actions.push("choose");
  if (order.state === "BidChosen" && !order.has_buyer_envelope) actions.push("upload-address");
  if (order.state === "Delivered") actions.push("confirm-received", "return");
  if ((order.state === "Completed" || order.state === "Returned") && order.review === null) {
    actions.push("review");
  }
  return actions;
}

export function sellerOrderActions(
  order: OrderDetail,
  item: Item,
  me: string,
): SellerOrderAction[] {
  if (item.seller !== me) return [];
  const actions: SellerOrderAction[] = [];
  if (order.state === "BidChosen" && !order.has_seller_envelope) actions.push("upload-address");
  if (order.state === "AddressesReady" && !order.seller_confirmed_shipped) {
    actions.push("confirm-shipped");
  }
  if (order.state === "Returning") actions.push("return-confirm");
  return actions;
}

export function shipperOrderActions(
  order: OrderDetail,
  item: Item,
  me: string,
): ShipperOrderAction[] {
  const actions: ShipperOrderAction[] = [];
  if (
    order.state === "Created" &&
    me !== order.buyer &&
    me !== item.seller &&
    order.bids.every((b) => b.shipper !== me)
  ) {
    actions.push("bid");
  }
  if (chosenShipper(order) !== me) return actions;
  if (order.has_buyer_envelope && order.has_seller_envelope) {
    actions.push("decrypt-addresses"); // local-only, never a wire message
  }
  if (order.state === "AddressesReady") {
    actions.push("discard");
    if (!order.shipper_confirmed_shipped) actions.push("confirm-shipped");
  }
  if (order.state === "InTransit") actions.push("confirm-delivered", "loss-broken");
  if (order.state === "Delivered") actions.push("loss-broken");
  return actions;
}
