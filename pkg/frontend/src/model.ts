// Wire types mirroring the node's JSON API. All token amounts are decimal
// strings; BigInt arithmetic keeps them exact in the client.

export type ItemStatus = "Available" | "Locked" | "Delisted";

export type OrderState =
  | "Created"
  | "BidChosen"
  | "AddressesReady"
  | "InTransit"
  | "Delivered"
  | "Completed"
  | "Discarded"
  | "LossBroken"
  | "Returning"
  | "Returned";

export interface Item {
  item_id: number;
  seller: string;
  title: string;
  description: string;
  price: string;
  seller_obscured_address: string;
  status: ItemStatus;
}

export interface BidView {
  shipper: string;
  v_ship: string;
  v_time: string;
  promised_delivery: number;
  public_key: string;
  scheme_id: string;
  deposit_held: boolean;
}

export interface Review {
  rating: number;
  text: string;
  author: string;
}

export interface OrderSummary {
  order_id: number;
  item_id: number;
  buyer: string;
  state: OrderState;
  created_tick: number;
  bid_count: number;
  chosen_shipper: string | null;
  buyer_obscured_address: string;
  seller_obscured_address: string;
}

export interface OrderDetail {
  order_id: number;
  item_id: number;
  buyer: string;
  buyer_obscured_address: string;
  state: OrderState;
  bids: BidView[];
  chosen: number | null;
  has_buyer_envelope: boolean;
  has_seller_envelope: boolean;
  seller_confirmed_shipped: boolean;
  shipper_confirmed_shipped: boolean;
  shipper_confirmed_delivered: boolean;
  buyer_confirmed_received: boolean;
  created_tick: number;
  shipped_tick: number | null;
  delivered_tick: number | null;
  escrow: string;
  review: Review | null;
}

export interface EnvelopeWire {
  scheme: string;
  ciphertext: string;
  recipient_key_fingerprint: string;
}

export interface AddressesView {
  order_id: number;
  buyer_obscured_address: string;
  seller_obscured_address: string;
  buyer_envelope: EnvelopeWire | null;
  seller_envelope: EnvelopeWire | null;
}

export interface Receipt {
  events: { name: string; attributes: Record<string, string> }[];
  transfers: { from: string; to: string; amount: string }[];
}

export type Outcome =
  | { status: "accepted"; receipt: Receipt }
  | { status: "rejected"; code: string; detail: string };

export interface StatsView {
  address: string;
  as_shipper: { completed: number; total_chosen: number; perfect_ratio: [number, number] };
  as_seller: { satisfied: number; total_sold: number; satisfied_ratio: [number, number] };
}

export function chooseDeposit(bid: BidView): string {
  return (2n * BigInt(bid.v_ship)).toString();
}

export function bidDeposit(item: Item, vTime: string): string {
  return (BigInt(item.price) + BigInt(vTime)).toString();
}
