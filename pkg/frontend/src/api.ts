// Thin client over the node's wire API. Every panel action goes through
// execute(); queries are free and never mutate.

import type {
  AddressesView,
  Item,
  OrderDetail,
  OrderSummary,
  Outcome,
  StatsView,
} from "./model.js";

export type FetchLike = typeof fetch;

export class NodeApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post(path: string, body: unknown): Promise<Response> {
    return this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async execute(sender: string, msg: Record<string, unknown>, funds = "0"): Promise<Outcome> {
    const resp = await this.post("/v1/execute", { sender, msg, funds });
    return (await resp.json()) as Outcome;
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) {
      const body = await resp.json().catch(() => ({}));
      throw new Error(`${path}: ${(body as { code?: string }).code ?? resp.status}`);
    }
    return (await resp.json()) as T;
  }

  async goods(): Promise<Item[]> {
    return (await this.get<{ goods: Item[] }>("/v1/query/goods")).goods;
  }

  async orders(): Promise<OrderSummary[]> {
    return (await this.get<{ orders: OrderSummary[] }>("/v1/query/orders")).orders;
  }

  async orderDetail(orderId: number): Promise<OrderDetail> {
    return (await this.get<{ order: OrderDetail }>(`/v1/query/order/${orderId}`)).order;
  }

  async addresses(orderId: number): Promise<AddressesView> {
    return (await this.get<{ addresses: AddressesView }>(
      `/v1/query/addresses/${orderId}`,
    )).addresses;
  }

  async balance(addr: string): Promise<string> {
    return (await this.get<{ balance: string }>(`/v1/query/balance/${addr}`)).balance;
  }

  async stats(addr: string): Promise<StatsView> {
    return this.get<StatsView>(`/v1/query/stats/${addr}`);
  }

  async stateHash(): Promise<string> {
    return (await this.get<{ state_hash: string }>("/v1/state_hash")).state_hash;
  }

  async adminTick(dt: number): Promise<Outcome> {
    const resp = await this.post("/v1/admin/tick", { dt });
    return (await resp.json()) as Outcome;
  }

  async adminFaucet(addr: string, amount: string): Promise<Outcome> {
    const resp = await this.post("/v1/admin/faucet", { addr, amount });
    return (await resp.json()) as Outcome;
  }
}
