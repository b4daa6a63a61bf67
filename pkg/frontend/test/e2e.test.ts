// End-to-end: both lifecycles driven entirely through the three role panels
// against a real node process. A recording fetch stands in for a capture
// proxy: after everything runs, no request body may contain a plaintext
// detailed address or a private key. Every panel action asserts it was
// enabled at click time and that the node accepted it.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { NodeApi } from "../src/api.js";
import { BuyerPanel, SellerPanel, ShipperPanel, type EnabledAction } from "../src/panels.js";

const BUYER_ADDRESS = ["12 East St", "Apt 9", "Montreal"];
const SELLER_ADDRESS = ["77 North Ave", "Montreal"];

let proc: ChildProcess;
let baseUrl: string;
let logPath: string;
const capturedBodies: string[] = [];

const recordingFetch: typeof fetch = (input, init) => {
  if (init?.body) capturedBodies.push(String(init.body));
  return fetch(input, init);
};

async function waitForNode(url: string): Promise<void> {
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const resp = await fetch(`${url}/v1/state_hash`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("node did not come up");
    await new Promise((r) => setTimeout(r, 100));
  }
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "emarket-ui-"));
  const port = 18000 + Math.floor(Math.random() * 20000);
  logPath = join(dir, "node.log");
  const cfgPath = join(dir, "node.json");
  writeFileSync(cfgPath, JSON.stringify({
    log_path: logPath,
    host: "127.0.0.1",
    port,
    gas_fee: "1",
    mode: "sandbox",
    genesis: { seller: "2000", buyer: "2000", shipx: "2000", shipy: "2000" },
  }));
  proc = spawn("python3", ["-m", "escrowmarket", "node", "serve",
                           "--config", cfgPath],
               { stdio: ["ignore", "inherit", "inherit"] });
  baseUrl = `http://127.0.0.1:${port}`;
  await waitForNode(baseUrl);
});

afterAll(() => {
  proc?.kill();
});

describe("three-panel end-to-end", () => {
  it("runs a full lifecycle and a return lifecycle with no rejected click", async () => {
    const api = new NodeApi(baseUrl, recordingFetch);
    const seller = new SellerPanel(api, "seller", SELLER_ADDRESS);
    const buyer = new BuyerPanel(api, "buyer", BUYER_ADDRESS);
    const shipx = new ShipperPanel(api, "shipx");
    const shipy = new ShipperPanel(api, "shipy");
    const panels = [seller, buyer, shipx, shipy];

    const refreshAll = async () => {
      for (const panel of panels) await panel.refresh();
    };

    const enabled = (panel: { availableActions(): EnabledAction[] },
                     action: string, where: Partial<EnabledAction> = {}) =>
      panel.availableActions().some(
        (a) => a.action === action &&
          (where.orderId === undefined || a.orderId === where.orderId) &&
          (where.itemId === undefined || a.itemId === where.itemId));

    // ---- lifecycle 1: post -> buy -> two bids -> choose -> upload ->
    //      ship -> deliver -> receive -> review
    await refreshAll();
    let outcome = await seller.postItem({
      title: "brass lamp", description: "solid", price: "100",
      obscured: "north end",
    });
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(buyer, "buy", { itemId: 1 })).toBe(true);
    expect(buyer.requiredBuyDeposit(1)).toBe("100"); // deposit shown = price
    outcome = await buyer.buy(1, "east side");
    expect(outcome.status).toBe("accepted");

    await shipx.keygen("kx");
    await shipy.keygen("ky");
    await refreshAll();
    expect(shipx.openBoard().map(({ order }) => order.order_id)).toEqual([1]);
    expect(shipx.openBoard()[0].from).toBe("north end"); // obscured endpoints only
    expect(enabled(shipy, "bid", { orderId: 1 })).toBe(true);
    expect(shipy.requiredBidDeposit(1, "5")).toBe("105"); // price + guarantee
    outcome = await shipy.bid(1, {
      vShip: "10", vTime: "5", promised: 10, keyLabel: "ky",
    });
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    outcome = await shipx.bid(1, {
      vShip: "8", vTime: "5", promised: 10, keyLabel: "kx",
    });
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(buyer, "choose", { orderId: 1 })).toBe(true);
    expect(buyer.requiredChooseDeposit(1, 1)).toBe("16"); // 2 * v_ship of the 8-bid
    outcome = await buyer.choose(1, 1);
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(buyer, "upload-address", { orderId: 1 })).toBe(true);
    outcome = await buyer.uploadAddress(1);
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(seller, "upload-address", { orderId: 1 })).toBe(true);
    outcome = await seller.uploadAddress(1);
    expect(outcome.status).toBe("accepted");

    // only the chosen shipper can read the plaintext, locally
    await refreshAll();
    expect(enabled(shipx, "decrypt-addresses", { orderId: 1 })).toBe(true);
    expect(enabled(shipy, "decrypt-addresses", { orderId: 1 })).toBe(false);
    const decrypted = await shipx.decryptAddresses(1, "kx");
    expect(decrypted.buyer).toEqual(BUYER_ADDRESS);
    expect(decrypted.seller).toEqual(SELLER_ADDRESS);

    // cross-language check: the Python tooling opens the browser-sealed
    // envelope with the same key material
    const keypair = shipx.keys.load("kx")!;
    const addresses = await api.addresses(1);
    const pyLines = execFileSync("python3", ["-c", `
import json, sys
from escrowmarket import sealedbox
data = json.load(sys.stdin)
kp = sealedbox.KeyPair(data["scheme"],
                       sealedbox.b64decode(data["publicKey"]),
                       sealedbox.b64decode(data["privateKey"]))
env = sealedbox.SealedEnvelope.from_wire(data["envelope"])
print(json.dumps(list(sealedbox.open_envelope(env, kp).lines)))
`], { input: JSON.stringify({ ...keypair, envelope: addresses.buyer_envelope }) });
    expect(JSON.parse(pyLines.toString())).toEqual(BUYER_ADDRESS);

    await refreshAll();
    outcome = await seller.confirmShipped(1);
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await shipx.confirmShipped(1);
    expect(outcome.status).toBe("accepted");

    await api.adminTick(3);
    await refreshAll();
    outcome = await shipx.confirmDelivered(1);
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(buyer, "confirm-received", { orderId: 1 })).toBe(true);
    outcome = await buyer.confirmReceived(1);
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(buyer, "review", { orderId: 1 })).toBe(true);
    outcome = await buyer.review(1, 5, "arrived intact");
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(buyer.order(1).state).toBe("Completed");
    const stats = await api.stats("shipx");
    expect(stats.as_shipper.perfect_ratio).toEqual([1, 1]);

    // ---- lifecycle 2: return path
    outcome = await seller.postItem({
      title: "clock", description: "loud", price: "60", obscured: "north end",
    });
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await buyer.buy(2, "east side");
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await shipy.bid(2, {
      vShip: "7", vTime: "5", promised: 10, keyLabel: "ky",
    });
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await buyer.choose(2, 0);
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await buyer.uploadAddress(2);
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await seller.uploadAddress(2);
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await seller.confirmShipped(2);
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await shipy.confirmShipped(2);
    expect(outcome.status).toBe("accepted");
    await refreshAll();
    outcome = await shipy.confirmDelivered(2);
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(buyer, "return", { orderId: 2 })).toBe(true);
    outcome = await buyer.requestReturn(2);
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(enabled(seller, "return-confirm", { orderId: 2 })).toBe(true);
    outcome = await seller.returnConfirm(2);
    expect(outcome.status).toBe("accepted");

    await refreshAll();
    expect(buyer.order(2).state).toBe("Returned");
    // the item is purchasable again
    expect(seller.goods.find((g) => g.item_id === 2)?.status).toBe("Available");

    // ---- a disabled control never reaches the wire
    const wireCalls = capturedBodies.length;
    await expect(buyer.confirmReceived(2)).rejects.toThrow(/not available/);
    expect(capturedBodies.length).toBe(wireCalls);

    // ---- proxy capture: no plaintext address, no private key, anywhere
    const allBodies = capturedBodies.join("\n");
    for (const line of [...BUYER_ADDRESS, ...SELLER_ADDRESS]) {
      expect(allBodies).not.toContain(line);
    }
    expect(allBodies).not.toContain(shipx.keys.load("kx")!.privateKey);
    expect(allBodies).not.toContain(shipy.keys.load("ky")!.privateKey);
    // obscured locations are public by design and do go on the wire
    expect(allBodies).toContain("north end");
  });
});
