import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { generateKeypair, openEnvelope, sealAddress } from "../src/crypto.js";
import type { EnvelopeWire } from "../src/model.js";

const here = dirname(fileURLToPath(import.meta.url));

describe("sealed-envelope-v1 in WebCrypto", () => {
  it("round-trips an address", async () => {
    const kp = await generateKeypair();
    const lines = ["12 East St", "Apt 9", "Montreal"];
    const envelope = await sealAddress(lines, kp.publicKey);
    expect(await openEnvelope(envelope, kp)).toEqual(lines);
  });

  it("randomizes every seal", async () => {
    const kp = await generateKeypair();
    const a = await sealAddress(["same place"], kp.publicKey);
    const b = await sealAddress(["same place"], kp.publicKey);
    expect(a.ciphertext).not.toBe(b.ciphertext);
  });

  it("refuses the wrong key", async () => {
    const kp = await generateKeypair();
    const other = await generateKeypair();
    const envelope = await sealAddress(["secret"], kp.publicKey);
    await expect(openEnvelope(envelope, other)).rejects.toThrow();
  });

  it("detects a flipped ciphertext byte", async () => {
    const kp = await generateKeypair();
    const envelope = await sealAddress(["secret"], kp.publicKey);
    const blob = Uint8Array.from(atob(envelope.ciphertext), (c) => c.charCodeAt(0));
    blob[blob.length - 1] ^= 1;
    const tampered: EnvelopeWire = {
      ...envelope,
      ciphertext: btoa(String.fromCharCode(...blob)),
    };
    await expect(openEnvelope(tampered, kp)).rejects.toThrow(/tampered|wrong key/);
  });

  it("opens an envelope sealed by the Python node tooling", async () => {
    const fixture = JSON.parse(
      readFileSync(join(here, "../fixtures/envelope.json"), "utf-8"),
    ) as {
      scheme: string;
      public_key: string;
      private_key: string;
      plaintext_lines: string[];
      envelope: EnvelopeWire;
    };
    const lines = await openEnvelope(fixture.envelope, {
      scheme: fixture.scheme,
      publicKey: fixture.public_key,
      privateKey: fixture.private_key,
    });
    expect(lines).toEqual(fixture.plaintext_lines);
  });
});
