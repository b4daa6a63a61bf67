// sealed-envelope-v1 in the browser: ephemeral ECDH on P-256, HKDF-SHA256,
// AES-256-GCM, all through WebCrypto. Interoperates byte-for-byte with the
// node-side Python implementation; private keys never leave this module's
// caller (browser-local storage only, never a request body).

import type { EnvelopeWire } from "./model.js";

export const SCHEME = "sealed-envelope-v1";

const POINT_LEN = 65;
const NONCE_LEN = 12;
const FINGERPRINT_LEN = 16;

const subtle = globalThis.crypto.subtle;

// bytes backed by a plain ArrayBuffer, as WebCrypto's BufferSource demands
type Bytes = Uint8Array<ArrayBuffer>;

export interface KeyPairB64 {
  scheme: string;
  publicKey: string; // base64 of the X9.62 uncompressed point
  privateKey: string; // base64 PKCS8 DER
}

export function b64encode(bytes: Uint8Array): string {
  let binary = "";
  bytes.forEach((b) => (binary += String.fromCharCode(b)));
  return btoa(binary);
}

export function b64decode(text: string): Bytes {
  return Uint8Array.from(atob(text), (c) => c.charCodeAt(0)) as Bytes;
}

function utf8(text: string): Bytes {
  return new TextEncoder().encode(text) as Bytes;
}

function concat(...parts: Uint8Array[]): Bytes {
  const out = new Uint8Array(parts.reduce((n, p) => n + p.length, 0));
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

async function fingerprint(publicKey: Bytes): Promise<Bytes> {
  const digest = await subtle.digest("SHA-256", publicKey);
  return new Uint8Array(digest).slice(0, FINGERPRINT_LEN);
}

async function deriveAesKey(
  shared: Bytes,
  ephPub: Bytes,
  fp: Bytes,
  usage: KeyUsage,
): Promise<CryptoKey> {
  const hkdfKey = await subtle.importKey("raw", shared, "HKDF", false, [
    "deriveBits",
  ]);
  const info = concat(utf8(`${SCHEME};`), ephPub, fp);
  const bits = await subtle.deriveBits(
    { name: "HKDF", hash: "SHA-256", salt: new Uint8Array(0), info },
    hkdfKey,
    256,
  );
  return subtle.importKey("raw", bits, "AES-GCM", false, [usage]);
}

export async function generateKeypair(): Promise<KeyPairB64> {
  const pair = await subtle.generateKey({ name: "ECDH", namedCurve: "P-256" }, true, [
    "deriveBits",
  ]);
  const pub = new Uint8Array(await subtle.exportKey("raw", pair.publicKey));
  const priv = new Uint8Array(await subtle.exportKey("pkcs8", pair.privateKey));
  return { scheme: SCHEME, publicKey: b64encode(pub), privateKey: b64encode(priv) };
}

export async function sealAddress(
  lines: string[],
  recipientPublicKeyB64: string,
): Promise<EnvelopeWire> {
  const recipientBytes = b64decode(recipientPublicKeyB64);
  const recipient = await subtle.importKey(
    "raw",
    recipientBytes,
    { name: "ECDH", namedCurve: "P-256" },
    false,
    [],
  );
  const eph = await subtle.generateKey({ name: "ECDH", namedCurve: "P-256" }, true, [
    "deriveBits",
  ]);
  const ephPub = new Uint8Array(await subtle.exportKey("raw", eph.publicKey));
  const shared = new Uint8Array(
    await subtle.deriveBits({ name: "ECDH", public: recipient }, eph.privateKey, 256),
  );
  const fp = await fingerprint(recipientBytes);
  const aesKey = await deriveAesKey(shared, ephPub, fp, "encrypt");
  const nonce = globalThis.crypto.getRandomValues(new Uint8Array(NONCE_LEN));
  const ciphertext = new Uint8Array(
    await subtle.encrypt(
      { name: "AES-GCM", iv: nonce, additionalData: fp },
      aesKey,
      utf8(JSON.stringify(lines)),
    ),
  );
  return {
    scheme: SCHEME,
    ciphertext: b64encode(concat(ephPub, nonce, ciphertext)),
    recipient_key_fingerprint: b64encode(fp),
  };
}

export async function openEnvelope(
  envelope: EnvelopeWire,
  keypair: KeyPairB64,
): Promise<string[]> {
  if (envelope.scheme !== keypair.scheme) {
    throw new Error(`scheme mismatch: ${envelope.scheme} != ${keypair.scheme}`);
  }
  const myFp = await fingerprint(b64decode(keypair.publicKey));
  const claimedFp = b64decode(envelope.recipient_key_fingerprint);
  if (b64encode(myFp) !== b64encode(claimedFp)) {
    throw new Error("envelope is addressed to a different key");
  }
  const blob = b64decode(envelope.ciphertext);
  if (blob.length < POINT_LEN + NONCE_LEN + 16) {
    throw new Error("ciphertext too short");
  }
  const ephPub = blob.slice(0, POINT_LEN);
  const nonce = blob.slice(POINT_LEN, POINT_LEN + NONCE_LEN);
  const body = blob.slice(POINT_LEN + NONCE_LEN);
  const privateKey = await subtle.importKey(
    "pkcs8",
    b64decode(keypair.privateKey),
    { name: "ECDH", namedCurve: "P-256" },
    false,
    ["deriveBits"],
  );
  const ephKey = await subtle.importKey(
    "raw",
    ephPub,
    { name: "ECDH", namedCurve: "P-256" },
    false,
    [],
  );
  const shared = new Uint8Array(
    await subtle.deriveBits({ name: "ECDH", public: ephKey }, privateKey, 256),
  );
  const aesKey = await deriveAesKey(shared, ephPub, claimedFp, "decrypt");
  let plaintext: ArrayBuffer;
  try {
    plaintext = await subtle.decrypt(
      { name: "AES-GCM", iv: nonce, additionalData: claimedFp },
      aesKey,
      body,
    );
  } catch {
    throw new Error("wrong key or tampered ciphertext");
  }
  const lines = JSON.parse(new TextDecoder().decode(plaintext)) as string[];
  if (!Array.isArray(lines)) {
    throw new Error("plaintext is not an address list");
  }
  return lines;
}
