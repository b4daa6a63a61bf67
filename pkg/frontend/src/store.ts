// Browser-local keypair storage. Falls back to an in-memory map outside the
// browser (tests). Private keys live here and nowhere else.

import type { KeyPairB64 } from "./crypto.js";

const memory = new Map<string, string>();

function backend() {
  if (typeof localStorage !== "undefined") {
    return {
      get: (k: string) => localStorage.getItem(k),
      set: (k: string, v: string) => localStorage.setItem(k, v),
    };
  }
  return {
    get: (k: string) => memory.get(k) ?? null,
    set: (k: string, v: string) => void memory.set(k, v),
  };
}

export class KeyStore {
  constructor(readonly namespace = "emarket") {}

  private key(label: string): string {
    return `${this.namespace}:key:${label}`;
  }

  save(label: string, keypair: KeyPairB64): void {
    backend().set(this.key(label), JSON.stringify(keypair));
  }

  load(label: string): KeyPairB64 | null {
    const raw = backend().get(this.key(label));
    return raw === null ? null : (JSON.parse(raw) as KeyPairB64);
  }
}
