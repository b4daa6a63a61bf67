"""Local keypair storage for shippers (and anyone sealing addresses).

Private keys live only in this file; no CLI command ever puts one in a wire
message. File permissions are tightened to owner-only where the platform
supports it.
"""

from __future__ import annotations

import json
import os

from .errors import ParseError
from .sealedbox import KeyPair, b64decode, b64encode, generate_keypair


class Keystore:
    def __init__(self, path: str):
        self.path = path
        self.entries: dict[str, KeyPair] = {}
        if os.path.exists(path):
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{self.path}: {exc}") from exc
        for label, rec in raw.items():
            self.entries[label] = KeyPair(
                scheme=rec["scheme"],
                public_key=b64decode(rec["public_key"]),
                private_key=b64decode(rec["private_key"]),
            )

    def save(self) -> None:
        parent = os.path.dirname(self.path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        raw = {
            label: {
                "scheme": kp.scheme,
                "public_key": b64encode(kp.public_key),
                "private_key": b64encode(kp.private_key),
            }
            for label, kp in self.entries.items()
        }
        with open(self.path, "w", encoding="utf-8") as fh:
            json.dump(raw, fh, indent=2)
            fh.write("\n")
        try:
            os.chmod(self.path, 0o600)
        except OSError:
            pass

    def generate(self, label: str, scheme: str, seed: bytes | None = None) -> KeyPair:
        keypair = generate_keypair(scheme, seed)
        self.entries[label] = keypair
        self.save()
        return keypair

    def get(self, label: str) -> KeyPair:
        if label not in self.entries:
            raise ParseError(f"no key labelled {label!r} in {self.path}")
        return self.entries[label]
