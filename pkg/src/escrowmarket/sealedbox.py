"""Sealed-envelope encryption of detailed physical addresses.

The built-in scheme "sealed-envelope-v1" is a hybrid construction chosen so a
browser can run it with plain WebCrypto: ephemeral ECDH on P-256, HKDF-SHA256
key derivation bound to the ephemeral key and the recipient fingerprint, and
AES-256-GCM for the payload. Encryption is randomized (fresh ephemeral key and
nonce per seal) and authenticated, so a flipped ciphertext byte is detected
rather than decrypting to garbage.

Blob layout inside SealedEnvelope.ciphertext:

    ephemeral public key (65, X9.62 uncompressed) || nonce (12) || GCM ct+tag

Everything here is stateless and safe for concurrent use. Private keys live
only in client-side keystores; nothing in this module ever puts one on the
wire.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .errors import (
    DecryptionFailure,
    MalformedKey,
    MalformedMessage,
    SchemeMismatch,
    UnsupportedScheme,
)

SEALED_ENVELOPE_V1 = "sealed-envelope-v1"

_CURVE = ec.SECP256R1()
# order of the P-256 group, used to derive private scalars from seeds
_P256_ORDER = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551
_POINT_LEN = 65
_NONCE_LEN = 12
FINGERPRINT_LEN = 16


def b64encode(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def b64decode(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=True)
    except Exception as exc:
        raise MalformedMessage(f"bad base64: {exc}") from exc


def key_fingerprint(public_key: bytes) -> bytes:
    return hashlib.sha256(public_key).digest()[:FINGERPRINT_LEN]


@dataclass(frozen=True)
class KeyPair:
    scheme: str
    public_key: bytes   # X9.62 uncompressed point
    private_key: bytes  # PKCS8 DER, keystore-only

    @property
    def fingerprint(self) -> bytes:
        return key_fingerprint(self.public_key)


@dataclass(frozen=True)
class SealedEnvelope:
    scheme: str
    ciphertext: bytes
    recipient_key_fingerprint: bytes

    def to_wire(self) -> dict:
        return {
            "scheme": self.scheme,
            "ciphertext": b64encode(self.ciphertext),
            "recipient_key_fingerprint": b64encode(self.recipient_key_fingerprint),
        }

    @classmethod
    def from_wire(cls, wire: dict) -> "SealedEnvelope":
        if not isinstance(wire, dict):
            raise MalformedMessage("envelope must be an object")
        try:
            scheme = wire["scheme"]
            ciphertext = wire["ciphertext"]
            fingerprint = wire["recipient_key_fingerprint"]
        except KeyError as exc:
            raise MalformedMessage(f"envelope missing field {exc}") from exc
        if set(wire) != {"scheme", "ciphertext", "recipient_key_fingerprint"}:
            raise MalformedMessage("envelope has unexpected fields")
        if not isinstance(scheme, str) or not scheme:
            raise MalformedMessage("envelope scheme must be a non-empty string")
        return cls(scheme, b64decode(ciphertext), b64decode(fingerprint))


@dataclass(frozen=True)
class DetailedAddress:
    """The exact address; travels only inside sealed envelopes."""

    lines: tuple[str, ...]

    def __post_init__(self):
        if not self.lines or not all(isinstance(l, str) and l for l in self.lines):
            raise ValueError("address needs at least one non-empty line")

    def to_bytes(self) -> bytes:
        return json.dumps(list(self.lines), ensure_ascii=False,
                          separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_bytes(cls, data: bytes) -> "DetailedAddress":
        try:
            lines = json.loads(data.decode("utf-8"))
        except Exception as exc:
            raise DecryptionFailure(f"plaintext is not an address: {exc}") from exc
        if not isinstance(lines, list):
            raise DecryptionFailure("plaintext is not an address list")
        return cls(tuple(lines))


def _hkdf_bytes(seed: bytes, info: bytes, length: int) -> bytes:
    return HKDF(algorithm=hashes.SHA256(), length=length, salt=None,
                info=info).derive(seed)


def _scalar_from_seed(seed: bytes, info: bytes):
    raw = _hkdf_bytes(seed, info, 48)
    d = int.from_bytes(raw, "big") % (_P256_ORDER - 1) + 1
    return ec.derive_private_key(d, _CURVE)


def _load_public(public_key: bytes):
    try:
        return ec.EllipticCurvePublicKey.from_encoded_point(_CURVE, public_key)
    except Exception as exc:
        raise MalformedKey(f"not a valid public key: {exc}") from exc


def _derive_aes_key(shared: bytes, eph_pub: bytes, fingerprint: bytes) -> bytes:
    info = SEALED_ENVELOPE_V1.encode() + b";" + eph_pub + fingerprint
    return _hkdf_bytes(shared, info, 32)


class _SchemeV1:
    """P-256 ECDH + HKDF-SHA256 + AES-256-GCM."""

    @staticmethod
    def generate(seed: bytes | None = None) -> KeyPair:
        if seed is None:
            private = ec.generate_private_key(_CURVE)
        else:
            private = _scalar_from_seed(seed, b"sealed-envelope-v1;keygen")
        public_bytes = private.public_key().public_bytes(
            serialization.Encoding.X962,
            serialization.PublicFormat.UncompressedPoint,
        )
        private_bytes = private.private_bytes(
            serialization.Encoding.DER,
            serialization.PrivateFormat.PKCS8,
            serialization.NoEncryption(),
        )
        return KeyPair(SEALED_ENVELOPE_V1, public_bytes, private_bytes)

    @staticmethod
    def seal(plaintext: bytes, public_key: bytes, seed: bytes | None = None) -> bytes:
        recipient = _load_public(public_key)
        if seed is None:
            eph = ec.generate_private_key(_CURVE)
            nonce = os.urandom(_NONCE_LEN)
        else:
            # deterministic variant for reproducible transcripts/fixtures
            eph = _scalar_from_seed(seed, b"sealed-envelope-v1;eph")
            nonce = _hkdf_bytes(seed, b"sealed-envelope-v1;nonce", _NONCE_LEN)
        eph_pub = eph.public_key().public_bytes(
            serialization.Encoding.X962,
            serialization.PublicFormat.UncompressedPoint,
        )
        shared = eph.exchange(ec.ECDH(), recipient)
        fingerprint = key_fingerprint(public_key)
        key = _derive_aes_key(shared, eph_pub, fingerprint)
        ct = AESGCM(key).encrypt(nonce, plaintext, fingerprint)
        return eph_pub + nonce + ct

    @staticmethod
    def open(ciphertext: bytes, private_key: bytes, fingerprint: bytes) -> bytes:
        if len(ciphertext) < _POINT_LEN + _NONCE_LEN + 16:
            raise DecryptionFailure("ciphertext too short")
        eph_pub = ciphertext[:_POINT_LEN]
        nonce = ciphertext[_POINT_LEN:_POINT_LEN + _NONCE_LEN]
        body = ciphertext[_POINT_LEN + _NONCE_LEN:]
        try:
            private = serialization.load_der_private_key(private_key, password=None)
        except Exception as exc:
            raise MalformedKey(f"not a valid private key: {exc}") from exc
        try:
            eph = ec.EllipticCurvePublicKey.from_encoded_point(_CURVE, eph_pub)
        except Exception as exc:
            raise DecryptionFailure(f"bad ephemeral key: {exc}") from exc
        shared = private.exchange(ec.ECDH(), eph)
        key = _derive_aes_key(shared, eph_pub, fingerprint)
        try:
            return AESGCM(key).decrypt(nonce, body, fingerprint)
        except InvalidTag as exc:
            raise DecryptionFailure("wrong key or tampered ciphertext") from exc


SCHEMES: dict[str, type] = {SEALED_ENVELOPE_V1: _SchemeV1}


def register_scheme(scheme_id: str, impl) -> None:
    SCHEMES[scheme_id] = impl


def is_supported(scheme_id: str) -> bool:
    return scheme_id in SCHEMES


def _scheme(scheme_id: str):
    try:
        return SCHEMES[scheme_id]
    except KeyError:
        raise UnsupportedScheme(scheme_id) from None


def generate_keypair(scheme: str = SEALED_ENVELOPE_V1,
                     seed: bytes | None = None) -> KeyPair:
    return _scheme(scheme).generate(seed)


def seal(address: DetailedAddress, public_key: bytes,
         scheme: str = SEALED_ENVELOPE_V1, seed: bytes | None = None) -> SealedEnvelope:
    blob = _scheme(scheme).seal(address.to_bytes(), public_key, seed)
    return SealedEnvelope(scheme, blob, key_fingerprint(public_key))


def open_envelope(envelope: SealedEnvelope, keypair: KeyPair) -> DetailedAddress:
    if envelope.scheme != keypair.scheme:
        raise SchemeMismatch(f"{envelope.scheme} != {keypair.scheme}")
    if envelope.recipient_key_fingerprint != keypair.fingerprint:
        raise DecryptionFailure("envelope is addressed to a different key")
    impl = _scheme(envelope.scheme)
    plaintext = impl.open(envelope.ciphertext, keypair.private_key,
                          envelope.recipient_key_fingerprint)
    return DetailedAddress.from_bytes(plaintext)
