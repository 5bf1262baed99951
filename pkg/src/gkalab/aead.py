"""Authenticated encryption for stage-3 contributions.

Contract: each unordered pair derives its own key from ``k_ij``; every
message carries a fresh 96-bit nonce; associated data binds sender,
recipient, roster and stage; any modification of nonce, ciphertext or
associated data is rejected with ``AuthError``.

The reference construction is AES-256-GCM with caller-supplied nonces, so
transcripts are reproducible when the nonces come from a seeded generator.
"""

import hashlib

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .errors import AuthError
from .gfpoly import fe_encode

AEAD_NAME = "AES-256-GCM"
NONCE_SIZE = 12
TAG_SIZE = 16


def derive_key(k_ij: int, p: int) -> bytes:
    return hashlib.sha256(fe_encode(k_ij, p) + b"enc").digest()


def seal(key: bytes, nonce: bytes, plaintext: bytes, ad: bytes) -> bytes:
    if len(nonce) != NONCE_SIZE:
        raise ValueError(f"nonce must be {NONCE_SIZE} bytes")
    return nonce + AESGCM(key).encrypt(nonce, plaintext, ad)


def open_sealed(key: bytes, blob: bytes, ad: bytes) -> bytes:
    if len(blob) < NONCE_SIZE + TAG_SIZE:
        raise AuthError("sealed blob too short")
    try:
        return AESGCM(key).decrypt(blob[:NONCE_SIZE], blob[NONCE_SIZE:], ad)
    except InvalidTag as exc:
        raise AuthError("authentication failed") from exc
