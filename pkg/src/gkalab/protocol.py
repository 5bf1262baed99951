"""Participant state machines for the operational stages 1-4.

A :class:`Participant` is single-owner and is stepped by a scheduler. Every
step that talks to peers returns a list of :class:`Outbound` messages; every
step that listens takes an inbox, an iterable of ``(claimed_sender,
payload)`` pairs.

Wire layout of every payload::

    tag (1) | sender id (2, big-endian) | roster hash (8) | body

Stage tags: ``0x21`` auth nonce, ``0x22`` auth tags, ``0x31`` cleartext
opener, ``0x32`` sealed contribution, ``0x41`` key confirmation.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from . import aead
from .errors import ArityError, AuthError, DomainError, LengthMismatch
from .gfpoly import encode_width, fe_decode, fe_encode, xor_all
from .scheme import Token, derive_pairwise_key

HASH_NAME = "sha256"

TAG_AUTH_NONCE = 0x21
TAG_AUTH_TAGS = 0x22
TAG_OPENER = 0x31
TAG_CONTRIB = 0x32
TAG_CONFIRM = 0x41

HEADER_SIZE = 11
AUTH_NONCE_SIZE = 16
DIGEST_SIZE = 32


def H(*parts: bytes) -> bytes:
    return hashlib.sha256(b"".join(parts)).digest()


class Variant(str, Enum):
    CHH_XOR = "chh"
    HHXZZ_SUM = "hhxzz-a"
    HHXZZ_PROD = "hhxzz-b"


class Stage(str, Enum):
    IDLE = "Idle"
    AUTHED = "Authed"
    KEYED = "Keyed"
    CONFIRMED = "Confirmed"
    FAILED = "Failed"


_ORDER = [Stage.IDLE, Stage.AUTHED, Stage.KEYED, Stage.CONFIRMED]


@dataclass(frozen=True)
class GroupRoster:
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(int(i) for i in self.members)
        object.__setattr__(self, "members", members)
        if len(members) < 2:
            raise ValueError("a group needs at least two members")
        if any(a >= b for a, b in zip(members, members[1:])):
            raise ValueError("roster ids must be strictly increasing")
        if members[0] < 1:
            raise ValueError("participant ids start at 1")

    @classmethod
    def of(cls, ids: Iterable[int]) -> GroupRoster:
        return cls(tuple(sorted(set(ids))))

    def check_against(self, n: int) -> None:
        if len(self.members) > n or self.members[-1] > n:
            raise ValueError(f"roster {list(self.members)} does not fit n = {n}")

    @property
    def m(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, i) -> bool:
        return i in self.members

    def __len__(self) -> int:
        return len(self.members)

    def to_bytes(self) -> bytes:
        return b"".join(i.to_bytes(2, "big") for i in self.members)

    @property
    def digest(self) -> bytes:
        return H(self.to_bytes())[:8]


class Outbound(NamedTuple):
    recipients: tuple[int, ...] | None  # None means broadcast to the group
    payload: bytes


def pack(tag: int, sender: int, roster: GroupRoster, body: bytes) -> bytes:
    return bytes([tag]) + sender.to_bytes(2, "big") + roster.digest + body


def unpack(payload: bytes) -> tuple[int, int, bytes, bytes]:
    if len(payload) < HEADER_SIZE:
        raise ValueError("payload shorter than header")
    return payload[0], int.from_bytes(payload[1:3], "big"), payload[3:11], payload[11:]


def contribution_domain_ok(variant: Variant, q: int, p: int) -> bool:
    if variant is Variant.HHXZZ_PROD:
        return 1 <= q < p
    return 0 <= q < p


def sample_contribution(variant: Variant, p: int, rng: random.Random) -> int:
    if variant is Variant.HHXZZ_PROD:
        return rng.randrange(1, p)
    return rng.randrange(p)


def combine_key(variant: Variant, contributions: Sequence, p: int, m: int | None = None):
    """Fold the group contributions into the group key.

    CHH contributions may be ints (encoded first) or already-encoded byte
    strings; the key is their XOR. The HHXZZ variants return a field element.
    """
    variant = Variant(variant)
    if not contributions or (m is not None and len(contributions) != m):
        raise ArityError(f"expected {m} contributions, got {len(contributions)}")
    if variant is Variant.CHH_XOR:
        w = encode_width(p)
        chunks = [c if isinstance(c, bytes) else fe_encode(c, p) for c in contributions]
        if any(len(c) != w for c in chunks):
            raise LengthMismatch(f"CHH contributions must be {w} bytes wide")
        return xor_all(chunks)
    if variant is Variant.HHXZZ_SUM:
        return sum(contributions) % p
    if any(c % p == 0 for c in contributions):
        raise DomainError("product combiner needs nonzero contributions")
    K = 1
    for c in contributions:
        K = K * c % p
    return K


def key_bytes(K, p: int) -> bytes:
    return K if isinstance(K, bytes) else fe_encode(K, p)


def confirmation_tag(K, L: int, p: int) -> bytes:
    return H(key_bytes(K, p), fe_encode(L, p))


def confirmation_payload(sender: int, roster: GroupRoster, K, L: int, p: int) -> bytes:
    """The stage-4 broadcast ``H(K || L)`` as ``sender`` would emit it."""
    return pack(TAG_CONFIRM, sender, roster, confirmation_tag(K, L, p))


def contribution_ad(sender: int, recipient: int, roster: GroupRoster) -> bytes:
    return (
        bytes([TAG_CONTRIB])
        + sender.to_bytes(2, "big")
        + recipient.to_bytes(2, "big")
        + roster.to_bytes()
    )


def auth_tag(k_ij: int, p: int, roster: GroupRoster, r_from: bytes, r_to: bytes,
             sender: int, receiver: int) -> bytes:
    direction = b"\x01" if sender < receiver else b"\x02"
    return H(fe_encode(k_ij, p), roster.to_bytes(), r_from, r_to, direction)


class Participant:
    """One group member's view of a session."""

    def __init__(self, token: Token, roster: GroupRoster, variant: Variant,
                 rng: random.Random):
        if token.owner not in roster:
            raise ValueError(f"U_{token.owner} is not in the roster")
        self.id = token.owner
        self.token = token
        self.p = token.p
        self.roster = roster
        self.variant = Variant(variant)
        self.rng = rng
        self.stage = Stage.IDLE
        self.failure: str | None = None
        self.pairwise_keys: dict[int, int] = {}
        self.nonce: bytes | None = None
        self.peer_nonces: dict[int, bytes] = {}
        self.q: int | None = None
        self.opener: int | None = None
        self.openers: dict[int, int] = {}
        self.received_q: dict[int, object] = {}
        self._seal_nonces: dict[int, bytes] = {}
        self.L: int | None = None
        self.K = None
        self.verdict: Stage | None = None
        self.emitted: set[int] = set()

    def __repr__(self):
        return f"<Participant U_{self.id} {self.stage.value}>"

    @property
    def peers(self) -> list[int]:
        return [j for j in self.roster if j != self.id]

    @property
    def failed(self) -> bool:
        return self.stage is Stage.FAILED

    def _advance(self, to: Stage) -> None:
        if self.failed:
            return
        if _ORDER.index(to) != _ORDER.index(self.stage) + 1:
            raise RuntimeError(f"illegal transition {self.stage.value} -> {to.value}")
        self.stage = to

    def _fail(self, reason: str) -> None:
        if not self.failed:
            self.stage = Stage.FAILED
            self.failure = reason

    def _collect(self, inbox, tag: int) -> dict[int, bytes] | None:
        """Bodies of well-formed ``tag`` messages keyed by sender; None on duplicates."""
        out: dict[int, bytes] = {}
        for claimed, payload in inbox:
            try:
                ptag, sender, digest, body = unpack(payload)
            except ValueError:
                continue
            if ptag != tag or sender != claimed or digest != self.roster.digest:
                continue
            if sender not in self.roster or sender == self.id:
                continue
            if sender in out:
                return None
            out[sender] = body
        return out

    def _emit(self, tag: int, recipients, body: bytes) -> Outbound:
        self.emitted.add(tag)
        return Outbound(recipients, pack(tag, self.id, self.roster, body))

    # stage 1

    def stage1_derive_keys(self) -> dict[int, int]:
        for j in self.peers:
            self.pairwise_keys[j] = derive_pairwise_key(self.token, j).k
        return dict(self.pairwise_keys)

    # stage 2

    def stage2_nonce(self) -> list[Outbound]:
        if self.failed:
            return []
        if set(self.pairwise_keys) != set(self.peers):
            self.stage1_derive_keys()
        self.nonce = self.rng.randbytes(AUTH_NONCE_SIZE)
        return [self._emit(TAG_AUTH_NONCE, None, self.nonce)]

    def stage2_tags(self, inbox) -> list[Outbound]:
        if self.failed:
            return []
        got = self._collect(inbox, TAG_AUTH_NONCE)
        if got is None:
            self._fail("auth")
            return []
        if set(got) != set(self.peers):
            self._fail("auth-timeout")
            return []
        if any(len(r) != AUTH_NONCE_SIZE for r in got.values()):
            self._fail("auth")
            return []
        self.peer_nonces = got
        body = b"".join(
            j.to_bytes(2, "big")
            + auth_tag(self.pairwise_keys[j], self.p, self.roster, self.nonce,
                       self.peer_nonces[j], self.id, j)
            for j in self.peers
        )
        return [self._emit(TAG_AUTH_TAGS, None, body)]

    def stage2_verify(self, inbox) -> Stage:
        if self.failed:
            return self.stage
        got = self._collect(inbox, TAG_AUTH_TAGS)
        if got is None:
            self._fail("auth")
            return self.stage
        if set(got) != set(self.peers):
            self._fail("auth-timeout")
            return self.stage
        entry = 2 + DIGEST_SIZE
        for j, body in got.items():
            tags = {
                int.from_bytes(body[o:o + 2], "big"): body[o + 2:o + entry]
                for o in range(0, len(body) - entry + 1, entry)
            }
            expected = auth_tag(self.pairwise_keys[j], self.p, self.roster,
                                self.peer_nonces[j], self.nonce, j, self.id)
            if tags.get(self.id) != expected:
                self._fail("auth")
                return self.stage
        self._advance(Stage.AUTHED)
        return self.stage

    # stage 3

    def stage3_contribute(self, defer_unicasts: bool = False) -> list[Outbound]:
        """Sample ``q`` and the cleartext opener; emit the opener and sealed ``q``.

        With ``defer_unicasts`` only the opener is emitted and the sealed
        contributions are left for a later :meth:`stage3_seal` call.
        """
        if self.stage is not Stage.AUTHED:
            return []
        self.q = sample_contribution(self.variant, self.p, self.rng)
        self.opener = self.rng.randrange(self.p)
        # Nonces are drawn up front so the transcript does not depend on when
        # the unicasts leave.
        self._seal_nonces = {j: self.rng.randbytes(aead.NONCE_SIZE) for j in self.peers}
        out = [self._emit(TAG_OPENER, None, fe_encode(self.opener, self.p))]
        if not defer_unicasts:
            out += self.stage3_seal()
        return out

    def stage3_seal(self, overrides: dict[int, bytes] | None = None) -> list[Outbound]:
        """Sealed unicasts of ``fe_encode(q)``, or of ``overrides[j]`` for peer j."""
        overrides = overrides or {}
        out = []
        plain = fe_encode(self.q, self.p)
        for j in self.peers:
            key = aead.derive_key(self.pairwise_keys[j], self.p)
            ad = contribution_ad(self.id, j, self.roster)
            blob = aead.seal(key, self._seal_nonces[j], overrides.get(j, plain), ad)
            out.append(self._emit(TAG_CONTRIB, (j,), blob))
        return out

    def stage3_finalize(self, inbox) -> Stage:
        if self.stage is not Stage.AUTHED:
            return self.stage
        inbox = list(inbox)
        openers = self._collect(inbox, TAG_OPENER)
        sealed = self._collect(inbox, TAG_CONTRIB)
        if openers is None or sealed is None:
            self._fail("decrypt")
            return self.stage
        if set(openers) != set(self.peers) or set(sealed) != set(self.peers):
            self._fail("ke-timeout")
            return self.stage
        w = encode_width(self.p)
        received = {}
        for j in self.peers:
            key = aead.derive_key(self.pairwise_keys[j], self.p)
            try:
                plain = aead.open_sealed(key, sealed[j], contribution_ad(j, self.id, self.roster))
            except AuthError:
                self._fail("decrypt")
                return self.stage
            if len(plain) != w or len(openers[j]) != w:
                self._fail("decrypt")
                return self.stage
            if self.variant is Variant.CHH_XOR:
                # XOR works on bit strings; no range check on purpose.
                received[j] = plain
            else:
                q = int.from_bytes(plain, "big")
                if not contribution_domain_ok(self.variant, q, self.p):
                    self._fail("domain")
                    return self.stage
                received[j] = q
            try:
                self.openers[j] = fe_decode(openers[j], self.p)
            except ValueError:
                self._fail("decrypt")
                return self.stage
        self.received_q = received
        self.L = (self.opener + sum(self.openers.values())) % self.p
        contributions = [self.q if i == self.id else received[i] for i in self.roster]
        self.K = combine_key(self.variant, contributions, self.p, m=self.roster.m)
        self._advance(Stage.KEYED)
        return self.stage

    # stage 4

    def stage4_confirm(self) -> list[Outbound]:
        if self.stage is not Stage.KEYED:
            return []
        return [self._emit(TAG_CONFIRM, None, confirmation_tag(self.K, self.L, self.p))]

    def stage4_verify(self, inbox) -> Stage:
        if self.stage is not Stage.KEYED:
            self.verdict = self.stage
            return self.stage
        got = self._collect(inbox, TAG_CONFIRM)
        if got is None:
            self._fail("confirm")
        elif set(got) != set(self.peers):
            self._fail("confirm-timeout")
        else:
            mine = confirmation_tag(self.K, self.L, self.p)
            if all(tag == mine for tag in got.values()):
                self._advance(Stage.CONFIRMED)
            else:
                self._fail("confirm")
        self.verdict = self.stage
        return self.stage

    @property
    def verdict_label(self) -> str:
        if self.stage is Stage.FAILED:
            return f"Failed({self.failure})"
        return self.stage.value
