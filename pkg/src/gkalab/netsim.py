"""Deterministic, round-synchronous broadcast channel with an adversary hook.

Without a controller the channel is a plain broadcast medium. A controller
(the insider adversary) can be granted, per stage, the ability to suppress
traffic addressed to the victim and to divert the victim's own traffic to
itself; wherever it holds such a grant it may also inject envelopes that
claim any sender.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

from .errors import ConfigError, PolicyError
from .protocol import Outbound


class Rule(str, Enum):
    PASS = "pass"
    SUPPRESS_TO_VICTIM = "suppress_to_victim"
    REDIRECT_TO_ADVERSARY = "redirect_to_adversary"


class EventKind(str, Enum):
    SENT = "sent"
    DELIVERED = "delivered"
    SUPPRESSED = "suppressed"
    INJECTED = "injected"


@dataclass(frozen=True)
class Envelope:
    seq: int
    stage: int
    true_sender: int
    claimed_sender: int
    recipients: tuple[int, ...]
    payload: bytes

    @property
    def spoofed(self) -> bool:
        return self.true_sender != self.claimed_sender


@dataclass(frozen=True)
class Event:
    kind: EventKind
    time: int
    envelope: Envelope
    recipient: int | None = None

    def to_dict(self) -> dict:
        env = self.envelope
        return {
            "event": self.kind.value,
            "time": self.time,
            "seq": env.seq,
            "stage": env.stage,
            "true_sender": env.true_sender,
            "claimed_sender": env.claimed_sender,
            "recipients": list(env.recipients),
            "recipient": self.recipient,
            "payload": env.payload.hex(),
        }


@dataclass
class ChannelPolicy:
    controller: int | None = None
    victim: int | None = None
    rules: dict[int, frozenset[Rule]] = field(default_factory=dict)

    def rules_for(self, stage: int) -> frozenset[Rule]:
        if self.controller is None:
            return frozenset({Rule.PASS})
        return frozenset(self.rules.get(stage, {Rule.PASS}))

    def grants_injection(self, stage: int) -> bool:
        return self.controller is not None and self.rules_for(stage) != {Rule.PASS}

    def validate(self, members: Iterable[int]) -> None:
        members = set(members)
        if self.controller is not None and self.controller not in members:
            raise ConfigError(f"controller U_{self.controller} is not a known participant")
        if self.victim is not None and self.victim not in members:
            raise ConfigError(f"victim U_{self.victim} is not a known participant")
        if self.controller is not None and self.controller == self.victim:
            raise ConfigError("controller and victim must differ")
        active = {r for rs in self.rules.values() for r in rs} - {Rule.PASS}
        if active and (self.controller is None or self.victim is None):
            raise ConfigError("non-pass rules need both a controller and a victim")


class Transcript(list):
    """Ordered list of :class:`Event`; exported as JSON lines."""

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict()) + "\n" for e in self)

    def for_stage(self, stage: int) -> Transcript:
        return Transcript(e for e in self if e.envelope.stage == stage)

    def tally(self, kind: EventKind) -> int:
        return sum(1 for e in self if e.kind is kind)


Inbox = dict[int, list[Envelope]]


class Network:
    def __init__(self, members: Iterable[int], policy: ChannelPolicy | None = None):
        self.members = tuple(sorted(members))
        self.policy = policy or ChannelPolicy()
        self.policy.validate(self.members)
        self.transcript = Transcript()
        self.time = 0
        self.intercepted: list[Envelope] = []
        self._seq = 0
        self._queue: list[Envelope] = []
        self._injected: set[int] = set()

    def set_policy(self, policy: ChannelPolicy) -> None:
        policy.validate(self.members)
        self.policy = policy

    def _expand(self, claimed: int, recipients) -> tuple[int, ...]:
        if recipients is None:
            return tuple(i for i in self.members if i != claimed)
        unknown = set(recipients) - set(self.members)
        if unknown:
            raise ConfigError(f"unknown recipients {sorted(unknown)}")
        return tuple(recipients)

    def _envelope(self, stage, true_sender, claimed, recipients, payload) -> Envelope:
        env = Envelope(self._seq, stage, true_sender, claimed,
                       self._expand(claimed, recipients), bytes(payload))
        self._seq += 1
        return env

    def send(self, sender: int, stage: int, messages: Iterable[Outbound]) -> None:
        if sender not in self.members:
            raise ConfigError(f"unknown sender U_{sender}")
        for msg in messages:
            env = self._envelope(stage, sender, sender, msg.recipients, msg.payload)
            self.transcript.append(Event(EventKind.SENT, self.time, env))
            self._queue.append(env)

    def inject(self, adversary: int, stage: int, claimed_sender: int, recipients,
               payload: bytes) -> None:
        if adversary != self.policy.controller or not self.policy.grants_injection(stage):
            raise PolicyError(f"U_{adversary} holds no injection grant for stage {stage}")
        if claimed_sender not in self.members:
            raise ConfigError(f"unknown claimed sender U_{claimed_sender}")
        env = self._envelope(stage, adversary, claimed_sender, recipients, payload)
        self.transcript.append(Event(EventKind.INJECTED, self.time, env))
        self._injected.add(env.seq)
        self._queue.append(env)

    def flush(self) -> Inbox:
        """Route every queued envelope according to the policy."""
        inboxes: Inbox = {i: [] for i in self.members}
        pol = self.policy
        for env in self._queue:
            rules = pol.rules_for(env.stage)
            diverted = Rule.REDIRECT_TO_ADVERSARY in rules and env.true_sender == pol.victim
            if diverted:
                self.intercepted.append(env)
            for r in env.recipients:
                if env.seq in self._injected:
                    blocked = False
                elif diverted:
                    blocked = True
                else:
                    blocked = Rule.SUPPRESS_TO_VICTIM in rules and r == pol.victim
                kind = EventKind.SUPPRESSED if blocked else EventKind.DELIVERED
                self.transcript.append(Event(kind, self.time, env, r))
                if not blocked:
                    inboxes[r].append(env)
        self._queue.clear()
        return inboxes

    def schedule_round(
        self,
        stage: int,
        outbound: Mapping[int, list[Outbound]],
        deferred: Mapping[int, Callable[[list[Envelope]], list[Outbound]]] | None = None,
    ) -> Inbox:
        """Run one logical round and return each member's inbox.

        Everything in ``outbound`` is delivered first. Each callback in
        ``deferred`` then sees its owner's inbox and returns further messages
        (it may also call :meth:`inject`); those go out in a second delivery
        within the same round.
        """
        deferred = deferred or {}
        for sender in sorted(outbound):
            self.send(sender, stage, outbound[sender])
        inboxes = self.flush()
        for sender in sorted(deferred):
            self.send(sender, stage, deferred[sender](list(inboxes[sender])))
        if deferred:
            for r, envs in self.flush().items():
                inboxes[r].extend(envs)
        self.time += 1
        return inboxes


def as_pairs(envelopes: Iterable[Envelope]) -> list[tuple[int, bytes]]:
    """Inbox view handed to a participant: (claimed sender, payload)."""
    return [(e.claimed_sender, e.payload) for e in envelopes]
