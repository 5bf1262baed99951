"""A simulated group session: tokens, participants and the channel they share."""

from __future__ import annotations

import random
from typing import Callable, Iterable

from .netsim import Envelope, Network, as_pairs
from .protocol import GroupRoster, Outbound, Participant, Stage, Variant
from .scheme import SchemeParams, mrc_setup


class Session:
    """Owns every participant and the network; steps them round by round.

    All randomness descends from one ``random.Random(seed)``: first the
    registration centre's seed, then one child seed per roster member in
    roster order. Anything drawn later from :attr:`rng` (attack choices, for
    instance) does not disturb the participants' streams.
    """

    def __init__(self, params: SchemeParams, roster, variant, seed: int):
        self.params = params
        self.roster = roster if isinstance(roster, GroupRoster) else GroupRoster.of(roster)
        self.roster.check_against(params.n)
        self.variant = Variant(variant)
        self.seed = seed
        self.rng = random.Random(seed)
        self.master, self.tokens = mrc_setup(params, self.rng.getrandbits(64))
        self.participants: dict[int, Participant] = {}
        for i in self.roster:
            child = random.Random(self.rng.getrandbits(64))
            self.participants[i] = Participant(self.tokens[i - 1], self.roster, self.variant, child)
        self.network = Network(self.roster.members)
        self.inboxes: dict[int, dict[int, list[Envelope]]] = {}
        self.adversary_state = None

    def __getitem__(self, i: int) -> Participant:
        return self.participants[i]

    @property
    def p(self) -> int:
        return self.params.p

    def _round(self, stage: int, outbound: dict[int, list[Outbound]], deferred=None):
        inboxes = self.network.schedule_round(stage, outbound, deferred)
        for i, envs in inboxes.items():
            self.inboxes.setdefault(stage, {}).setdefault(i, []).extend(envs)
        return inboxes

    def run_stage1(self) -> None:
        for part in self.participants.values():
            part.stage1_derive_keys()

    def run_stage2(self, tamper: Callable[[int, list[Outbound]], list[Outbound]] | None = None) -> None:
        """Nonce round then tag round.

        ``tamper`` (tests only) may rewrite a sender's tag messages before
        they reach the channel.
        """
        ps = self.participants
        inboxes = self._round(2, {i: ps[i].stage2_nonce() for i in ps})
        tags = {i: ps[i].stage2_tags(as_pairs(inboxes[i])) for i in ps}
        if tamper is not None:
            tags = {i: tamper(i, msgs) for i, msgs in tags.items()}
        inboxes = self._round(2, tags)
        for i in ps:
            ps[i].stage2_verify(as_pairs(inboxes[i]))

    def run_stage3(self, deferred: dict | None = None, defer_unicasts: Iterable[int] = (),
                   tamper=None) -> None:
        ps = self.participants
        late = set(defer_unicasts)
        outbound = {i: ps[i].stage3_contribute(defer_unicasts=i in late) for i in ps}
        if tamper is not None:
            outbound = {i: tamper(i, msgs) for i, msgs in outbound.items()}
        inboxes = self._round(3, outbound, deferred)
        for i in ps:
            if ps[i].stage is Stage.AUTHED:
                ps[i].stage3_finalize(as_pairs(inboxes[i]))

    def run_stage4(self, deferred: dict | None = None) -> None:
        ps = self.participants
        inboxes = self._round(4, {i: ps[i].stage4_confirm() for i in ps}, deferred)
        for i in ps:
            ps[i].stage4_verify(as_pairs(inboxes[i]))

    def run_until_authed(self) -> None:
        self.run_stage1()
        self.run_stage2()

    def run_honest(self) -> None:
        self.run_until_authed()
        self.run_stage3()
        self.run_stage4()

    def keys(self) -> dict[int, object]:
        return {i: part.K for i, part in self.participants.items()}

    def verdicts(self) -> dict[int, str]:
        return {i: part.verdict_label for i, part in self.participants.items()}

    def view(self, i: int, stage: int) -> list[tuple[int, bytes]]:
        """What member ``i`` received in ``stage``, ordered by claimed sender."""
        return sorted(as_pairs(self.inboxes.get(stage, {}).get(i, [])))
