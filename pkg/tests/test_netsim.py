import json

import pytest

from gkalab.errors import ConfigError, PolicyError
from gkalab.netsim import ChannelPolicy, EventKind, Network, Rule
from gkalab.protocol import Outbound, Stage
from gkalab.scheme import SchemeParams
from gkalab.session import Session


def bcast(tag=b"x"):
    return [Outbound(None, tag)]


def test_honest_pass_through():
    net = Network([1, 2, 3, 4])
    inboxes = net.schedule_round(2, {1: bcast(), 2: bcast(), 3: bcast()})
    assert len(inboxes[4]) == 3
    assert [len(inboxes[i]) for i in (1, 2, 3)] == [2, 2, 2]
    assert net.transcript.tally(EventKind.SUPPRESSED) == 0
    assert net.transcript.tally(EventKind.DELIVERED) == 9


def test_suppress_to_victim():
    pol = ChannelPolicy(controller=1, victim=3, rules={4: frozenset({Rule.SUPPRESS_TO_VICTIM})})
    net = Network([1, 2, 3, 4], pol)
    inboxes = net.schedule_round(4, {i: bcast() for i in (1, 2, 4)})
    assert inboxes[3] == []
    suppressed = [e for e in net.transcript if e.kind is EventKind.SUPPRESSED]
    assert len(suppressed) == 3 and all(e.recipient == 3 for e in suppressed)
    # other stages untouched
    assert len(net.schedule_round(3, {2: bcast()})[3]) == 1


def test_redirect_victim_traffic():
    pol = ChannelPolicy(controller=1, victim=3, rules={4: frozenset({Rule.REDIRECT_TO_ADVERSARY})})
    net = Network([1, 2, 3], pol)
    inboxes = net.schedule_round(4, {3: bcast(b"v"), 2: bcast(b"w")})
    assert [e.payload for e in inboxes[1]] == [b"w"]
    assert [e.payload for e in net.intercepted] == [b"v"]


def test_injection_attributed_to_claimed_sender():
    pol = ChannelPolicy(controller=1, victim=3, rules={4: frozenset({Rule.SUPPRESS_TO_VICTIM})})
    net = Network([1, 2, 3, 4], pol)

    def inject(inbox):
        net.inject(1, 4, 3, None, b"fake")
        net.inject(1, 4, 2, (3,), b"to-victim")
        return []

    inboxes = net.schedule_round(4, {}, deferred={1: inject})
    assert [(e.claimed_sender, e.payload) for e in inboxes[2]] == [(3, b"fake")]
    assert [(e.claimed_sender, e.true_sender) for e in inboxes[3]] == [(2, 1)]
    injected = [e for e in net.transcript if e.kind is EventKind.INJECTED]
    assert all(e.envelope.spoofed for e in injected)


def test_injection_needs_grant():
    net = Network([1, 2, 3])
    with pytest.raises(PolicyError):
        net.inject(1, 4, 2, None, b"x")
    net.set_policy(ChannelPolicy(controller=1, victim=2, rules={4: frozenset({Rule.SUPPRESS_TO_VICTIM})}))
    with pytest.raises(PolicyError):
        net.inject(1, 3, 2, None, b"x")
    with pytest.raises(PolicyError):
        net.inject(3, 4, 2, None, b"x")


@pytest.mark.parametrize("policy", [
    ChannelPolicy(controller=9),
    ChannelPolicy(controller=1, victim=9),
    ChannelPolicy(controller=1, victim=1),
    ChannelPolicy(rules={4: frozenset({Rule.SUPPRESS_TO_VICTIM})}),
])
def test_policy_unknown_ids(policy):
    with pytest.raises(ConfigError):
        Network([1, 2, 3], policy)


def test_unknown_sender_or_recipient():
    net = Network([1, 2])
    with pytest.raises(ConfigError):
        net.send(5, 2, bcast())
    with pytest.raises(ConfigError):
        net.send(1, 2, [Outbound((7,), b"x")])


def test_honest_envelopes_not_spoofed():
    s = Session(SchemeParams(1009, 12, 2, 4), [1, 2, 3, 4], "chh", 3)
    s.run_honest()
    for ev in s.network.transcript:
        if ev.kind is EventKind.SENT:
            assert not ev.envelope.spoofed


def accounting_ok(transcript):
    issued = {}
    accounted = {}
    for ev in transcript:
        env = ev.envelope
        if ev.kind in (EventKind.SENT, EventKind.INJECTED):
            issued[env.seq] = set(env.recipients)
            accounted[env.seq] = set()
        else:
            assert env.seq in issued, "delivery without a prior send"
            accounted[env.seq].add(ev.recipient)
    return all(accounted[s] == issued[s] for s in issued)


@pytest.mark.parametrize("variant", ["chh", "hhxzz-a", "hhxzz-b"])
def test_conservation_in_attacked_run(variant):
    from gkalab.attacks import plan_for, run_attack
    s = Session(SchemeParams(1009, 12, 2, 4), [2, 4, 6, 8, 10], variant, 17)
    run_attack(s, plan_for(s))
    assert accounting_ok(s.network.transcript)


def test_transcript_determinism():
    def run(seed):
        s = Session(SchemeParams(1009, 12, 2, 4), [1, 2, 3, 4, 5], "hhxzz-b", seed)
        s.run_honest()
        return s.network.transcript.to_jsonl()

    assert run(21) == run(21)
    assert run(21) != run(22)


def test_jsonl_field_order():
    net = Network([1, 2])
    net.schedule_round(2, {1: bcast(b"\x01")})
    first = json.loads(net.transcript.to_jsonl().splitlines()[0])
    assert list(first) == ["event", "time", "seq", "stage", "true_sender", "claimed_sender",
                           "recipients", "recipient", "payload"]
    assert first["payload"] == "01"


def direct_run(session):
    """Drive the participants by handing payloads over directly, no Network."""
    ps = session.participants

    def exchange(outbound):
        inbox = {i: [] for i in ps}
        for sender, msgs in outbound.items():
            for msg in msgs:
                for r in (msg.recipients or [j for j in ps if j != sender]):
                    inbox[r].append((sender, msg.payload))
        return inbox

    for part in ps.values():
        part.stage1_derive_keys()
    inbox = exchange({i: ps[i].stage2_nonce() for i in ps})
    inbox = exchange({i: ps[i].stage2_tags(inbox[i]) for i in ps})
    for i in ps:
        ps[i].stage2_verify(inbox[i])
    inbox = exchange({i: ps[i].stage3_contribute() for i in ps})
    for i in ps:
        ps[i].stage3_finalize(inbox[i])
    inbox = exchange({i: ps[i].stage4_confirm() for i in ps})
    for i in ps:
        ps[i].stage4_verify(inbox[i])


@pytest.mark.parametrize("variant", ["chh", "hhxzz-a", "hhxzz-b"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_null_adversary_equivalence(variant, seed):
    params = SchemeParams(1009, 12, 2, 4)
    simulated = Session(params, [1, 5, 6, 11], variant, seed)
    simulated.run_honest()
    direct = Session(params, [1, 5, 6, 11], variant, seed)
    direct_run(direct)
    assert simulated.keys() == direct.keys()
    assert simulated.verdicts() == direct.verdicts()
    assert {i: p.L for i, p in simulated.participants.items()} == \
        {i: p.L for i, p in direct.participants.items()}
    assert all(p.stage is Stage.CONFIRMED for p in direct.participants.values())
