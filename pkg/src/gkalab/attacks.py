"""Insider victim-substitution attacks against the three key combiners.

The adversary ``U_k`` is an ordinary roster member. In stage 3 it holds its
sealed contribution back until it has every other member's value, works out
the correct key ``K``, then sends its honest ``q_k`` to everyone except the
victim and a forged value to the victim so the victim combines ``K*``. No
channel control is needed for that step. In stage 4 it suppresses the
confirmation traffic to and from the victim and replays the tags each side
expects: ``H(K || L)`` in the victim's name to the others, ``H(K* || L)`` in
each peer's name to the victim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ConfigError, DomainError, LengthMismatch
from .gfpoly import encode_width, fe_encode, fe_inv, xor_bytes
from .netsim import ChannelPolicy, Envelope, EventKind, Rule
from .protocol import Stage, Variant, combine_key, confirmation_payload
from .report import RunReport, build_report
from .session import Session

GroupKey = Union[bytes, int]


@dataclass(frozen=True)
class AttackPlan:
    adversary: int
    victim: int
    target_key: GroupKey
    variant: Variant
    stage4_masquerade: bool = True
    literal_sum_formula: bool = False

    def validate(self, roster, p: int) -> None:
        if self.adversary not in roster:
            raise ConfigError(f"adversary U_{self.adversary} must be a roster member")
        if self.victim not in roster:
            raise ConfigError(f"victim U_{self.victim} must be a roster member")
        if self.adversary == self.victim:
            raise ConfigError("victim and adversary must differ")
        check_target(Variant(self.variant), self.target_key, p)
        if self.literal_sum_formula and Variant(self.variant) is not Variant.HHXZZ_SUM:
            raise ConfigError("the literal formula only applies to the sum combiner")


def check_target(variant: Variant, K_star, p: int) -> None:
    if variant is Variant.CHH_XOR:
        if not isinstance(K_star, bytes) or len(K_star) != encode_width(p):
            raise DomainError(f"CHH target key must be {encode_width(p)} bytes")
        return
    if isinstance(K_star, bytes) or not isinstance(K_star, int):
        raise DomainError("HHXZZ target key must be a field element")
    lo = 1 if variant is Variant.HHXZZ_PROD else 0
    if not lo <= K_star < p:
        raise DomainError(f"target key {K_star} outside [{lo}, {p})")


def random_target(variant: Variant, p: int, rng) -> GroupKey:
    variant = Variant(variant)
    if variant is Variant.CHH_XOR:
        return rng.randbytes(encode_width(p))
    if variant is Variant.HHXZZ_PROD:
        return rng.randrange(1, p)
    return rng.randrange(p)


def forge_q_chh(q_k: bytes, K: bytes, K_star: bytes) -> bytes:
    if not len(q_k) == len(K) == len(K_star):
        raise LengthMismatch("q_k, K and K* must have equal widths")
    return xor_bytes(xor_bytes(q_k, K), K_star)


def forge_q_sum(q_k: int, K: int, K_star: int, p: int) -> int:
    return (q_k - K + K_star) % p


def forge_q_sum_literal(q_k: int, K: int, K_star: int, p: int) -> int:
    """Sum forgery with ``+K`` in place of ``-K``; the victim ends up at ``2K + K*``."""
    return (q_k + K + K_star) % p


def forge_q_prod(q_k: int, K: int, K_star: int, p: int) -> int:
    if q_k % p == 0 or K_star % p == 0:
        raise DomainError("product forgery needs nonzero q_k and K*")
    return q_k * fe_inv(K, p) * K_star % p


@dataclass
class AdversaryState:
    """What the insider knows once its forged contribution is out."""

    plan: AttackPlan
    K: GroupKey
    K_star: GroupKey
    forged: bytes
    L: int


def forged_plaintext(plan: AttackPlan, q_k: int, K, p: int) -> bytes:
    variant = Variant(plan.variant)
    if variant is Variant.CHH_XOR:
        return forge_q_chh(fe_encode(q_k, p), K, plan.target_key)
    if variant is Variant.HHXZZ_SUM:
        forge = forge_q_sum_literal if plan.literal_sum_formula else forge_q_sum
        return fe_encode(forge(q_k, K, plan.target_key, p), p)
    return fe_encode(forge_q_prod(q_k, K, plan.target_key, p), p)


def plan_for(session: Session, adversary=None, victim=None, target="random",
             stage4_masquerade=True, literal_sum_formula=False) -> AttackPlan:
    """Fill the unspecified parts of a plan from the session's generator.

    Draw order is fixed (adversary, victim, target) so equal seeds give
    equal plans.
    """
    rng = session.rng
    members = list(session.roster)
    pick_adv = rng.choice([i for i in members if i != victim])
    adversary = pick_adv if adversary is None else adversary
    pick_vic = rng.choice([i for i in members if i != adversary])
    victim = pick_vic if victim is None else victim
    drawn = random_target(session.variant, session.p, rng)
    K_star = drawn if target in (None, "random") else target
    plan = AttackPlan(adversary, victim, K_star, session.variant, stage4_masquerade,
                      literal_sum_formula)
    plan.validate(session.roster, session.p)
    return plan


def run_stage3_attack(session: Session, plan: AttackPlan) -> RunReport:
    """Stage 3 with the forged contribution; the channel stays pass-through."""
    plan.validate(session.roster, session.p)
    if Variant(plan.variant) is not session.variant:
        raise ConfigError("plan variant differs from the session variant")
    if any(part.stage is not Stage.AUTHED for part in session.participants.values()):
        raise ConfigError("every roster member must have completed group authentication")
    adv = session[plan.adversary]
    p = session.p

    def release(inbox: list[Envelope]):
        adv.stage3_finalize([(e.claimed_sender, e.payload) for e in inbox])
        if adv.stage is not Stage.KEYED:
            return adv.stage3_seal()
        forged = forged_plaintext(plan, adv.q, adv.K, p)
        session.adversary_state = AdversaryState(plan, adv.K, plan.target_key, forged, adv.L)
        return adv.stage3_seal({plan.victim: forged})

    session.adversary_state = None
    session.run_stage3(deferred={plan.adversary: release}, defer_unicasts=[plan.adversary])
    return build_report(session, "attack", plan)


def run_stage4_masquerade(session: Session, plan: AttackPlan) -> RunReport:
    """Stage 4, with the adversary controlling the victim's traffic when the plan says so."""
    state = session.adversary_state
    if state is None:
        raise ConfigError("run_stage3_attack must precede the confirmation attack")
    adv, victim = plan.adversary, plan.victim
    deferred = None
    if plan.stage4_masquerade:
        session.network.set_policy(ChannelPolicy(
            controller=adv,
            victim=victim,
            rules={4: frozenset({Rule.SUPPRESS_TO_VICTIM, Rule.REDIRECT_TO_ADVERSARY})},
        ))
        roster, p, net = session.roster, session.p, session.network

        def masquerade(inbox):
            net.inject(adv, 4, victim, None,
                       confirmation_payload(victim, roster, state.K, state.L, p))
            for j in roster:
                if j != victim:
                    net.inject(adv, 4, j, (victim,),
                               confirmation_payload(j, roster, state.K_star, state.L, p))
            return []

        deferred = {adv: masquerade}
    session.run_stage4(deferred)
    return build_report(session, "attack", plan)


def run_attack(session: Session, plan: AttackPlan) -> RunReport:
    session.run_until_authed()
    run_stage3_attack(session, plan)
    return run_stage4_masquerade(session, plan)


def stage3_untouched(session: Session) -> bool:
    t = session.network.transcript.for_stage(3)
    return t.tally(EventKind.SUPPRESSED) == 0 and t.tally(EventKind.INJECTED) == 0


def substituted_key(variant: Variant, contributions: list, k: int, forged, p: int):
    """Combiner output when slot ``k`` is replaced by ``forged`` (algebraic oracle helper)."""
    swapped = list(contributions)
    swapped[k] = forged
    return combine_key(variant, swapped, p)
