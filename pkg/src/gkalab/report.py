"""Machine-readable outcome of a simulation run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .aead import AEAD_NAME
from .netsim import EventKind
from .protocol import HASH_NAME, Stage, Variant

if TYPE_CHECKING:
    from .attacks import AttackPlan
    from .session import Session


def render_key(K):
    if K is None:
        return None
    return K.hex() if isinstance(K, bytes) else K


@dataclass
class RunReport:
    mode: str
    variant: Variant
    p: int
    roster: list[int]
    members: dict[int, dict]
    assertions: list[dict]
    outcome: str
    adversary: int | None = None
    victim: int | None = None
    K: object = None
    K_star: object = None
    header: dict = field(default_factory=dict)
    config: dict | None = None
    transcript_ref: dict | None = None

    @property
    def passed(self) -> bool:
        return all(a["pass"] for a in self.assertions)

    def assertion(self, name: str) -> bool:
        for a in self.assertions:
            if a["name"] == name:
                return a["pass"]
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "config": self.config,
            "mode": self.mode,
            "variant": Variant(self.variant).value,
            "p": self.p,
            "roster": list(self.roster),
            "adversary": self.adversary,
            "victim": self.victim,
            "K": render_key(self.K),
            "K_star": render_key(self.K_star),
            "members": {str(i): m for i, m in self.members.items()},
            "assertions": self.assertions,
            "outcome": self.outcome,
            "transcript_ref": self.transcript_ref,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _check(name: str, ok: bool) -> dict:
    return {"name": name, "pass": bool(ok)}


def build_report(session: Session, mode: str, plan: AttackPlan | None = None) -> RunReport:
    parts = session.participants
    members = {
        i: {"key": render_key(part.K), "verdict": part.verdict_label}
        for i, part in parts.items()
    }
    keys = [part.K for part in parts.values()]
    all_confirmed = all(part.stage is Stage.CONFIRMED for part in parts.values())
    header = {
        "seed": session.seed,
        "hash": HASH_NAME,
        "aead": AEAD_NAME,
        "n": session.params.n,
        "t": session.params.t,
        "h": session.params.h,
    }
    if plan is None:
        agree = keys[0] is not None and all(k == keys[0] for k in keys)
        checks = [_check("all_confirmed", all_confirmed), _check("keys_agree", agree)]
        outcome = "agreement" if all_confirmed and agree else "disagreement"
        return RunReport(mode, session.variant, session.p, list(session.roster), members,
                         checks, outcome, header=header)

    state = session.adversary_state
    K = state.K if state else None
    K_star = plan.target_key
    victim = parts[plan.victim]
    others = [part for i, part in parts.items() if i != plan.victim]
    others_share = K is not None and all(part.K == K for part in others)
    t3 = session.network.transcript.for_stage(3)
    untouched = t3.tally(EventKind.SUPPRESSED) == 0 and t3.tally(EventKind.INJECTED) == 0
    stage4_done = all(part.verdict is not None for part in parts.values())
    degenerate = K is not None and K == K_star

    checks = [_check("non_victims_share_correct_key", others_share),
              _check("stage3_channel_untouched", untouched)]
    if plan.literal_sum_formula:
        predicted = (2 * K + K_star) % session.p if K is not None else None
        checks.insert(0, _check("victim_key_matches_literal_formula", victim.K == predicted))
    else:
        checks.insert(0, _check("victim_key_is_target", victim.K == K_star))
        checks.append(_check("adversary_knows_both_keys",
                             state is not None and state.K == K and state.K_star == K_star))
        if not degenerate:
            checks.append(_check("non_victim_key_differs_from_target",
                                 all(part.K != K_star for part in others)))
        if stage4_done:
            if plan.stage4_masquerade or degenerate:
                checks.append(_check("all_confirmed", all_confirmed))
            else:
                checks.append(_check("victim_detects",
                                     victim.verdict_label == "Failed(confirm)"))

    succeeded = (victim.K == K_star and others_share and (all_confirmed or not stage4_done))
    if plan.literal_sum_formula:
        outcome = "attack-succeeded" if succeeded else "attack-failed"
    elif stage4_done and not plan.stage4_masquerade and not degenerate:
        outcome = "detected" if victim.stage is Stage.FAILED else "undetected"
    else:
        outcome = "attack-succeeded" if succeeded else "attack-failed"
    return RunReport(mode, session.variant, session.p, list(session.roster), members,
                     checks, outcome, adversary=plan.adversary, victim=plan.victim,
                     K=K, K_star=K_star, header=header)
