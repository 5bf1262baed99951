"""
Splitting the CHH group key
===========================

An insider holds back its sealed contribution until it has everyone
else's, then sends the victim ``q_k xor K xor K*`` instead of ``q_k``. In
the confirmation round it swaps tags between the victim and the rest.
"""

from gkalab import SchemeParams, Session, plan_for, run_stage3_attack, run_stage4_masquerade
from gkalab.netsim import EventKind

s = Session(SchemeParams(1009, 12, 2, 4), roster=[1, 2, 3, 4], variant="chh", seed=42)
plan = plan_for(s, adversary=2, victim=4, target=b"\xbe\xef")
s.run_until_authed()

###############################################################################
# Key establishment: no channel manipulation at all.
run_stage3_attack(s, plan)
print({i: p.K.hex() for i, p in s.participants.items()})
t3 = s.network.transcript.for_stage(3)
print("stage 3 suppressed:", t3.tally(EventKind.SUPPRESSED), "injected:", t3.tally(EventKind.INJECTED))

###############################################################################
# Key confirmation: the adversary controls traffic to and from the victim.
report = run_stage4_masquerade(s, plan)
for i, m in report.members.items():
    print(f"U_{i}: key={m['key']} verdict={m['verdict']}")
print(report.outcome)
