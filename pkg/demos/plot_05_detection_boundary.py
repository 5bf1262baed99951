"""
Without channel control the split is caught
===========================================

If the adversary forges its contribution but leaves stage-4 traffic alone,
the victim's confirmation tag disagrees with everyone else's.
"""

from gkalab import SchemeParams, Session, plan_for, run_attack

params = SchemeParams(1009, 12, 2, 4)
for variant in ("chh", "hhxzz-a", "hhxzz-b"):
    s = Session(params, roster=[1, 2, 3, 4, 5], variant=variant, seed=9)
    report = run_attack(s, plan_for(s, stage4_masquerade=False))
    print(variant, report.outcome, s.verdicts())
