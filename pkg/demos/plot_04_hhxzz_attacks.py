"""
Sum and product combiners
=========================

The same attack against both HHXZZ variants, plus the sum forgery with the
``+K`` in place of ``-K``, which lands the victim on ``2K + K*`` instead.
"""

from gkalab import SchemeParams, Session, plan_for, run_attack

params = SchemeParams(1009, 12, 2, 4)

for variant, literal in [("hhxzz-a", False), ("hhxzz-b", False), ("hhxzz-a", True)]:
    s = Session(params, roster=[1, 4, 5, 9, 10], variant=variant, seed=3)
    plan = plan_for(s, target=500, literal_sum_formula=literal)
    report = run_attack(s, plan)
    label = variant + (" (literal +K)" if literal else "")
    print(f"{label}: K={report.K} K*={report.K_star} "
          f"victim U_{plan.victim} holds {s[plan.victim].K}, outcome {report.outcome}")
    if literal:
        print("   2K + K* mod p =", (2 * report.K + report.K_star) % params.p)
