"""
An honest session
=================

Five members run group authentication, key establishment and key
confirmation over a pass-through broadcast channel.
"""

from gkalab import SchemeParams, Session

params = SchemeParams(p=1009, n=12, t=2, h=4)

for variant in ("chh", "hhxzz-a", "hhxzz-b"):
    s = Session(params, roster=[2, 3, 7, 8, 11], variant=variant, seed=1)
    s.run_honest()
    print(variant)
    for i, part in s.participants.items():
        key = part.K.hex() if isinstance(part.K, bytes) else part.K
        print(f"    U_{i:<2}  q={part.q:<4}  L={part.L:<4}  K={key!s:<6}  {part.verdict_label}")

###############################################################################
# The channel records every send and delivery. Nothing was suppressed.
events = s.network.transcript
print(len(events), "transcript events;", events.to_jsonl().splitlines()[0][:100], "...")
