"""
Noisy sensors and one faulty robot
==================================

Monte Carlo over seeded trials. Both formations see the same noise draws in
each trial; only the shape differs.
"""
from dataclasses import replace

from cvtseek import harness

TRIALS = 20  # the builtin scenarios use 100

for setting in ("uniform", "faulty"):
    for kind in ("cvt", "symmetric"):
        s = replace(harness.get_scenario(f"fig5-{setting}-{kind}"), trials=TRIALS)
        st = harness.monte_carlo(s)
        print(f"{setting:>7} {kind:>9}: final distance {st.final_mean:.3f} +- {st.final_std:.3f}")
