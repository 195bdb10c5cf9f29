"""
Climbing to the source
======================

A seven-robot CVT formation starts about 140 units from the peak and follows
its own gradient estimate with a capped step.
"""
import numpy as np

from cvtseek import harness

s = harness.get_scenario("fig1")
tr = harness.run_scenario(s)
d = tr.dist_to_source
print("start distance %.1f, final %.3f" % (d[0], d[-1]))
print("first iteration within D:", int(np.argmax(d <= s.D)))

# error of the estimate along the way, for three formation radii
traces = harness.radius_sweep(harness.get_scenario("fig4"))
for D, err in traces.items():
    print(f"D={D:g}: mean error {err.mean():.3e}, final {err[-1]:.3e}")
