"""
Spreading robots over a sphere
==============================

Lloyd's algorithm on a dense sphere mesh moves N generators until each one
sits at the (projected) centroid of its Voronoi cell.
"""
import numpy as np

from cvtseek.cvt import compute_cvt
from cvtseek.formation import make_formation, min_pairwise_distance, symmetric_dmin

# a CVT with eight generators, from a seeded random start
res = compute_cvt(8, seed=0)
print("converged:", res.converged, "after", res.iterations, "iterations")
print("energy went from %.4f to %.4f" % (res.energy_history[0], res.energy))

# the energy never goes up
print("monotone:", bool(np.all(np.diff(res.energy_history) <= 0)))

# generators stay on the unit sphere
print("radii:", np.round(np.linalg.norm(res.generators, axis=1), 12))

# closest pair of robots, CVT against the two-ring layout, unit radius
for n in (6, 8, 10, 20):
    cvt = min_pairwise_distance(make_formation("cvt", n, 1.0))
    print(f"N={n:>2}  two-ring {symmetric_dmin(n, 1.0):.3f}   cvt {cvt:.3f}")
