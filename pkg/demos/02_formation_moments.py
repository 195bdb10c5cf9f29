"""
First and second moments of a formation
=======================================

The gradient estimators only see a formation through its offset sum
``r_bar`` and its second-moment matrix ``M``.
"""
import numpy as np

from cvtseek.formation import formation_moments, make_formation

np.set_printoptions(precision=4, suppress=True)

# two rings of robots: r_bar vanishes and M is a multiple of the identity
sym = formation_moments(make_formation("symmetric", 8, 2.0))
print("symmetric r_bar:", sym.r_bar)
print("symmetric M:\n", sym.M)

# a CVT formation is only approximately isotropic
for n in (7, 8, 12):
    m = formation_moments(make_formation("cvt", n, 1.0))
    print(f"N={n:>2} |r_bar|={np.linalg.norm(m.r_bar):.2e} "
          f"|M_alpha|={np.linalg.norm(m.M_alpha, 2):.3f} iso={m.iso_norm:.3f}")
