"""
Estimating a gradient from a handful of readings
================================================

Compare the two estimators against the analytic gradient of a Gaussian
concentration field.
"""
import numpy as np

from cvtseek.estimator import alpha_error_term, grad_cvt, grad_symmetric
from cvtseek.field import SIGMA1, lipschitz_bound
from cvtseek.formation import formation_moments, make_formation

c = np.array([5.0, 40.0, 1.0])
g = SIGMA1.gradient(c)
L = lipschitz_bound(SIGMA1, c, 4.0).L
print("true gradient:", g, " L =", L)

# two rings: the plain weighted sum is enough
sym = make_formation("symmetric", 8, 4.0, c)
est = grad_symmetric(sym, SIGMA1.value(sym.positions), L=L)
print("symmetric error %.3e (bound %.3e)" % (np.linalg.norm(est.grad_hat - g), est.bound))

# CVT formation: the weighted sum is biased, solving with M removes most of it
cvt = make_formation("cvt", 7, 4.0, c)
y = SIGMA1.value(cvt.positions)
mom = formation_moments(cvt)
naive = grad_symmetric(cvt, y).grad_hat
fixed = grad_cvt(cvt, y, moments=mom, L=L)
extra = alpha_error_term(mom, SIGMA1.value(c), np.linalg.norm(g), cvt.n, cvt.radius)
print("cvt, plain sum error  %.3e (3LD + extra = %.3e)"
      % (np.linalg.norm(naive - g), 3 * L * 4.0 + extra))
print("cvt, moment-corrected %.3e (bound %.3e)"
      % (np.linalg.norm(fixed.grad_hat - g), fixed.bound))
