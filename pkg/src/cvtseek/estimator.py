"""Closed-form gradient estimates from measurements taken on a formation."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFormationError
from .formation import formation_moments

METHODS = ("symmetric_eq3", "cvt_eq6")
MAX_COND = 1e6


@dataclass(frozen=True)
class GradientEstimate:
    grad_hat: np.ndarray
    method: str
    center_value_used: float | None = None
    bound: float | None = None


def _measurements(f, y):
    y = np.asarray(y, dtype=float).ravel()
    if len(y) != f.n:
        raise ValueError(f"expected {f.n} measurements, got {len(y)}")
    return y


def center_estimate(measurements):
    """Mean of the robot readings, used as a stand-in for the centre value."""
    y = np.asarray(measurements, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("no measurements")
    return float(y.mean())


def grad_symmetric(f, measurements, L=None):
    """``3 / (N D^2) * sum_i y_i (r_i - c)``.

    The reported bound is ``3 L D`` for symmetric formations; on any other
    formation it is left unset because the isotropy identities fail there
    (see :func:`alpha_error_term`).
    """
    y = _measurements(f, measurements)
    g = 3.0 / (f.n * f.radius**2) * (y @ f.offsets)
    bound = bound_symmetric(L, f.radius) if (L is not None and f.kind == "symmetric") else None
    return GradientEstimate(g, "symmetric_eq3", None, bound)


def grad_cvt(f, measurements, sigma_c=None, moments=None, L=None):
    """Solve ``M g = sum_i y_i (r_i - c) - sigma_c * r_bar``.

    ``sigma_c`` defaults to the mean of the measurements.
    """
    y = _measurements(f, measurements)
    if moments is None:
        moments = formation_moments(f)
    if moments.cond_M > MAX_COND:
        raise DegenerateFormationError(f"cond(M) = {moments.cond_M:.3g} exceeds {MAX_COND:g}")
    if sigma_c is None:
        sigma_c = center_estimate(y)
    rhs = y @ f.offsets - sigma_c * moments.r_bar
    g = np.linalg.solve(moments.M, rhs)
    bound = bound_cvt(moments, f.n, L, f.radius) if L is not None else None
    return GradientEstimate(g, "cvt_eq6", float(sigma_c), bound)


def estimate(f, measurements, method, sigma_c=None, moments=None, L=None):
    if method == "symmetric_eq3":
        return grad_symmetric(f, measurements, L)
    if method == "cvt_eq6":
        return grad_cvt(f, measurements, sigma_c, moments, L)
    raise ValueError(f"unknown estimator {method!r}; expected one of {METHODS}")


def bound_symmetric(L, D):
    return 3.0 * L * D


def bound_cvt(moments, n, L, D):
    """``||M^-1|| N L D^3``, identical to ``iso_norm * 3 L D``."""
    return moments.iso_norm * 3.0 * L * D


def alpha_error_term(moments, sigma_c, grad_norm, n, D):
    """Extra error of the symmetric estimator on a non-isotropic formation."""
    return 3.0 / (n * D**2) * (
        sigma_c * np.linalg.norm(moments.r_bar)
        + np.linalg.norm(moments.M_alpha, 2) * grad_norm
    )
