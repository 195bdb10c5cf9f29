"""Symmetric cylindrical and CVT-based spherical robot formations."""
from dataclasses import dataclass
import json

import numpy as np

from .cvt import LloydConfig, compute_cvt
from .errors import DegenerateFormationError
from .geometry import pairwise_min_distance

#: polar angle of the upper ring, principal value of arcsin(sqrt(2/3))
THETA_F = float(np.arcsin(np.sqrt(2.0 / 3.0)))

KINDS = ("symmetric", "cvt")


@dataclass
class Formation:
    kind: str
    positions: np.ndarray
    center: np.ndarray
    radius: float

    @property
    def n(self):
        return len(self.positions)

    @property
    def offsets(self):
        return self.positions - self.center

    def translated(self, center):
        center = np.asarray(center, dtype=float)
        return Formation(self.kind, self.offsets + center, center, self.radius)

    def to_dict(self):
        return {
            "kind": self.kind,
            "c": self.center.tolist(),
            "D": self.radius,
            "positions": self.positions.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], np.asarray(d["positions"], dtype=float),
                   np.asarray(d["c"], dtype=float), float(d["D"]))


@dataclass
class FormationMoments:
    r_bar: np.ndarray
    M: np.ndarray
    M_alpha: np.ndarray
    iso_norm: float
    cond_M: float

    def to_dict(self):
        return {
            "r_bar": self.r_bar.tolist(),
            "M": self.M.tolist(),
            "M_alpha": self.M_alpha.tolist(),
            "M_alpha_norm": float(np.linalg.norm(self.M_alpha, 2)),
            "iso_norm": self.iso_norm,
            "cond_M": self.cond_M,
        }


def _check_radius(D):
    D = float(D)
    if not D > 0 or not np.isfinite(D):
        raise ValueError(f"formation radius must be positive, got {D}")
    return D


def _check_symmetric_n(n):
    if int(n) != n or n < 4 or n % 2:
        raise ValueError(f"symmetric formation needs an even N >= 4, got {n}")
    return int(n)


def build_symmetric(n, c, D):
    """Two staggered rings of ``n/2`` robots at polar angles THETA_F and pi - THETA_F.

    Robot ``i`` (1-based) sits at azimuth ``2*pi*i/n``; odd ``i`` go to the
    upper ring, even ``i`` to the lower one.
    """
    n = _check_symmetric_n(n)
    D = _check_radius(D)
    c = np.asarray(c, dtype=float)
    i = np.arange(1, n + 1)
    theta = np.where(i % 2 == 1, THETA_F, np.pi - THETA_F)
    phi = 2.0 * np.pi * i / n
    unit = np.column_stack((np.sin(theta) * np.cos(phi),
                            np.sin(theta) * np.sin(phi),
                            np.cos(theta)))
    return Formation("symmetric", c + D * unit, c, D)


def build_cvt_formation(gens, c, D):
    """Place robots at ``c + D * p`` for each unit generator ``p``."""
    D = _check_radius(D)
    gens = np.asarray(gens, dtype=float)
    if len(gens) < 4:
        raise ValueError("a CVT formation needs at least 4 generators")
    c = np.asarray(c, dtype=float)
    return Formation("cvt", c + D * gens, c, D)


def formation_moments(f):
    """First and second moments of the robot offsets about the centre."""
    r = f.offsets
    n, D = f.n, f.radius
    r_bar = r.sum(axis=0)
    M = r.T @ r
    iso = n * D**2 / 3.0
    M_alpha = M - iso * np.eye(3)
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise DegenerateFormationError("robot offsets are coplanar; M is singular")
    return FormationMoments(
        r_bar=r_bar,
        M=M,
        M_alpha=M_alpha,
        iso_norm=float(iso / s[-1]),
        cond_M=float(s[0] / s[-1]),
    )


def min_pairwise_distance(f):
    return pairwise_min_distance(f.positions)


def symmetric_dmin(n, D):
    """Published closed form ``2 D cos(THETA_F) sin(2 pi / n)``.

    This is the ring chord for a ring of radius ``D cos(THETA_F)``. The rings
    built by :func:`build_symmetric` have radius ``D sin(THETA_F)``, so the
    exhaustive minimum of a built formation is given by
    :func:`symmetric_dmin_geometric` instead.
    """
    n = _check_symmetric_n(n)
    D = _check_radius(D)
    return 2.0 * D * np.cos(THETA_F) * np.sin(2.0 * np.pi / n)


def symmetric_dmin_geometric(n, D):
    """Exact minimum pairwise distance of :func:`build_symmetric` robots."""
    n = _check_symmetric_n(n)
    D = _check_radius(D)
    same_ring = 2.0 * D * np.sin(THETA_F) * np.sin(2.0 * np.pi / n)
    across = 2.0 * D * np.sqrt(np.sin(THETA_F) ** 2 * np.sin(np.pi / n) ** 2
                               + np.cos(THETA_F) ** 2)
    return float(min(same_ring, across))


def make_formation(kind, n, D, c=(0.0, 0.0, 0.0), seed=0, lloyd_cfg=None):
    """Build either formation kind from scalar parameters."""
    if kind == "symmetric":
        return build_symmetric(n, c, D)
    if kind == "cvt":
        res = compute_cvt(n, seed, lloyd_cfg or LloydConfig())
        return build_cvt_formation(res.generators, c, D)
    raise ValueError(f"unknown formation kind {kind!r}; expected one of {KINDS}")


def formation_json(f):
    return json.dumps(f.to_dict(), indent=2)
