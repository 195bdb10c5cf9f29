"""Unit-sphere sampling and projection helpers.

Points are handled as ``(n, 3)`` float arrays throughout; a single point is a
length-3 array.
"""
import numpy as np

from .errors import DegeneratePointError

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def fibonacci_sphere_mesh(m):
    """Return ``m`` near-uniform points on the unit sphere (golden-spiral lattice).

    The lattice is deterministic and accepts any ``m >= 12``. Every point
    represents roughly the same area ``4*pi/m``. The southern half is the
    point reflection of the northern half, so ``p`` and ``-p`` are both in the
    mesh (apart from the single equatorial point when ``m`` is odd).
    """
    m = int(m)
    if m < 12:
        raise ValueError(f"mesh needs at least 12 points, got {m}")
    i = np.arange(m, dtype=float) + 0.5
    z = 1.0 - 2.0 * i / m
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = GOLDEN_ANGLE * i
    pts = np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    half = m // 2
    pts[m - half:] = -pts[:half][::-1]
    return pts


def sample_unit_sphere(n, seed):
    """Draw ``n`` uniform unit vectors by normalising standard Gaussian triples.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``; an int seed
    always yields the same points.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, 3))
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    # a zero triple has probability zero; redraw rather than divide by it
    while np.any(norms < 1e-12):
        bad = norms[:, 0] < 1e-12
        pts[bad] = rng.standard_normal((int(bad.sum()), 3))
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
    return pts / norms


def radial_project(p):
    """Project ``p`` (one point or an ``(n, 3)`` stack) onto the unit sphere."""
    p = np.asarray(p, dtype=float)
    norms = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(norms <= 1e-15):
        raise DegeneratePointError("cannot project a point at the origin onto the sphere")
    return p / norms


def pairwise_min_distance(points):
    """Smallest Euclidean distance between two distinct rows of ``points``."""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        raise ValueError("need at least two points")
    diff = points[:, None, :] - points[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def default_mesh_size(n_generators):
    """Mesh resolution used for a CVT with ``n_generators`` cells."""
    return max(20000, 1000 * int(n_generators))
