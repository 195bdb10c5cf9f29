"""Discrete constrained centroidal Voronoi tessellation of the unit sphere.

The sphere is replaced by a near-uniform point mesh, so every mesh point
carries the same area ``4*pi/m``. Lloyd's iteration then alternates

1. nearest-generator assignment of the mesh points,
2. the plain mean of each cell, pushed back onto the sphere along its ray.

For unit-norm mesh points the radially projected mean is the exact minimiser
of the cell energy over the sphere, so the discrete energy never increases.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import json

import numpy as np

from .errors import DegenerateCellError, DegeneratePointError
from .geometry import default_mesh_size, fibonacci_sphere_mesh, sample_unit_sphere


@dataclass(frozen=True)
class VoronoiPartition:
    assignment: np.ndarray  # mesh index -> generator index
    cell_sizes: np.ndarray

    @property
    def n_cells(self):
        return len(self.cell_sizes)


@dataclass(frozen=True)
class LloydConfig:
    max_iters: int = 500
    displacement_tol: float = 1e-9
    mesh_size: int | None = None  # None -> default_mesh_size(N)

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.displacement_tol > 0:
            raise ValueError("displacement_tol must be positive")
        if self.mesh_size is not None and self.mesh_size < 12:
            raise ValueError("mesh_size must be at least 12")

    def mesh_for(self, n):
        return self.mesh_size if self.mesh_size is not None else default_mesh_size(n)


@dataclass
class CVTResult:
    """Generators of a converged (or iteration-capped) spherical CVT."""

    generators: np.ndarray
    converged: bool
    iterations: int
    displacement: float
    energy: float
    energy_history: list = field(default_factory=list, repr=False)
    reseeded: int = 0

    @property
    def n(self):
        return len(self.generators)

    def to_json(self):
        return json.dumps(
            {
                "N": self.n,
                "converged": self.converged,
                "iterations": self.iterations,
                "displacement": self.displacement,
                "energy": self.energy,
                "generators": self.generators.tolist(),
            },
            indent=2,
        )


def _as_generators(gens):
    gens = np.atleast_2d(np.asarray(gens, dtype=float))
    if gens.size == 0:
        raise ValueError("generator set is empty")
    if gens.shape[1] != 3:
        raise ValueError(f"generators must be (N, 3), got {gens.shape}")
    return gens


def assign_cells(mesh, gens):
    """Assign each mesh point to its nearest generator (ties -> lowest index)."""
    gens = _as_generators(gens)
    mesh = np.asarray(mesh, dtype=float)
    # ||u - p||^2 = ||u||^2 - 2 u.p + ||p||^2; the ||u||^2 term is common to a row
    d2 = np.einsum("ij,ij->i", gens, gens)[None, :] - 2.0 * (mesh @ gens.T)
    assignment = np.argmin(d2, axis=1)
    sizes = np.bincount(assignment, minlength=len(gens))
    return VoronoiPartition(assignment, sizes)


def constrained_centroids(mesh, part):
    """Radially projected mean of every cell."""
    mesh = np.asarray(mesh, dtype=float)
    empty = np.flatnonzero(part.cell_sizes == 0)
    if empty.size:
        raise DegenerateCellError(f"empty Voronoi cells: {empty.tolist()}", cells=empty)
    sums = np.zeros((part.n_cells, 3))
    np.add.at(sums, part.assignment, mesh)
    means = sums / part.cell_sizes[:, None]
    norms = np.linalg.norm(means, axis=1, keepdims=True)
    if np.any(norms <= 1e-12):
        raise DegeneratePointError("cell mean sits at the sphere centre")
    return means / norms


def coverage_energy(mesh, gens, part):
    """Quadrature of sum_i int_{V_i} ||u - p_i||^2 du with uniform weights 4*pi/m."""
    mesh = np.asarray(mesh, dtype=float)
    gens = _as_generators(gens)
    diff = mesh - gens[part.assignment]
    return float(np.einsum("ij,ij->", diff, diff) * (4.0 * np.pi / len(mesh)))


def _reseed_empty(mesh, gens, empty):
    gens = gens.copy()
    for i in empty:
        others = np.delete(gens, i, axis=0)
        # farthest mesh point from all remaining generators
        nearest = np.max(mesh @ others.T, axis=1) if len(others) else np.zeros(len(mesh))
        gens[i] = mesh[int(np.argmin(nearest))]
    return gens


def lloyd_step(mesh, gens):
    """One assign/centroid/project cycle.

    Returns ``(new_gens, partition, energy, max_displacement)`` where the
    partition and energy belong to the incoming generators.
    """
    gens = _as_generators(gens)
    part = assign_cells(mesh, gens)
    energy = coverage_energy(mesh, gens, part)
    new = constrained_centroids(mesh, part)
    displacement = float(np.max(np.linalg.norm(new - gens, axis=1)))
    return new, part, energy, displacement


def lloyd(mesh, gens, cfg=LloydConfig()):
    """Run Lloyd's iteration from ``gens`` on a fixed mesh."""
    mesh = np.asarray(mesh, dtype=float)
    gens = _as_generators(gens).copy()
    history = []
    reseeded = 0
    displacement = np.inf
    converged = False
    it = 0
    while it < cfg.max_iters:
        try:
            new, _, energy, displacement = lloyd_step(mesh, gens)
        except DegenerateCellError as err:
            gens = _reseed_empty(mesh, gens, err.cells)
            reseeded += len(err.cells)
            history.clear()  # energy comparisons restart after a reseed
            continue
        history.append(energy)
        gens = new
        it += 1
        if displacement <= cfg.displacement_tol:
            converged = True
            break
    final = coverage_energy(mesh, gens, assign_cells(mesh, gens))
    return CVTResult(gens, converged, it, float(displacement), final, history, reseeded)


def compute_cvt(n, seed=0, cfg=LloydConfig()):
    """Constrained CVT with ``n`` generators on the unit sphere.

    Initial generators are uniform random unit vectors drawn from ``seed``.
    Hitting ``cfg.max_iters`` is reported through ``converged=False``.
    """
    n = int(n)
    if n < 4:
        raise ValueError(f"a spherical formation needs N >= 4, got {n}")
    res = _compute_cvt_cached(n, seed, cfg)
    return CVTResult(
        res.generators.copy(), res.converged, res.iterations, res.displacement,
        res.energy, list(res.energy_history), res.reseeded,
    )


@lru_cache(maxsize=64)
def _compute_cvt_cached(n, seed, cfg):
    mesh = fibonacci_sphere_mesh(cfg.mesh_for(n))
    return lloyd(mesh, sample_unit_sphere(n, seed), cfg)


def load_generators(path):
    """Read generators from JSON: a bare ``[[x, y, z], ...]`` list or a CVT report."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["generators"]
    return _as_generators(data)
