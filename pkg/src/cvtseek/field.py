"""Scalar signal fields, their derivatives and noisy robot measurements."""
from dataclasses import dataclass, field
import json

import numpy as np


@dataclass(frozen=True)
class GaussianField:
    """``A * exp(-(r - r*)^T S (r - r*))`` with a symmetric shape matrix ``S``."""

    A: float
    S: np.ndarray
    source: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float).reshape(3, 3)
        if not self.A > 0:
            raise ValueError("amplitude A must be positive")
        if np.max(np.abs(S - S.T)) > 1e-12:
            raise ValueError("S must be symmetric")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "source", np.asarray(self.source, dtype=float).reshape(3))

    def value(self, r):
        d = np.asarray(r, dtype=float) - self.source
        return self.A * np.exp(-np.einsum("...i,ij,...j->...", d, self.S, d))

    def gradient(self, r):
        d = np.asarray(r, dtype=float) - self.source
        return -2.0 * self.value(r)[..., None] * (d @ self.S)

    def hessian(self, r):
        d = np.asarray(r, dtype=float) - self.source
        Sd = d @ self.S
        outer = Sd[..., :, None] * Sd[..., None, :]
        return self.value(r)[..., None, None] * (4.0 * outer - 2.0 * self.S)

    def to_dict(self):
        return {"A": self.A, "S": self.S.ravel().tolist(), "source": self.source.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["A"]), np.asarray(d["S"], dtype=float).reshape(3, 3),
                   np.asarray(d.get("source", (0.0, 0.0, 0.0)), dtype=float))


@dataclass(frozen=True)
class QuadraticField:
    """``r^T Q r`` -- not a valid signal, but its Taylor remainder is exact."""

    Q: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float).reshape(3, 3)
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return np.einsum("...i,ij,...j->...", r, self.Q, r)

    def gradient(self, r):
        return 2.0 * np.asarray(r, dtype=float) @ self.Q

    def hessian(self, r):
        r = np.asarray(r, dtype=float)
        return np.broadcast_to(2.0 * self.Q, r.shape[:-1] + (3, 3)).copy()


@dataclass(frozen=True)
class AffineField:
    """``a + g^T r``; both estimators must reproduce ``g`` exactly."""

    a: float
    g: np.ndarray

    def value(self, r):
        return self.a + np.asarray(r, dtype=float) @ np.asarray(self.g, dtype=float)

    def gradient(self, r):
        r = np.asarray(r, dtype=float)
        return np.broadcast_to(np.asarray(self.g, dtype=float), r.shape).copy()

    def hessian(self, r):
        r = np.asarray(r, dtype=float)
        return np.zeros(r.shape[:-1] + (3, 3))


# the two test scenarios used in the experiments
SIGMA1 = GaussianField(100.0, 1e-4 * np.array([[100.0, 1.0, 1.0],
                                               [1.0, 1.0, 0.0],
                                               [1.0, 0.0, 10.0]]))
SIGMA2 = GaussianField(1.0, 1e-4 * np.array([[20.0, 5.0, 2.0],
                                             [5.0, 20.0, 2.0],
                                             [2.0, 2.0, 100.0]]))
FIELDS = {"sigma1": SIGMA1, "sigma2": SIGMA2}


def field_from_json(path):
    with open(path) as fh:
        return GaussianField.from_dict(json.load(fh))


@dataclass(frozen=True)
class LipschitzEstimate:
    L: float
    center: np.ndarray
    radius: float
    method: str  # "analytic-quadratic" | "sampled"


def lipschitz_bound(f, center, radius, n_samples=20000, seed=0, margin=0.1):
    """Constant ``L`` with ``|remainder(r, c)| <= L ||r - c||^2`` on a ball.

    Taylor's theorem gives ``L = max ||H|| / 2`` over the segment between
    ``r`` and ``c``; the maximum is taken over ``n_samples`` seeded points of
    the ball plus its centre and the field's source, then inflated by
    ``margin``.
    """
    center = np.asarray(center, dtype=float)
    if not radius > 0:
        raise ValueError("radius must be positive")
    if isinstance(f, QuadraticField):
        return LipschitzEstimate(float(np.linalg.norm(f.Q, 2)), center, float(radius),
                                 "analytic-quadratic")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n_samples, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    pts = center + radius * u * rng.random((n_samples, 1)) ** (1.0 / 3.0)
    extra = [center]
    src = getattr(f, "source", None)
    if src is not None and np.linalg.norm(src - center) <= radius:
        extra.append(src)
    pts = np.vstack([pts, *extra])
    H = f.hessian(pts)
    # spectral norm of a symmetric matrix = largest |eigenvalue|
    hmax = float(np.max(np.abs(np.linalg.eigvalsh(H))))
    return LipschitzEstimate(0.5 * hmax * (1.0 + margin), center, float(radius), "sampled")


def taylor_remainder(f, r, c):
    """``sigma(r) - sigma(c) - grad sigma(c)^T (r - c)``."""
    r = np.asarray(r, dtype=float)
    c = np.asarray(c, dtype=float)
    return f.value(r) - f.value(c) - np.sum(f.gradient(c) * (r - c), axis=-1)


@dataclass(frozen=True)
class NoiseModel:
    """Per-robot measurement noise standard deviations."""

    nu: tuple

    def __post_init__(self):
        nu = tuple(float(v) for v in self.nu)
        if any(v < 0 for v in nu):
            raise ValueError("noise standard deviations must be non-negative")
        object.__setattr__(self, "nu", nu)

    @classmethod
    def uniform(cls, n, nu):
        return cls((nu,) * n)

    @classmethod
    def faulty(cls, n, nu, faulty_nu, index=0):
        vals = [nu] * n
        vals[index] = faulty_nu
        return cls(tuple(vals))

    @property
    def noise_free(self):
        return all(v == 0 for v in self.nu)


def measure(f, positions, noise, rng):
    """Noisy readings ``sigma(r_i) + nu_i z_i`` with ``z_i`` standard normal.

    Exactly ``N`` normals are drawn from ``rng`` per call, even when every
    ``nu_i`` is zero, so runs with and without noise stay in lockstep.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    nu = np.asarray(noise.nu, dtype=float)
    if len(nu) != len(positions):
        raise ValueError(f"{len(positions)} positions but {len(nu)} noise levels")
    z = rng.standard_normal(len(positions))
    return f.value(positions) + nu * z
