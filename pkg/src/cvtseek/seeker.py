"""Gradient-ascent source seeking with a rigid formation and a speed limit."""
from dataclasses import dataclass, field
import csv
import io

import numpy as np

from .errors import CvtSeekError, NumericError
from .estimator import METHODS, estimate
from .field import measure
from .formation import formation_moments, make_formation


@dataclass(frozen=True)
class FormationSpec:
    """Shape parameters of a formation; the centre is supplied per iteration."""

    kind: str
    n: int
    D: float
    seed: int = 0

    def build(self, c=(0.0, 0.0, 0.0)):
        return make_formation(self.kind, self.n, self.D, c, self.seed)


@dataclass(frozen=True)
class SeekConfig:
    epsilon: float = 1.0
    gamma: float = 0.1
    max_iters: int = 2000
    stop_grad_tol: float = 0.0
    estimator_method: str | None = None  # None -> matches formation kind
    true_center_value: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.estimator_method is not None and self.estimator_method not in METHODS:
            raise ValueError(f"unknown estimator {self.estimator_method!r}")

    def method_for(self, kind):
        if self.estimator_method is not None:
            return self.estimator_method
        return "symmetric_eq3" if kind == "symmetric" else "cvt_eq6"


CSV_COLUMNS = ("k", "cx", "cy", "cz", "ghx", "ghy", "ghz", "gtx", "gty", "gtz", "dist", "err")


@dataclass
class Trajectory:
    centers: np.ndarray
    grad_hat: np.ndarray
    grad_true: np.ndarray
    method: str
    error: str | None = None
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def dist_to_source(self):
        return self.extra["dist"]

    @property
    def est_error_norm(self):
        return np.linalg.norm(self.grad_hat - self.grad_true, axis=1)

    @property
    def n_records(self):
        return len(self.centers)

    def to_csv(self, fh=None):
        own = fh is None
        fh = fh or io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        err = self.est_error_norm
        for k in range(self.n_records):
            w.writerow([k, *map(repr_float, self.centers[k]), *map(repr_float, self.grad_hat[k]),
                        *map(repr_float, self.grad_true[k]),
                        repr_float(self.dist_to_source[k]), repr_float(err[k])])
        return fh.getvalue() if own else None


def repr_float(x):
    return repr(float(x))


def ga_step(c, grad_hat, epsilon, gamma):
    """``c + eps * g`` with the displacement clipped to length ``gamma``."""
    grad_hat = np.asarray(grad_hat, dtype=float)
    if not np.all(np.isfinite(grad_hat)):
        raise NumericError("non-finite gradient estimate")
    step = epsilon * grad_hat
    norm = np.linalg.norm(step)
    if norm > gamma:
        step *= gamma / norm
    return np.asarray(c, dtype=float) + step


def run_seek(fld, spec, noise, cfg, c0, rng, also=()):
    """Drive the formation centre uphill from ``c0``.

    One record is written for each visited centre ``c(0) .. c(K)``; the
    estimate at ``c(K)`` is recorded but not applied. ``also`` names extra
    estimators evaluated on the same measurements (stored in ``extra``).
    A degenerate estimate stops the run and sets ``error``.
    """
    base = spec if not isinstance(spec, FormationSpec) else spec.build()
    unit = base.translated(np.zeros(3))
    moments = formation_moments(unit)
    method = cfg.method_for(unit.kind)
    rng = np.random.default_rng(rng)

    c = np.asarray(c0, dtype=float).copy()
    centers, ghat, gtrue = [], [], []
    extra = {name: [] for name in also}
    error = None
    for k in range(cfg.max_iters + 1):
        f = unit.translated(c)
        y = measure(fld, f.positions, noise, rng)
        sigma_c = float(fld.value(c)) if cfg.true_center_value else None
        try:
            g = estimate(f, y, method, sigma_c, moments).grad_hat
            for name in also:
                extra[name].append(estimate(f, y, name, sigma_c, moments).grad_hat)
        except CvtSeekError as exc:
            error = str(exc)
            break
        centers.append(c)
        ghat.append(g)
        gtrue.append(fld.gradient(c))
        if k == cfg.max_iters or np.linalg.norm(g) <= cfg.stop_grad_tol:
            break
        try:
            c = ga_step(c, g, cfg.epsilon, cfg.gamma)
        except NumericError as exc:
            error = str(exc)
            break

    centers = np.array(centers).reshape(-1, 3)
    src = getattr(fld, "source", np.zeros(3))
    out = {name: np.array(v).reshape(-1, 3) for name, v in extra.items()}
    out["dist"] = np.linalg.norm(centers - src, axis=1)
    return Trajectory(centers, np.array(ghat).reshape(-1, 3), np.array(gtrue).reshape(-1, 3),
                      method, error, out)
