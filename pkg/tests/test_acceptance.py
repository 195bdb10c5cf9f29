"""Exit criteria for the package, one test per criterion.

Every test appends a PASS/FAIL line that the conftest hook prints after the
run (``pytest tests/test_acceptance.py``).
"""
import time

import numpy as np
import pytest

from cvtseek import harness
from cvtseek.cli import main
from cvtseek.cvt import LloydConfig, assign_cells, compute_cvt, coverage_energy
from cvtseek.estimator import alpha_error_term, grad_cvt, grad_symmetric
from cvtseek.field import SIGMA1, SIGMA2, AffineField, lipschitz_bound
from cvtseek.formation import (Formation, build_cvt_formation, build_symmetric,
                               formation_moments, make_formation, symmetric_dmin)
from cvtseek.geometry import fibonacci_sphere_mesh, sample_unit_sphere

from conftest import ACCEPTANCE_LINES, central_diff_grad, random_rotation


def record(number, title, ok, detail, started):
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number:<2} {title}: {detail} ({time.time() - started:.1f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def ball_points(rng, n, radius):
    u = rng.standard_normal((n, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return radius * u * rng.random((n, 1)) ** (1 / 3)


def test_ac01_dmin_table():
    t0 = time.time()
    bad = []
    for n, printed in harness.TABLE1_SYMMETRIC.items():
        closed = 2 * np.cos(np.arcsin(np.sqrt(2 / 3))) * np.sin(2 * np.pi / n)
        if abs(symmetric_dmin(n, 1.0) - closed) > 1e-12 or abs(closed - printed) > 0.02:
            bad.append(f"sym N={n}")
    rows = {r["N"]: r for r in harness.dmin_table(1.0, harness.TABLE1_NS, range(5))}
    for n, printed in harness.TABLE1_CVT.items():
        if abs(rows[n]["cvt_dmin"] - printed) > 0.05:
            bad.append(f"cvt N={n} ({rows[n]['cvt_dmin']:.3f})")
    elapsed = time.time() - t0
    detail = ", ".join(f"N={n}: sym {rows[n]['sym_dmin']:.4f} cvt {rows[n]['cvt_dmin']:.4f}"
                       for n in harness.TABLE1_NS)
    record(1, "d_min table, symmetric vs CVT", not bad and elapsed < 60, detail + (f"; off: {bad}" if bad else ""),
           t0)


def test_ac02_symmetric_identities():
    t0 = time.time()
    worst_r, worst_m = 0.0, 0.0
    for n in range(4, 41, 2):
        for D in (1.0, 3.5):
            f = build_symmetric(n, [1.0, -2.0, 0.5], D)
            mom = formation_moments(f)
            worst_r = max(worst_r, np.linalg.norm(mom.r_bar) / (n * D))
            worst_m = max(worst_m, np.linalg.norm(mom.M - n * D**2 / 3 * np.eye(3), 2) / (n * D**2))
    ok = worst_r <= 1e-12 and worst_m <= 1e-12
    record(2, "symmetric moment identities, even N in [4, 40]", ok,
           f"max |r_bar|/ND={worst_r:.2e}, max |M-ND^2/3 I|/ND^2={worst_m:.2e}", t0)


def test_ac03_cvt_moment_quality():
    t0 = time.time()
    failures = []
    worst = [0.0, 0.0, 0.0]
    for n in range(6, 31):
        mom = formation_moments(make_formation("cvt", n, 1.0))
        vals = (mom.iso_norm, np.linalg.norm(mom.M_alpha, 2), np.max(np.abs(mom.r_bar)))
        worst = [max(w, v) for w, v in zip(worst, vals)]
        if vals[0] > 1.05 or vals[1] > 0.3 or vals[2] > 1e-2:
            failures.append(f"N={n}(iso={vals[0]:.3f},Ma={vals[1]:.3f},rbar={vals[2]:.1e})")
    detail = (f"max iso={worst[0]:.3f} (<=1.05), max |M_a|={worst[1]:.3f} (<=0.3), "
              f"max |r_bar|inf={worst[2]:.1e} (<=1e-2)")
    if failures:
        detail += "; violations: " + " ".join(failures)
    record(3, "CVT moment quality N=6..30", not failures and time.time() - t0 < 120, detail, t0)


def _scenario_fields():
    return (("sigma1", SIGMA1), ("sigma2", SIGMA2))


def test_ac04_symmetric_error_bound():
    t0 = time.time()
    rng = np.random.default_rng(404)
    checked, violations, worst = 0, 0, 0.0
    for _, fld in _scenario_fields():
        for n in (6, 8):
            for D in (1.0, 4.0):
                L = lipschitz_bound(fld, np.zeros(3), 50.0 + D).L
                unit = build_symmetric(n, np.zeros(3), D)
                for c in ball_points(rng, 200, 50.0):
                    f = unit.translated(c)
                    est = grad_symmetric(f, fld.value(f.positions), L=L)
                    err = np.linalg.norm(est.grad_hat - fld.gradient(c))
                    worst = max(worst, err / est.bound)
                    violations += err > est.bound
                    checked += 1
    record(4, "symmetric estimator bound 3LD", violations == 0,
           f"{checked} cases, {violations} violations, max err/bound={worst:.3f}", t0)


def test_ac05_cvt_error_bound():
    t0 = time.time()
    rng = np.random.default_rng(505)
    checked, v6, v3, w6, w3 = 0, 0, 0, 0.0, 0.0
    for _, fld in _scenario_fields():
        for n in (7, 8):
            for D in (1.0, 4.0):
                L = lipschitz_bound(fld, np.zeros(3), 50.0 + D).L
                unit = make_formation("cvt", n, D)
                mom = formation_moments(unit)
                bound6 = np.linalg.norm(np.linalg.inv(mom.M), 2) * n * L * D**3
                for c in ball_points(rng, 200, 50.0):
                    f = unit.translated(c)
                    y = fld.value(f.positions)
                    g = fld.gradient(c)
                    e6 = np.linalg.norm(grad_cvt(f, y, fld.value(c), mom).grad_hat - g)
                    e3 = np.linalg.norm(grad_symmetric(f, y).grad_hat - g)
                    b3 = 3 * L * D + alpha_error_term(mom, fld.value(c), np.linalg.norm(g), n, D)
                    v6 += e6 > bound6
                    v3 += e3 > b3
                    w6, w3 = max(w6, e6 / bound6), max(w3, e3 / b3)
                    checked += 1
    record(5, "CVT estimator bound, symmetric estimator on CVT", v6 == 0 and v3 == 0,
           f"{checked} cases; moment-corrected violations {v6} (max ratio {w6:.3f}), "
           f"symmetric vs 3LD+Phi_a violations {v3} (max ratio {w3:.3f})", t0)


def test_ac06_affine_exactness():
    t0 = time.time()
    rng = np.random.default_rng(606)
    worst3, worst6 = 0.0, 0.0
    for _ in range(100):
        fld = AffineField(rng.uniform(-10, 10), rng.uniform(-5, 5, 3))
        c = rng.uniform(-100, 100, 3)
        D = rng.uniform(0.5, 8)
        R = random_rotation(rng)
        sym = build_symmetric(int(rng.choice([4, 6, 8, 10, 12])), np.zeros(3), D)
        sym = Formation("symmetric", sym.positions @ R.T + c, c, D)
        g3 = grad_symmetric(sym, fld.value(sym.positions)).grad_hat
        worst3 = max(worst3, np.max(np.abs(g3 - fld.g)))
        n = int(rng.integers(4, 16))
        offs = D * sample_unit_sphere(n, rng)
        any_f = Formation("cvt", offs + c, c, D)
        g6 = grad_cvt(any_f, fld.value(any_f.positions), sigma_c=fld.value(c)).grad_hat
        worst6 = max(worst6, np.max(np.abs(g6 - fld.g)))
    ok = worst3 <= 1e-9 and worst6 <= 1e-9
    record(6, "affine exactness", ok, f"max |err| symmetric={worst3:.1e}, corrected={worst6:.1e}", t0)


def test_ac07_radius_trend():
    t0 = time.time()
    traces = harness.radius_sweep(harness.get_scenario("fig4"), (1.0, 4.0, 7.0))
    avg = [traces[d].mean() for d in (1.0, 4.0, 7.0)]
    fin = [traces[d][-1] for d in (1.0, 4.0, 7.0)]
    ok = avg[0] < avg[1] < avg[2] and fin[0] < fin[1] < fin[2] and time.time() - t0 < 120
    record(7, "error grows with D (1, 4, 7)", ok,
           "mean " + " < ".join(f"{a:.3e}" for a in avg)
           + "; final " + " < ".join(f"{a:.3e}" for a in fin), t0)


def test_ac08_fig1_convergence():
    t0 = time.time()
    s = harness.get_scenario("fig1")
    tr = harness.run_scenario(s)
    start = np.linalg.norm(np.asarray(s.c0) - s.field.source)
    reached = np.flatnonzero(tr.dist_to_source <= s.D)
    first = int(reached[0]) if reached.size else None
    ok = (130 <= start <= 150 and first is not None and first <= 5000
          and tr.dist_to_source[-1] <= s.D and time.time() - t0 < 30)
    record(8, "long-range convergence (fig1)", ok,
           f"start dist {start:.1f}, within D at k={first}, final dist "
           f"{tr.dist_to_source[-1]:.3f} after {tr.n_records - 1} iterations", t0)


def test_ac09_noise_robustness():
    t0 = time.time()
    stats = {}
    for label in ("uniform", "faulty"):
        for kind in ("cvt", "symmetric"):
            s = harness.get_scenario(f"fig5-{label}-{kind}")
            assert s.trials == 100 and s.n == 8 and s.field is SIGMA2
            stats[label, kind] = harness.monte_carlo(s)
    u_c, u_s = stats["uniform", "cvt"], stats["uniform", "symmetric"]
    f_c, f_s = stats["faulty", "cvt"], stats["faulty", "symmetric"]
    gap = abs(u_c.final_mean - u_s.final_mean)
    ok_a = gap <= 0.2 * min(u_c.final_mean, u_s.final_mean)
    ok_b = f_c.final_mean <= f_s.final_mean and f_c.final_std <= f_s.final_std
    record(9, "noise robustness (fig5)", ok_a and ok_b and time.time() - t0 < 300,
           f"(a) uniform mean cvt={u_c.final_mean:.4f} sym={u_s.final_mean:.4f} "
           f"gap={gap / min(u_c.final_mean, u_s.final_mean):.1%}; "
           f"(b) faulty cvt={f_c.final_mean:.4f}+-{f_c.final_std:.4f} "
           f"sym={f_s.final_mean:.4f}+-{f_s.final_std:.4f}", t0)


def test_ac10_lloyd_correctness():
    t0 = time.time()
    rng = np.random.default_rng(1010)
    worst = 0.0
    for _ in range(20):
        n, seed = int(rng.integers(4, 31)), int(rng.integers(0, 10_000))
        e = np.asarray(compute_cvt(n, seed, LloydConfig()).energy_history)
        worst = max(worst, float(np.max(np.diff(e) / e[:-1], initial=-np.inf)))
    mesh = fibonacci_sphere_mesh(4000)
    g = np.array([[0.0, 0.0, 1.0]])
    e1 = coverage_energy(mesh, g, assign_cells(mesh, g))
    rel = abs(e1 - 8 * np.pi) / (8 * np.pi)
    ok = worst <= 1e-12 and rel <= 0.02 and time.time() - t0 < 60
    record(10, "Lloyd monotone energy, 8 pi check", ok,
           f"max relative energy increase {worst:.1e}; single-cell energy {e1:.4f} "
           f"({rel:.2%} from 8 pi)", t0)


def test_ac11_derivative_oracles():
    t0 = time.time()
    rng = np.random.default_rng(1111)
    worst_g, worst_h = 0.0, 0.0
    for _, fld in _scenario_fields():
        for r in rng.uniform(-40, 40, (100, 3)):
            h = 1e-5 * max(1.0, np.linalg.norm(r))
            g = fld.gradient(r)
            fd = central_diff_grad(fld.value, r, h)
            worst_g = max(worst_g, np.linalg.norm(fd - g) / max(np.linalg.norm(g), 1e-300))
            H = fld.hessian(r)
            fdH = np.array([central_diff_grad(lambda x: fld.gradient(x)[k], r, h)
                            for k in range(3)])
            worst_h = max(worst_h, np.linalg.norm(fdH - H) / max(np.linalg.norm(H), 1e-300))
    record(11, "gradient/Hessian vs finite differences", worst_g <= 1e-6 and worst_h <= 1e-6,
           f"max relative error gradient {worst_g:.1e}, Hessian {worst_h:.1e}", t0)


CLI_COMMANDS = [
    ["cvt", "--n", "12", "--seed", "4", "--out", "{o}/cvt.json"],
    ["formation", "--kind", "cvt", "--n", "9", "--d", "2", "--out", "{o}/f.json"],
    ["diagnose", "--kind", "symmetric", "--n", "10", "--out", "{o}/d.json"],
    ["run", "--scenario", "fig1", "--out", "{o}/run.csv"],
    ["run", "--scenario", "fig5-faulty-cvt", "--seed", "9", "--max-iters", "300",
     "--out", "{o}/noisy.csv"],
    ["experiment", "table1", "--out", "{o}"],
    ["experiment", "fig3", "--out", "{o}"],
    ["experiment", "fig4", "--out", "{o}"],
    ["experiment", "fig5-faulty", "--trials", "4", "--max-iters", "300", "--out", "{o}"],
]


def test_ac12_cli_determinism(tmp_path):
    t0 = time.time()
    outputs = []
    for rep in ("a", "b"):
        o = tmp_path / rep
        o.mkdir()
        for cmd in CLI_COMMANDS:
            main([arg.format(o=o) for arg in cmd])
        outputs.append({p.relative_to(o): p.read_bytes() for p in sorted(o.rglob("*"))
                        if p.is_file()})
    same = outputs[0] == outputs[1]
    record(12, "CLI output byte-identical on rerun", same and len(outputs[0]) >= 10,
           f"{len(outputs[0])} files compared", t0)
