"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line that is printed in the terminal
summary, then asserts.
"""

import json
import os
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from conftest import ACCEPTANCE
from dualcurv.bodies import Ball, Ellipsoid, GeneralPolytopeV, ProductCylinder, cube, random_symmetric_polytope
from dualcurv.concentration import Verdict, check_theorem_bound, concentration_ratio, concentration_ratios
from dualcurv.cylinder import CylinderCase, cyl_ratio, cyl_subspace_measure, cyl_total_measure, subspace_integral, total_integral
from dualcurv.measures import DualCurvatureQuery, SubspaceSphere, cone_volume_exact, dual_curvature
from dualcurv.quadrature import QuadratureSpec
from dualcurv.subspace import coordinate_subspace, make_subspace
from dualcurv.unimodal import PowerRadial, brunn_minkowski_check, lemma_check, random_vertex_polytope

pytestmark = pytest.mark.slow
OMEGA3 = 4 * np.pi / 3


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    assert ok, detail


def random_normal_spans(body, rng, count):
    """Subspaces spanned by random subsets of the facet normals."""
    out = []
    while len(out) < count:
        k = int(rng.integers(1, body.n))
        idx = rng.choice(len(body.offsets), size=k, replace=False)
        try:
            out.append(make_subspace(body.unit_normals[idx]))
        except Exception:
            continue
    return out


def test_c01_ball_totals():
    worst, slowest = 0.0, 0.0
    for q in (0.5, 1, 2, 3):
        t0 = time.perf_counter()
        est = dual_curvature(DualCurvatureQuery(Ball(1.0, 3), q), QuadratureSpec(10**6, 1))
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(est.value - OMEGA3) - 3 * est.std_err)
    ok = worst <= 1e-12 and slowest < 10
    record(1, ok, f"max(|est - omega_3| - 3 sigma) = {worst:.2e}, slowest case {slowest:.2f}s")


def test_c02_volume_identity():
    body = cube(3)
    est = dual_curvature(DualCurvatureQuery(body, 3), QuadratureSpec(10**6, 2))
    mc_ok = abs(est.value - 8) <= 3 * est.std_err
    exact_ok = cone_volume_exact(body) == 8.0
    ratios = {}
    for idx in ([0], [1], [2], [0, 1], [0, 2], [1, 2]):
        L = coordinate_subspace(3, idx)
        ratios[tuple(idx)] = cone_volume_exact(body, L) / cone_volume_exact(body)
    ratio_ok = all(r == pytest.approx(len(k) / 3, rel=1e-15) for k, r in ratios.items())
    record(2, mc_ok and exact_ok and ratio_ok,
           f"MC {est.value:.5f} +- {est.std_err:.5f}, exact {cone_volume_exact(body)!r}, ratios k/3: {ratio_ok}")


def test_c03_theorem_sweep():
    rng = np.random.default_rng(2024)
    bodies, Ls = [], []
    for i in range(200):
        n = 3 + i % 2
        body = random_symmetric_polytope(n, int(rng.integers(6, 21)), rng)
        bodies.append(body)
        Ls.append(random_normal_spans(body, rng, 3))
    t0 = time.perf_counter()
    violations = candidates = inconsistent = total = 0
    for n in (3, 4):
        sel = [i for i in range(200) if bodies[i].n == n]
        qs = list(np.linspace(1, n, 5))
        reports = check_theorem_bound([bodies[i] for i in sel], qs, [Ls[i] for i in sel],
                                      QuadratureSpec(10**6, 100 + n))
        total += len(reports)
        per_body = len(qs) * 3
        for idx, rep in enumerate(reports):
            violations += rep.verdict is Verdict.VIOLATION
            if rep.verdict is not Verdict.EQUALITY_CANDIDATE or rep.q != n:
                continue
            candidates += 1
            # a statistical tie at q = n is accepted only if the exact cone volumes tie
            body = bodies[sel[idx // per_body]]
            L = Ls[sel[idx // per_body]][idx % 3]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                exact = cone_volume_exact(body, L) / cone_volume_exact(body)
            inconsistent += exact > rep.bound + 1e-12 or rep.confirmed != (abs(exact - rep.bound) <= 1e-9)
    elapsed = time.perf_counter() - t0
    record(3, violations == 0 and inconsistent == 0 and total == 3000 and elapsed < 900,
           f"{total} grid points, {violations} violations, {candidates} equality candidates at q=n "
           f"({inconsistent} inconsistent with exact cone volumes), {elapsed:.0f}s")


def test_c04_strictness():
    rep = concentration_ratio(cube(3), 2, coordinate_subspace(3, [0]), QuadratureSpec(10**7, 4))
    gap = rep.bound - rep.ratio
    record(4, gap >= 5 * rep.std_err, f"ratio {rep.ratio:.6f}, bound 0.5, gap/sigma = {gap / rep.std_err:.1f}")


def test_c05_cylinder_limits():
    t0 = time.perf_counter()
    near = {c: cyl_ratio(CylinderCase(*c, 1e-3)) for c in [(3, 1, 2), (4, 1, 3), (4, 2, 3)]}
    one = {c: cyl_ratio(CylinderCase(*c, 1e-3)) for c in [(3, 2, 1), (4, 3, 2)]}
    limits_ok = all(abs(v - c[1] / c[2]) < 0.05 for c, v in near.items()) and all(v >= 0.95 for v in one.values())
    worst = -np.inf
    for n, k, q in list(near) + list(one):
        body_L = coordinate_subspace(n, range(k))
        for r in (0.5, 1.0):
            case = CylinderCase(n, k, q, r)
            body = ProductCylinder(r, k, n)
            spec = QuadratureSpec(10**6, 50)
            reps = concentration_ratios(body, [q], [body_L], spec)
            sub = dual_curvature(DualCurvatureQuery(body, q, SubspaceSphere(body_L)), spec)
            tot = dual_curvature(DualCurvatureQuery(body, q), spec)
            for est, exact in ((sub, cyl_subspace_measure(case)), (tot, cyl_total_measure(case))):
                worst = max(worst, abs(est.value - exact) - 3 * est.std_err - 1e-10 * exact)
            exact_ratio = cyl_ratio(case)
            worst = max(worst, abs(reps[0].ratio - exact_ratio) - 3 * reps[0].std_err - 1e-10)
    elapsed = time.perf_counter() - t0
    detail = ", ".join(f"{c}: {v:.4f}" for c, v in {**near, **one}.items())
    record(5, limits_ok and worst <= 0 and elapsed < 300,
           f"ratios at r=1e-3 {detail}; cross-engine max excess {worst:.2e}; {elapsed:.1f}s")


def test_c06_limit_constants():
    errs = []
    for k, q in ((1, 2), (1, 3), (2, 3)):
        case = CylinderCase(3 if q < 3 else 4, k, q, 0.0)
        errs.append(abs(subspace_integral(case, 1e-6) * q * (q - k) - 1))
        errs.append(abs(total_integral(case, 1e-6) * k * (q - k) - 1))
    record(6, max(errs) <= 1e-6, f"max relative error {max(errs):.2e}")


def test_c07_lemma_battery():
    rng = np.random.default_rng(31)
    t0 = time.perf_counter()
    failures, worst_z = 0, np.inf
    for trial in range(100):
        n = 2 + trial % 2
        body = random_vertex_polytope(n, rng)
        lam = round(0.1 * int(rng.integers(1, 10)), 1)
        p = (-0.5, -1.0, -1.5)[int(rng.integers(3))]
        rep = lemma_check(body, lam, PowerRadial(p, n), QuadratureSpec(10**5, 1000 + trial))
        failures += not rep.passed
        if rep.diff_std_err > 0:
            worst_z = min(worst_z, rep.z)
    shifted = GeneralPolytopeV([[0, -1], [2, -1], [2, 1], [0, 1]])
    rep = lemma_check(shifted, 0.5, PowerRadial(-1.0, 2), QuadratureSpec(10**6, 7))
    elapsed = time.perf_counter() - t0
    record(7, failures == 0 and rep.z > 5 and elapsed < 300,
           f"{failures} failures in 100 trials (min z {worst_z:.1f}); shifted square z = {rep.z:.1f}; {elapsed:.0f}s")


def test_c08_brunn_minkowski():
    sq = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)
    eq = brunn_minkowski_check(GeneralPolytopeV(sq), GeneralPolytopeV(2 * sq), 0.5, QuadratureSpec(10**6, 5))
    eq_ok = (eq.homothetic and abs(eq.exact_lhs - 3) <= 1e-12 and abs(eq.exact_rhs - 3) <= 1e-12
             and abs(eq.gap) <= eq.std_err)
    rot = np.array([[np.cos(np.pi / 4), -np.sin(np.pi / 4)], [np.sin(np.pi / 4), np.cos(np.pi / 4)]])
    st = brunn_minkowski_check(GeneralPolytopeV(sq), GeneralPolytopeV(sq @ rot.T), 0.5, QuadratureSpec(10**6, 6))
    st_ok = st.gap > 5 * st.std_err
    record(8, eq_ok and st_ok,
           f"homothetic gap {eq.gap:.2e} (sigma {eq.std_err:.2e}, exact sides {eq.exact_lhs:.12g}/{eq.exact_rhs:.12g}); "
           f"rotated gap/sigma = {st.gap / st.std_err:.0f}")


def test_c09_gauge_remark():
    rng = np.random.default_rng(909)
    violations = count = 0
    for i in range(20):
        n = 3
        body = random_symmetric_polytope(n, int(rng.integers(6, 15)), rng)
        a = rng.standard_normal((n, n))
        M = Ellipsoid(a @ a.T + 0.5 * np.eye(n))
        spans = [L for L in random_normal_spans(body, rng, 6)]
        for q in (1, 2):
            Ls = [L for L in spans if L.dim <= q]
            if not Ls:
                continue
            for rep in concentration_ratios(body, [q], Ls, QuadratureSpec(10**6, 900 + i), gauge=M):
                count += 1
                violations += rep.verdict is Verdict.VIOLATION
    record(9, violations == 0 and count > 0, f"{count} (body, q, L) checks, {violations} violations")


def test_c10_determinism(tmp_path):
    bodies = {
        "cube": {"type": "polytope_h", "normals": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "offsets": [1, 1, 1]},
        "ball": {"type": "ball", "radius": 1.0, "n": 3},
        "sq": {"type": "polytope_v", "vertices": [[0, -1], [2, -1], [2, 1], [0, 1]]},
        "big": {"type": "polytope_v", "vertices": [[-2, -2], [2, -2], [2, 2], [-2, 2]]},
    }
    paths = {}
    for name, doc in bodies.items():
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(json.dumps(doc))
    commands = [
        ["measure", paths["ball"], "--q", "2"],
        ["ratio", paths["cube"], "--q", "2", "--subspace", "1,0,0", "--format", "csv"],
        ["scc", paths["cube"]],
        ["cyl-sweep", "--n", "3", "--k", "1", "--q", "2", "--r-list", "1,0.1,0.01,0.001", "--format", "csv"],
        ["lemma", paths["sq"], "--lambda", "0.5", "--p", "-1"],
        ["bm", paths["sq"], "--body2", paths["big"], "--lambda", "0.5"],
    ]
    same = []
    for threads in (None, "1"):
        outs = []
        env = dict(os.environ)
        if threads:
            env["DUALCURV_THREADS"] = threads
        for cmd in commands:
            res = subprocess.run([sys.executable, "-m", "dualcurv.cli", *map(str, cmd), "--samples", "100000"],
                                 capture_output=True, env=env)
            outs.append((res.returncode, res.stdout))
        same.append(outs)
    identical = [a == b for a, b in zip(*same)]
    codes = [code for code, _ in same[0]]
    record(10, all(identical) and all(c == 0 for c in codes),
           f"{sum(identical)}/{len(commands)} commands byte-identical on rerun, exit codes {codes}")
