import numpy as np
import pytest

from dualcurv.bodies import Ball, PolytopeH, cross_polytope, cube, random_symmetric_polytope
from dualcurv.concentration import (
    RatioReport,
    Verdict,
    check_scc_polytope,
    check_theorem_bound,
    classify,
    concentration_ratio,
    concentration_ratios,
    theorem_bound,
)
from dualcurv.errors import RankDeficient
from dualcurv.quadrature import QuadratureSpec
from dualcurv.subspace import coordinate_subspace, make_subspace, random_subspace

E1 = coordinate_subspace(3, [0])
E12 = coordinate_subspace(3, [0, 1])


# --- subspaces --------------------------------------------------------------

def test_make_subspace_single():
    L = make_subspace([[1, 0, 0]])
    assert L.dim == 1 and L.n == 3


def test_make_subspace_preserves_span():
    L = make_subspace([[1, 1, 0], [1, -1, 0]])
    assert L.dim == 2
    assert L.same_as(E12)
    assert np.allclose(L.basis @ L.basis.T, np.eye(2), atol=1e-12)


def test_make_subspace_dependent():
    with pytest.raises(RankDeficient):
        make_subspace([[1, 0, 0], [2, 0, 0]])


def test_make_subspace_full_rank_rejected():
    with pytest.raises((RankDeficient, ValueError)):
        make_subspace(np.eye(3))


def test_random_subspace_orthonormal(rng):
    L = random_subspace(4, 2, rng)
    assert np.allclose(L.basis @ L.basis.T, np.eye(2), atol=1e-12)
    v = rng.standard_normal(4)
    assert L.contains(L.project(v))


# --- verdicts ---------------------------------------------------------------

def test_bound():
    assert theorem_bound(1, 2) == 0.5
    assert theorem_bound(2, 1.5) == 1.0


@pytest.mark.parametrize("ratio,err,verdict", [
    (0.40, 0.01, Verdict.STRICT_PASS),
    (0.49, 0.01, Verdict.EQUALITY_CANDIDATE),
    (0.525, 0.01, Verdict.EQUALITY_CANDIDATE),
    (0.535, 0.01, Verdict.VIOLATION),
])
def test_classify(ratio, err, verdict):
    assert classify(ratio, err, 0.5) is verdict


# --- ratios -----------------------------------------------------------------

def test_cube_ratio_at_n(cube3):
    rep = concentration_ratio(cube3, 3, E1, QuadratureSpec(10**6, 1))
    assert rep.verdict is Verdict.EQUALITY_CANDIDATE
    assert abs(rep.ratio - 1 / 3) <= 2 * rep.std_err


def test_cube_ratio_strict_below_n(cube3):
    rep = concentration_ratio(cube3, 2, E1, QuadratureSpec(10**6, 2))
    assert rep.verdict is Verdict.STRICT_PASS
    assert rep.margin > 5 * rep.std_err


@pytest.mark.parametrize("q", [0.5, 1.5, 3])
def test_ball_ratio_zero(q):
    rep = concentration_ratio(Ball(1.0, 3), q, E12, QuadratureSpec(20_000, 3))
    assert rep.ratio == 0 and rep.verdict is Verdict.STRICT_PASS


def test_ratio_report_fields(cube3):
    rep = concentration_ratio(cube3, 1.5, E12, QuadratureSpec(20_000, 4))
    d = rep.as_dict()
    assert d["bound"] == 1.0 and d["dim_L"] == 2 and d["q"] == 1.5
    assert d["margin"] == pytest.approx(1.0 - d["value"])
    assert d["samples"] == 20_000 and d["seed"] == 4


def test_ratio_in_unit_interval(rng):
    spec = QuadratureSpec(50_000, 5)
    for _ in range(5):
        body = random_symmetric_polytope(3, 6, rng)
        Ls = [make_subspace(body.unit_normals[:1]), make_subspace(body.unit_normals[1:3])]
        for rep in concentration_ratios(body, [1, 2, 3], Ls, spec):
            assert -3 * rep.std_err <= rep.ratio <= 1 + 3 * rep.std_err


def test_batched_matches_single(cube3):
    spec = QuadratureSpec(30_000, 6)
    batch = concentration_ratios(cube3, [1.5, 3], [E1, E12], spec)
    single = concentration_ratio(cube3, 3, E12, spec)
    assert batch[3].ratio == pytest.approx(single.ratio, rel=1e-12)


def test_ratio_q_range(cube3):
    with pytest.raises(ValueError):
        concentration_ratio(cube3, 3.5, E1, QuadratureSpec(1000))


# --- exact subspace concentration ------------------------------------------

def test_scc_cube(cube3):
    rep = check_scc_polytope(cube3)
    assert rep.holds
    assert len(rep.entries) == 6
    assert all(e.equality and e.complement_ok for e in rep.entries)
    for idx in ([0], [1], [2], [0, 1], [0, 2], [1, 2]):
        assert rep.confirms(coordinate_subspace(3, idx))


def test_scc_cross_polytope():
    rep = check_scc_polytope(cross_polytope(3))
    assert rep.holds
    assert not rep.equality_subspaces
    # each facet pair carries a quarter of the volume
    assert sorted({round(e.ratio, 12) for e in rep.entries}) == [0.25, 0.5]


@pytest.mark.parametrize("t", [0.05, 0.3, 1.0, 4.0])
def test_scc_box(t):
    box = PolytopeH(np.eye(3), [1, 1, t])
    rep = check_scc_polytope(box)
    assert rep.holds
    assert rep.confirms(E12)
    assert rep.confirms(coordinate_subspace(3, [2]))


def test_scc_random_polytopes_hold(rng):
    for n in (2, 3, 4):
        for _ in range(3):
            assert check_scc_polytope(random_symmetric_polytope(n, n + 3, rng)).holds


# --- theorem sweep ----------------------------------------------------------

def test_theorem_cube_equality_confirmed(cube3):
    (rep,) = check_theorem_bound([cube3], [3], [E12], QuadratureSpec(10**6, 7))
    assert rep.ratio == pytest.approx(2 / 3, abs=3 * rep.std_err)
    assert rep.verdict is Verdict.EQUALITY_CANDIDATE
    assert rep.confirmed is True


def test_theorem_cube_strict(cube3):
    (rep,) = check_theorem_bound([cube3], [1.5], [E1], QuadratureSpec(10**6, 8))
    assert rep.verdict is Verdict.STRICT_PASS and rep.margin > 0


def test_theorem_random_polytope_at_n(rng):
    body = random_symmetric_polytope(3, 8, rng)
    L = make_subspace(body.unit_normals[:2])
    (rep,) = check_theorem_bound([body], [3], [L], QuadratureSpec(200_000, 9))
    assert rep.verdict is Verdict.STRICT_PASS


def test_theorem_per_body_subspaces(rng):
    bodies = [random_symmetric_polytope(3, 6, rng) for _ in range(3)]
    Ls = [[make_subspace(b.unit_normals[:1])] for b in bodies]
    reps = check_theorem_bound(bodies, [1, 2, 3], Ls, QuadratureSpec(20_000, 10))
    assert len(reps) == 9
    assert all(r.verdict is not Verdict.VIOLATION for r in reps)


def test_theorem_q_range(cube3):
    with pytest.raises(ValueError):
        check_theorem_bound([cube3], [0.5], [E1], QuadratureSpec(1000))


def test_theorem_seeds_differ_per_body(cube3):
    reps = check_theorem_bound([cube3, cube3], [2], [E1], QuadratureSpec(10_000, 11))
    assert reps[0].seed != reps[1].seed
    assert reps[0].ratio != reps[1].ratio
