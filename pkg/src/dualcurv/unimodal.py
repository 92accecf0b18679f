"""Integrals of even unimodal functions over symmetrised polytopes.

For an even function f whose superlevel sets are convex, and a convex body
K, the integral of f over ``lam K + (1 - lam)(-K)`` is at least the integral
over K.  The harness here estimates both sides for power functions of a
gauge, ``f(x) = gauge_M(x)^p`` with ``-n < p < 0``, and also checks the
Brunn-Minkowski inequality for vertex polytopes.

Integrals are estimated by importance sampling: x is drawn with density
proportional to f on a scaled copy ``R M`` enclosing the bodies, so every
sample contributes ``int_{R M} f`` times a membership indicator.  Both sides
of the lemma are read off the same samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bodies import Ball, GeneralPolytopeV, SymmetricBody, minkowski_combination, minkowski_lambda
from .errors import NonIntegrable
from .measures import gauge_power_mass, gauge_power_sample
from .quadrature import MeasureEstimate, QuadratureSpec, accumulate, chunk_rng, estimate

UNIMODAL_STREAM = 3
VOLUME_STREAM = 4
HOMOTHETY_TOL = 1e-9


@dataclass(frozen=True)
class PowerRadial:
    """``f(x) = |x|^p``."""

    p: float
    n: int

    @property
    def gauge_body(self) -> SymmetricBody:
        return Ball(1.0, self.n)

    def __call__(self, x):
        return self.gauge_body.gauge(x) ** self.p

    def superlevel_set(self, alpha: float) -> SymmetricBody:
        """``{x : f(x) >= alpha}``."""
        return self.gauge_body.scaled(alpha ** (1 / self.p))


@dataclass(frozen=True)
class GaugePower:
    """``f(x) = gauge_M(x)^p`` for a symmetric body M."""

    M: SymmetricBody
    p: float

    @property
    def n(self) -> int:
        return self.M.n

    @property
    def gauge_body(self) -> SymmetricBody:
        return self.M

    def __call__(self, x):
        return self.M.gauge(x) ** self.p

    def superlevel_set(self, alpha: float) -> SymmetricBody:
        return self.M.scaled(alpha ** (1 / self.p))


def _check(body: GeneralPolytopeV, f) -> None:
    if f.n != body.n:
        raise ValueError("function and body dimensions differ")
    if not -body.n < f.p < 0:
        raise NonIntegrable(f"need -n < p < 0 for local integrability, got p={f.p}")


def _enclosing(f, *bodies: GeneralPolytopeV) -> float:
    return max(float(f.gauge_body.gauge(b.hull_vertices).max()) for b in bodies)


def _paired(f, bodies, spec: QuadratureSpec) -> tuple:
    """Moments of ``mass * 1[x in body]`` for each body on shared samples."""
    radius = _enclosing(f, *bodies)
    mass = gauge_power_mass(f.gauge_body, radius, f.p)

    def chunk(j, size):
        x = gauge_power_sample(f.gauge_body, radius, f.p, chunk_rng(spec.seed, j, UNIMODAL_STREAM), size)
        return np.array([mass * b.contains(x) for b in bodies], dtype=float)

    return accumulate(chunk, spec)


def lemma_integral(body: GeneralPolytopeV, f, spec: QuadratureSpec) -> MeasureEstimate:
    """Monte Carlo estimate of ``int_K f``."""
    _check(body, f)
    return estimate(_paired(f, [body], spec), 1.0, spec)


@dataclass
class LemmaReport:
    lhs: MeasureEstimate
    rhs: MeasureEstimate
    diff_std_err: float
    passed: bool
    radii: np.ndarray = field(repr=False)
    vol_lambda: np.ndarray = field(repr=False)
    vol_body: np.ndarray = field(repr=False)
    vol_diff_std_err: np.ndarray = field(repr=False)

    @property
    def diff(self) -> float:
        return self.lhs.value - self.rhs.value

    @property
    def z(self) -> float:
        return self.diff / self.diff_std_err if self.diff_std_err > 0 else np.inf * np.sign(self.diff)

    def superlevel_match(self, sigmas: float = 2.0) -> bool:
        """Do the superlevel-set volumes agree at every tested level?"""
        gap = np.abs(self.vol_lambda - self.vol_body)
        return bool(np.all(gap <= sigmas * self.vol_diff_std_err))

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs.value,
            "lhs_std_err": self.lhs.std_err,
            "rhs": self.rhs.value,
            "rhs_std_err": self.rhs.std_err,
            "diff": self.diff,
            "std_err": self.diff_std_err,
            "samples": self.lhs.samples,
            "seed": self.lhs.seed,
            "verdict": "Pass" if self.passed else "Violation",
        }


def superlevel_volumes(k_lam: GeneralPolytopeV, body: GeneralPolytopeV, f, radii,
                       spec: QuadratureSpec):
    """Volumes of ``K_lam & (rho M)`` and ``K & (rho M)`` for each gauge radius.

    The superlevel set ``{f >= alpha}`` is ``alpha^(1/p) M``; radii are given
    directly.  Returns both volume arrays and the standard error of their
    difference, all from one uniform sample of a common bounding box.
    """
    lo = np.minimum(k_lam.bounding_box()[0], body.bounding_box()[0])
    hi = np.maximum(k_lam.bounding_box()[1], body.bounding_box()[1])
    box = float(np.prod(hi - lo))
    radii = np.asarray(radii, dtype=float)

    def chunk(j, size):
        x = chunk_rng(spec.seed, j, VOLUME_STREAM).uniform(lo, hi, size=(size, body.n))
        g = f.gauge_body.gauge(x)
        a, b = k_lam.contains(x), body.contains(x)
        inside = g[None, :] <= radii[:, None]
        return np.vstack([box * (inside & a), box * (inside & b), box * (inside & a) - box * (inside & b)])

    mom = accumulate(chunk, spec)
    m = len(radii)
    err = np.sqrt(np.maximum(np.diag(mom.cov)[2 * m :], 0) / mom.count)
    return mom.mean[:m], mom.mean[m : 2 * m], err


def lemma_check(body: GeneralPolytopeV, lam: float, f, spec: QuadratureSpec,
                levels: int = 10, sigmas: float = 3.0) -> LemmaReport:
    """Compare ``int_{lam K + (1-lam)(-K)} f`` (lhs) with ``int_K f`` (rhs)."""
    _check(body, f)
    k_lam = minkowski_lambda(body, lam)
    mom = _paired(f, [k_lam, body], spec)
    lhs, rhs = estimate(mom, 1.0, spec, 0), estimate(mom, 1.0, spec, 1)
    c = mom.cov
    diff_err = float(np.sqrt(max(c[0, 0] - 2 * c[0, 1] + c[1, 1], 0.0) / mom.count))
    passed = lhs.value >= rhs.value - sigmas * diff_err
    radius = _enclosing(f, k_lam, body)
    radii = radius * np.arange(1, levels + 1) / levels
    vl, vb, verr = superlevel_volumes(k_lam, body, f, radii, spec)
    return LemmaReport(lhs, rhs, diff_err, bool(passed), radii, vl, vb, verr)


# ---------------------------------------------------------------------------
# Brunn-Minkowski
# ---------------------------------------------------------------------------

def homothety_residual(k0: GeneralPolytopeV, k1: GeneralPolytopeV) -> tuple[float, float, np.ndarray]:
    """Fit ``x -> t + mu x`` mapping the vertices of K0 onto those of K1.

    ``mu`` matches the mean squared vertex spread, ``t`` the vertex
    centroids; the residual is the mean squared distance from each mapped
    vertex to its nearest target vertex.  Returns ``(residual, mu, t)``;
    the residual is infinite when the vertex counts differ.
    """
    v0, v1 = k0.hull_vertices, k1.hull_vertices
    if len(v0) != len(v1):
        return np.inf, np.nan, np.full(k0.n, np.nan)
    c0, c1 = v0.mean(axis=0), v1.mean(axis=0)
    mu = np.sqrt(np.sum((v1 - c1) ** 2) / np.sum((v0 - c0) ** 2))
    t = c1 - mu * c0
    mapped = t + mu * v0
    d2 = ((mapped[:, None, :] - v1[None, :, :]) ** 2).sum(axis=2)
    # one-to-one matching is forced by checking both directions
    residual = max(d2.min(axis=1).mean(), d2.min(axis=0).mean())
    return float(residual), float(mu), t


@dataclass
class BMReport:
    lhs: float
    rhs: float
    std_err: float
    volumes: tuple
    volume_std_errs: tuple
    exact_lhs: float
    exact_rhs: float
    homothetic: bool
    passed: bool
    samples: int
    seed: int

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "value": self.gap,
            "std_err": self.std_err,
            "exact_lhs": self.exact_lhs,
            "exact_rhs": self.exact_rhs,
            "homothetic": self.homothetic,
            "samples": self.samples,
            "seed": self.seed,
            "verdict": "Pass" if self.passed else "Violation",
        }


def brunn_minkowski_check(k0: GeneralPolytopeV, k1: GeneralPolytopeV, lam: float,
                          spec: Optional[QuadratureSpec] = None, sigmas: float = 3.0) -> BMReport:
    """``vol((1-lam) K0 + lam K1)^(1/n) >= (1-lam) vol(K0)^(1/n) + lam vol(K1)^(1/n)``.

    Volumes are Monte Carlo membership counts on one shared box sample; the
    standard error of the gap uses the delta method with the joint
    covariance.  Hull volumes are reported alongside as exact values.
    """
    if k0.n != k1.n:
        raise ValueError("bodies must share a dimension")
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    spec = spec or QuadratureSpec()
    n = k0.n
    comb = minkowski_combination(k0, k1, lam)
    bodies = [comb, k0, k1]
    lo = np.min([b.bounding_box()[0] for b in bodies], axis=0)
    hi = np.max([b.bounding_box()[1] for b in bodies], axis=0)
    box = float(np.prod(hi - lo))

    def chunk(j, size):
        x = chunk_rng(spec.seed, j, VOLUME_STREAM).uniform(lo, hi, size=(size, n))
        return np.array([box * b.contains(x) for b in bodies], dtype=float)

    mom = accumulate(chunk, spec)
    vc, v0, v1 = (float(v) for v in mom.mean)
    lhs = vc ** (1 / n)
    rhs = (1 - lam) * v0 ** (1 / n) + lam * v1 ** (1 / n)
    grad = np.array([vc ** (1 / n - 1), -(1 - lam) * v0 ** (1 / n - 1), -lam * v1 ** (1 / n - 1)]) / n
    err = float(np.sqrt(max(grad @ mom.cov @ grad, 0.0) / mom.count))
    vol_err = tuple(float(np.sqrt(mom.cov[i, i] / mom.count)) for i in range(3))
    exact_lhs = comb.volume() ** (1 / n)
    exact_rhs = (1 - lam) * k0.volume() ** (1 / n) + lam * k1.volume() ** (1 / n)
    homothetic = homothety_residual(k0, k1)[0] < HOMOTHETY_TOL
    return BMReport(lhs, rhs, err, (vc, v0, v1), vol_err, exact_lhs, exact_rhs,
                    homothetic, bool(lhs >= rhs - sigmas * err), mom.count, spec.seed)


def random_vertex_polytope(n: int, rng: np.random.Generator, points: int = 8,
                           shift: float = 1.0) -> GeneralPolytopeV:
    """Hull of uniform points in ``[-1, 1]^n`` translated by a random offset."""
    while True:
        pts = rng.uniform(-1, 1, size=(points, n)) + rng.uniform(-shift, shift, size=n)
        try:
            return GeneralPolytopeV(pts)
        except ValueError:
            continue
