"""Dual curvature measures and the cone-volume measure.

For an origin-symmetric body K, a gauge body M (the unit ball by default)
and q > 0 the measure of a spherical region is

    (1/n) * int_{alpha*_K(region)} rho_M(u)^(n-q) rho_K(u)^q dH^{n-1}(u),

where ``alpha*_K(region)`` is the set of directions u whose boundary point
``rho_K(u) u`` has an outer normal in the region.  Only the full sphere,
the great subsphere ``S^{n-1} & L`` of a subspace L, and its complement
are supported as regions.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection

from . import quadrature as quad
from .bodies import (
    DEFAULT_TIE_TOL,
    Ball,
    Ellipsoid,
    PolytopeH,
    ProductCylinder,
    SymmetricBody,
    unit_ball_volume,
)
from .errors import DegenerateFacetWarning, DimensionTooLarge
from .quadrature import MeasureEstimate, QuadratureSpec
from .subspace import MEMBER_TOL, Subspace


@dataclass(frozen=True)
class FullSphere:
    pass


@dataclass(frozen=True)
class SubspaceSphere:
    L: Subspace


@dataclass(frozen=True)
class Complement:
    L: Subspace


SphericalRegion = Union[FullSphere, SubspaceSphere, Complement]


@dataclass(frozen=True)
class DualCurvatureQuery:
    body: SymmetricBody
    q: float
    region: SphericalRegion = field(default_factory=FullSphere)
    gauge: Optional[SymmetricBody] = None

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError("q must be positive")
        if self.gauge is not None and self.gauge.n != self.body.n:
            raise ValueError("gauge and body dimensions differ")
        L = getattr(self.region, "L", None)
        if L is not None and L.n != self.body.n:
            raise ValueError("subspace and body dimensions differ")


# ---------------------------------------------------------------------------
# reverse radial Gauss image
# ---------------------------------------------------------------------------

def alpha_star_mask(body: SymmetricBody, U: np.ndarray, L: Subspace,
                    tie_tol: float = DEFAULT_TIE_TOL) -> np.ndarray:
    """Vectorised membership of the rows of ``U`` in ``alpha*_K(S^{n-1} & L)``.

    Directions on a tie (several supporting hyperplanes) count as members as
    soon as one of their normals lies in L.
    """
    U = np.atleast_2d(U)
    if isinstance(body, PolytopeH):
        in_L = L.contains(body.unit_normals)
        if not in_L.any():
            return np.zeros(len(U), dtype=bool)
        return np.any(body.attaining_mask(U, tie_tol)[:, in_L], axis=1)
    if isinstance(body, ProductCylinder):
        gap = body.lateral_gap(U)
        lateral, cap = gap >= -tie_tol, gap <= tie_tol
        if L.is_coordinate_block(body.k):
            return lateral
        k = body.k
        v1 = np.hstack([U[:, :k], np.zeros((len(U), body.n - k))])
        v2 = np.hstack([np.zeros((len(U), k)), U[:, k:]])
        return (lateral & _unit_in(v1, L)) | (cap & _unit_in(v2, L))
    if isinstance(body, Ellipsoid):
        return L.contains(body.normals(U))
    if isinstance(body, Ball):
        return L.contains(U)
    raise TypeError(f"unsupported body {type(body).__name__}")


def _unit_in(v, L):
    norm = np.linalg.norm(v, axis=1)
    ok = norm > 0
    out = np.zeros(len(v), dtype=bool)
    out[ok] = L.contains(v[ok] / norm[ok, None])
    return out


def alpha_star_member(body: SymmetricBody, u, L: Subspace, tie_tol: float = DEFAULT_TIE_TOL) -> bool:
    """Does some outer normal at ``rho_K(u) u`` lie in L?"""
    if isinstance(body, ProductCylinder) and L.is_coordinate_block(body.k):
        return bool(alpha_star_mask(body, np.asarray(u)[None], L, tie_tol)[0])
    return any(L.distance(v) <= MEMBER_TOL for v in body.attaining_normals(u, tie_tol))


def region_mask(body, U, region: SphericalRegion, tie_tol=DEFAULT_TIE_TOL):
    if isinstance(region, FullSphere):
        return np.ones(len(U), dtype=bool)
    mask = alpha_star_mask(body, U, region.L, tie_tol)
    return mask if isinstance(region, SubspaceSphere) else ~mask


def _weight(body, gauge, q, U):
    w = body.radial(U) ** q
    if gauge is not None:
        w = w * gauge.radial(U) ** (body.n - q)
    return w


# ---------------------------------------------------------------------------
# sphere estimator
# ---------------------------------------------------------------------------

def dual_curvature(query: DualCurvatureQuery, spec: QuadratureSpec,
                   tie_tol: float = DEFAULT_TIE_TOL) -> MeasureEstimate:
    """Monte Carlo estimate of the (gauged) q-th dual curvature measure."""
    body, q, n = query.body, query.q, query.body.n
    gauge = None if isinstance(query.gauge, Ball) and query.gauge.radius == 1 else query.gauge

    def f(U):
        return _weight(body, gauge, q, U) * region_mask(body, U, query.region, tie_tol)

    est = quad.integrate_sphere(f, n, spec)
    return MeasureEstimate(est.value / n, est.std_err / n, est.samples, est.seed)


def dual_curvature_table(body: SymmetricBody, qs, Ls, spec: QuadratureSpec,
                         gauge: Optional[SymmetricBody] = None,
                         tie_tol: float = DEFAULT_TIE_TOL) -> quad.Moments:
    """Joint sample moments of the totals and subspace masses on one stream.

    Row ``i * (1 + len(Ls))`` holds the full-sphere integrand for ``qs[i]``;
    the following ``len(Ls)`` rows hold the ``S^{n-1} & L`` integrands.  The
    integrands are the pointwise ``rho_M^(n-q) rho_K^q`` weights (times the
    region masks), so ``mean * area / n`` is the measure.
    """
    n = body.n
    qs, Ls = list(qs), list(Ls)

    if isinstance(body, PolytopeH):
        in_L = [L.contains(body.unit_normals) for L in Ls]

    def f(U):
        if isinstance(body, PolytopeH):
            # one pass over the facets serves the radial function and every mask
            inv = body.inverse_ratios(U)
            best = inv.max(axis=1)
            rho = 1.0 / best
            ties = inv >= (best * (1 - tie_tol))[:, None]
            masks = [ties[:, m].any(axis=1) if m.any() else np.zeros(len(U), dtype=bool) for m in in_L]
        else:
            rho = body.radial(U)
            masks = [alpha_star_mask(body, U, L, tie_tol) for L in Ls]
        rho_m = None if gauge is None else gauge.radial(U)
        rows = []
        for q in qs:
            w = rho**q if rho_m is None else rho**q * rho_m ** (n - q)
            rows.append(w)
            rows.extend(w * m for m in masks)
        return np.array(rows)

    return quad.sphere_moments(f, n, spec)


def measure_scale(n: int) -> float:
    return quad.sphere_area(n) / n


# ---------------------------------------------------------------------------
# Euclidean (volume) estimators
# ---------------------------------------------------------------------------

def gauge_power_sample(gauge: SymmetricBody, radius: float, exponent: float,
                       rng: np.random.Generator, size: int) -> np.ndarray:
    """Points in ``radius * M`` with density proportional to ``gauge_M(x)^exponent``.

    The direction is that of a uniform point of M (density ``rho_M(u)^n``)
    and the gauge value ``t`` has density ``~ t^(n + exponent - 1)`` on
    ``[0, radius]``.  Requires ``exponent > -n``.
    """
    n = gauge.n
    y = gauge.sample_uniform(rng, size)
    g = gauge.gauge(y)
    while np.any(g == 0):
        bad = g == 0
        y[bad] = gauge.sample_uniform(rng, int(bad.sum()))
        g = gauge.gauge(y)
    t = radius * rng.uniform(size=size) ** (1.0 / (n + exponent))
    return y * (t / g)[:, None]


def gauge_power_mass(gauge: SymmetricBody, radius: float, exponent: float) -> float:
    """``int_{radius M} gauge_M(x)^exponent dx``."""
    n = gauge.n
    return n * gauge.volume() * radius ** (n + exponent) / (n + exponent)


def dual_curvature_euclidean(query: DualCurvatureQuery, spec: QuadratureSpec,
                             method: str = "radial",
                             tie_tol: float = DEFAULT_TIE_TOL) -> MeasureEstimate:
    """Volume-integral estimate ``(q/n) int_{x in K, x/|x| in alpha*} rho_M(x)^(n-q) dx``.

    ``method="radial"`` draws x from the density ``~ rho_M(x)^(n-q)`` on a
    scaled copy of M enclosing K, so each sample contributes a constant
    times a membership indicator and the variance is finite for every
    q > 0.  ``method="box"`` is plain rejection from the bounding box of K;
    its variance is infinite when ``q <= n/2``.
    """
    body, q, n = query.body, query.q, query.body.n
    gauge = query.gauge if query.gauge is not None else Ball(1.0, n)

    def accept(x):
        norms = np.linalg.norm(x, axis=1)
        inside = body.contains(x) & (norms > 0)
        u = np.where(norms[:, None] > 0, x / np.maximum(norms, 1e-300)[:, None], 0.0)
        keep = np.zeros(len(x), dtype=bool)
        keep[inside] = region_mask(body, u[inside], query.region, tie_tol)
        return keep

    if method == "radial":
        # smallest R with K inside R*M
        radius = _enclosing_scale(body, gauge)
        const = q / n * gauge_power_mass(gauge, radius, q - n)

        def chunk(j, size):
            x = gauge_power_sample(gauge, radius, q - n, quad.chunk_rng(spec.seed, j, quad.RADIAL_STREAM), size)
            return const * accept(x)

    elif method == "box":
        w = body.half_widths()
        box_vol = float(np.prod(2 * w))

        def chunk(j, size):
            rng = quad.chunk_rng(spec.seed, j, quad.BOX_STREAM)
            x = rng.uniform(-w, w, size=(size, n))
            tiny = np.linalg.norm(x, axis=1) < 1e-12
            while tiny.any():
                x[tiny] = rng.uniform(-w, w, size=(int(tiny.sum()), n))
                tiny = np.linalg.norm(x, axis=1) < 1e-12
            vals = np.zeros(size)
            keep = accept(x)
            vals[keep] = q / n * box_vol * gauge.gauge(x[keep]) ** (q - n)
            return vals

    else:
        raise ValueError(f"unknown method {method!r}")

    return quad.estimate(quad.accumulate(chunk, spec), 1.0, spec)


def _enclosing_scale(body: SymmetricBody, gauge: SymmetricBody) -> float:
    if isinstance(body, PolytopeH):
        return float(gauge.gauge(body.vertices).max())
    if isinstance(gauge, Ball):
        return float(max(body.half_widths()) * np.sqrt(body.n))
    # a box corner is at least as far out in any gauge as the body
    w = body.half_widths()
    corners = np.array(list(itertools.product(*[(-c, c) for c in w])))
    return float(gauge.gauge(corners).max())


# ---------------------------------------------------------------------------
# exact cone volumes for polytopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FacetMasses:
    """Cone-volume mass carried by each stored antipodal pair of facets."""

    masses: np.ndarray
    redundant: tuple

    @property
    def total(self) -> float:
        return float(self.masses.sum())


def facet_masses(body: PolytopeH) -> FacetMasses:
    """Exact cone volumes ``(1/n) h_K(a_i) vol_{n-1}(F_i)`` per pair.

    The boundary is triangulated by qhull; each boundary simplex together
    with the origin spans a cone simplex whose volume is ``|det| / n!``.

    Raises
    ------
    DimensionTooLarge
        For n > 4.
    """
    n = body.n
    if n > 4:
        raise DimensionTooLarge("exact cone volumes are limited to n <= 4")
    a = np.vstack([body.normals, -body.normals])
    b = np.concatenate([body.offsets, body.offsets])
    pts = HalfspaceIntersection(np.hstack([a, -b[:, None]]), np.zeros(n)).intersections
    hull = ConvexHull(pts)
    m = len(body.offsets)
    masses = np.zeros(m)
    fact = float(np.prod(np.arange(1, n + 1)))
    for simplex, eq in zip(hull.simplices, hull.equations):
        # match the outward facet normal against the declared pairs
        idx = np.flatnonzero(np.abs(body.unit_normals @ eq[:n]) >= 1 - 1e-9)
        if len(idx) == 0:
            raise RuntimeError("boundary simplex matches no declared halfspace")
        masses[idx[0]] += abs(np.linalg.det(pts[simplex])) / fact
    redundant = tuple(int(i) for i in np.flatnonzero(masses == 0))
    if redundant:
        warnings.warn(f"halfspaces {list(redundant)} do not support facets", DegenerateFacetWarning, stacklevel=2)
    return FacetMasses(masses, redundant)


def cone_volume_exact(body: PolytopeH, L: Optional[Subspace] = None) -> float:
    """Exact cone-volume measure of ``S^{n-1} & L`` (whole sphere if L is None)."""
    fm = facet_masses(body)
    if L is None:
        return fm.total
    return float(fm.masses[L.contains(body.unit_normals)].sum())


def dual_quermass(body: SymmetricBody, i: int, spec: QuadratureSpec) -> MeasureEstimate:
    """Dual quermassintegral ``W~_{n-i}(K)``, the total mass of the i-th measure."""
    if not 0 < i <= body.n:
        raise ValueError("need 0 < i <= n")
    return dual_curvature(DualCurvatureQuery(body, float(i)), spec)
