"""Convex bodies with exact support, radial and normal queries.

Four origin-symmetric representations are provided (:class:`Ball`,
:class:`Ellipsoid`, :class:`PolytopeH`, :class:`ProductCylinder`) together
with :class:`GeneralPolytopeV`, a possibly non-symmetric vertex polytope in
dimension 2 or 3 used by the unimodal-function harness.

All query methods are vectorised: a direction argument of shape ``(n,)``
returns a scalar, an argument of shape ``(N, n)`` returns an array of
length ``N``.  Bodies are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gamma, pi, sqrt
from typing import Union

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

DEFAULT_TIE_TOL = 1e-9
_CONTAIN_TOL = 1e-12


def unit_ball_volume(m: int) -> float:
    """Volume of the m-dimensional Euclidean unit ball (1 for m = 0)."""
    return pi ** (m / 2) / gamma(m / 2 + 1)


def _rows(x):
    x = np.asarray(x, dtype=float)
    return np.atleast_2d(x), x.ndim == 1


def _out(values, single):
    return float(values[0]) if single else values


def _unit(v, axis=-1):
    norm = np.linalg.norm(v, axis=axis, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(norm > 0, v / norm, 0.0)


class SymmetricBody:
    """Interface shared by the origin-symmetric representations."""

    n: int

    def radial(self, u):
        raise NotImplementedError

    def support(self, x):
        raise NotImplementedError

    def contains(self, x):
        raise NotImplementedError

    def attaining_normals(self, u, tie_tol: float = DEFAULT_TIE_TOL) -> list:
        raise NotImplementedError

    def scaled(self, c: float) -> "SymmetricBody":
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def gauge(self, x):
        """Minkowski gauge ``|x| / rho(x/|x|)``; zero at the origin."""
        pts, single = _rows(x)
        norms = np.linalg.norm(pts, axis=1)
        out = np.zeros(len(pts))
        nz = norms > 0
        out[nz] = norms[nz] / self.radial(pts[nz] / norms[nz, None])
        return _out(out, single)

    def half_widths(self) -> np.ndarray:
        """Half side lengths of the smallest centred box containing the body."""
        return np.array([self.support(e) for e in np.eye(self.n)])

    def sample_uniform(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Uniform points in the body by rejection from the bounding box."""
        w = self.half_widths()
        out = np.empty((0, self.n))
        while len(out) < size:
            batch = max(2 * (size - len(out)), 64)
            pts = rng.uniform(-w, w, size=(batch, self.n))
            out = np.vstack([out, pts[self.contains(pts)]])
        return out[:size]


@dataclass(frozen=True)
class Ball(SymmetricBody):
    """Centred Euclidean ball of the given radius in R^n."""

    radius: float = 1.0
    n: int = 3

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.n < 1:
            raise ValueError("dimension must be positive")

    def radial(self, u):
        pts, single = _rows(u)
        return _out(np.full(len(pts), float(self.radius)), single)

    def support(self, x):
        pts, single = _rows(x)
        return _out(self.radius * np.linalg.norm(pts, axis=1), single)

    def contains(self, x):
        pts, single = _rows(x)
        inside = np.linalg.norm(pts, axis=1) <= self.radius * (1 + _CONTAIN_TOL)
        return bool(inside[0]) if single else inside

    def attaining_normals(self, u, tie_tol=DEFAULT_TIE_TOL):
        return [_unit(np.asarray(u, dtype=float))]

    def scaled(self, c):
        return Ball(self.radius * c, self.n)

    def volume(self):
        return unit_ball_volume(self.n) * self.radius**self.n

    def sample_uniform(self, rng, size):
        g = rng.standard_normal((size, self.n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        t = rng.uniform(size=size) ** (1.0 / self.n)
        return self.radius * t[:, None] * g


@dataclass(frozen=True, eq=False)
class Ellipsoid(SymmetricBody):
    """The body ``{x : x^T A x <= 1}`` for symmetric positive definite A."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("ellipsoid matrix must be square")
        if not np.allclose(a, a.T, rtol=0, atol=1e-12 * np.abs(a).max()):
            raise ValueError("ellipsoid matrix must be symmetric")
        a = (a + a.T) / 2
        if np.linalg.eigvalsh(a).min() <= 0:
            raise ValueError("ellipsoid matrix must be positive definite")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _inverse(self):
        return np.linalg.inv(self.matrix)

    def radial(self, u):
        pts, single = _rows(u)
        quad = np.einsum("ij,jk,ik->i", pts, self.matrix, pts)
        return _out(quad**-0.5, single)

    def support(self, x):
        pts, single = _rows(x)
        quad = np.einsum("ij,jk,ik->i", pts, self._inverse, pts)
        return _out(np.sqrt(np.maximum(quad, 0.0)), single)

    def contains(self, x):
        pts, single = _rows(x)
        quad = np.einsum("ij,jk,ik->i", pts, self.matrix, pts)
        inside = quad <= 1 + _CONTAIN_TOL
        return bool(inside[0]) if single else inside

    def normals(self, u):
        """Outer unit normal at the boundary point in each direction of ``u``."""
        pts, single = _rows(u)
        v = _unit(pts @ self.matrix)
        return v[0] if single else v

    def attaining_normals(self, u, tie_tol=DEFAULT_TIE_TOL):
        return [self.normals(u)]

    def scaled(self, c):
        return Ellipsoid(self.matrix / c**2)

    def volume(self):
        return unit_ball_volume(self.n) / sqrt(np.linalg.det(self.matrix))

    def sample_uniform(self, rng, size):
        w, v = np.linalg.eigh(self.matrix)
        root_inv = (v / np.sqrt(w)) @ v.T
        return Ball(1.0, self.n).sample_uniform(rng, size) @ root_inv


@dataclass(frozen=True, eq=False)
class PolytopeH(SymmetricBody):
    """Symmetric polytope ``{x : |<a_i, x>| <= b_i for all i}``.

    Each stored row ``(a_i, b_i)`` stands for the antipodal pair of
    halfspaces ``<a_i, x> <= b_i`` and ``<-a_i, x> <= b_i``.
    """

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.normals, dtype=float))
        b = np.atleast_1d(np.array(self.offsets, dtype=float))
        if b.ndim != 1 or a.shape[0] != b.shape[0]:
            raise ValueError("need one offset per normal row")
        if np.any(np.linalg.norm(a, axis=1) == 0):
            raise ValueError("normals must be nonzero")
        if np.any(b <= 0):
            raise ValueError("origin not interior: offsets must be positive")
        if np.linalg.matrix_rank(a) < a.shape[1]:
            raise ValueError("normals do not span R^n; polytope is unbounded")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", b)

    @property
    def n(self) -> int:
        return self.normals.shape[1]

    @cached_property
    def unit_normals(self) -> np.ndarray:
        return self.normals / np.linalg.norm(self.normals, axis=1, keepdims=True)

    @cached_property
    def vertices(self) -> np.ndarray:
        """Vertices of the polytope (qhull halfspace intersection)."""
        a = np.vstack([self.normals, -self.normals])
        b = np.concatenate([self.offsets, self.offsets])
        hs = HalfspaceIntersection(np.hstack([a, -b[:, None]]), np.zeros(self.n))
        pts = hs.intersections
        hull = ConvexHull(pts)
        return pts[hull.vertices]

    def inverse_ratios(self, u) -> np.ndarray:
        """``|<a_i, u>| / b_i`` for every direction and stored pair."""
        pts, _ = _rows(u)
        return np.abs(pts @ self.normals.T) / self.offsets

    def radial(self, u):
        pts, single = _rows(u)
        return _out(1.0 / self.inverse_ratios(pts).max(axis=1), single)

    def support(self, x):
        pts, single = _rows(x)
        return _out((pts @ self.vertices.T).max(axis=1), single)

    def contains(self, x):
        pts, single = _rows(x)
        inside = np.all(np.abs(pts @ self.normals.T) <= self.offsets * (1 + _CONTAIN_TOL), axis=1)
        return bool(inside[0]) if single else inside

    def attaining_mask(self, u, tie_tol=DEFAULT_TIE_TOL) -> np.ndarray:
        """Boolean ``(N, m)`` mask of pairs whose facet carries ``rho(u) u``."""
        inv = self.inverse_ratios(u)
        best = inv.max(axis=1, keepdims=True)
        return inv >= best * (1 - tie_tol)

    def attaining_normals(self, u, tie_tol=DEFAULT_TIE_TOL):
        u = np.asarray(u, dtype=float)
        mask = self.attaining_mask(u, tie_tol)[0]
        signs = np.sign(self.normals @ u)
        return [signs[i] * self.unit_normals[i] for i in np.flatnonzero(mask)]

    def scaled(self, c):
        return PolytopeH(self.normals, self.offsets * c)

    def volume(self):
        return float(ConvexHull(self.vertices).volume)


@dataclass(frozen=True)
class ProductCylinder(SymmetricBody):
    """The product ``(r B_k) x (r2 B_{n-k})``; ``r2 = 1`` gives the tight family."""

    r: float
    k: int
    n: int
    r2: float = 1.0

    def __post_init__(self):
        if not (self.r > 0 and self.r2 > 0):
            raise ValueError("cylinder radii must be positive")
        if not 1 <= self.k <= self.n - 1:
            raise ValueError("need 1 <= k <= n-1")

    def _blocks(self, pts):
        return (np.linalg.norm(pts[:, : self.k], axis=1),
                np.linalg.norm(pts[:, self.k :], axis=1))

    def radial(self, u):
        pts, single = _rows(u)
        n1, n2 = self._blocks(pts)
        with np.errstate(divide="ignore"):
            rho = np.minimum(np.where(n1 > 0, self.r / n1, np.inf),
                             np.where(n2 > 0, self.r2 / n2, np.inf))
        return _out(rho, single)

    def support(self, x):
        pts, single = _rows(x)
        n1, n2 = self._blocks(pts)
        return _out(self.r * n1 + self.r2 * n2, single)

    def contains(self, x):
        pts, single = _rows(x)
        n1, n2 = self._blocks(pts)
        tol = 1 + _CONTAIN_TOL
        inside = (n1 <= self.r * tol) & (n2 <= self.r2 * tol)
        return bool(inside[0]) if single else inside

    def lateral_gap(self, u) -> np.ndarray:
        """Signed relative gap ``(r2|u1| - r|u2|) / max(...)``; >= 0 on the lateral side."""
        pts, _ = _rows(u)
        n1, n2 = self._blocks(pts)
        lat, cap = self.r2 * n1, self.r * n2
        scale = np.maximum(np.maximum(lat, cap), np.finfo(float).tiny)
        return (lat - cap) / scale

    def attaining_normals(self, u, tie_tol=DEFAULT_TIE_TOL):
        u = np.asarray(u, dtype=float)
        gap = float(self.lateral_gap(u)[0])
        out = []
        if gap >= -tie_tol:
            out.append(np.concatenate([_unit(u[: self.k]), np.zeros(self.n - self.k)]))
        if gap <= tie_tol:
            out.append(np.concatenate([np.zeros(self.k), _unit(u[self.k :])]))
        return out

    def scaled(self, c):
        return ProductCylinder(self.r * c, self.k, self.n, self.r2 * c)

    def volume(self):
        return (unit_ball_volume(self.k) * self.r**self.k
                * unit_ball_volume(self.n - self.k) * self.r2 ** (self.n - self.k))

    def sample_uniform(self, rng, size):
        a = Ball(self.r, self.k).sample_uniform(rng, size)
        b = Ball(self.r2, self.n - self.k).sample_uniform(rng, size)
        return np.hstack([a, b])


@dataclass(frozen=True, eq=False)
class GeneralPolytopeV:
    """Full-dimensional polytope in R^2 or R^3 given by a vertex list.

    The vertex list may contain interior points; only its convex hull
    matters.  The body need not be symmetric nor contain the origin.
    """

    vertices: np.ndarray
    _hull: ConvexHull = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.atleast_2d(np.array(self.vertices, dtype=float))
        if v.shape[1] not in (2, 3):
            raise ValueError("GeneralPolytopeV supports n in {2, 3}")
        if np.linalg.matrix_rank(v[1:] - v[0], tol=1e-10) < v.shape[1]:
            raise ValueError("vertex set is not full-dimensional")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_hull", ConvexHull(v))

    @property
    def n(self) -> int:
        return self.vertices.shape[1]

    @property
    def hull_vertices(self) -> np.ndarray:
        return self.vertices[self._hull.vertices]

    def volume(self) -> float:
        return float(self._hull.volume)

    def contains(self, x):
        """Membership via the hull facet inequalities (vectorised)."""
        pts, single = _rows(x)
        eq = self._hull.equations
        scale = max(1.0, float(np.abs(self.vertices).max()))
        inside = np.all(pts @ eq[:, :-1].T + eq[:, -1] <= 1e-12 * scale, axis=1)
        return bool(inside[0]) if single else inside

    def contains_lp(self, x) -> bool:
        """Exact membership test: is ``x`` a convex combination of the vertices?"""
        x = np.asarray(x, dtype=float)
        m = len(self.vertices)
        a_eq = np.vstack([self.vertices.T, np.ones(m)])
        b_eq = np.concatenate([x, [1.0]])
        res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        return res.status == 0

    def support(self, x):
        pts, single = _rows(x)
        return _out((pts @ self.hull_vertices.T).max(axis=1), single)

    def reflected(self) -> "GeneralPolytopeV":
        return GeneralPolytopeV(-self.vertices)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


Body = Union[SymmetricBody, GeneralPolytopeV]


def support(body: Body, x):
    """Support function ``h_K(x) = max_{y in K} <x, y>``."""
    return body.support(x)


def radial(body: SymmetricBody, u):
    """Radial function ``rho_K(u) = max{rho > 0 : rho u in K}``."""
    return body.radial(u)


def attaining_normals(body: SymmetricBody, u, tie_tol: float = DEFAULT_TIE_TOL) -> list:
    """Unit outer normals of the supporting hyperplanes at ``rho_K(u) u``."""
    return body.attaining_normals(u, tie_tol)


def contains(body: Body, x):
    return body.contains(x)


def minkowski_lambda(body: GeneralPolytopeV, lam: float) -> GeneralPolytopeV:
    """The combination ``lam K + (1 - lam)(-K)`` as a vertex polytope."""
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    v = body.hull_vertices
    cand = (lam * v[:, None, :] - (1 - lam) * v[None, :, :]).reshape(-1, body.n)
    return GeneralPolytopeV(cand)


def minkowski_combination(k0: GeneralPolytopeV, k1: GeneralPolytopeV, lam: float) -> GeneralPolytopeV:
    """``(1 - lam) K0 + lam K1`` from pairwise vertex sums."""
    v0, v1 = k0.hull_vertices, k1.hull_vertices
    cand = ((1 - lam) * v0[:, None, :] + lam * v1[None, :, :]).reshape(-1, k0.n)
    return GeneralPolytopeV(cand)


def cube(n: int, half: float = 1.0) -> PolytopeH:
    """The cube ``[-half, half]^n``."""
    return PolytopeH(np.eye(n), np.full(n, float(half)))


def cross_polytope(n: int) -> PolytopeH:
    """The cross-polytope ``sum |x_i| <= 1``."""
    import itertools

    rows = [s for s in itertools.product((1.0, -1.0), repeat=n) if s[0] > 0]
    return PolytopeH(np.array(rows), np.ones(len(rows)))


def random_symmetric_polytope(n: int, pairs: int, rng: np.random.Generator) -> PolytopeH:
    """Random normals on the sphere with offsets uniform in [0.5, 1.5]."""
    while True:
        a = rng.standard_normal((pairs, n))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        if np.linalg.matrix_rank(a) == n:
            return PolytopeH(a, rng.uniform(0.5, 1.5, size=pairs))
