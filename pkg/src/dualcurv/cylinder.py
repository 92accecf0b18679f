"""Closed-form dual curvature measures of the product cylinders.

For ``K_r = (r B_k) x B_{n-k}`` and ``L = span(e_1, ..., e_k)`` both the
subspace mass and the total mass reduce to double integrals over the unit
square, with the constant

    c(q, k, n) = (q/n) * k omega_k * (n-k) omega_{n-k}.

As ``r -> 0`` the ratio tends to ``k/q`` when ``q > k`` and to 1 when
``q <= k``, so the concentration bound cannot be improved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import ProductCylinder, unit_ball_volume
from .quadrature import QuadratureSpec, integrate_unit_square


@dataclass(frozen=True)
class CylinderCase:
    n: int
    k: int
    q: float
    r: float

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise ValueError("need 1 <= k <= n-1")
        if not 0 < self.q <= self.n:
            raise ValueError("need 0 < q <= n")
        if self.r < 0:
            raise ValueError("r must be nonnegative")

    def body(self) -> ProductCylinder:
        return ProductCylinder(self.r, self.k, self.n)

    def with_r(self, r: float) -> "CylinderCase":
        return CylinderCase(self.n, self.k, self.q, r)


def cyl_constant(q: float, k: int, n: int) -> float:
    return q / n * k * unit_ball_volume(k) * (n - k) * unit_ball_volume(n - k)


def _tol(spec) -> float:
    return spec.rel_tol if isinstance(spec, QuadratureSpec) else float(spec)


def subspace_integrand(case: CylinderCase):
    n, k, q, r = case.n, case.k, case.q, case.r
    return lambda s, t: s ** (q - 1) * t ** (n - k - 1) * (r * r + t * t) ** ((q - n) / 2)


def total_integrand(case: CylinderCase):
    n, k, q, r = case.n, case.k, case.q, case.r
    return lambda s, t: s ** (k - 1) * t ** (n - k - 1) * (r * r * s * s + t * t) ** ((q - n) / 2)


def outer_integrand(case: CylinderCase):
    """Integrand of ``int_0^1 int_1^{1/s} ...`` after ``t = 1 + (1/s - 1) tau``."""
    n, k, q, r = case.n, case.k, case.q, case.r

    def g(s, tau):
        stretch = 1 / s - 1
        t = 1 + stretch * tau
        return s ** (q - 1) * t ** (n - k - 1) * (r * r + t * t) ** ((q - n) / 2) * stretch

    return g


def subspace_integral(case: CylinderCase, spec=1e-10) -> float:
    """``int int s^(q-1) t^(n-k-1) (r^2 + t^2)^((q-n)/2)`` over the unit square."""
    return integrate_unit_square(subspace_integrand(case), _tol(spec))


def total_integral(case: CylinderCase, spec=1e-10) -> float:
    """``int int s^(k-1) t^(n-k-1) (r^2 s^2 + t^2)^((q-n)/2)`` over the unit square."""
    return integrate_unit_square(total_integrand(case), _tol(spec))


def outer_integral(case: CylinderCase, spec=1e-10) -> float:
    """The part of the rewritten total with ``1 <= t <= 1/s``.

    This is the gap between the total and the subspace integrals; it stays
    bounded as ``r -> 0`` (limit ``1/(kq)``).
    """
    return integrate_unit_square(outer_integrand(case), _tol(spec))


def rewritten_total_integral(case: CylinderCase, spec=1e-10) -> float:
    """Total integral from the form ``int_0^1 int_0^{1/s} s^(q-1) ...``."""
    return subspace_integral(case, spec) + outer_integral(case, spec)


def cyl_subspace_measure(case: CylinderCase, spec=1e-10) -> float:
    """``C~_q(K_r, S^{n-1} & L)``."""
    return cyl_constant(case.q, case.k, case.n) * case.r**case.k * subspace_integral(case, spec)


def cyl_total_measure(case: CylinderCase, spec=1e-10, check_rewrite: bool = True) -> float:
    """``C~_q(K_r, S^{n-1})``; optionally cross-checked against the rewritten form."""
    inner = total_integral(case, spec)
    if check_rewrite:
        other = rewritten_total_integral(case, spec)
        tol = _tol(spec)
        # each side carries up to rel_tol of quadrature error
        if abs(inner - other) > 4 * tol * abs(inner):
            raise AssertionError(f"total forms disagree: {inner!r} vs {other!r}")
    return cyl_constant(case.q, case.k, case.n) * case.r**case.k * inner


def cyl_volume(case: CylinderCase) -> float:
    return case.r**case.k * unit_ball_volume(case.k) * unit_ball_volume(case.n - case.k)


def cyl_ratio(case: CylinderCase, spec=1e-10) -> float:
    """Concentration ratio of ``K_r`` on ``L = span(e_1..e_k)``."""
    return cyl_subspace_measure(case, spec) / cyl_total_measure(case, spec)


@dataclass(frozen=True)
class SweepRow:
    r: float
    subspace: float
    total: float
    ratio: float


def cyl_sweep(k: int, n: int, q: float, r_list, spec=1e-10) -> list[SweepRow]:
    """Subspace mass, total mass and ratio of ``K_r`` for each r."""
    r_list = [float(r) for r in r_list]
    if any(r <= 0 for r in r_list):
        raise ValueError("radii must be positive")
    if any(b >= a for a, b in zip(r_list, r_list[1:])):
        raise ValueError("radii must be strictly decreasing")
    rows = []
    for r in r_list:
        case = CylinderCase(n, k, q, r)
        sub = cyl_subspace_measure(case, spec)
        tot = cyl_total_measure(case, spec)
        rows.append(SweepRow(r, sub, tot, sub / tot))
    return rows


def limit_ratio(k: int, q: float) -> float:
    """``lim_{r -> 0+}`` of the ratio: ``min(k/q, 1)``."""
    return min(k / q, 1.0)


def lower_bound_total_integral(case: CylinderCase) -> float:
    """Explicit lower bound for the rewritten total integral when ``q <= k``, ``0 < r < 1``."""
    n, k, q, r = case.n, case.k, case.q, case.r
    if q < k:
        return 2 ** (q - n) / q * (r ** (q - k) - 1) / (k - q)
    if q == k:
        return 2 ** (q - n) / q * -np.log(r)
    raise ValueError("bound applies to q <= k only")
