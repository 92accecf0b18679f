"""Subspace concentration ratios and the checks built on them.

For a proper subspace L and q in (0, n] the ratio

    C~_q(K, S^{n-1} & L) / C~_q(K, S^{n-1})

of an origin-symmetric body never exceeds ``min(dim L / q, 1)``; equality
can only occur at ``q = n``, where the measure is the cone-volume measure
and equality means the mass splits between L and a complementary
subspace.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bodies import DEFAULT_TIE_TOL, PolytopeH, SymmetricBody
from .errors import DegenerateDenominator, DegenerateFacetWarning, DimensionTooLarge
from .measures import dual_curvature_table, facet_masses, measure_scale
from .quadrature import QuadratureSpec, derive_seed, ratio_estimate
from .subspace import Subspace, make_subspace

__all__ = [
    "Verdict",
    "RatioReport",
    "SCCEntry",
    "SCCReport",
    "Subspace",
    "make_subspace",
    "theorem_bound",
    "concentration_ratio",
    "concentration_ratios",
    "check_theorem_bound",
    "check_scc_polytope",
]

SIGMAS = 3.0
SCC_TOL = 1e-9


class Verdict(str, enum.Enum):
    STRICT_PASS = "StrictPass"
    EQUALITY_CANDIDATE = "EqualityCandidate"
    VIOLATION = "Violation"


def theorem_bound(dim_L: int, q: float) -> float:
    return min(dim_L / q, 1.0)


def classify(ratio: float, std_err: float, bound: float, sigmas: float = SIGMAS) -> Verdict:
    if ratio - sigmas * std_err > bound:
        return Verdict.VIOLATION
    if abs(ratio - bound) <= sigmas * std_err:
        return Verdict.EQUALITY_CANDIDATE
    return Verdict.STRICT_PASS


@dataclass
class RatioReport:
    ratio: float
    std_err: float
    bound: float
    q: float
    dim_L: int
    verdict: Verdict
    samples: int = 0
    seed: int = 0
    # set by check_theorem_bound for equality candidates
    confirmed: Optional[bool] = None

    @property
    def margin(self) -> float:
        return self.bound - self.ratio

    def as_dict(self) -> dict:
        return {
            "value": self.ratio,
            "std_err": self.std_err,
            "samples": self.samples,
            "seed": self.seed,
            "bound": self.bound,
            "margin": self.margin,
            "q": self.q,
            "dim_L": self.dim_L,
            "verdict": self.verdict.value,
            "confirmed": self.confirmed,
        }


def concentration_ratios(body: SymmetricBody, qs: Sequence[float], Ls: Sequence[Subspace],
                         spec: QuadratureSpec, gauge: Optional[SymmetricBody] = None,
                         tie_tol: float = DEFAULT_TIE_TOL) -> list[RatioReport]:
    """Ratio reports for every ``(q, L)`` pair, all from one sample stream.

    Reports are ordered q-major: ``reports[i * len(Ls) + j]`` belongs to
    ``(qs[i], Ls[j])``.
    """
    n = body.n
    for q in qs:
        if not 0 < q <= n:
            raise ValueError(f"q={q} outside (0, n]")
    for L in Ls:
        if L.n != n:
            raise ValueError("subspace and body dimensions differ")
    mom = dual_curvature_table(body, qs, Ls, spec, gauge=gauge, tie_tol=tie_tol)
    stride = 1 + len(Ls)
    reports = []
    for i, q in enumerate(qs):
        den = i * stride
        if not mom.mean[den] * measure_scale(n) > 0:
            raise DegenerateDenominator("total measure estimate is not positive")
        for j, L in enumerate(Ls):
            ratio, err = ratio_estimate(mom, den + 1 + j, den)
            bound = theorem_bound(L.dim, q)
            reports.append(RatioReport(ratio, err, bound, float(q), L.dim,
                                       classify(ratio, err, bound), mom.count, spec.seed))
    return reports


def concentration_ratio(body: SymmetricBody, q: float, L: Subspace, spec: QuadratureSpec,
                        gauge: Optional[SymmetricBody] = None,
                        tie_tol: float = DEFAULT_TIE_TOL) -> RatioReport:
    """Estimate ``C~_q(K, S & L) / C~_q(K, S)`` with both measures on shared samples."""
    return concentration_ratios(body, [q], [L], spec, gauge=gauge, tie_tol=tie_tol)[0]


# ---------------------------------------------------------------------------
# exact subspace concentration for polytopes
# ---------------------------------------------------------------------------

@dataclass
class SCCEntry:
    subspace: Subspace
    mass: float
    ratio: float
    bound: float
    equality: bool
    complement: Optional[Subspace] = None
    complement_ok: Optional[bool] = None

    @property
    def dim(self) -> int:
        return self.subspace.dim


@dataclass
class SCCReport:
    total: float
    entries: list = field(default_factory=list)
    redundant: tuple = ()

    @property
    def holds(self) -> bool:
        return all(e.ratio <= e.bound + SCC_TOL and (not e.equality or e.complement_ok)
                   for e in self.entries)

    @property
    def equality_subspaces(self) -> list:
        return [e.subspace for e in self.entries if e.equality]

    def is_equality_subspace(self, L: Subspace) -> bool:
        return any(L.same_as(S) for S in self.equality_subspaces)

    def confirms(self, L: Subspace) -> bool:
        """L is an equality subspace whose complement carries the rest of the mass."""
        return any(e.equality and e.complement_ok and L.same_as(e.subspace) for e in self.entries)


def _span(vectors) -> Optional[Subspace]:
    vs = np.atleast_2d(vectors)
    _, sv, vt = np.linalg.svd(vs)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    if not 1 <= rank <= vs.shape[1] - 1:
        return None
    basis = vt[:rank]
    # orient each basis row so its leading nonzero entry is positive
    lead = basis[np.arange(rank), np.argmax(np.abs(basis) > 1e-12, axis=1)]
    return Subspace(basis * np.sign(lead)[:, None])


def check_scc_polytope(body: PolytopeH) -> SCCReport:
    """Exhaustively check the subspace concentration condition of a polytope.

    Candidate subspaces are the spans of subsets of (non-redundant) facet
    normals with at most ``n - 1`` elements, since only those can carry
    cone-volume mass.
    """
    n = body.n
    if n > 4:
        raise DimensionTooLarge("exact cone volumes are limited to n <= 4")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateFacetWarning)
        fm = facet_masses(body)
    total = fm.total
    live = [i for i in range(len(fm.masses)) if fm.masses[i] > 0]
    normals = body.unit_normals

    seen: list[Subspace] = []
    for size in range(1, n):
        for subset in itertools.combinations(live, size):
            L = _span(normals[list(subset)])
            if L is None or any(L.same_as(S) for S in seen):
                continue
            seen.append(L)

    report = SCCReport(total=total, redundant=fm.redundant)
    for L in seen:
        in_L = L.contains(normals)
        mass = float(fm.masses[in_L].sum())
        ratio = mass / total
        bound = L.dim / n
        equality = abs(ratio - bound) <= SCC_TOL
        entry = SCCEntry(L, mass, ratio, bound, equality)
        if equality:
            rest = [i for i in live if not in_L[i]]
            comp = _span(normals[rest]) if rest else None
            entry.complement = comp
            if comp is None:
                entry.complement_ok = False
            else:
                joint = np.linalg.matrix_rank(np.vstack([L.basis, comp.basis]), tol=1e-10)
                comp_mass = float(fm.masses[comp.contains(normals)].sum())
                entry.complement_ok = (L.dim + comp.dim == n and joint == n
                                       and abs(mass + comp_mass - total) <= SCC_TOL * total)
        report.entries.append(entry)
    return report


def check_theorem_bound(bodies: Sequence[SymmetricBody], qs: Sequence[float], Ls,
                        spec: QuadratureSpec, tie_tol: float = DEFAULT_TIE_TOL) -> list[RatioReport]:
    """Run the ratio over a grid of bodies, q values and subspaces.

    ``Ls`` is either one list of subspaces shared by every body or a list
    with one such list per body.  Body ``i`` is sampled with the seed
    derived from ``(spec.seed, i)``.  Equality candidates get
    ``confirmed=True`` only when ``q = n`` and the exact cone-volume check
    finds an equality subspace with complementary structure at L.
    """
    per_body = len(Ls) > 0 and not isinstance(Ls[0], Subspace)
    reports = []
    for i, body in enumerate(bodies):
        n = body.n
        for q in qs:
            if not 1 <= q <= n:
                raise ValueError(f"q={q} outside [1, n]")
        subspaces = list(Ls[i]) if per_body else list(Ls)
        rows = concentration_ratios(body, qs, subspaces, spec.with_seed(derive_seed(spec.seed, i)),
                                    tie_tol=tie_tol)
        scc = None
        for idx, rep in enumerate(rows):
            if rep.verdict is not Verdict.EQUALITY_CANDIDATE:
                continue
            L = subspaces[idx % len(subspaces)]
            if rep.q == n and isinstance(body, PolytopeH) and n <= 4:
                scc = scc or check_scc_polytope(body)
                rep.confirmed = scc.confirms(L)
            else:
                rep.confirmed = False
        reports.extend(rows)
    return reports
