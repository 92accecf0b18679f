"""Proper linear subspaces held as orthonormal bases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient

MEMBER_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of R^n with an orthonormal basis stored as rows."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.atleast_2d(np.array(self.basis, dtype=float))
        k, n = b.shape
        if not 1 <= k <= n - 1:
            raise ValueError("a proper subspace needs 1 <= dim <= n-1")
        if not np.allclose(b @ b.T, np.eye(k), rtol=0, atol=1e-12):
            raise ValueError("basis must be orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def project(self, v):
        return np.asarray(v, dtype=float) @ self.projector

    def distance(self, v):
        """Euclidean distance ``|v - P_L v|`` (vectorised over rows)."""
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(v - self.project(v), axis=-1)

    def contains(self, v, tol: float = MEMBER_TOL):
        return self.distance(v) <= tol

    def same_as(self, other: "Subspace", tol: float = 1e-9) -> bool:
        return self.n == other.n and np.allclose(self.projector, other.projector, atol=tol)

    def is_coordinate_block(self, k: int) -> bool:
        """True iff this is ``span(e_1, ..., e_k)``."""
        target = np.zeros((self.n, self.n))
        target[:k, :k] = np.eye(k)
        return self.dim == k and np.allclose(self.projector, target, atol=1e-12)


def make_subspace(vectors, tol: float = 1e-10) -> Subspace:
    """Orthonormalise ``vectors`` by Gram-Schmidt.

    Raises
    ------
    RankDeficient
        If the vectors are linearly dependent.
    """
    vs = np.atleast_2d(np.array(vectors, dtype=float))
    basis = []
    for v in vs:
        scale = np.linalg.norm(v)
        w = v.copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for b in basis:
                w -= (w @ b) * b
        norm = np.linalg.norm(w)
        if scale == 0 or norm <= tol * scale:
            raise RankDeficient("vectors are linearly dependent")
        basis.append(w / norm)
    if len(basis) >= vs.shape[1]:
        raise ValueError("a proper subspace needs fewer vectors than the dimension")
    return Subspace(np.array(basis))


def coordinate_subspace(n: int, indices) -> Subspace:
    return Subspace(np.eye(n)[list(indices)])


def random_subspace(n: int, k: int, rng: np.random.Generator) -> Subspace:
    return make_subspace(rng.standard_normal((k, n)))
