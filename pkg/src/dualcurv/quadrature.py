"""Seeded Monte Carlo on spheres and graded Gauss-Legendre on the unit square.

Sampling is organised in fixed-size chunks.  Chunk ``j`` of a run with seed
``s`` draws from ``SeedSequence(s, spawn_key=(stream, j))``, so the value of
every sample depends only on ``(seed, index)`` and never on how chunks are
scheduled.  Chunk statistics are merged in chunk order, which makes the
results bit-identical for any number of worker threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from .bodies import unit_ball_volume
from .errors import NoConvergence, NonFinite

THREADS_ENV = "DUALCURV_THREADS"

# stream identifiers keep independent estimators off each other's samples
SPHERE_STREAM = 0
BOX_STREAM = 1
RADIAL_STREAM = 2


@dataclass(frozen=True)
class QuadratureSpec:
    samples: int = 10**6
    seed: int = 0
    chunk: int = 2**16
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")

    def with_seed(self, seed: int) -> "QuadratureSpec":
        return QuadratureSpec(self.samples, seed, self.chunk, self.rel_tol)

    def with_samples(self, samples: int) -> "QuadratureSpec":
        return QuadratureSpec(samples, self.seed, self.chunk, self.rel_tol)

    def chunk_sizes(self) -> list[int]:
        full, rest = divmod(self.samples, self.chunk)
        return [self.chunk] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    std_err: float
    samples: int
    seed: int

    def __str__(self):
        return f"{self.value:.6g} +/- {self.std_err:.2g} (N={self.samples}, seed={self.seed})"


def derive_seed(seed: int, *key: int) -> int:
    """Child seed for grid point ``key`` of a run with master ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def chunk_rng(seed: int, index: int, stream: int = SPHERE_STREAM) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, index))))


def sphere_area(n: int) -> float:
    """Surface area ``n * omega_n`` of the unit sphere in R^n."""
    return n * unit_ball_volume(n)


def _directions(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    g = rng.standard_normal((size, n))
    norm = np.linalg.norm(g, axis=1)
    bad = norm == 0
    while bad.any():
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        norm = np.linalg.norm(g, axis=1)
        bad = norm == 0
    return g / norm[:, None]


def sphere_chunks(n: int, spec: QuadratureSpec) -> Iterator[np.ndarray]:
    """Yield the uniform directions of a run chunk by chunk."""
    if n < 2:
        raise ValueError("sphere sampling needs n >= 2")
    for j, size in enumerate(spec.chunk_sizes()):
        yield _directions(chunk_rng(spec.seed, j, SPHERE_STREAM), size, n)


def sample_sphere(n: int, spec: QuadratureSpec) -> np.ndarray:
    """All directions of a run as an ``(samples, n)`` array."""
    return np.vstack(list(sphere_chunks(n, spec)))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class Moments:
    """Running mean and centred cross-product matrix of vector samples."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        values = np.atleast_2d(values)
        if not np.all(np.isfinite(values)):
            raise NonFinite("integrand returned a non-finite value")
        count = values.shape[1]
        mean = values.mean(axis=1)
        centred = values - mean[:, None]
        return cls(count, mean, centred @ centred.T)

    def merge(self, other: "Moments") -> "Moments":
        # Chan et al. pairwise update
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + np.outer(delta, delta) * (self.count * other.count / n)
        return Moments(n, mean, m2)

    @property
    def cov(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.m2)
        return self.m2 / (self.count - 1)


def accumulate(chunk_fn: Callable[[int, int], np.ndarray], spec: QuadratureSpec) -> Moments:
    """Evaluate ``chunk_fn(index, size) -> (m, size)`` over all chunks and merge.

    Chunks are evaluated on up to ``DUALCURV_THREADS`` threads; merging is
    always done in chunk order.
    """
    sizes = spec.chunk_sizes()

    def task(j):
        return Moments.of(chunk_fn(j, sizes[j]))

    workers = min(worker_count(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(task, range(len(sizes))))
    else:
        parts = [task(j) for j in range(len(sizes))]
    total = parts[0]
    for p in parts[1:]:
        total = total.merge(p)
    return total


def sphere_moments(f: Callable[[np.ndarray], np.ndarray], n: int, spec: QuadratureSpec) -> Moments:
    """Moments of the (possibly vector-valued) ``f`` over uniform directions."""
    if n < 2:
        raise ValueError("sphere sampling needs n >= 2")

    def chunk(j, size):
        return np.atleast_2d(f(_directions(chunk_rng(spec.seed, j, SPHERE_STREAM), size, n)))

    return accumulate(chunk, spec)


def estimate(mom: Moments, scale: float, spec: QuadratureSpec, row: int = 0) -> MeasureEstimate:
    var = max(float(mom.cov[row, row]), 0.0)
    return MeasureEstimate(
        value=scale * float(mom.mean[row]),
        std_err=abs(scale) * np.sqrt(var / mom.count),
        samples=mom.count,
        seed=spec.seed,
    )


def integrate_sphere(f: Callable[[np.ndarray], np.ndarray], n: int, spec: QuadratureSpec) -> MeasureEstimate:
    """Monte Carlo estimate of ``int_{S^{n-1}} f dH^{n-1}``.

    ``f`` maps an ``(N, n)`` array of unit vectors to ``N`` values.

    Raises
    ------
    NonFinite
        If any sample of ``f`` is NaN or infinite.
    """
    return estimate(sphere_moments(f, n, spec), sphere_area(n), spec)


def ratio_estimate(mom: Moments, num: int, den: int) -> tuple[float, float]:
    """Ratio of two sample means and its delta-method standard error."""
    mu_a, mu_b = float(mom.mean[num]), float(mom.mean[den])
    ratio = mu_a / mu_b
    c = mom.cov
    var = c[num, num] - 2 * ratio * c[num, den] + ratio**2 * c[den, den]
    return ratio, float(np.sqrt(max(var, 0.0) / mom.count)) / abs(mu_b)


# ---------------------------------------------------------------------------
# graded Gauss-Legendre on (0, 1]^2
# ---------------------------------------------------------------------------

GRADING_RATIO = 0.5
GRADING_LEVELS = 40
ORDERS = (4, 8, 16, 32, 64)
TAIL_RATIO_TOL = 1e-6
# ratio 2^-(a+1) for exponents a > -0.99; closer to -1 the series is not trusted
TAIL_RATIO_MAX = 2 ** -0.01


@lru_cache(maxsize=None)
def graded_rule(order: int, levels: int = GRADING_LEVELS, ratio: float = GRADING_RATIO):
    """Nodes, weights and panel labels on (0, 1] with panels ``[ratio^(j+1), ratio^j]``.

    The innermost panel ``[0, ratio^levels]`` carries label ``levels``.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.concatenate([ratio ** np.arange(levels + 1), [0.0]])
    nodes, weights = [], []
    for hi, lo in zip(edges[:-1], edges[1:]):
        half = (hi - lo) / 2
        nodes.append(lo + half * (x + 1))
        weights.append(half * w)
    nodes, weights = np.concatenate(nodes), np.concatenate(weights)
    labels = np.repeat(np.arange(levels + 1), order)
    for a in (nodes, weights, labels):
        a.setflags(write=False)
    return nodes, weights, labels


def _panel_total(panels: np.ndarray) -> np.ndarray:
    """Sum panel integrals along the last axis, extrapolating the innermost one.

    Near an integrable power singularity the panel integrals form a geometric
    series with ratio ``2^-(a+1)``; the innermost panel is replaced by the sum
    of that series read off the last graded panels.  The plain Gauss-Legendre
    value is kept unless the last two ratios agree and lie in
    ``(0, TAIL_RATIO_MAX)``.
    """
    core = panels[..., -1]
    p1, p2, p3 = panels[..., -2], panels[..., -3], panels[..., -4]
    with np.errstate(divide="ignore", invalid="ignore"):
        rho, rho_prev = p1 / p2, p2 / p3
        tail = p1 * rho / (1 - rho)
    ok = np.isfinite(tail) & (rho > 0) & (rho < TAIL_RATIO_MAX) & (np.abs(rho - rho_prev) <= TAIL_RATIO_TOL * rho)
    return panels[..., :-1].sum(axis=-1) + np.where(ok, tail, core)


def tensor_rule(g: Callable, order: int) -> float:
    x, w, labels = graded_rule(order)
    s, t = np.meshgrid(x, x, indexing="ij")
    vals = g(s, t) * w[None, :]
    count = labels[-1] + 1
    # integrate over t panel by panel, then over s
    by_t = np.stack([vals[:, labels == p].sum(axis=1) for p in range(count)], axis=-1)
    inner = _panel_total(by_t) * w
    by_s = np.array([inner[labels == p].sum() for p in range(count)])
    return float(_panel_total(by_s))


def integrate_unit_square(g: Callable[[np.ndarray, np.ndarray], np.ndarray], rel_tol: float = 1e-8) -> float:
    """``int_0^1 int_0^1 g(s, t) dt ds`` on a grid graded toward both axes.

    The Gauss-Legendre order per panel is doubled until two successive
    values agree to ``rel_tol``.

    Raises
    ------
    NoConvergence
        If the tolerance is not met at the highest order.
    """
    if isinstance(rel_tol, QuadratureSpec):
        rel_tol = rel_tol.rel_tol
    prev = None
    for order in ORDERS:
        val = tensor_rule(g, order)
        if not np.isfinite(val):
            raise NonFinite("integrand is not finite on the quadrature grid")
        if prev is not None and abs(val - prev) <= rel_tol * abs(val):
            return val
        if prev is not None and val == 0.0 and prev == 0.0:
            return 0.0
        prev = val
    raise NoConvergence(f"graded rule did not reach rel_tol={rel_tol:g}; last two values {prev!r}")
