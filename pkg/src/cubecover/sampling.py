"""Point-placement schemes and target priors.

Design points live in the delta-cube C_delta = [1/2-delta/2, 1/2+delta/2]^d.
Supported schemes: i.i.d. uniform on C_delta, i.i.d. product-beta on C_delta
(bowl-shaped for alpha < 1; the alpha = 1 case *is* the uniform scheme),
Sobol points rescaled into C_delta, and the vertex design (centre of [0,1]^d
plus random distinct vertices of [1/4, 3/4]^d).  Targets are drawn uniformly
or with i.i.d. symmetric Beta(alpha, alpha) coordinates on [0,1]^d.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaincinv

from .sobol import sobol_points
from .streams import SeededStream

__all__ = [
    "Design",
    "PriorKind",
    "SamplingScheme",
    "SchemeKind",
    "TargetPrior",
    "hamming_threshold",
    "min_hamming_vertex_design",
    "sample_design",
    "sample_target",
    "sample_targets",
]


class SchemeKind(enum.Enum):
    UNIFORM_DELTA_CUBE = "uniform"
    BETA_DELTA_CUBE = "beta"
    SOBOL_DELTA_CUBE = "sobol"
    VERTEX_DESIGN = "vertex"


class PriorKind(enum.Enum):
    UNIFORM = "uniform"
    PRODUCT_BETA = "beta"


@dataclass(frozen=True)
class SamplingScheme:
    """How design points are placed inside the delta-cube."""

    kind: SchemeKind
    dimension: int
    delta: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.kind is SchemeKind.VERTEX_DESIGN and self.delta != 0.5:
            raise ValueError("the vertex design uses the fixed cube [1/4, 3/4]^d (delta = 1/2)")

    @classmethod
    def uniform(cls, dimension: int, delta: float = 1.0) -> "SamplingScheme":
        return cls(SchemeKind.UNIFORM_DELTA_CUBE, dimension, delta)

    @classmethod
    def beta(cls, dimension: int, alpha: float, delta: float = 1.0) -> "SamplingScheme":
        return cls(SchemeKind.BETA_DELTA_CUBE, dimension, delta, alpha)

    @classmethod
    def sobol(cls, dimension: int, delta: float = 1.0) -> "SamplingScheme":
        return cls(SchemeKind.SOBOL_DELTA_CUBE, dimension, delta)

    @classmethod
    def vertex(cls, dimension: int) -> "SamplingScheme":
        return cls(SchemeKind.VERTEX_DESIGN, dimension, 0.5)

    @property
    def is_iid(self) -> bool:
        return self.kind in (SchemeKind.UNIFORM_DELTA_CUBE, SchemeKind.BETA_DELTA_CUBE)

    @property
    def effective_alpha(self) -> float:
        return self.alpha if self.kind is SchemeKind.BETA_DELTA_CUBE else 1.0


@dataclass(frozen=True)
class TargetPrior:
    """Distribution of the unknown target point on [0,1]^d."""

    kind: PriorKind
    dimension: int
    alpha: float = 1.0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")

    @classmethod
    def uniform(cls, dimension: int) -> "TargetPrior":
        return cls(PriorKind.UNIFORM, dimension)

    @classmethod
    def product_beta(cls, dimension: int, alpha: float) -> "TargetPrior":
        return cls(PriorKind.PRODUCT_BETA, dimension, alpha)


@dataclass(frozen=True)
class Design:
    """An ordered point set with provenance metadata."""

    points: np.ndarray
    scheme: SamplingScheme | None = None
    stream: SeededStream | None = None
    shortfall: bool = field(default=False)  # Hamming design could not reach n_max

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if pts.shape[0] < 1:
            raise ValueError("a design needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("design coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


def beta_quantile(alpha: float, u: np.ndarray) -> np.ndarray:
    """Inverse cdf of the symmetric Beta(alpha, alpha) law on [0,1].

    alpha = 1 short-circuits to the identity and alpha = 1/2 to the arcsine
    closed form sin^2(pi u / 2); anything else goes through the regularized
    incomplete-beta inverse.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if alpha == 1.0:
        return u
    if alpha == 0.5:
        return np.square(np.sin(0.5 * np.pi * u))
    return betaincinv(alpha, alpha, u)


def draw_delta_cube(gen: np.random.Generator, n: int, dimension: int, delta: float, alpha: float = 1.0) -> np.ndarray:
    """n i.i.d. points with density p_{alpha,delta} per coordinate.

    A Beta(alpha, alpha) variable mapped affinely onto C_delta has exactly
    that density; alpha = 1 degenerates to the uniform draw on C_delta.
    """
    base = beta_quantile(alpha, gen.random((n, dimension)))
    return 0.5 + delta * (base - 0.5)


def _vertex_masks(gen: np.random.Generator, dimension: int, count: int) -> list[int]:
    """``count`` distinct vertex bitmasks of the d-cube, sampled without replacement."""
    total = 1 << dimension if dimension < 63 else None
    if total is not None and count > total:
        raise ValueError(f"cannot draw {count} distinct vertices of a {dimension}-cube ({total} exist)")
    if total is not None and (dimension <= 20 or 4 * count >= total):
        # Small vertex population: permute and slice, no rejection needed.
        return [int(v) for v in gen.permutation(total)[:count]]
    seen: set[int] = set()
    masks: list[int] = []
    while len(masks) < count:
        bits = gen.integers(0, 2, size=dimension)
        m = sum(int(b) << j for j, b in enumerate(bits))
        if m not in seen:
            seen.add(m)
            masks.append(m)
    return masks


def _masks_to_points(masks: list[int], dimension: int) -> np.ndarray:
    bits = np.array([[(m >> j) & 1 for j in range(dimension)] for m in masks], dtype=np.float64)
    return 0.25 + 0.5 * bits  # vertices of [1/4, 3/4]^d


def sample_design(scheme: SamplingScheme, n: int, stream: SeededStream) -> Design:
    """Draw an n-point design according to ``scheme``.

    Sobol designs ignore the stream (they are deterministic); the vertex
    design places the cube centre first and then n-1 distinct random vertices
    of [1/4, 3/4]^d.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 points, got {n}")
    d = scheme.dimension
    if scheme.kind is SchemeKind.SOBOL_DELTA_CUBE:
        pts = 0.5 + scheme.delta * (sobol_points(d, n) - 0.5)
        return Design(pts, scheme, stream)
    gen = stream.generator()
    if scheme.kind is SchemeKind.UNIFORM_DELTA_CUBE:
        pts = draw_delta_cube(gen, n, d, scheme.delta, 1.0)
    elif scheme.kind is SchemeKind.BETA_DELTA_CUBE:
        pts = draw_delta_cube(gen, n, d, scheme.delta, scheme.alpha)
    elif scheme.kind is SchemeKind.VERTEX_DESIGN:
        if d < 63 and n - 1 > (1 << d):
            raise ValueError(f"vertex design infeasible: {n - 1} > 2^{d} vertices")
        pts = np.vstack([np.full((1, d), 0.5), _masks_to_points(_vertex_masks(gen, d, n - 1), d)]) \
            if n > 1 else np.full((1, d), 0.5)
    else:  # pragma: no cover
        raise ValueError(f"unknown scheme kind {scheme.kind}")
    return Design(pts, scheme, stream)


def sample_targets(prior: TargetPrior, n: int, stream: SeededStream) -> np.ndarray:
    """n prior draws of the target, shape (n, d)."""
    if n < 1:
        raise ValueError(f"need n >= 1 targets, got {n}")
    gen = stream.generator()
    u = gen.random((n, prior.dimension))
    if prior.kind is PriorKind.UNIFORM:
        return u
    return beta_quantile(prior.alpha, u)


def sample_target(prior: TargetPrior, stream: SeededStream) -> np.ndarray:
    """One draw from the target prior."""
    return sample_targets(prior, 1, stream)[0]


def hamming_threshold(dimension: int, n_max: int) -> int:
    """Minimum pairwise Hamming separation floor(d - log2(n_max - 1)) + 1."""
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    return math.floor(dimension - math.log2(n_max - 1)) + 1


def min_hamming_vertex_design(
    dimension: int,
    n_max: int,
    stream: SeededStream,
    retry_budget: int | None = None,
) -> Design:
    """Centre point plus vertices of [1/4, 3/4]^d kept at pairwise Hamming
    distance >= ``hamming_threshold(dimension, n_max)``.

    Vertices are rejection-sampled without replacement; when the retry budget
    runs out before n_max - 1 vertices are found, the design is returned as-is
    with ``shortfall=True``.
    """
    if not 2 <= n_max <= 2**dimension:
        raise ValueError(f"n_max must lie in [2, 2^{dimension}], got {n_max}")
    threshold = hamming_threshold(dimension, n_max)
    budget = retry_budget if retry_budget is not None else 50 * n_max + 1000

    gen = stream.generator()
    accepted: list[int] = []
    tried: set[int] = set()
    draws = 0
    while len(accepted) < n_max - 1 and draws < budget:
        draws += 1
        bits = gen.integers(0, 2, size=dimension)
        m = sum(int(b) << j for j, b in enumerate(bits))
        if m in tried:
            continue
        tried.add(m)
        if all(bin(m ^ other).count("1") >= threshold for other in accepted):
            accepted.append(m)

    scheme = SamplingScheme.vertex(dimension)
    pts = np.full((1, dimension), 0.5)
    if accepted:
        pts = np.vstack([pts, _masks_to_points(accepted, dimension)])
    return Design(pts, scheme, stream, shortfall=len(accepted) < n_max - 1)
