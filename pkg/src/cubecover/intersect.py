"""Probability that a random design point lands within distance r of a fixed
point U: moments of ||U - X||^2, the normal (CLT) approximation, its
Edgeworth correction, a Monte Carlo oracle, and the normalized ball-cube
intersection variable kappa_U.

With X having i.i.d. coordinates on the delta-cube, ||U - X||^2 is a sum of d
independent terms (u_j - x_j)^2, so its distribution is asymptotically normal
and admits an Edgeworth-type expansion built from per-coordinate cumulants.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, roots_jacobi

from .estimates import CoverageEstimate
from .geometry import as_point, log_unit_ball_volume
from .sampling import TargetPrior, draw_delta_cube, sample_targets
from .streams import SeededStream

__all__ = [
    "EdgeworthConfig",
    "MomentSet",
    "ball_probability",
    "ball_probability_batch",
    "clt_probability",
    "coordinate_cumulants",
    "coordinate_moments",
    "edgeworth_probability",
    "kappa_density_sample",
    "mc_intersection_oracle",
    "sum_moments",
]

_MC_CHUNK = 1_000_000
_QUAD_NODES = 32  # exact for the polynomial integrands used here (degree <= 8)


def coordinate_moments(u, delta: float):
    """First three central moments of (u - x)^2 for x uniform on
    [1/2 - delta/2, 1/2 + delta/2].

    With a = u - 1/2:

        mu1 = a^2 + delta^2/12
        mu2 = (delta^2/3)  * (a^2 + delta^2/60)
        mu3 = (delta^4/15) * (a^2 + delta^2/252)

    Vectorized over ``u``.
    """
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    a2 = np.square(np.asarray(u, dtype=np.float64) - 0.5)
    d2 = delta * delta
    mu1 = a2 + d2 / 12.0
    mu2 = (d2 / 3.0) * (a2 + d2 / 60.0)
    mu3 = (d2 * d2 / 15.0) * (a2 + d2 / 252.0)
    return mu1, mu2, mu3


def _uniform_coordinate_cumulants(u, delta: float, nu_max: int) -> np.ndarray:
    a2 = np.square(np.asarray(u, dtype=np.float64) - 0.5)
    d2 = delta * delta
    mu1, mu2, mu3 = coordinate_moments(u, delta)
    cols = [mu1, mu2, mu3]
    if nu_max >= 4:
        # kappa_4 = mu_4 - 3 mu_2^2 in closed form
        cols.append(-(2.0 / 15.0) * a2 * a2 * d2 * d2
                    + (2.0 / 315.0) * a2 * d2 * d2 * d2
                    - d2**4 / 37800.0)
    out = np.empty(a2.shape + (nu_max,), dtype=np.float64)
    for k in range(nu_max):
        out[..., k] = cols[k]
    return out


@functools.lru_cache(maxsize=32)
def _jacobi_rule(alpha: float):
    """Nodes on [0,1] and normalized weights for E[g(w)], w ~ Beta(alpha, alpha)."""
    nodes, weights = roots_jacobi(_QUAD_NODES, alpha - 1.0, alpha - 1.0)
    w01 = 0.5 * (nodes + 1.0)
    return w01, weights / weights.sum()


def coordinate_cumulants(u, delta: float, alpha: float = 1.0, nu_max: int = 4) -> np.ndarray:
    """Cumulants of order 1..nu_max of (u - x)^2 with x ~ p_{alpha,delta}.

    Closed forms for alpha = 1; otherwise a fixed Gauss-Jacobi rule, which is
    exact here because the integrands are polynomials in the Beta variable.
    Output shape: u.shape + (nu_max,).
    """
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if not 1 <= nu_max <= 4:
        raise ValueError(f"cumulant orders 1..4 supported, got {nu_max}")
    if alpha == 1.0:
        return _uniform_coordinate_cumulants(u, delta, nu_max)

    w01, wts = _jacobi_rule(float(alpha))
    x = 0.5 + delta * (w01 - 0.5)  # quadrature nodes mapped onto the delta edge
    uu = np.asarray(u, dtype=np.float64)
    eta = np.square(uu[..., None] - x)
    m1 = eta @ wts
    c = eta - m1[..., None]
    out = np.empty(uu.shape + (nu_max,), dtype=np.float64)
    out[..., 0] = m1
    if nu_max >= 2:
        out[..., 1] = np.square(c) @ wts
    if nu_max >= 3:
        out[..., 2] = (c**3) @ wts
    if nu_max >= 4:
        out[..., 3] = (c**4) @ wts - 3.0 * np.square(out[..., 1])
    return out


@dataclass(frozen=True)
class MomentSet:
    """Moments/cumulants of ||U - X||^2 for one fixed U."""

    mean: float
    variance: float
    third_central: float
    per_coordinate_cumulants: np.ndarray  # shape (d, nu_max), order nu = column + 1

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def dimension(self) -> int:
        return self.per_coordinate_cumulants.shape[0]

    @property
    def nu_max(self) -> int:
        return self.per_coordinate_cumulants.shape[1]

    def summed_cumulant(self, nu: int) -> float:
        if not 1 <= nu <= self.nu_max:
            raise ValueError(f"cumulant order {nu} not computed (have 1..{self.nu_max})")
        return float(self.per_coordinate_cumulants[:, nu - 1].sum())


def sum_moments(U, delta: float, alpha: float = 1.0, nu_max: int = 4) -> MomentSet:
    """Moments of ||U - X||^2 with X i.i.d. p_{alpha,delta} per coordinate.

    For alpha = 1 the sums collapse to closed forms, e.g.
    mean = ||U - (1/2,...,1/2)||^2 + d * delta^2 / 12.
    """
    u = as_point(U)
    cum = coordinate_cumulants(u, delta, alpha, max(nu_max, 3))
    sums = cum.sum(axis=0)
    return MomentSet(float(sums[0]), float(sums[1]), float(sums[2]), cum)


@dataclass(frozen=True)
class EdgeworthConfig:
    """Number of correction terms retained (0 = plain CLT) and output clamping."""

    order: int = 1
    clamp: bool = True

    def __post_init__(self):
        if not 0 <= self.order <= 2:
            raise ValueError(f"supported expansion orders are 0..2, got {self.order}")


def _hermite(t: np.ndarray, m: int) -> np.ndarray:
    """Probabilists' Hermite polynomial He_m(t), He_{k+1} = t He_k - k He_{k-1}."""
    h_prev = np.ones_like(t)
    if m == 0:
        return h_prev
    h = t.copy()
    for k in range(1, m):
        h, h_prev = t * h - k * h_prev, h
    return h


def _partitions(nu: int) -> list[tuple[int, ...]]:
    """All nonnegative integer (k_1,...,k_nu) with k_1 + 2 k_2 + ... + nu k_nu = nu."""
    out: list[tuple[int, ...]] = []

    def recurse(m: int, remaining: int, acc: list[int]):
        if m == nu:
            if remaining % nu == 0:
                out.append(tuple(acc + [remaining // nu]))
            return
        for k in range(remaining // m + 1):
            recurse(m + 1, remaining - m * k, acc + [k])

    recurse(1, nu, [])
    return out


def _edgeworth_cdf(t: np.ndarray, d: int, sigma: np.ndarray, cum_sums: np.ndarray, order: int) -> np.ndarray:
    """Phi(t) + sum_{nu=1}^{order} Q_{nu,d}(t) / d^(nu/2), row-vectorized.

    Q_{nu,d}(t) = -phi(t) * sum over partitions (k_m) of nu of
        He_{nu+2s-1}(t) * prod_m (1/k_m!) (lambda_{m+2,d}/(m+2)!)^{k_m},
    lambda_{nu,d} = d^{(nu-2)/2} (sum_j gamma_{nu,j}) / sigma^nu,  s = sum_m k_m.
    The powers of d cancel identically; they are kept as written for fidelity
    to the expansion.

    ``cum_sums[i, k]`` is the summed cumulant of order k+1 for row i.
    """
    total = ndtr(t)
    if order == 0:
        return total
    phi = np.exp(-0.5 * np.square(t)) / math.sqrt(2.0 * math.pi)
    lam = {nu: d ** ((nu - 2) / 2.0) * cum_sums[:, nu - 1] / sigma**nu
           for nu in range(3, order + 3)}
    for nu in range(1, order + 1):
        q = np.zeros_like(t)
        for ks in _partitions(nu):
            s = sum(ks)
            coeff = np.ones_like(t)
            for m, k_m in enumerate(ks, start=1):
                if k_m:
                    coeff = coeff * (lam[m + 2] / math.factorial(m + 2)) ** k_m / math.factorial(k_m)
            q += _hermite(t, nu + 2 * s - 1) * coeff
        total = total - phi * q / d ** (nu / 2.0)
    return total


def clt_probability(U, delta: float, alpha: float, r: float) -> float:
    """Normal approximation Phi((r^2 - mu)/sigma) of P{||U - X|| <= r}."""
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    ms = sum_moments(U, delta, alpha, nu_max=3)
    if ms.variance == 0.0:
        return 1.0 if ms.mean <= r * r else 0.0
    t = (r * r - ms.mean) / ms.std
    return float(min(max(ndtr(t), 0.0), 1.0))


def edgeworth_probability(U, delta: float, alpha: float, r: float,
                          config: EdgeworthConfig = EdgeworthConfig()) -> float:
    """Edgeworth-corrected P{||U - X|| <= r}; order 0 reproduces the CLT value.

    Expansions are not proper cdfs, so raw values may leave [0,1]; with
    ``config.clamp`` (the default) the output is clipped into [0,1].
    """
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    ms = sum_moments(U, delta, alpha, nu_max=max(config.order + 2, 3))
    if ms.variance == 0.0:
        return 1.0 if ms.mean <= r * r else 0.0
    t = np.array([(r * r - ms.mean) / ms.std])
    sums = ms.per_coordinate_cumulants.sum(axis=0)[None, :]
    val = float(_edgeworth_cdf(t, ms.dimension, np.array([ms.std]), sums, config.order)[0])
    if config.clamp:
        val = min(max(val, 0.0), 1.0)
    return val


def ball_probability_batch(U_rows, delta: float, alpha: float, r: float,
                           order: int = 1, clamp: bool = True) -> np.ndarray:
    """CLT/Edgeworth probability for many centers at once, shape (m,)."""
    U = np.atleast_2d(np.asarray(U_rows, dtype=np.float64))
    d = U.shape[1]
    cum = coordinate_cumulants(U, delta, alpha, nu_max=max(order + 2, 2)).sum(axis=1)
    mean, var = cum[:, 0], cum[:, 1]
    sigma = np.sqrt(var)
    ok = sigma > 0
    safe_sigma = np.where(ok, sigma, 1.0)
    t = (r * r - mean) / safe_sigma
    vals = _edgeworth_cdf(t, d, safe_sigma, cum, order)
    vals = np.where(ok, vals, (mean <= r * r).astype(np.float64))
    return np.clip(vals, 0.0, 1.0) if clamp else vals


def ball_probability(U, delta: float, alpha: float, r: float, *,
                     method: str = "auto", order: int = 1,
                     n_samples: int = 100_000, stream: SeededStream | None = None) -> float:
    """P{||U - X|| <= r} via the requested route.

    "auto" uses exact geometry when available (ball fully inside the
    delta-cube for alpha = 1: probability r^d V_d / delta^d; ball past the
    farthest corner: probability 1) and the Edgeworth expansion otherwise.
    "clt", "edgeworth" and "mc" force the respective route.
    """
    u = as_point(U)
    if method == "auto":
        exact = _exact_probability(u, delta, alpha, r)
        if exact is not None:
            return exact
        method = "edgeworth"
    if method == "clt":
        return clt_probability(u, delta, alpha, r)
    if method == "edgeworth":
        return edgeworth_probability(u, delta, alpha, r, EdgeworthConfig(order=order))
    if method == "mc":
        if stream is None:
            raise ValueError("method='mc' needs a SeededStream")
        return mc_intersection_oracle(u, delta, alpha, r, n_samples, stream).value
    raise ValueError(f"unknown method {method!r}")


def _exact_probability(u: np.ndarray, delta: float, alpha: float, r: float) -> float | None:
    d = u.size
    lo, hi = 0.5 - 0.5 * delta, 0.5 + 0.5 * delta
    reach = np.maximum(np.abs(u - lo), np.abs(hi - u))
    if r * r >= float(np.dot(reach, reach)):
        return 1.0  # ball swallows the whole delta-cube
    if alpha == 1.0:
        margin = 0.5 * delta - float(np.max(np.abs(u - 0.5)))
        if r <= margin:
            # ball fully inside the cube: uniform mass is vol(ball)/delta^d
            return math.exp(d * math.log(r) + log_unit_ball_volume(d) - d * math.log(delta)) if r > 0 else 0.0
    return None


def mc_intersection_oracle(U, delta: float, alpha: float, r: float,
                           n_samples: int, stream: SeededStream) -> CoverageEstimate:
    """Unbiased Monte Carlo estimate of P{||U - X|| <= r}.

    Draws are chunked with counter-jumped substreams, so the result depends
    only on (stream, n_samples), not on chunking or thread count.
    """
    if n_samples < 1:
        raise ValueError(f"need n_samples >= 1, got {n_samples}")
    u = as_point(U)
    r2 = float(r) * float(r)
    hits = 0
    done = 0
    chunk_index = 0
    while done < n_samples:
        m = min(_MC_CHUNK, n_samples - done)
        gen = stream.jumped(chunk_index)
        x = draw_delta_cube(gen, m, u.size, delta, alpha)
        diff = x - u
        hits += int(np.count_nonzero(np.einsum("ij,ij->i", diff, diff) <= r2))
        done += m
        chunk_index += 1
    p = hits / n_samples
    return CoverageEstimate(
        value=p,
        std_error=math.sqrt(p * (1.0 - p) / n_samples),
        n_targets=n_samples,
        n_designs=1,
        method="mc_oracle",
    )


def kappa_density_sample(d: int, r: float, delta: float, n_outer: int, n_inner: int,
                         stream: SeededStream) -> np.ndarray:
    """Draws of kappa_U = P_X{||U - X|| <= r} / (r^d V_d) for U uniform on [0,1]^d.

    Each draw estimates the inner probability with ``n_inner`` Monte Carlo
    samples; the output is ready for a histogram or KDE.  The normalization
    is evaluated in log space; an overflow of kappa itself (tiny r^d V_d with
    a nonzero hit count) raises.
    """
    if r <= 0:
        raise ValueError(f"radius must be > 0, got {r}")
    if n_outer < 1 or n_inner < 1:
        raise ValueError("n_outer and n_inner must be >= 1")
    log_ball = d * math.log(r) + log_unit_ball_volume(d)
    if -log_ball >= math.log(np.finfo(np.float64).max):
        raise FloatingPointError(f"kappa normalization overflows: r^d V_d = exp({log_ball:.1f})")
    inv_ball = math.exp(-log_ball)

    targets = sample_targets(TargetPrior.uniform(d), n_outer, stream.child(0))
    inner = stream.child(1)
    out = np.empty(n_outer)
    for i in range(n_outer):
        est = mc_intersection_oracle(targets[i], delta, 1.0, r, n_inner, inner.child(i))
        out[i] = est.value * inv_ball
    return out
