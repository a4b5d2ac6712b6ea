"""Sparsity priors over sensitivity matrices and draws from them.

Two discrete-support priors (entrywise-sparse and diagonal/off-diagonal)
mix component measures over supports with size-decaying weights; two
continuous priors mix truncated Gaussian-process draws over a scaling or a
power parameter gamma.
"""

import functools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate

from .errors import ParameterError
from .kernels import KernelSystem, SeriesFunction, kl_sample_powers, kl_sample_scaling


class ShiftedExponentialDensity:
    """Density exp(-(g-1)) on [1, inf); default for the scaling prior."""

    support = (1.0, math.inf)

    def logpdf(self, g: float) -> float:
        return -(g - 1.0) if g >= 1.0 else -math.inf

    def sample(self, rng: np.random.Generator) -> float:
        return 1.0 + rng.exponential(1.0)


class UniformDensity:
    """Uniform density on (lo, hi]; default for the powers prior."""

    def __init__(self, lo: float = 0.0, hi: float = 1.0):
        if not lo < hi:
            raise ParameterError("uniform density needs lo < hi")
        self.lo, self.hi = lo, hi
        self.support = (lo, hi)

    def logpdf(self, g: float) -> float:
        return -math.log(self.hi - self.lo) if self.lo < g <= self.hi else -math.inf

    def sample(self, rng: np.random.Generator) -> float:
        return self.hi - rng.uniform(0.0, self.hi - self.lo)


def _check_density(density) -> None:
    lo, hi = density.support
    total, _ = integrate.quad(lambda g: math.exp(density.logpdf(g)), lo, hi)
    if abs(total - 1.0) > 1e-6:
        raise ParameterError(f"gamma density integrates to {total:.8f}, not 1")


@dataclass(frozen=True)
class L0Prior:
    """Supports weighted by alpha^|J|; uniform on a Frobenius ball within each."""

    n: int
    alpha_mix: float
    k_cap: float

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if not 0.0 < self.alpha_mix < 1.0:
            raise ParameterError("alpha_mix must lie strictly inside (0, 1)")
        if self.k_cap <= 0.0:
            raise ParameterError("k_cap must be positive")

    @property
    def fro_radius(self) -> float:
        return math.sqrt(self.k_cap ** 2 * self.n + 1.0)

    def size_log_weights(self) -> np.ndarray:
        """log P(|J| = j) for j = 0..n^2 (binomial counts already absorbed)."""
        j = np.arange(self.n ** 2 + 1)
        logs = j * math.log(self.alpha_mix)
        return logs - _logsumexp(logs)


@dataclass(frozen=True)
class OffDiagPrior:
    """Supports weighted by |J|^-2; half-normal diagonal, sqrt-gamma off-diagonal."""

    n: int
    k_cap: float

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.k_cap <= 0.0:
            raise ParameterError("k_cap must be positive")

    def size_log_weights(self) -> np.ndarray:
        """log P(|J| = j) for j = 0..n^2; the empty support gets zero weight."""
        j = np.arange(self.n ** 2 + 1, dtype=float)
        logs = np.full(self.n ** 2 + 1, -np.inf)
        logs[1:] = -2.0 * np.log(j[1:])
        return logs - _logsumexp(logs[1:])


@dataclass(frozen=True)
class SpectralScalingPrior:
    """Gaussian-process draws scaled by gamma >= 1, mixed over gamma."""

    system: KernelSystem
    n: int
    k_cap: float
    gamma_density: object = field(default_factory=ShiftedExponentialDensity)

    def __post_init__(self):
        if self.k_cap <= 0.0:
            raise ParameterError("k_cap must be positive")
        _check_density(self.gamma_density)
        if self.gamma_density.support[0] < 1.0:
            raise ParameterError("scaling prior needs a density supported on [1, inf)")


@dataclass(frozen=True)
class SpectralPowersPrior:
    """Gaussian-process draws over power spaces, gamma in (0, 1]."""

    system: KernelSystem
    n: int
    k_cap: float
    gamma_density: object = field(default_factory=UniformDensity)

    def __post_init__(self):
        if self.k_cap <= 0.0:
            raise ParameterError("k_cap must be positive")
        _check_density(self.gamma_density)
        lo, hi = self.gamma_density.support
        if lo < 0.0 or hi > 1.0:
            raise ParameterError("powers prior needs a density supported inside (0, 1]")


PriorSpec = Union[L0Prior, OffDiagPrior, SpectralScalingPrior, SpectralPowersPrior]


@dataclass(frozen=True)
class PriorDraw:
    """One draw before scaling: the matrix plus its support or gamma tag."""

    theta: np.ndarray
    support: tuple | None = None
    gamma: float | None = None


def _logsumexp(logs: np.ndarray) -> float:
    m = np.max(logs)
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.sum(np.exp(logs - m))))


@functools.lru_cache(maxsize=64)
def support_weight_table(spec: PriorSpec) -> tuple:
    """log pi_J per single support, indexed by |J| = 0..n^2 (cached)."""
    total = spec.n ** 2
    sizes = np.arange(total + 1)
    log_comb = (math.lgamma(total + 1)
                - np.array([math.lgamma(s + 1) + math.lgamma(total - s + 1)
                            for s in sizes]))
    return tuple(spec.size_log_weights() - log_comb)


def log_mixing_weight(spec: PriorSpec, support_size: int) -> float:
    """log pi_J for any single support J of the given size.

    The discrete priors spread the aggregated size weight uniformly over the
    C(n^2, size) supports of that size; the off-diagonal prior assigns the
    empty support zero weight since its size weights start at j = 1.
    """
    if isinstance(spec, (SpectralScalingPrior, SpectralPowersPrior)):
        raise ParameterError("mixing weights are only defined for discrete-support priors")
    total = spec.n ** 2
    if not 0 <= support_size <= total:
        raise ParameterError(f"support size {support_size} outside [0, {total}]")
    return float(support_weight_table(spec)[support_size])


def _sample_size(log_weights: np.ndarray, rng: np.random.Generator) -> int:
    probs = np.exp(log_weights - _logsumexp(log_weights))
    probs[~np.isfinite(log_weights)] = 0.0
    probs /= probs.sum()
    return int(rng.choice(len(probs), p=probs))


def sample_ball_values(radius: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the Euclidean ball of the given radius in R^size."""
    direction = rng.standard_normal(size)
    direction /= np.linalg.norm(direction)
    return radius * rng.uniform() ** (1.0 / size) * direction


def halfnormal_logpdf(x: float) -> float:
    """Density of |N(0,1)|, the diagonal entry law of the off-diagonal prior."""
    if x < 0.0:
        return -math.inf
    return 0.5 * math.log(2.0 / math.pi) - 0.5 * x * x


def offdiag_entry_logpdf(x: float, n: int) -> float:
    """Density of sign * sqrt(Gamma(1/n, 1)), the cross-entry law.

    The singularity at zero (for n >= 3) is integrable; the magnitude is
    floored far below any reachable float to keep Metropolis ratios finite.
    """
    k = 1.0 / n
    return (2.0 * k - 1.0) * math.log(max(abs(x), 1e-300)) - x * x - math.lgamma(k)


def sample_offdiag_entry(n: int, rng: np.random.Generator) -> float:
    sign = 1.0 if rng.uniform() < 0.5 else -1.0
    return sign * math.sqrt(rng.gamma(1.0 / n, 1.0))


def sample_halfnormal(rng: np.random.Generator) -> float:
    return abs(rng.standard_normal())


def sample_prior(spec: PriorSpec, rng: np.random.Generator,
                 embeddings: np.ndarray | None = None) -> PriorDraw:
    """One matrix draw from the prior (before any norm scaling is applied)."""
    if isinstance(spec, L0Prior):
        size = _sample_size(spec.size_log_weights(), rng)
        theta = np.zeros((spec.n, spec.n))
        support: tuple = ()
        if size > 0:
            flat = np.sort(rng.choice(spec.n ** 2, size=size, replace=False))
            theta.flat[flat] = sample_ball_values(spec.fro_radius, size, rng)
            support = tuple((int(f) // spec.n, int(f) % spec.n) for f in flat)
        return PriorDraw(theta=theta, support=support)

    if isinstance(spec, OffDiagPrior):
        size = _sample_size(spec.size_log_weights(), rng)
        theta = np.zeros((spec.n, spec.n))
        flat = np.sort(rng.choice(spec.n ** 2, size=size, replace=False))
        support = []
        for f in flat:
            i, j = int(f) // spec.n, int(f) % spec.n
            theta[i, j] = (sample_halfnormal(rng) if i == j
                           else sample_offdiag_entry(spec.n, rng))
            support.append((i, j))
        return PriorDraw(theta=theta, support=tuple(support))

    if embeddings is None:
        raise ParameterError("spectral priors require product embeddings")
    emb = np.atleast_2d(np.asarray(embeddings, dtype=float))
    if emb.shape[0] != spec.n:
        raise ParameterError("embedding count disagrees with the prior dimension")
    gamma = spec.gamma_density.sample(rng)
    if isinstance(spec, SpectralScalingPrior):
        kappa = kl_sample_scaling(spec.system, gamma, rng)
    else:
        kappa = kl_sample_powers(spec.system, gamma, rng)
    diffs = (emb[:, None, :] - emb[None, :, :]).reshape(spec.n ** 2, -1)
    theta = np.asarray(kappa(diffs)).reshape(spec.n, spec.n)
    return PriorDraw(theta=theta, gamma=float(gamma))
