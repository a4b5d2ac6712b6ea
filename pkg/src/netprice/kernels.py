"""Truncated Mercer eigen-system on the torus and its Gaussian samplers.

The concrete eigen-system is the real Fourier basis on [-pi, pi]^d with
exponentially decaying eigenvalues mu_i = exp(-q*i), i = 1..m. Every power
space norm is then a finite weighted l2 norm of the coefficients, and
truncated Karhunen-Loeve draws reduce to scaling i.i.d. normals.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


def _atom_tuples(dim: int, count: int) -> np.ndarray:
    """First ``count`` tensor-basis index tuples, graded by total frequency.

    Per-dimension atom j encodes: j=0 the constant, j=2k-1 cos(kx),
    j=2k sin(kx). Tuples are ordered by total frequency, then
    lexicographically, which for dim=1 gives
    [const, cos x, sin x, cos 2x, sin 2x, ...].
    """
    out: list[tuple[int, ...]] = []

    def atoms_with_freq(f: int) -> list[int]:
        return [0] if f == 0 else [2 * f - 1, 2 * f]

    def extend(prefix: list[int], dims_left: int, budget: int):
        if len(out) >= count:
            return
        if dims_left == 1:
            for j in atoms_with_freq(budget):
                out.append(tuple(prefix + [j]))
                if len(out) >= count:
                    return
            return
        for f in range(budget + 1):
            for j in atoms_with_freq(f):
                extend(prefix + [j], dims_left - 1, budget - f)
                if len(out) >= count:
                    return

    total = 0
    while len(out) < count:
        extend([], dim, total)
        total += 1
    return np.array(out[:count], dtype=int)


@dataclass(frozen=True)
class KernelSystem:
    """Orthonormal Fourier basis with eigenvalues exp(-decay_q * i)."""

    decay_q: float
    truncation: int
    domain_dim: int = 1

    def __post_init__(self):
        if self.decay_q <= 0.0:
            raise ParameterError("decay_q must be positive")
        if self.truncation < 1:
            raise ParameterError("truncation must be >= 1")
        if self.domain_dim < 1:
            raise ParameterError("domain_dim must be >= 1")
        idx = np.arange(1, self.truncation + 1, dtype=float)
        object.__setattr__(self, "eigenvalues", np.exp(-self.decay_q * idx))
        object.__setattr__(self, "_atoms", _atom_tuples(self.domain_dim, self.truncation))

    def basis_values(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the m basis functions at points of shape (k, d) -> (k, m)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.domain_dim:
            raise ParameterError(
                f"points have dimension {pts.shape[1]}, expected {self.domain_dim}")
        atoms = self._atoms
        max_freq = int((atoms.max() + 1) // 2)
        # per-dimension tables of cos(f*x), sin(f*x) up to the largest frequency
        freqs = np.arange(1, max_freq + 1)
        const = 1.0 / math.sqrt(2.0 * math.pi)
        scale = 1.0 / math.sqrt(math.pi)
        vals = np.ones((pts.shape[0], self.truncation))
        for d in range(self.domain_dim):
            if max_freq > 0:
                ang = pts[:, d:d + 1] * freqs[None, :]
                cos_t = np.cos(ang)
                sin_t = np.sin(ang)
            col = np.empty((pts.shape[0], self.truncation))
            for b, j in enumerate(atoms[:, d]):
                if j == 0:
                    col[:, b] = const
                elif j % 2 == 1:
                    col[:, b] = scale * cos_t[:, (j + 1) // 2 - 1]
                else:
                    col[:, b] = scale * sin_t[:, j // 2 - 1]
            vals *= col
        return vals


@dataclass(frozen=True)
class SeriesFunction:
    """Finite basis expansion sum_i coeffs[i] * e_i."""

    coeffs: np.ndarray
    system: KernelSystem

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.system.truncation,):
            raise ParameterError("coefficient length disagrees with the truncation")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, points: np.ndarray) -> np.ndarray | float:
        pts = np.asarray(points, dtype=float)
        scalar = pts.ndim <= 1
        vals = self.system.basis_values(np.atleast_2d(pts if pts.ndim else pts[None]))
        out = vals @ self.coeffs
        return float(out[0]) if scalar else out


def power_norm(f: SeriesFunction, beta: float) -> float:
    """Norm of ``f`` in the power space of exponent beta.

    beta=0 recovers the L2 norm, beta=1 the native-space norm; the weights
    are mu_i^(-beta).
    """
    mu = f.system.eigenvalues
    return float(np.sqrt(np.sum(f.coeffs ** 2 / mu ** beta)))


def kl_sample_scaling(ks: KernelSystem, gamma: float,
                      rng: np.random.Generator) -> SeriesFunction:
    """Truncated draw from the centered Gaussian process scaled by gamma.

    Coefficients are sqrt(gamma * mu_i) * Z_i with Z_i standard normal.
    """
    if gamma < 1.0:
        raise ParameterError("scaling parameter gamma must be >= 1")
    z = rng.standard_normal(ks.truncation)
    return SeriesFunction(np.sqrt(gamma * ks.eigenvalues) * z, ks)


def kl_sample_powers(ks: KernelSystem, gamma: float,
                     rng: np.random.Generator) -> SeriesFunction:
    """Truncated draw from the Gaussian process over the gamma power space.

    Coefficients are mu_i^(gamma/2) * Z_i, so gamma=1 coincides in law with
    the unscaled process.
    """
    if not 0.0 < gamma <= 1.0:
        raise ParameterError("powers parameter gamma must lie in (0, 1]")
    z = rng.standard_normal(ks.truncation)
    return SeriesFunction(ks.eigenvalues ** (gamma / 2.0) * z, ks)


def default_truncation(decay_q: float, n_products: int, horizon: int) -> int:
    """Truncation making the discarded eigenvalue tail negligible.

    ceil((2/q) * ln(N^2 * T) + 8) leaves tail mass below (N^2 T)^-2.
    """
    return int(math.ceil((2.0 / decay_q) * math.log(max(2, n_products ** 2 * horizon)) + 8.0))
