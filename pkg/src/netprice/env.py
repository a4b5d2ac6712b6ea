"""Demand environment: ground-truth sensitivity matrices and noisy demand.

The demand model is linear, ``D = theta_star @ p + eps`` after subtracting
the known baseline ``d0``, with Gaussian shocks of scale ``noise_sigma``.
Three generators cover the supported ground-truth regimes: entrywise-sparse
matrices, diagonally dominant matrices with O(1/N) cross effects, and
matrices filled from a smooth generating function evaluated at pairwise
differences of product embeddings.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .kernels import KernelSystem, SeriesFunction

DEFAULT_DIAG_RANGE = (-2.0, -0.5)


def check_square(theta: np.ndarray) -> np.ndarray:
    """Validate a price-sensitivity matrix: square with finite entries."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise ParameterError(f"sensitivity matrix must be square, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ParameterError("sensitivity matrix has non-finite entries")
    return theta


@dataclass(frozen=True)
class EnvSpec:
    """Ground-truth bundle for one pricing environment.

    ``noise_q`` is the Bernstein scale of the demand shocks; with Gaussian
    shocks it can be taken equal to ``noise_sigma``.
    """

    n_products: int
    baseline_demand: np.ndarray
    theta_star: np.ndarray
    noise_sigma: float
    noise_q: float
    price_radius: float
    norm_bound: float

    def __post_init__(self):
        if self.n_products < 1:
            raise ParameterError("n_products must be >= 1")
        d0 = np.asarray(self.baseline_demand, dtype=float)
        if d0.shape != (self.n_products,):
            raise ParameterError("baseline_demand must have length n_products")
        if not np.all(d0 > 0.0):
            raise ParameterError("baseline_demand entries must be strictly positive")
        theta = check_square(self.theta_star)
        if theta.shape[0] != self.n_products:
            raise ParameterError("theta_star dimension disagrees with n_products")
        for name in ("noise_sigma", "noise_q", "price_radius", "norm_bound"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be positive")
        # construction-time invariant; exact SVD, not the iterative estimate
        op = float(np.linalg.norm(theta, 2))
        if op > self.norm_bound * (1.0 + 1e-12) + 1e-12:
            raise ParameterError(
                f"operator norm of theta_star ({op:.6g}) exceeds norm_bound {self.norm_bound}")
        object.__setattr__(self, "baseline_demand", d0)
        object.__setattr__(self, "theta_star", theta)


@dataclass(frozen=True)
class DemandSample:
    """One period of play: the price charged and the normalized demand."""

    price: np.ndarray
    demand: np.ndarray
    period: int = 1


def gen_theta_l0(n: int, s: int, k_cap: float, seed: int) -> np.ndarray:
    """Matrix with exactly ``s`` nonzero entries and operator norm <= k_cap.

    Positions are uniform without replacement, values i.i.d. uniform on
    [-1, 1]; the whole matrix is rescaled only if its operator norm exceeds
    the cap.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not 0 <= s <= n * n:
        raise ParameterError(f"support size s={s} outside [0, {n * n}]")
    if k_cap <= 0.0:
        raise ParameterError("k_cap must be positive")
    rng = np.random.default_rng(seed)
    theta = np.zeros((n, n))
    if s == 0:
        return theta
    flat = rng.choice(n * n, size=s, replace=False)
    values = rng.uniform(-1.0, 1.0, size=s)
    # a zero draw would silently shrink the support; resample (measure zero)
    while np.any(values == 0.0):
        values[values == 0.0] = rng.uniform(-1.0, 1.0, size=int(np.sum(values == 0.0)))
    theta.flat[flat] = values
    op = float(np.linalg.norm(theta, 2))
    if op > k_cap:
        theta *= k_cap / op
    return theta


def gen_theta_offdiag(n: int, c_off: float,
                      diag_range: tuple[float, float] = DEFAULT_DIAG_RANGE,
                      seed: int = 0) -> np.ndarray:
    """Dense matrix with O(1) diagonal and O(1/n) off-diagonal entries.

    Diagonal entries are uniform on ``diag_range`` (negative own-price
    effects by default), off-diagonal entries uniform on [-c_off/n, c_off/n].
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if c_off <= 0.0:
        raise ParameterError("c_off must be positive")
    lo, hi = diag_range
    if not lo < hi:
        raise ParameterError("diag_range must satisfy lo < hi")
    rng = np.random.default_rng(seed)
    bound = c_off / n
    theta = rng.uniform(-bound, bound, size=(n, n))
    theta[np.diag_indices(n)] = rng.uniform(lo, hi, size=n)
    return theta


def gen_theta_spectral(embeddings: np.ndarray, kernel_sys: KernelSystem,
                       alpha: float, coeff_seed: int,
                       diag_range: tuple[float, float] = DEFAULT_DIAG_RANGE
                       ) -> tuple[np.ndarray, SeriesFunction]:
    """Matrix generated by a random smooth function of embedding differences.

    The generating function is a random element of the power space of
    exponent ``alpha`` with unit norm there: coefficients a_i are standard
    normal, renormalized to unit l2, and scaled by mu_i^(alpha/2). Entries
    (i, j) with i != j take the value of the function at g_i - g_j; the
    diagonal is drawn independently from ``diag_range`` since a generating
    function would force it constant.
    """
    emb = np.atleast_2d(np.asarray(embeddings, dtype=float))
    if emb.shape[0] == 0:
        raise ParameterError("embeddings must be nonempty")
    if emb.shape[0] > 1:
        diffs = emb[:, None, :] - emb[None, :, :]
        off = ~np.eye(emb.shape[0], dtype=bool)
        if np.any(np.all(diffs[off] == 0.0, axis=-1)):
            raise ParameterError("embeddings must be pairwise distinct")
    if not 0.0 < alpha <= 1.0:
        raise ParameterError("alpha must lie in (0, 1]")
    rng = np.random.default_rng(coeff_seed)
    a = rng.standard_normal(kernel_sys.truncation)
    a /= np.linalg.norm(a)
    kappa = SeriesFunction(a * kernel_sys.eigenvalues ** (alpha / 2.0), kernel_sys)
    n = emb.shape[0]
    diffs = emb[:, None, :] - emb[None, :, :]
    theta = kappa(diffs.reshape(n * n, -1)).reshape(n, n)
    lo, hi = diag_range
    theta[np.diag_indices(n)] = rng.uniform(lo, hi, size=n)
    return theta, kappa


def step(env: EnvSpec, price: np.ndarray, rng: np.random.Generator,
         period: int = 1) -> DemandSample:
    """Play a price and observe normalized demand theta_star @ p + noise."""
    price = np.asarray(price, dtype=float)
    if price.shape != (env.n_products,):
        raise ParameterError("price dimension disagrees with the environment")
    if np.linalg.norm(price) > env.price_radius + 1e-12:
        raise DomainError(
            f"price norm {np.linalg.norm(price):.6g} exceeds radius {env.price_radius}")
    noise = env.noise_sigma * rng.standard_normal(env.n_products)
    return DemandSample(price=price, demand=env.theta_star @ price + noise, period=period)


def expected_revenue(theta: np.ndarray, d0: np.ndarray, price: np.ndarray) -> float:
    """Expected single-period revenue p.d0 + p^T theta p."""
    theta = np.asarray(theta, dtype=float)
    d0 = np.asarray(d0, dtype=float)
    price = np.asarray(price, dtype=float)
    n = price.shape[0]
    if theta.shape != (n, n) or d0.shape != (n,):
        raise ParameterError("dimension mismatch in expected_revenue")
    return float(price @ d0 + price @ theta @ price)
