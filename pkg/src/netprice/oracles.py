"""Brute-force reference routes used to cross-check the fast implementations.

Everything here deliberately avoids the code paths it validates: revenues
and risks are scalar loops, price search is a dense polar grid, prior means
come from direct vectorized draws with exact batched SVD norms, and the
one-dimensional posterior is computed by quadrature.
"""

import math

import numpy as np

from .confidence import ConfidenceEllipsoid
from .errors import ParameterError
from .priors import L0Prior, OffDiagPrior


def revenue_loop(theta: np.ndarray, d0: np.ndarray, price: np.ndarray) -> float:
    """Scalar double-loop evaluation of p.d0 + p^T theta p."""
    total = 0.0
    n = len(price)
    for i in range(n):
        total += price[i] * d0[i]
        for j in range(n):
            total += price[i] * theta[i, j] * price[j]
    return total


def risk_loop(theta: np.ndarray, prices: np.ndarray, demands: np.ndarray) -> float:
    """Scalar triple-loop evaluation of the average squared residual."""
    t, n = prices.shape
    total = 0.0
    for s in range(t):
        for i in range(n):
            resid = demands[s, i]
            for j in range(n):
                resid -= theta[i, j] * prices[s, j]
            total += resid * resid
    return total / t


def polar_grid_price(theta: np.ndarray, d0: np.ndarray, l: float,
                     n_angles: int = 720, n_radii: int = 100
                     ) -> tuple[np.ndarray, float]:
    """Dense polar grid search for the best two-product price."""
    if len(d0) != 2:
        raise ParameterError("polar grid oracle is two-dimensional")
    angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    radii = np.linspace(0.0, l, n_radii + 1)[1:]
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    prices = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
    prices = np.vstack([np.zeros((1, 2)), prices])
    values = prices @ d0 + np.einsum("ki,ij,kj->k", prices, theta, prices)
    best = int(np.argmax(values))
    return prices[best], float(values[best])


def ellipsoid_boundary_points(ell: ConfidenceEllipsoid, count: int,
                              rng: np.random.Generator) -> np.ndarray:
    """Random points on the regularized-Gram ellipsoid boundary."""
    n = ell.center.shape[0]
    vbar = ell.shape.v_reg
    dirs = rng.standard_normal((count, n, n))
    quad = np.einsum("kij,kil,jl->k", dirs, dirs, vbar)
    scales = np.sqrt(ell.radius_sq / quad)
    return ell.center[None] + scales[:, None, None] * dirs


def _hypersphere_grid(dim: int, per_angle: int) -> np.ndarray:
    """Deterministic grid on the unit sphere in R^dim via spherical angles."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    polar = [np.linspace(0.0, math.pi, per_angle)] * (dim - 2)
    azimuth = np.linspace(0.0, 2.0 * math.pi, 2 * per_angle, endpoint=False)
    grids = np.meshgrid(*polar, azimuth, indexing="ij")
    angles = np.stack([g.ravel() for g in grids], axis=1)
    pts = np.ones((angles.shape[0], dim))
    for a in range(dim - 1):
        pts[:, a] *= np.cos(angles[:, a])
        pts[:, a + 1:] *= np.sin(angles[:, a])[:, None]
    return pts


def joint_grid_ofu(ell: ConfidenceEllipsoid, d0: np.ndarray, l: float,
                   per_angle: int = 12, n_angles: int = 90, n_radii: int = 24
                   ) -> float:
    """Coarse joint search: ellipsoid-boundary matrices x polar price grid.

    Only feasible matrices (operator norm within the cap) enter the
    maximization, so the result lower-bounds the joint optimum.
    """
    n = ell.center.shape[0]
    dirs = _hypersphere_grid(n * n, per_angle).reshape(-1, n, n)
    vbar = ell.shape.v_reg
    quad = np.einsum("kij,kil,jl->k", dirs, dirs, vbar)
    thetas = ell.center[None] + np.sqrt(ell.radius_sq / quad)[:, None, None] * dirs
    norms = np.linalg.svd(thetas, compute_uv=False)[:, 0]
    thetas = thetas[norms <= ell.k_cap + 1e-9]
    if len(thetas) == 0:
        raise ParameterError("no feasible boundary matrix; grid oracle needs an inactive cap")
    angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    radii = np.linspace(0.0, l, n_radii + 1)[1:]
    pdirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    prices = (radii[:, None, None] * pdirs[None, :, :]).reshape(-1, 2)
    lin = prices @ d0
    quad_vals = np.einsum("pi,kij,pj->kp", prices, thetas, prices)
    return float(np.max(lin[None, :] + quad_vals))


def _batched_opnorm(stack: np.ndarray, chunk: int = 100_000) -> np.ndarray:
    out = np.empty(stack.shape[0])
    for start in range(0, stack.shape[0], chunk):
        sub = stack[start:start + chunk]
        out[start:start + chunk] = np.linalg.svd(sub, compute_uv=False)[:, 0]
    return out


def _scatter(values: np.ndarray, supports: np.ndarray, n: int) -> np.ndarray:
    count, size = supports.shape
    flat = np.zeros((count, n * n))
    rows = np.repeat(np.arange(count), size)
    flat[rows, supports.ravel()] = values.ravel()
    return flat.reshape(count, n, n)


def direct_prior_mean_scale_z(spec, n_draws: int, rng: np.random.Generator
                              ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Direct Monte Carlo of the prior mean of the norm-clamped draw.

    Returns (mean, standard error, support-size counts). Draws are fully
    vectorized and clamped with exact batched SVD norms, independent of both
    the chain sampler and the iterative norm.
    """
    n = spec.n
    m_total = n * n
    if isinstance(spec, L0Prior):
        size_probs = np.exp(spec.size_log_weights())
    elif isinstance(spec, OffDiagPrior):
        size_probs = np.exp(spec.size_log_weights())
        size_probs[0] = 0.0
    else:
        raise ParameterError("direct-prior oracle covers the discrete priors")
    size_probs = size_probs / size_probs.sum()
    sizes = rng.choice(m_total + 1, size=n_draws, p=size_probs)
    counts = np.bincount(sizes, minlength=m_total + 1)
    total = np.zeros((n, n))
    total_sq = np.zeros((n, n))
    for size in range(m_total + 1):
        c = int(counts[size])
        if c == 0:
            continue
        if size == 0:
            continue  # zero matrices contribute nothing to the sums
        supports = np.argsort(rng.random((c, m_total)), axis=1)[:, :size]
        if isinstance(spec, L0Prior):
            dirs = rng.standard_normal((c, size))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            radii = spec.fro_radius * rng.uniform(size=c) ** (1.0 / size)
            values = radii[:, None] * dirs
        else:
            is_diag = supports // n == supports % n
            values = np.where(
                is_diag,
                np.abs(rng.standard_normal((c, size))),
                np.sign(rng.uniform(size=(c, size)) - 0.5)
                * np.sqrt(rng.gamma(1.0 / n, 1.0, size=(c, size))))
        thetas = _scatter(values, supports, n)
        norms = _batched_opnorm(thetas)
        factors = np.minimum(1.0, spec.k_cap / np.maximum(norms, 1e-300))
        thetas *= factors[:, None, None]
        total += thetas.sum(axis=0)
        total_sq += (thetas ** 2).sum(axis=0)
    mean = total / n_draws
    var = total_sq / n_draws - mean ** 2
    se = np.sqrt(np.maximum(var, 0.0) / n_draws)
    return mean, se, counts


def exact_1x1_l0_posterior(spec: L0Prior, sdd: float, b: float, v: float,
                           t: int, lam: float, grid: int = 200_001
                           ) -> tuple[float, float]:
    """Quadrature posterior for a scalar problem under the sparse prior.

    Returns (P(support occupied), posterior mean of the clamped value). The
    risk of a scalar theta given sufficient statistics is
    (sdd - 2 b theta + v theta^2) / t.
    """
    if spec.n != 1:
        raise ParameterError("this oracle is one-dimensional")
    rho = spec.fro_radius

    def risk(z):
        return (sdd - 2.0 * b * z + v * z * z) / max(t, 1)

    size_logs = spec.size_log_weights()
    log_w0 = float(size_logs[0]) - lam * risk(0.0)
    vals = np.linspace(-rho, rho, grid)
    clamped = np.clip(vals, -spec.k_cap, spec.k_cap)
    log_density = float(size_logs[1]) - math.log(2.0 * rho) - lam * risk(clamped)
    shift = max(np.max(log_density), log_w0)
    w1 = float(np.trapezoid(np.exp(log_density - shift), vals))
    w0 = math.exp(log_w0 - shift)
    mean1 = float(np.trapezoid(clamped * np.exp(log_density - shift), vals))
    p_occupied = w1 / (w0 + w1)
    return p_occupied, mean1 / (w0 + w1)
