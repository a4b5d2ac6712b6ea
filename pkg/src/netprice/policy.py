"""Optimistic price selection over a confidence ellipsoid and a price ball.

The joint revenue maximization is bilinear and nonconvex, so it is solved
by alternating two exact partial maximizations: over the matrix at a fixed
price (closed form on the Gram ellipsoid) and over the price at a fixed
matrix (trust-region subproblem via the secular equation). Restarts guard
against local maxima.
"""

import math
from dataclasses import dataclass

import numpy as np

from .confidence import ConfidenceEllipsoid, contains
from .env import EnvSpec, expected_revenue, step
from .errors import ParameterError
from .linalg import spectral_norm, uniform_sphere
from .pacbayes import History, scale_Z

# keep the matrix step strictly inside the ellipsoid at float precision
_BOUNDARY_SHRINK = 1.0 - 1e-9


@dataclass(frozen=True)
class PolicyConfig:
    restarts: int = 8
    max_alt_iters: int = 100
    tol: float = 1e-8
    pre_learn_diag: bool = False
    pre_learn_rounds_per_product: int = 10

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if self.tol <= 0.0:
            raise ParameterError("tol must be positive")
        if self.max_alt_iters < 1:
            raise ParameterError("max_alt_iters must be >= 1")
        if self.pre_learn_rounds_per_product < 1:
            raise ParameterError("pre_learn_rounds_per_product must be >= 1")


@dataclass(frozen=True)
class OfuResult:
    price: np.ndarray
    theta_tilde: np.ndarray
    value: float
    iterations: int
    converged: bool


def clairvoyant_price(theta: np.ndarray, d0: np.ndarray, l: float
                      ) -> tuple[np.ndarray, float]:
    """Exact maximizer of p.d0 + p^T theta p over the ball of radius l.

    Works on the symmetric part S of theta. If S is negative definite and
    the stationary point lies inside the ball, that is the global maximum;
    otherwise the maximizer sits on the boundary where the multiplier nu
    solves sum_i (u_i / (nu - s_i))^2 = l^2 above the top eigenvalue of S
    (u being the eigen-coordinates of d0/2), found by safeguarded bisection.
    When d0/2 is orthogonal to the top eigenspace and the orthogonal part
    undershoots the boundary (the hard case), the solution is augmented
    along a top eigenvector.
    """
    theta = np.asarray(theta, dtype=float)
    d0 = np.asarray(d0, dtype=float)
    if l <= 0.0:
        return np.zeros_like(d0), 0.0
    s_part = 0.5 * (theta + theta.T)
    eigvals, eigvecs = np.linalg.eigh(s_part)
    u = eigvecs.T @ (0.5 * d0)
    s_max = float(eigvals[-1])

    def assemble(coords: np.ndarray) -> tuple[np.ndarray, float]:
        p = eigvecs @ coords
        value = float(2.0 * u @ coords + eigvals @ coords ** 2)
        return p, value

    if s_max < 0.0:
        interior = u / (-eigvals)
        if float(interior @ interior) <= l * l:
            return assemble(interior)

    scale_u = float(np.linalg.norm(u))
    gap_tol = 1e-12 * max(1.0, abs(s_max))
    top = eigvals >= s_max - gap_tol
    coords_perp = np.zeros_like(u)
    not_top = ~top
    coords_perp[not_top] = u[not_top] / (s_max - eigvals[not_top])
    perp_sq = float(coords_perp @ coords_perp)
    u_top = float(np.linalg.norm(u[top]))

    if u_top <= 1e-13 * (scale_u + 1.0) and perp_sq <= l * l:
        # hard case: pad with the top eigenvector up to the boundary
        coords = coords_perp.copy()
        idx = len(eigvals) - 1
        pad = math.sqrt(max(l * l - perp_sq, 0.0))
        coords[idx] += math.copysign(pad, u[idx]) if u[idx] != 0.0 else pad
        return assemble(coords)

    # scalar loops beat numpy dispatch overhead at these dimensions
    u_sq = [float(x) * float(x) for x in u]
    s_list = [float(x) for x in eigvals]
    l_sq = l * l

    def norm_sq(nu: float) -> float:
        return sum(us / ((nu - s) * (nu - s)) for us, s in zip(u_sq, s_list))

    hi = s_max + max(scale_u / l, 1e-12)
    while norm_sq(hi) > l_sq:
        hi = s_max + 2.0 * (hi - s_max)
    lo = s_max  # sentinel: the norm blows up (or exceeds l) at s_max+
    width_tol = 1e-14 * max(1.0, abs(hi))
    while hi - lo > width_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if norm_sq(mid) > l_sq:
            lo = mid
        else:
            hi = mid
    coords = u / (hi - eigvals)
    nrm = float(np.linalg.norm(coords))
    if nrm > 0.0:
        coords *= l / nrm
    return assemble(coords)


def theta_step(ell: ConfidenceEllipsoid, price: np.ndarray) -> np.ndarray:
    """Maximizer of <p p^T, theta> over the (regularized) Gram ellipsoid.

    theta = center + sqrt(radius_sq) p (Vbar^-1 p)^T / (sqrt(p^T Vbar^-1 p) ||p||),
    clamped onto the operator-norm ball afterwards. The ellipsoid metric is
    the prediction-error form tr(delta Vbar delta^T); the regularized Gram
    keeps the step well-defined at t = 0.
    """
    price = np.asarray(price, dtype=float)
    p_norm = float(np.linalg.norm(price))
    if p_norm == 0.0:
        raise ParameterError("theta_step requires a nonzero price")
    if ell.radius_sq == 0.0:
        return scale_Z(ell.center, ell.k_cap)
    w = np.linalg.solve(ell.shape.v_reg, price)
    denom = math.sqrt(float(price @ w)) * p_norm
    delta = (_BOUNDARY_SHRINK * math.sqrt(ell.radius_sq) / denom) * np.outer(price, w)
    full = ell.center + delta
    if spectral_norm(full) <= ell.k_cap:
        return full
    # active norm cap: clamping the boundary point can overshoot past the
    # constrained optimum, so search the clamped image of the whole segment
    best, best_val = None, -math.inf
    for tau in np.linspace(1.0, 0.0, 13):
        candidate = scale_Z(ell.center + tau * delta, ell.k_cap)
        val = float(price @ candidate @ price)
        if val > best_val:
            best, best_val = candidate, val
    return best


def ofu_select(ell: ConfidenceEllipsoid, d0: np.ndarray, l: float,
               cfg: PolicyConfig, rng: np.random.Generator,
               base: np.ndarray | None = None) -> OfuResult:
    """Alternating maximization of revenue over the ellipsoid and price ball.

    The first start follows the greedy price of the ellipsoid center; the
    remaining starts are uniform on the price sphere. ``base`` is an additive
    offset for models split into a known part plus an ellipsoid element
    (pre-learned diagonal); the returned matrix is the ellipsoid element.
    """
    d0 = np.asarray(d0, dtype=float)
    n = d0.shape[0]
    offset = np.zeros((n, n)) if base is None else np.asarray(base, dtype=float)
    best: OfuResult | None = None
    all_converged = True
    for restart in range(cfg.restarts):
        if restart == 0:
            p, _ = clairvoyant_price(offset + ell.center, d0, l)
            if np.linalg.norm(p) < 1e-12:
                p = np.zeros(n)
                p[0] = l
        else:
            p = uniform_sphere(n, l, rng)
        theta_c = scale_Z(ell.center, ell.k_cap)
        lin = float(p @ d0)
        value = lin + float(p @ (offset + theta_c) @ p)
        converged = False
        iterations = 0
        for _ in range(cfg.max_alt_iters):
            iterations += 1
            candidate = theta_step(ell, p)
            # the norm clamp can pull the exact ellipsoid maximizer below the
            # incumbent; keep the better matrix so the value stays monotone
            if float(p @ candidate @ p) >= float(p @ theta_c @ p):
                theta_c = candidate
            p, new_value = clairvoyant_price(offset + theta_c, d0, l)
            assert new_value >= value - 1e-9, "alternating step decreased revenue"
            if new_value - value < cfg.tol:
                value = new_value
                converged = True
                break
            value = new_value
        all_converged &= converged
        if best is None or value > best.value:
            best = OfuResult(price=p, theta_tilde=theta_c, value=value,
                             iterations=iterations, converged=converged)
    return OfuResult(price=best.price, theta_tilde=best.theta_tilde,
                     value=best.value, iterations=best.iterations,
                     converged=all_converged)


def prelearn_diagonal(env: EnvSpec, rounds_per_product: int,
                      rng: np.random.Generator
                      ) -> tuple[np.ndarray, History]:
    """Estimate own-price effects by playing each product at full amplitude.

    For each product i the price l*e_i is played for the given number of
    rounds and theta_ii is the average of D_i / l. Returns the estimates and
    the phase history with the estimated diagonal effect subtracted, ready
    to seed the cross-effect learning phase.
    """
    if rounds_per_product < 1:
        raise ParameterError("rounds_per_product must be >= 1")
    n, l = env.n_products, env.price_radius
    prices, demands = [], []
    estimates = np.zeros(n)
    for i in range(n):
        p = np.zeros(n)
        p[i] = l
        acc = 0.0
        for _ in range(rounds_per_product):
            sample = step(env, p, rng)
            prices.append(p.copy())
            demands.append(sample.demand)
            acc += sample.demand[i]
        estimates[i] = acc / (rounds_per_product * l)
    hist = History(n, price_radius=l)
    diag = np.diag(estimates)
    for p, d in zip(prices, demands):
        hist.append(p, d - diag @ p)
    return estimates, hist
