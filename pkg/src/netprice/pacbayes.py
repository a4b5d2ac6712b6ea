"""Empirical risk, the norm-scaling operator, and the posterior-mean estimator.

The estimator is the mean of the scaled parameter under the exponential-
weights measure exp(-lambda * risk(Z(theta))) d(prior). The defining
integral is intractable, so it is computed by Metropolis-Hastings over each
prior: random-walk moves on the active coordinates (or the Karhunen-Loeve
coefficients and the mixing parameter for the Gaussian-process priors) plus
reversible birth/death moves on the support for the discrete priors.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, SamplerError
from .linalg import spectral_norm
from .priors import (L0Prior, OffDiagPrior, PriorSpec, SpectralPowersPrior,
                     SpectralScalingPrior, halfnormal_logpdf,
                     offdiag_entry_logpdf, sample_prior, support_weight_table)

__all__ = [
    "History", "SufficientStats", "SamplerConfig", "PosteriorSummary",
    "empirical_risk", "scale_Z", "c1_constant", "lambda_schedule",
    "posterior_mean",
]


class History:
    """Append-only record of (price, demand) pairs."""

    def __init__(self, n_products: int, price_radius: float | None = None):
        self.n_products = n_products
        self.price_radius = price_radius
        self._prices: list[np.ndarray] = []
        self._demands: list[np.ndarray] = []

    def append(self, price: np.ndarray, demand: np.ndarray) -> None:
        price = np.asarray(price, dtype=float)
        demand = np.asarray(demand, dtype=float)
        if price.shape != (self.n_products,) or demand.shape != (self.n_products,):
            raise ParameterError("price/demand dimension disagrees with the history")
        if self.price_radius is not None and np.linalg.norm(price) > self.price_radius + 1e-12:
            raise DomainError("price outside the admissible ball")
        self._prices.append(price)
        self._demands.append(demand)

    def __len__(self) -> int:
        return len(self._prices)

    @property
    def prices(self) -> np.ndarray:
        if not self._prices:
            return np.zeros((0, self.n_products))
        return np.stack(self._prices)

    @property
    def demands(self) -> np.ndarray:
        if not self._demands:
            return np.zeros((0, self.n_products))
        return np.stack(self._demands)

    def truncated(self, t: int) -> "History":
        out = History(self.n_products, self.price_radius)
        out._prices = self._prices[:t]
        out._demands = self._demands[:t]
        return out


class SufficientStats:
    """Streaming sufficient statistics for the least-squares risk.

    risk(theta) = (sum||D_s||^2 - 2<theta, B> + tr(theta V theta^T)) / t
    with B = sum D_s p_s^T and V = sum p_s p_s^T.
    """

    __slots__ = ("t", "sdd", "b", "v")

    def __init__(self, n: int):
        self.t = 0
        self.sdd = 0.0
        self.b = np.zeros((n, n))
        self.v = np.zeros((n, n))

    @classmethod
    def from_history(cls, hist: History) -> "SufficientStats":
        stats = cls(hist.n_products)
        p, d = hist.prices, hist.demands
        stats.t = len(hist)
        stats.sdd = float(np.sum(d * d))
        stats.b = d.T @ p
        stats.v = p.T @ p
        return stats

    def update(self, price: np.ndarray, demand: np.ndarray) -> None:
        self.t += 1
        self.sdd += float(demand @ demand)
        self.b += np.outer(demand, price)
        self.v += np.outer(price, price)

    def risk(self, theta: np.ndarray) -> float:
        if self.t == 0:
            return 0.0
        return (self.sdd - 2.0 * np.vdot(theta, self.b)
                + np.vdot(theta @ self.v, theta)) / self.t


@dataclass(frozen=True)
class SamplerConfig:
    chain_length: int = 4000
    burn_in: int = 1000
    thin: int = 4
    proposal_scale: float = 0.1
    support_move_prob: float = 0.3
    restarts: int = 2

    def __post_init__(self):
        if self.burn_in >= self.chain_length:
            raise ParameterError("burn_in must be smaller than chain_length")
        if self.thin < 1 or self.restarts < 1:
            raise ParameterError("thin and restarts must be >= 1")
        if self.proposal_scale <= 0.0:
            raise ParameterError("proposal_scale must to be positive")
        if not 0.0 <= self.support_move_prob <= 1.0:
            raise ParameterError("support_move_prob must lie in [0, 1]")


@dataclass
class PosteriorSummary:
    theta_hat: np.ndarray
    acceptance_rate: float
    effective_samples: int
    risk_at_mean: float
    warning: bool = False


def empirical_risk(theta: np.ndarray, hist: History) -> float:
    """Average squared residual (1/t) sum ||D_s - theta p_s||^2."""
    if len(hist) == 0:
        raise DomainError("empirical risk is undefined on an empty history")
    p, d = hist.prices, hist.demands
    resid = d - p @ np.asarray(theta, dtype=float).T
    return float(np.sum(resid * resid) / len(hist))


def scale_Z(theta: np.ndarray, k_cap: float) -> np.ndarray:
    """Clamp onto the operator-norm ball: theta * min(1, k_cap / ||theta||).

    The zero matrix is returned unchanged. A literal rescale K*theta/||theta||
    would inflate small-norm draws, so the clamp is used throughout.
    """
    theta = np.asarray(theta, dtype=float)
    norm = spectral_norm(theta)
    if norm <= k_cap:
        return theta
    return theta * (k_cap / norm)


def c1_constant(q_noise: float, k_cap: float, price_radius: float, sigma: float) -> float:
    """max{(Q + K L) K L, sigma^2 + K^2}, the Bernstein constant of the risk."""
    for name, val in (("q_noise", q_noise), ("k_cap", k_cap),
                      ("price_radius", price_radius), ("sigma", sigma)):
        if val <= 0.0:
            raise ParameterError(f"{name} must be positive")
    kl = k_cap * price_radius
    return max((q_noise + kl) * kl, sigma * sigma + k_cap * k_cap)


def lambda_schedule(t: int, c1: float) -> float:
    """Inverse-temperature schedule t / (2 C1)."""
    if t < 1:
        raise ParameterError("t must be >= 1")
    if c1 <= 0.0:
        raise ParameterError("c1 must be positive")
    return t / (2.0 * c1)


# ---------------------------------------------------------------------------
# Metropolis-Hastings chains

_ADAPT_WINDOW = 50
_ADAPT_LO, _ADAPT_HI = 0.25, 0.45


def _log_ball_volume(dim: int, radius: float) -> float:
    return dim * math.log(radius) + 0.5 * dim * math.log(math.pi) - math.lgamma(0.5 * dim + 1.0)


class _ChainBase:
    """Shared run loop: move mixture, burn-in adaptation, thinned averaging."""

    def __init__(self, spec, stats: SufficientStats, lam: float,
                 cfg: SamplerConfig, rng: np.random.Generator):
        self.spec = spec
        self.stats = stats
        self.lam = lam
        self.cfg = cfg
        self.rng = rng
        self.scale = cfg.proposal_scale
        self.cur_risk = 0.0

    def z_current(self) -> np.ndarray:
        return scale_Z(self.theta_view(), self.spec.k_cap)

    def scaled_risk(self, theta: np.ndarray) -> float:
        if self.lam == 0.0:
            return 0.0
        r = self.stats.risk(scale_Z(theta, self.spec.k_cap))
        if not np.isfinite(r):
            raise SamplerError("non-finite empirical risk in the chain",
                               {"lambda": self.lam, "t": self.stats.t,
                                "prior": type(self.spec).__name__})
        return r

    def run(self, accumulate) -> tuple[float, list[float]]:
        cfg = self.cfg
        self.cur_risk = self.scaled_risk(self.theta_view())
        post_acc = post_tot = 0
        win_acc = win_tot = 0
        scalars: list[float] = []
        for it in range(cfg.chain_length):
            coef_move = not self.support_move_available() or \
                self.rng.uniform() >= cfg.support_move_prob
            if coef_move:
                accepted = self.coefficient_move()
                win_acc += accepted
                win_tot += 1
            else:
                accepted = self.support_move()
            if it < cfg.burn_in:
                if win_tot >= _ADAPT_WINDOW:
                    rate = win_acc / win_tot
                    if rate < _ADAPT_LO:
                        self.scale = max(self.scale * 0.7, 1e-5)
                    elif rate > _ADAPT_HI:
                        self.scale = min(self.scale * 1.4, 50.0)
                    win_acc = win_tot = 0
            else:
                post_acc += accepted
                post_tot += 1
                if (it - cfg.burn_in) % cfg.thin == 0:
                    z = self.z_current()
                    accumulate(z)
                    scalars.append(float(np.sum(z * z)))
        return (post_acc / max(post_tot, 1)), scalars

    # subclass interface -----------------------------------------------------
    def theta_view(self) -> np.ndarray:
        raise NotImplementedError

    def support_move_available(self) -> bool:
        return False

    def coefficient_move(self) -> int:
        raise NotImplementedError

    def support_move(self) -> int:
        raise NotImplementedError


class _DiscreteChain(_ChainBase):
    """Chain over (support, active values) for the discrete-support priors."""

    def __init__(self, spec, stats, lam, cfg, rng):
        super().__init__(spec, stats, lam, cfg, rng)
        draw = sample_prior(spec, rng)
        self.theta = draw.theta.copy()
        self.active = np.array(
            sorted(i * spec.n + j for i, j in (draw.support or ())), dtype=int)
        self.m_total = spec.n ** 2
        self.lmw = support_weight_table(spec)

    def theta_view(self) -> np.ndarray:
        return self.theta

    def support_move_available(self) -> bool:
        return True

    # per-prior hooks ---------------------------------------------------------
    def component_logpdf_delta(self, flat_idx, old_vals, new_vals) -> float:
        raise NotImplementedError

    def birth_value(self, flat_idx: int,
                    value_only_density: float | None = None) -> tuple[float, float]:
        """Proposed new-entry value and its log proposal density.

        With ``value_only_density`` set, no draw is made; the density is
        evaluated at that value (needed by the reverse move of a death).
        """
        raise NotImplementedError

    def birth_comp_logratio(self, flat_idx: int, value: float, j_from: int) -> float:
        """log of the component-measure ratio (new support over old)."""
        raise NotImplementedError

    def feasible(self, theta: np.ndarray) -> bool:
        return True

    # moves -------------------------------------------------------------------
    def coefficient_move(self) -> int:
        j = len(self.active)
        if j == 0:
            return 1  # nothing to perturb; identity proposal
        old_vals = self.theta.flat[self.active].copy()
        new_vals = old_vals + self.scale * self.rng.standard_normal(j)
        log_prior = self.component_logpdf_delta(self.active, old_vals, new_vals)
        if log_prior == -math.inf:
            return 0
        prop = self.theta.copy()
        prop.flat[self.active] = new_vals
        if not self.feasible(prop):
            return 0
        new_risk = self.scaled_risk(prop)
        log_a = log_prior - self.lam * (new_risk - self.cur_risk)
        if log_a >= 0.0 or self.rng.uniform() < math.exp(log_a):
            self.theta = prop
            self.cur_risk = new_risk
            return 1
        return 0

    @staticmethod
    def _birth_prob(j: int, m: int) -> float:
        if j == 0:
            return 1.0
        if j == m:
            return 0.0
        return 0.5

    def support_move(self) -> int:
        j = len(self.active)
        m = self.m_total
        go_birth = self.rng.uniform() < self._birth_prob(j, m)
        if go_birth:
            free = np.setdiff1d(np.arange(m), self.active, assume_unique=True)
            pos = int(free[self.rng.integers(len(free))])
            value, log_g = self.birth_value(pos)
            prop = self.theta.copy()
            prop.flat[pos] = value
            if not self.feasible(prop):
                return 0
            log_mix = self.lmw[j + 1] - self.lmw[j]
            log_comp = self.birth_comp_logratio(pos, value, j)
            d_rev = 1.0 - self._birth_prob(j + 1, m)
            log_q = (math.log(d_rev / (j + 1))
                     - math.log(self._birth_prob(j, m) / (m - j)) - log_g)
            new_risk = self.scaled_risk(prop)
            log_a = log_mix + log_comp + log_q - self.lam * (new_risk - self.cur_risk)
            if log_a >= 0.0 or self.rng.uniform() < math.exp(log_a):
                self.theta = prop
                self.active = np.sort(np.append(self.active, pos))
                self.cur_risk = new_risk
                return 1
            return 0
        if j == 0:
            return 0
        k = int(self.rng.integers(j))
        pos = int(self.active[k])
        value = float(self.theta.flat[pos])
        prop = self.theta.copy()
        prop.flat[pos] = 0.0
        log_mix_new = self.lmw[j - 1]
        if log_mix_new == -math.inf:
            return 0
        log_mix = log_mix_new - self.lmw[j]
        # reciprocal of the birth ratio evaluated at the removed entry
        log_comp = -self.birth_comp_logratio(pos, value, j - 1)
        _, log_g = self.birth_value(pos, value_only_density=value)
        b_rev = self._birth_prob(j - 1, m)
        d_fwd = 1.0 - self._birth_prob(j, m)
        log_q = (math.log(b_rev / (m - j + 1)) + log_g - math.log(d_fwd / j))
        new_risk = self.scaled_risk(prop)
        log_a = log_mix + log_comp + log_q - self.lam * (new_risk - self.cur_risk)
        if log_a >= 0.0 or self.rng.uniform() < math.exp(log_a):
            self.theta = prop
            self.active = np.delete(self.active, k)
            self.cur_risk = new_risk
            return 1
        return 0


class _L0Chain(_DiscreteChain):
    """Uniform-on-Frobenius-ball components; birth proposals are uniform."""

    def __init__(self, spec: L0Prior, stats, lam, cfg, rng):
        super().__init__(spec, stats, lam, cfg, rng)
        self.radius = spec.fro_radius

    def feasible(self, theta: np.ndarray) -> bool:
        return float(np.sum(theta * theta)) <= self.radius ** 2

    def component_logpdf_delta(self, flat_idx, old_vals, new_vals) -> float:
        return 0.0  # uniform density cancels; feasibility handles the ball

    def birth_value(self, flat_idx: int, value_only_density: float | None = None):
        log_g = -math.log(2.0 * self.radius)
        if value_only_density is not None:
            return value_only_density, log_g
        return float(self.rng.uniform(-self.radius, self.radius)), log_g

    def birth_comp_logratio(self, flat_idx: int, value: float, j_from: int) -> float:
        return (_log_ball_volume(j_from, self.radius)
                - _log_ball_volume(j_from + 1, self.radius))


class _OffDiagChain(_DiscreteChain):
    """Half-normal diagonal, sqrt-gamma off-diagonal; births draw the prior."""

    def _entry_logpdf(self, flat_idx: int, value: float) -> float:
        i, j = divmod(flat_idx, self.spec.n)
        if i == j:
            return halfnormal_logpdf(value)
        return offdiag_entry_logpdf(value, self.spec.n)

    def component_logpdf_delta(self, flat_idx, old_vals, new_vals) -> float:
        total = 0.0
        for pos, old, new in zip(flat_idx, old_vals, new_vals):
            lp = self._entry_logpdf(int(pos), float(new))
            if lp == -math.inf:
                return -math.inf
            total += lp - self._entry_logpdf(int(pos), float(old))
        return total

    def birth_value(self, flat_idx: int, value_only_density: float | None = None):
        if value_only_density is not None:
            return value_only_density, self._entry_logpdf(flat_idx, value_only_density)
        i, j = divmod(flat_idx, self.spec.n)
        if i == j:
            value = abs(self.rng.standard_normal())
        else:
            sign = 1.0 if self.rng.uniform() < 0.5 else -1.0
            value = sign * math.sqrt(self.rng.gamma(1.0 / self.spec.n, 1.0))
        return float(value), self._entry_logpdf(flat_idx, float(value))

    def birth_comp_logratio(self, flat_idx: int, value: float, j_from: int) -> float:
        return self._entry_logpdf(flat_idx, value)


class _SpectralChain(_ChainBase):
    """Chain over Karhunen-Loeve coefficients and the mixing parameter."""

    def __init__(self, spec, stats, lam, cfg, rng, embeddings: np.ndarray):
        super().__init__(spec, stats, lam, cfg, rng)
        emb = np.atleast_2d(np.asarray(embeddings, dtype=float))
        diffs = (emb[:, None, :] - emb[None, :, :]).reshape(spec.n ** 2, -1)
        self.basis = spec.system.basis_values(diffs)  # (n^2, m)
        self.mu = spec.system.eigenvalues
        self.scaling = isinstance(spec, SpectralScalingPrior)
        self.gamma = float(spec.gamma_density.sample(rng))
        self.z = rng.standard_normal(spec.system.truncation)
        self.theta = self._theta_from(self.z, self.gamma)

    def _theta_from(self, z: np.ndarray, gamma: float) -> np.ndarray:
        coeff = (np.sqrt(gamma * self.mu) * z if self.scaling
                 else self.mu ** (gamma / 2.0) * z)
        return (self.basis @ coeff).reshape(self.spec.n, self.spec.n)

    def _log_gamma_prior(self, gamma: float) -> float:
        return self.spec.gamma_density.logpdf(gamma)

    def theta_view(self) -> np.ndarray:
        return self.theta

    def coefficient_move(self) -> int:
        z_new = self.z + self.scale * self.rng.standard_normal(len(self.z))
        if self.scaling:
            u = math.log(max(self.gamma - 1.0, 1e-300))
            u_new = u + 0.5 * self.scale * self.rng.standard_normal()
            gamma_new = 1.0 + math.exp(u_new)
            # density in u-space carries the Jacobian exp(u)
            log_gamma = (self._log_gamma_prior(gamma_new) + u_new
                         - self._log_gamma_prior(self.gamma) - u)
        else:
            gamma_new = self.gamma + 0.5 * self.scale * self.rng.standard_normal()
            log_gamma = (self._log_gamma_prior(gamma_new)
                         - self._log_gamma_prior(self.gamma))
        if log_gamma == -math.inf:
            return 0
        log_z = -0.5 * float(z_new @ z_new - self.z @ self.z)
        prop = self._theta_from(z_new, gamma_new)
        new_risk = self.scaled_risk(prop)
        log_a = log_gamma + log_z - self.lam * (new_risk - self.cur_risk)
        if log_a >= 0.0 or self.rng.uniform() < math.exp(log_a):
            self.z = z_new
            self.gamma = gamma_new
            self.theta = prop
            self.cur_risk = new_risk
            return 1
        return 0


def _effective_sample_size(series: np.ndarray) -> int:
    """Autocorrelation-adjusted sample count (initial positive sequence)."""
    n = len(series)
    if n < 4:
        return n
    x = series - series.mean()
    var = float(x @ x) / n
    if var == 0.0:
        return n
    rho_sum = 0.0
    for lag in range(1, n // 2):
        rho = float(x[:-lag] @ x[lag:]) / ((n - lag) * var)
        if rho <= 0.0:
            break
        rho_sum += rho
    return max(1, int(n / (1.0 + 2.0 * rho_sum)))


def _make_chain(spec: PriorSpec, stats, lam, cfg, rng, embeddings):
    if isinstance(spec, L0Prior):
        return _L0Chain(spec, stats, lam, cfg, rng)
    if isinstance(spec, OffDiagPrior):
        return _OffDiagChain(spec, stats, lam, cfg, rng)
    if isinstance(spec, (SpectralScalingPrior, SpectralPowersPrior)):
        if embeddings is None:
            raise ParameterError("spectral priors require product embeddings")
        return _SpectralChain(spec, stats, lam, cfg, rng, embeddings)
    raise ParameterError(f"unknown prior spec {type(spec).__name__}")


def posterior_mean(spec: PriorSpec, hist: History, lam: float, cfg: SamplerConfig,
                   rng: np.random.Generator,
                   embeddings: np.ndarray | None = None) -> PosteriorSummary:
    """Posterior mean of the scaled parameter under exponential weights.

    Restarts share the data but use independent streams; the returned matrix
    is the thinned post-burn-in average of the scaled samples pooled over
    restarts, so it stays inside the norm ball by convexity.
    """
    if lam < 0.0:
        raise ParameterError("lambda must be nonnegative")
    if len(hist) == 0 and lam > 0.0:
        raise DomainError("positive lambda requires a nonempty history")
    stats = SufficientStats.from_history(hist)
    total = np.zeros((spec.n, spec.n))
    count = 0

    def accumulate(z):
        nonlocal count
        total[...] += z
        count += 1

    acc_rates = []
    ess = 0
    for child in rng.spawn(cfg.restarts):
        chain = _make_chain(spec, stats, lam, cfg, child, embeddings)
        rate, scalars = chain.run(accumulate)
        acc_rates.append(rate)
        ess += _effective_sample_size(np.asarray(scalars))
    theta_hat = total / max(count, 1)
    # exact-norm safeguard: the iterative norm inside scale_Z can undershoot
    # by ~1e-10, so re-project to keep the convexity invariant airtight
    exact = float(np.linalg.norm(theta_hat, 2)) if np.any(theta_hat) else 0.0
    if exact > spec.k_cap:
        theta_hat *= spec.k_cap / exact
    acceptance = float(np.mean(acc_rates))
    return PosteriorSummary(
        theta_hat=theta_hat,
        acceptance_rate=acceptance,
        effective_samples=int(ess),
        risk_at_mean=stats.risk(theta_hat),
        warning=not 0.05 <= acceptance <= 0.95,
    )
