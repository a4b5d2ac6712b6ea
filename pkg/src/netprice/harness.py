"""Seeded replications of the learn-and-price loop, plus calibration and reports.

A run is described by a JSON-serializable config (environment truth, prior,
sampler, policy, confidence). Each replication plays the optimistic policy
for the horizon, refreshing the posterior estimate densely early on and at
geometric checkpoints later (the Gram state and history are updated every
period regardless), and records a per-period trace.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import confidence as conf
from .confidence import ConfidenceEllipsoid, GramState, RadiusConstants, contains
from .env import (DEFAULT_DIAG_RANGE, EnvSpec, expected_revenue, gen_theta_l0,
                  gen_theta_offdiag, gen_theta_spectral, step)
from .errors import CalibrationError, ParameterError, SamplerError
from .kernels import KernelSystem, default_truncation, power_norm
from .linalg import uniform_sphere
from .pacbayes import (History, SamplerConfig, SufficientStats, c1_constant,
                       lambda_schedule, posterior_mean)
from .policy import PolicyConfig, clairvoyant_price, ofu_select, prelearn_diagonal
from .priors import (L0Prior, OffDiagPrior, SpectralPowersPrior,
                     SpectralScalingPrior)

TRACE_COLUMNS = ("t", "price_norm", "instant_regret", "cum_regret", "beta_sq",
                 "in_confidence", "posterior_risk", "acceptance")

_PILOT_STREAM = 1
_MAIN_STREAM = 0


@dataclass(frozen=True)
class TruthConfig:
    kind: str  # "l0" | "offdiag" | "spectral"
    params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass(frozen=True)
class EnvConfig:
    n_products: int
    truth: TruthConfig
    baseline_demand: float | list = 1.0
    noise_sigma: float = 0.1
    noise_q: float = 0.1
    price_radius: float = 1.0
    norm_bound: float = 3.0


@dataclass(frozen=True)
class KernelConfig:
    decay_q: float = 1.0
    truncation: int | None = None
    domain_dim: int = 1


@dataclass(frozen=True)
class PriorConfig:
    kind: str  # "l0" | "offdiag" | "spectral_scaling" | "spectral_powers"
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConfidenceConfig:
    epsilon: float = 0.05
    constants: RadiusConstants = field(default_factory=RadiusConstants)
    mode: str = "oracle"  # or "conservative"
    scaling_exponent: str = "display"
    # upper bounds used instead of oracle truth quantities in conservative mode
    conservative: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RefreshConfig:
    dense_until: int = 50
    growth: float = 1.2


@dataclass(frozen=True)
class RunConfig:
    env: EnvConfig
    prior: PriorConfig
    horizon: int
    replications: int = 1
    base_seed: int = 0
    output_path: str = "out"
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    confidence: ConfidenceConfig = field(default_factory=ConfidenceConfig)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    refresh: RefreshConfig = field(default_factory=RefreshConfig)
    checkpoints: tuple | None = None

    def __post_init__(self):
        if self.horizon < 1 or self.replications < 1:
            raise ParameterError("horizon and replications must be >= 1")
        if self.policy.pre_learn_diag:
            n_pre = self.env.n_products * self.policy.pre_learn_rounds_per_product
            if n_pre >= self.horizon:
                raise ParameterError("pre-learning phase does not fit in the horizon")


def config_from_dict(raw: dict) -> RunConfig:
    """Build and validate a RunConfig from parsed JSON."""
    try:
        env_raw = dict(raw["env"])
        truth_raw = dict(env_raw.pop("truth"))
        env = EnvConfig(truth=TruthConfig(**truth_raw), **env_raw)
        prior = PriorConfig(**raw["prior"])
        conf_raw = dict(raw.get("confidence", {}))
        const_raw = dict(conf_raw.pop("constants", {}))
        for key, field_name in (("alpha_smooth", "alpha_smooth"),
                                ("beta_embed", "beta_embed"),
                                ("radius_factor", "factor")):
            if key in conf_raw:
                const_raw[field_name] = conf_raw.pop(key)
        conf_raw["constants"] = RadiusConstants(**const_raw)
        diag_keys = {k: raw[k] for k in ("horizon", "replications", "base_seed",
                                         "output_path", "checkpoints") if k in raw}
        if "checkpoints" in diag_keys:
            diag_keys["checkpoints"] = tuple(diag_keys["checkpoints"])
        return RunConfig(
            env=env,
            prior=prior,
            sampler=SamplerConfig(**raw.get("sampler", {})),
            policy=PolicyConfig(**raw.get("policy", {})),
            confidence=ConfidenceConfig(**conf_raw),
            kernel=KernelConfig(**raw.get("kernel", {})),
            refresh=RefreshConfig(**raw.get("refresh", {})),
            **diag_keys,
        )
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"invalid run config: {exc}") from exc


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


@dataclass
class Truth:
    """Ground truth plus the oracle quantities the radius formulas consume."""

    kind: str
    theta_star: np.ndarray
    j_star: int
    theta_min: float
    kappa_alpha_norm_sq: float
    kappa_interp_norm: float
    embeddings: np.ndarray | None


def build_kernel_system(cfg: RunConfig) -> KernelSystem:
    trunc = cfg.kernel.truncation or default_truncation(
        cfg.kernel.decay_q, cfg.env.n_products, cfg.horizon)
    return KernelSystem(decay_q=cfg.kernel.decay_q, truncation=trunc,
                        domain_dim=cfg.kernel.domain_dim)


def build_environment(cfg: RunConfig) -> tuple[EnvSpec, Truth]:
    env_cfg = cfg.env
    n = env_cfg.n_products
    truth_cfg = env_cfg.truth
    params = dict(truth_cfg.params)
    embeddings = None
    kappa_norm_sq = 1.0
    if truth_cfg.kind == "l0":
        theta = gen_theta_l0(n, int(params.get("s", n)), env_cfg.norm_bound,
                             truth_cfg.seed)
    elif truth_cfg.kind == "offdiag":
        theta = gen_theta_offdiag(
            n, float(params.get("c_off", 1.0)),
            tuple(params.get("diag_range", DEFAULT_DIAG_RANGE)), truth_cfg.seed)
    elif truth_cfg.kind == "spectral":
        system = build_kernel_system(cfg)
        emb_rng = np.random.default_rng([truth_cfg.seed, 17])
        embeddings = emb_rng.uniform(-math.pi, math.pi,
                                     size=(n, cfg.kernel.domain_dim))
        theta, kappa = gen_theta_spectral(
            embeddings, system, float(params.get("alpha", 1.0)), truth_cfg.seed,
            tuple(params.get("diag_range", DEFAULT_DIAG_RANGE)))
        kappa_norm_sq = power_norm(kappa, float(params.get("alpha", 1.0))) ** 2
    else:
        raise ParameterError(f"unknown truth kind {truth_cfg.kind!r}")

    d0_raw = env_cfg.baseline_demand
    d0 = np.full(n, float(d0_raw)) if np.isscalar(d0_raw) else np.asarray(d0_raw, float)
    env = EnvSpec(n_products=n, baseline_demand=d0, theta_star=theta,
                  noise_sigma=env_cfg.noise_sigma, noise_q=env_cfg.noise_q,
                  price_radius=env_cfg.price_radius, norm_bound=env_cfg.norm_bound)
    nz = np.abs(theta) > 0.0
    truth = Truth(
        kind=truth_cfg.kind,
        theta_star=theta,
        j_star=int(np.count_nonzero(nz)),
        theta_min=float(np.min(np.abs(theta)[nz])) if nz.any() else 1.0,
        kappa_alpha_norm_sq=kappa_norm_sq,
        # surrogate for the interpolation-infinity norm: the power-space norm
        # of the truth, exact up to the constants absorbed by calibration
        kappa_interp_norm=math.sqrt(kappa_norm_sq),
        embeddings=embeddings,
    )
    return env, truth


def build_prior(cfg: RunConfig, k_cap: float):
    kind = cfg.prior.kind
    params = dict(cfg.prior.params)
    n = cfg.env.n_products
    if kind == "l0":
        return L0Prior(n=n, alpha_mix=float(params.get("alpha_mix", 0.5)), k_cap=k_cap)
    if kind == "offdiag":
        return OffDiagPrior(n=n, k_cap=k_cap)
    if kind in ("spectral_scaling", "spectral_powers"):
        system = build_kernel_system(cfg)
        cls = SpectralScalingPrior if kind == "spectral_scaling" else SpectralPowersPrior
        return cls(system=system, n=n, k_cap=k_cap)
    raise ParameterError(f"unknown prior kind {kind!r}")


def _radius_fn(cfg: RunConfig, truth: Truth, c1: float):
    """Per-period radius for the configured prior regime, factor applied."""
    cc = cfg.confidence
    rc = cc.constants
    eps = cc.epsilon
    n = cfg.env.n_products
    l = cfg.env.price_radius
    k = cfg.env.norm_bound
    kind = cfg.prior.kind
    over = cc.conservative if cc.mode == "conservative" else {}
    if kind == "l0":
        j_star = int(over.get("j_star", truth.j_star))
        alpha_mix = float(cfg.prior.params.get("alpha_mix", 0.5))

        def fn(t: int) -> float:
            return rc.factor * conf.radius_l0(t, eps, j_star, n, k, alpha_mix, c1, l)
    elif kind == "offdiag":
        theta_min = float(over.get("theta_min", truth.theta_min))

        def fn(t: int) -> float:
            return rc.factor * conf.radius_offdiag(t, eps, theta_min, n, k, c1, l)
    elif kind == "spectral_scaling":
        norm = float(over.get("kappa_interp_norm", truth.kappa_interp_norm))

        def fn(t: int) -> float:
            return rc.factor * conf.radius_spectral_scaling(
                t, eps, n, rc, norm, c1, l, cc.scaling_exponent)
    else:
        norm_sq = float(over.get("kappa_alpha_norm_sq", truth.kappa_alpha_norm_sq))

        def fn(t: int) -> float:
            return rc.factor * conf.radius_spectral_powers(t, eps, n, rc, norm_sq, c1, l)
    return fn


def refresh_periods(horizon: int, refresh: RefreshConfig) -> set:
    """Periods at which the posterior is recomputed."""
    periods = set(range(1, min(refresh.dense_until, horizon) + 1))
    t = float(refresh.dense_until)
    while t <= horizon:
        t *= refresh.growth
        periods.add(int(math.ceil(t)))
    periods.add(horizon)
    return {p for p in periods if 1 <= p <= horizon}


@dataclass
class RegretTrace:
    replication_id: int
    seed: int
    rows: dict  # column name -> array over periods 1..T
    valid: bool = True

    @property
    def horizon(self) -> int:
        return len(self.rows["t"])

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for i in range(self.horizon):
                writer.writerow([self.rows[c][i] for c in TRACE_COLUMNS])

    @classmethod
    def from_csv(cls, path: str, replication_id: int = -1) -> "RegretTrace":
        data = np.genfromtxt(path, delimiter=",", names=True)
        data = np.atleast_1d(data)
        rows = {c: np.asarray(data[c]) for c in TRACE_COLUMNS}
        return cls(replication_id=replication_id, seed=-1, rows=rows)


def run_episode(cfg: RunConfig, replication_id: int,
                stream: int = _MAIN_STREAM,
                collect_quad: bool = False,
                _center_override: np.ndarray | None = None) -> RegretTrace:
    """One seeded replication of the full learn-and-price loop.

    With ``collect_quad`` the trace additionally records the target's Gram
    quadratic form per period (calibration input; never written to CSV).
    ``_center_override`` pins the ellipsoid center (clairvoyant-replay
    diagnostics only); posterior refreshes are skipped in that mode.
    """
    env, truth = build_environment(cfg)
    n, l = env.n_products, env.price_radius
    rng = np.random.default_rng([cfg.base_seed, stream, replication_id])
    c1 = c1_constant(env.noise_q, env.norm_bound, env.price_radius, env.noise_sigma)
    radius_at = _radius_fn(cfg, truth, c1)
    refreshes = refresh_periods(cfg.horizon, cfg.refresh)

    p_star, r_star = clairvoyant_price(env.theta_star, env.baseline_demand, l)

    base = None
    target = env.theta_star
    k_ell = env.norm_bound
    hist = History(n, price_radius=l)
    gram = GramState.empty(n)
    stats = SufficientStats(n)
    cols = {c: [] for c in TRACE_COLUMNS}
    quads: list[float] = []
    cum = 0.0

    def log_row(t, price, beta_sq, in_conf, risk, acc):
        nonlocal cum
        inst = r_star - expected_revenue(env.theta_star, env.baseline_demand, price)
        cum += inst
        cols["t"].append(t)
        cols["price_norm"].append(float(np.linalg.norm(price)))
        cols["instant_regret"].append(inst)
        cols["cum_regret"].append(cum)
        cols["beta_sq"].append(beta_sq)
        cols["in_confidence"].append(int(in_conf))
        cols["posterior_risk"].append(risk)
        cols["acceptance"].append(acc)

    t0 = 0
    if cfg.policy.pre_learn_diag:
        estimates, pre_hist = prelearn_diagonal(
            env, cfg.policy.pre_learn_rounds_per_product, rng)
        base = np.diag(estimates)
        target = env.theta_star - base
        k_ell = 2.0 * env.norm_bound
        prices, demands = pre_hist.prices, pre_hist.demands
        for i in range(len(pre_hist)):
            hist.append(prices[i], demands[i])
            gram.add_price(prices[i])
            stats.update(prices[i], demands[i])
            # no confidence set exists during pre-learning; coverage is vacuous
            log_row(i + 1, prices[i], math.nan, True, math.nan, math.nan)
            quads.append(math.nan)
        t0 = len(pre_hist)

    norm_capped = float(np.linalg.norm(target, 2)) <= k_ell + 1e-9
    prior = build_prior(cfg, k_ell)
    center = np.zeros((n, n)) if _center_override is None else _center_override
    acceptance = math.nan
    ell = ConfidenceEllipsoid(center=center, shape=gram,
                              radius_sq=radius_at(max(len(hist), 1)),
                              k_cap=k_ell, epsilon=cfg.confidence.epsilon)
    valid = True
    for t in range(t0 + 1, cfg.horizon + 1):
        if len(hist) == 0 and _center_override is None:
            price = uniform_sphere(n, l, rng)
        else:
            price = ofu_select(ell, env.baseline_demand, l, cfg.policy, rng,
                               base=base).price
        sample = step(env, price, rng, period=t)
        demand = sample.demand if base is None else sample.demand - base @ price
        hist.append(price, demand)
        gram.add_price(price)
        stats.update(price, demand)
        if t in refreshes and _center_override is None:
            lam = lambda_schedule(len(hist), c1)
            try:
                summary = posterior_mean(prior, hist, lam, cfg.sampler, rng,
                                         embeddings=truth.embeddings)
            except SamplerError:
                valid = False
                break
            center = summary.theta_hat
            acceptance = summary.acceptance_rate
        beta_sq = radius_at(len(hist))
        ell = ConfidenceEllipsoid(center=center, shape=gram, radius_sq=beta_sq,
                                  k_cap=k_ell, epsilon=cfg.confidence.epsilon)
        log_row(t, price, beta_sq, contains(ell, target), stats.risk(center),
                acceptance)
        if collect_quad:
            quad = conf.gram_quadratic(target - center, gram.v)
            quads.append(quad if norm_capped else math.inf)

    rows = {c: np.asarray(v) for c, v in cols.items()}
    trace = RegretTrace(replication_id=replication_id,
                        seed=cfg.base_seed, rows=rows, valid=valid)
    if collect_quad:
        trace.rows["_quad"] = np.asarray(quads)
    return trace


def default_checkpoints(horizon: int) -> tuple:
    cps = []
    t = 1
    while t < horizon:
        cps.append(t)
        t *= 2
    cps.append(horizon)
    return tuple(cps)


def _theorem_params(cfg: RunConfig, truth: Truth, c1: float) -> dict:
    cc = cfg.confidence
    regime = cfg.prior.kind
    over = cc.conservative if cc.mode == "conservative" else {}
    params = dict(regime=regime, n=cfg.env.n_products, l=cfg.env.price_radius,
                  k_cap=cfg.env.norm_bound, c1=c1, epsilon=cc.epsilon)
    if regime == "l0":
        params["j_star"] = int(over.get("j_star", truth.j_star))
        params["alpha_mix"] = float(cfg.prior.params.get("alpha_mix", 0.5))
    elif regime == "offdiag":
        params["theta_min"] = float(over.get("theta_min", truth.theta_min))
    elif regime == "spectral_scaling":
        params["rc"] = cc.constants
        params["kappa_interp_norm"] = float(
            over.get("kappa_interp_norm", truth.kappa_interp_norm))
        params["exponent_form"] = cc.scaling_exponent
    else:
        params["rc"] = cc.constants
        params["kappa_alpha_norm_sq"] = float(
            over.get("kappa_alpha_norm_sq", truth.kappa_alpha_norm_sq))
    return params


@dataclass
class BatchSummary:
    checkpoints: tuple
    median_regret: np.ndarray
    iqr_lo: np.ndarray
    iqr_hi: np.ndarray
    coverage: np.ndarray
    theorem_bounds: np.ndarray
    traces: list

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["checkpoint_t", "median_cum_regret", "iqr_lo",
                             "iqr_hi", "coverage", "theorem_bound"])
            for i, cp in enumerate(self.checkpoints):
                writer.writerow([cp, self.median_regret[i], self.iqr_lo[i],
                                 self.iqr_hi[i], self.coverage[i],
                                 self.theorem_bounds[i]])


def _episode_worker(args):
    cfg, rep, stream, *rest = args
    return run_episode(cfg, rep, stream, collect_quad=bool(rest and rest[0]))


def _run_replications(cfg: RunConfig, count: int, stream: int) -> list:
    jobs = [(cfg, rep, stream) for rep in range(count)]
    workers = int(os.environ.get("NETPRICE_THREADS", "0")) or None
    if workers is not None and workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=min(workers, count)) as pool:
            traces = list(pool.map(_episode_worker, jobs))
    else:
        traces = [_episode_worker(job) for job in jobs]
    return traces


def run_batch(cfg: RunConfig, write: bool = True) -> BatchSummary:
    """All replications plus per-trace CSVs and the checkpoint summary."""
    traces = _run_replications(cfg, cfg.replications, _MAIN_STREAM)
    env, truth = build_environment(cfg)
    c1 = c1_constant(env.noise_q, env.norm_bound, env.price_radius, env.noise_sigma)
    cps = cfg.checkpoints or default_checkpoints(cfg.horizon)
    regret = np.stack([tr.rows["cum_regret"] for tr in traces])
    covered = np.stack([tr.rows["in_confidence"] for tr in traces]).astype(bool)
    idx = np.asarray(cps, dtype=int) - 1
    med = np.median(regret[:, idx], axis=0)
    lo = np.percentile(regret[:, idx], 25, axis=0)
    hi = np.percentile(regret[:, idx], 75, axis=0)
    cov = np.array([np.mean(np.all(covered[:, :cp], axis=1)) for cp in cps])
    params = _theorem_params(cfg, truth, c1)
    bounds = np.array([conf.theorem_bound(t_horizon=int(cp), **params) for cp in cps])
    summary = BatchSummary(checkpoints=tuple(cps), median_regret=med, iqr_lo=lo,
                           iqr_hi=hi, coverage=cov, theorem_bounds=bounds,
                           traces=traces)
    if write:
        os.makedirs(cfg.output_path, exist_ok=True)
        for tr in traces:
            tr.to_csv(os.path.join(cfg.output_path, f"trace_{tr.replication_id}.csv"))
        summary.to_csv(os.path.join(cfg.output_path, "summary.csv"))
    return summary


def calibrate(cfg: RunConfig, target_coverage: float, pilot_reps: int,
              passes: int = 2, margin: float = 1.4) -> RadiusConstants:
    """Scale the radius by one factor until pilot coverage crosses the target.

    Each pass runs pilot episodes on their own seed stream, recording the
    target's quadratic form; coverage as a function of the factor is then
    monotone at fixed trajectories (set inclusion), and a bisection on the
    log-factor finds the crossing in at most 12 steps. Because the factor
    feeds back into the policy (a tighter ellipsoid explores less and needs
    a slightly larger factor), later passes re-run the pilots at the
    previous pass's factor and the final factor carries a safety margin.
    A replication whose target violates the factor-independent norm cap can
    never be covered.
    """
    if not 0.0 < target_coverage < 1.0:
        raise ParameterError("target_coverage must lie in (0, 1)")
    if pilot_reps < 1 or passes < 1:
        raise ParameterError("pilot_reps and passes must be >= 1")
    constants = cfg.confidence.constants
    needed = 0.0
    for _ in range(passes):
        pilot_cfg = replace(cfg, confidence=replace(cfg.confidence,
                                                    constants=constants))
        factor_used = constants.factor if constants.factor > 0 else 1.0
        ratios = []
        for rep in range(pilot_reps):
            tr = run_episode(pilot_cfg, rep, _PILOT_STREAM, collect_quad=True)
            if not tr.valid:
                ratios.append(math.inf)
                continue
            quad = tr.rows["_quad"]
            unscaled = tr.rows["beta_sq"] / factor_used
            ok = np.isfinite(quad) & np.isfinite(unscaled)
            if np.any(np.isinf(quad)):
                ratios.append(math.inf)
            elif ok.any():
                ratios.append(float(np.max(quad[ok] / unscaled[ok])))
        needed = max(needed, _factor_from_ratios(np.asarray(ratios),
                                                 target_coverage))
        constants = replace(constants, factor=needed)
    return replace(constants, factor=min(needed * margin, 1e6))


def _factor_from_ratios(ratios: np.ndarray, target_coverage: float) -> float:
    """Bisection (<= 12 steps, log scale) for the smallest covering factor."""
    if ratios.size == 0:
        raise CalibrationError("pilot produced no usable periods")
    lo, hi = 1e-6, 1e6
    if _coverage_at(ratios, hi) < target_coverage:
        raise CalibrationError(
            f"coverage {_coverage_at(ratios, hi):.3f} below target even at 1e6x")
    if _coverage_at(ratios, lo) < target_coverage:
        for _ in range(12):
            mid = math.sqrt(lo * hi)
            if _coverage_at(ratios, mid) >= target_coverage:
                hi = mid
            else:
                lo = mid
    else:
        hi = lo
    return hi


def _coverage_at(ratios: np.ndarray, factor: float) -> float:
    return float(np.mean(ratios < factor))


def bound_report(cfg: RunConfig, traces: list) -> dict:
    """Empirical medians against the theoretical and realized-radius bounds.

    Flags replications whose realized regret exceeds the conversion bound
    evaluated on their own radius sequence despite full-horizon coverage;
    such exceedances should stay within the epsilon budget.
    """
    env, truth = build_environment(cfg)
    c1 = c1_constant(env.noise_q, env.norm_bound, env.price_radius, env.noise_sigma)
    cps = cfg.checkpoints or default_checkpoints(min(tr.horizon for tr in traces))
    params = _theorem_params(cfg, truth, c1)
    n, l, k = cfg.env.n_products, cfg.env.price_radius, cfg.env.norm_bound
    rows = []
    for cp in cps:
        cp = int(cp)
        med = float(np.median([tr.rows["cum_regret"][cp - 1] for tr in traces]))
        rows.append({
            "checkpoint_t": cp,
            "median_regret": med,
            "theorem_bound": conf.theorem_bound(t_horizon=cp, **params),
            "median_realized_bound": float(np.median([
                _realized_bound(tr, cp, n, l, k) for tr in traces])),
        })
    exceed = []
    for tr in traces:
        full = tr.horizon
        if not np.all(tr.rows["in_confidence"].astype(bool)):
            continue
        bound = _realized_bound(tr, full, n, l, k)
        if tr.rows["cum_regret"][full - 1] > bound:
            exceed.append(tr.replication_id)
    r = len(traces)
    eps = cfg.confidence.epsilon
    allowance = eps * r + 2.0 * math.sqrt(eps * (1.0 - eps) * r)
    return {
        "checkpoints": rows,
        "exceedances": exceed,
        "exceedance_allowance": allowance,
        "replications": r,
    }


def _realized_bound(trace: RegretTrace, horizon: int, n: int, l: float,
                    k: float) -> float:
    beta = np.nan_to_num(trace.rows["beta_sq"][:horizon], nan=0.0)
    return conf.regret_bound_lemma1(n, horizon, l, k, beta)
