"""Dynamic pricing with demand learning on a product network.

Simulates a seller facing an unknown linear demand model over N products,
estimating the price-sensitivity matrix with exponential-weights posteriors
under sparsity priors and pricing optimistically over a confidence
ellipsoid. The harness runs seeded replications, calibrates confidence
radii, and checks the closed-form regret bounds.
"""

from .confidence import (ConfidenceEllipsoid, GramState, RadiusConstants,
                         contains, radius_l0, radius_offdiag,
                         radius_spectral_powers, radius_spectral_scaling,
                         regret_bound_lemma1, theorem_bound)
from .env import (DemandSample, EnvSpec, expected_revenue, gen_theta_l0,
                  gen_theta_offdiag, gen_theta_spectral, step)
from .errors import (CalibrationError, DomainError, NetpriceError,
                     ParameterError, SamplerError)
from .harness import (RunConfig, RegretTrace, bound_report, calibrate,
                      config_from_dict, load_config, run_batch, run_episode)
from .kernels import (KernelSystem, SeriesFunction, default_truncation,
                      kl_sample_powers, kl_sample_scaling, power_norm)
from .linalg import operator_norm, uniform_sphere
from .pacbayes import (History, PosteriorSummary, SamplerConfig,
                       SufficientStats, c1_constant, empirical_risk,
                       lambda_schedule, posterior_mean, scale_Z)
from .policy import (OfuResult, PolicyConfig, clairvoyant_price, ofu_select,
                     prelearn_diagonal, theta_step)
from .priors import (L0Prior, OffDiagPrior, PriorDraw, SpectralPowersPrior,
                     SpectralScalingPrior, log_mixing_weight, sample_prior)

__version__ = "0.1.0"
