"""Independent straight-line formula evaluations for the golden-value tests.

Every function here is a direct transcription using only the math module --
no imports from the package under test -- so agreement at the spot values is
a genuine dual-route check.
"""

import math


def radius_l0(t, epsilon, j_star, n, k_cap, alpha_mix, c1, l):
    j = max(j_star, 1)
    return 3.0 * l * l / t + 8.0 * c1 * (
        j * math.log(math.e * n * n * t * math.sqrt(k_cap * k_cap * n + 1.0) / j)
        - math.log(alpha_mix * (1.0 - alpha_mix))
        + math.log(2.0 / epsilon))


def radius_offdiag(t, epsilon, theta_min, n, k_cap, c1, l):
    return 3.0 * l * l * theta_min * theta_min / t + 8.0 * c1 * (
        k_cap * k_cap * n
        + (2.0 * n - 1.0) * math.log(t / theta_min)
        + 4.0 * math.log(n)
        + math.log(math.pi * math.pi / 6.0)
        + math.log(2.0 / epsilon))


def radius_spectral_scaling(t, epsilon, n, alpha, beta, c_ab, c_bq,
                            kappa_interp_norm, c1, l):
    power = (1.0 - alpha) / (1.0 - beta)
    norm_term = kappa_interp_norm ** (2.0 * (1.0 - beta) / (alpha - beta))
    return 3.0 * l * l + 8.0 * c1 * (
        c_ab * norm_term * (4.0 * n * n * t) ** power
        + c_bq * math.log(2.0 * n * math.sqrt(t)) ** 2
        + math.log(2.0 / epsilon))


def radius_spectral_powers(t, epsilon, n, c_ab, c_bqa, kappa_alpha_norm_sq, c1, l):
    return 3.0 * l * l / t + 8.0 * c1 * (
        c_ab * kappa_alpha_norm_sq
        + c_bqa * math.log(t * n * n) ** 2
        + math.log(2.0 / epsilon))


def c1_constant(q_noise, k_cap, price_radius, sigma):
    kl = k_cap * price_radius
    return max((q_noise + kl) * kl, sigma * sigma + k_cap * k_cap)


def lambda_schedule(t, c1):
    return t / (2.0 * c1)


def regret_bound_lemma1(n, t_horizon, l, k_cap, radii):
    total = 0.0
    for r in radii:
        total += r
    return (l * l
            * math.sqrt(8.0 * n * math.log(1.0 + 2.0 * t_horizon * l * l / n))
            * math.sqrt(total + 2.0 * k_cap * k_cap * t_horizon * n))


def power_norm_weighted(coeffs, decay_q, beta):
    total = 0.0
    for i, b in enumerate(coeffs, start=1):
        total += b * b / math.exp(-decay_q * i) ** beta
    return math.sqrt(total)


def geometric_eigen_sum(decay_q, power, m):
    return sum(math.exp(-decay_q * i) ** power for i in range(1, m + 1))


def l0_mixing_log_weight(n, alpha_mix, size):
    norm = sum(alpha_mix ** i for i in range(n * n + 1))
    return (size * math.log(alpha_mix) - math.log(norm)
            - math.log(math.comb(n * n, size)))


def offdiag_mixing_log_weight(n, size):
    if size == 0:
        return -math.inf
    norm = sum(i ** -2.0 for i in range(1, n * n + 1))
    return (-2.0 * math.log(size) - math.log(norm)
            - math.log(math.comb(n * n, size)))
