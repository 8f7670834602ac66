#pragma once

#include <cstdint>

namespace pdm {

/// Parameter set of the piecewise-diffusion demand model together with the
/// calibration constants used when evaluating it at a planning point.
///
/// Units: m and a0 in thousands of units, alpha/beta in 1/period, delta in
/// thousands * period^(-1/2), p_ref in dollars, v0 in $MM, t in periods.
struct PdmParams {
    double m = 0;        ///< market size (thousands)
    double a0 = 0;       ///< cumulative adopters at planning time (thousands)
    double pi_p = 0;     ///< participation fraction at the reference price
    double alpha = 0;    ///< intrinsic adoption rate
    double beta = 0;     ///< induction rate
    double delta = 0;    ///< exogenous-disturbance standard deviation scale
    double eta = 0;      ///< price-sensitivity exponent (> 0)
    double pi_m = 0;     ///< maximum participation fraction
    double gamma_p = 0;  ///< advertising impact on participation (1/$MM)
    double gamma_b = 0;  ///< advertising scaling of the induction rate (1/$MM)
    double p_ref = 410;  ///< calibration reference price ($)
    double v0 = 0;       ///< pre-period cumulative advertising ($MM)
    double t = 1;        ///< planning horizon (periods)

    /// Throws ModelError when any field violates the documented ranges.
    void validate() const;
};

/// Re-specified diffusion process over the true-prospect pool.
struct EffectiveSpec {
    double m_hat = 0;      ///< true-prospect pool size (thousands)
    double alpha_hat = 0;  ///< effective intrinsic rate
    double beta_hat = 0;   ///< effective induction rate
};

/// Normal approximation of demand over the planning horizon.
struct DemandMoments {
    double mu = 0;     ///< mean demand (thousands)
    double sigma = 0;  ///< standard deviation of demand (thousands)
};

/// Mean cumulative adoption of the diffusion process with pool m and rates
/// (alpha, beta) after time t.  Requires alpha > 0; alpha == 0 throws
/// DegenerateSpecError because the closed form divides by alpha.
double bass_mean(double t, double m, double alpha, double beta);

/// Asymptotic variance of cumulative adoption for the same process.
/// Zero at t == 0 and never negative; written so that large (alpha + beta) * t
/// decays instead of overflowing.
double bass_variance(double t, double m, double alpha, double beta);

/// Re-specification over the true-prospect pool: m_hat = (m - a) * pi,
/// alpha_hat = alpha + beta * a / (m - 1), beta_hat = (m_hat - 1) * beta / (m - 1).
/// Throws DegeneratePoolError when (m - a) * pi <= 1.
EffectiveSpec effective_spec(const PdmParams& params, double a, double pi);

/// Participation fraction at price p and advertising v:
///   pi = pi_m * (1 - ((1 - pi_p / pi_m) * exp(-gamma_p * v)) ^ ((p / p_ref)^(-eta)))
/// Decreasing in p, non-decreasing in v, with pi(p_ref, 0) = pi_p.
double participation_fraction(double p, double v, const PdmParams& params);

/// Induction rate scaled by cumulative advertising: beta * (1 + gamma_b * (v0 + v)).
double advertised_beta(double v, const PdmParams& params);

/// Demand moments at (p, v): computes the participation fraction, replaces
/// beta by its advertised value, re-specifies over the true-prospect pool and
/// evaluates the mean and variance closed forms.  sigma^2 adds delta^2 * t.
DemandMoments demand_moments(double p, double v, const PdmParams& params);

/// One exact pure-birth trajectory of the adoption process with transition
/// rate (M - j) * (alpha_hat + beta_hat * j / (M - 1)), M = round(m_hat).
/// Returns the adopter count at time t.  Deterministic for a fixed seed.
long simulate_sbm(const EffectiveSpec& spec, double t, std::uint64_t seed);

} // namespace pdm
