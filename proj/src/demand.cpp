#include "pdm/demand.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ModelError(what);
}

// Uniform draw in the open interval (0, 1), independent of the standard
// library's distribution implementations so results are stable.
double uniform_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

} // namespace

void PdmParams::validate() const {
    require(m > 0, "market size m must be positive");
    require(a0 >= 0 && a0 < m, "adopters a0 must satisfy 0 <= a0 < m");
    require(pi_p > 0, "participation fraction pi_p must be positive");
    require(pi_p <= pi_m, "pi_p must not exceed pi_m");
    require(pi_m < 1, "maximum participation fraction pi_m must be below 1");
    require(alpha >= 0, "alpha must be non-negative");
    require(beta >= 0, "beta must be non-negative");
    require(delta >= 0, "delta must be non-negative");
    require(eta > 0, "price sensitivity eta must be positive");
    require(gamma_p >= 0, "gamma_p must be non-negative");
    require(gamma_b >= 0, "gamma_b must be non-negative");
    require(p_ref > 0, "reference price p_ref must be positive");
    require(v0 >= 0, "pre-period advertising v0 must be non-negative");
    require(t > 0, "horizon t must be positive");
}

double bass_mean(double t, double m, double alpha, double beta) {
    require(t >= 0, "bass_mean: t must be non-negative");
    require(m >= 0, "bass_mean: pool size must be non-negative");
    require(beta >= 0, "bass_mean: beta must be non-negative");
    if (alpha <= 0) {
        throw DegenerateSpecError(
            "bass_mean: alpha must be positive (re-specify so that alpha_hat > 0)");
    }
    const double decay = std::exp(-(alpha + beta) * t);
    return m * (1.0 - decay) / (1.0 + (beta / alpha) * decay);
}

double bass_variance(double t, double m, double alpha, double beta) {
    require(t >= 0, "bass_variance: t must be non-negative");
    require(m >= 0, "bass_variance: pool size must be non-negative");
    require(beta >= 0, "bass_variance: beta must be non-negative");
    if (alpha <= 0) {
        throw DegenerateSpecError(
            "bass_variance: alpha must be positive (re-specify so that alpha_hat > 0)");
    }
    const double r = beta / alpha;
    const double s = (alpha + beta) * t;
    const double e = std::exp(-s);
    // The braces {e^s - 1 + 2 r s + r^2 (1 - e^{-s})} are folded into the
    // e^{-2s} prefactor so every term decays for large s.
    const double denom = 1.0 + r * e;
    const double denom4 = (denom * denom) * (denom * denom);
    const double braces = e - e * e + 2.0 * r * s * e * e + r * r * (e * e - e * e * e);
    const double psi = m * (1.0 + r) * braces / denom4;
    return psi < 0.0 ? 0.0 : psi;
}

EffectiveSpec effective_spec(const PdmParams& params, double a, double pi) {
    require(a >= 0 && a < params.m, "effective_spec: need 0 <= a < m");
    require(pi > 0 && pi <= 1, "effective_spec: need 0 < pi <= 1");
    const double m_hat = (params.m - a) * pi;
    if (m_hat <= 1.0) {
        std::ostringstream msg;
        msg << "effective_spec: true-prospect pool (m - a) * pi = " << m_hat
            << " must exceed 1";
        throw DegeneratePoolError(msg.str());
    }
    EffectiveSpec spec;
    spec.m_hat = m_hat;
    spec.alpha_hat = params.alpha + params.beta / (params.m - 1.0) * a;
    spec.beta_hat = (m_hat - 1.0) / (params.m - 1.0) * params.beta;
    return spec;
}

double participation_fraction(double p, double v, const PdmParams& params) {
    if (!(p > 0)) throw DomainError("participation_fraction: price must be positive");
    if (!(v >= 0)) throw DomainError("participation_fraction: advertising must be non-negative");
    const double base = (1.0 - params.pi_p / params.pi_m) * std::exp(-params.gamma_p * v);
    const double exponent = std::pow(p / params.p_ref, -params.eta);
    return params.pi_m * (1.0 - std::pow(base, exponent));
}

double advertised_beta(double v, const PdmParams& params) {
    if (!(v >= 0)) throw DomainError("advertised_beta: advertising must be non-negative");
    return params.beta * (1.0 + params.gamma_b * (params.v0 + v));
}

DemandMoments demand_moments(double p, double v, const PdmParams& params) {
    const double pi = participation_fraction(p, v, params);
    PdmParams advertised = params;
    advertised.beta = advertised_beta(v, params);
    const EffectiveSpec spec = effective_spec(advertised, params.a0, pi);
    DemandMoments moments;
    moments.mu = bass_mean(params.t, spec.m_hat, spec.alpha_hat, spec.beta_hat);
    const double psi = bass_variance(params.t, spec.m_hat, spec.alpha_hat, spec.beta_hat);
    moments.sigma = std::sqrt(psi + params.delta * params.delta * params.t);
    return moments;
}

long simulate_sbm(const EffectiveSpec& spec, double t, std::uint64_t seed) {
    require(t >= 0, "simulate_sbm: t must be non-negative");
    require(spec.m_hat >= 0, "simulate_sbm: pool must be non-negative");
    const long pool = std::lround(spec.m_hat);
    std::mt19937_64 gen(seed);
    double clock = 0.0;
    long adopters = 0;
    while (adopters < pool) {
        const double induction =
            pool > 1 ? spec.beta_hat * static_cast<double>(adopters) / (pool - 1.0) : 0.0;
        const double rate = (pool - adopters) * (spec.alpha_hat + induction);
        if (!(rate > 0)) break;
        clock += -std::log(uniform_open(gen)) / rate;
        if (clock > t) break;
        ++adopters;
    }
    return adopters;
}

} // namespace pdm
