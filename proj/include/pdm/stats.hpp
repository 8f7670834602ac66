#pragma once

#include <cstddef>
#include <vector>

#include "pdm/solver.hpp"

namespace pdm {

/// Standard normal distribution and density.
double normal_cdf(double x);
double normal_pdf(double x);

/// General normal distribution and density; sigma <= 0 throws ModelError.
double normal_cdf(double x, double mu, double sigma);
double normal_pdf(double x, double mu, double sigma);

/// Standard normal quantile, accurate to ~1e-12 residual in the CDF.
/// q outside (0, 1) throws UndefinedValueError.
double normal_quantile(double q);

/// Exact expected profit under normal demand:
///   (p - s)(mu F(o) - sigma^2 f(o)) + p o (1 - F(o)) + s o F(o) - c o - v
/// with F, f the CDF and density of Normal(mu, sigma^2).  Requires sigma > 0,
/// o >= 0.  The advertising term is scaled by scenario.ad_cost_scale.
double exact_expected_profit(double p, double v, double o, double mu, double sigma,
                             const Scenario& scenario);

/// Right-continuous empirical distribution function over a sample.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples);

    double operator()(double x) const;           ///< fraction of samples <= x
    double quantile(double q) const;             ///< smallest x with F(x) >= q
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

/// Smallest epsilon for which the one-sided DKW bound below is valid.
double dkw_min_epsilon(std::size_t n);

/// Finite-sample lower confidence bound (F_n(x) - eps)(1 - e^{-2 n eps^2}),
/// clamped at zero.  epsilon below dkw_min_epsilon(n) throws ModelError.
double dkw_lower_bound(double fn_x, std::size_t n, double epsilon);

/// Student-t quantile with df degrees of freedom via numeric inversion of the
/// incomplete-beta CDF.
double t_quantile(double q, int df);

/// How the replication dispersion enters the gap interval: scaled by 1/sqrt(M)
/// (a mean-level confidence interval) or applied unscaled.
enum class GapDispersion { StandardError, AsPrinted };

/// Optimality-gap study over M solved replications: the sample optima and the
/// out-of-sample objective values of their solutions.
struct GapStudy {
    std::vector<double> saa_values;   ///< z_N^{*i}, one per replication
    std::vector<double> true_values;  ///< z(p_i*, v_i*, o_i*), one per replication
    double alpha = 0.05;
    GapDispersion dispersion = GapDispersion::StandardError;
};

struct GapInterval {
    double lower = 0;         ///< lower confidence limit on the true optimum
    double upper = 0;         ///< upper confidence limit on the true optimum
    double gap_fraction = 0;  ///< (upper - lower) / lower
};

/// Confidence interval on the true optimum from the two replication means and
/// the t critical values; the gap fraction requires a positive lower limit.
GapInterval optimality_gap_ci(const GapStudy& study);

} // namespace pdm
