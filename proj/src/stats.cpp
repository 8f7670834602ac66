#include "pdm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Rational initial guess for the normal quantile (Acklam), polished below.
double quantile_guess(double q) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double q_low = 0.02425;
    if (q < q_low) {
        const double u = std::sqrt(-2.0 * std::log(q));
        return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
               ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    if (q > 1.0 - q_low) {
        const double u = std::sqrt(-2.0 * std::log(1.0 - q));
        return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
               ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    const double u = q - 0.5;
    const double r = u * u;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Regularized incomplete beta I_x(a, b) by the standard continued fraction.
double betacf(double a, double b, double x) {
    const double eps = 1e-15;
    const double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_cdf(double x, int df) {
    const double v = static_cast<double>(df);
    const double w = v / (v + x * x);
    const double half_tail = 0.5 * incbeta(0.5 * v, 0.5, w);
    return x >= 0.0 ? 1.0 - half_tail : half_tail;
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x, double mu, double sigma) {
    if (!(sigma > 0)) throw ModelError("normal_cdf: sigma must be positive");
    return normal_cdf((x - mu) / sigma);
}

double normal_pdf(double x, double mu, double sigma) {
    if (!(sigma > 0)) throw ModelError("normal_pdf: sigma must be positive");
    return normal_pdf((x - mu) / sigma) / sigma;
}

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw UndefinedValueError("normal_quantile: q must lie strictly inside (0, 1)");
    }
    double x = quantile_guess(q);
    // Halley-polished Newton steps; the residual lands near machine precision.
    for (int i = 0; i < 3; ++i) {
        const double err = normal_cdf(x) - q;
        const double pdf = normal_pdf(x);
        if (pdf <= 0.0) break;
        const double u = err / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double exact_expected_profit(double p, double v, double o, double mu, double sigma,
                             const Scenario& scenario) {
    if (!(sigma > 0)) throw ModelError("exact_expected_profit: sigma must be positive");
    if (!(o >= 0)) throw ModelError("exact_expected_profit: order must be non-negative");
    const double F = normal_cdf(o, mu, sigma);
    const double f = normal_pdf(o, mu, sigma);
    return (p - scenario.s) * (mu * F - sigma * sigma * f) + p * o * (1.0 - F) +
           scenario.s * o * F - scenario.c * o - scenario.ad_cost_scale * v;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw ModelError("empirical cdf: need at least one sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw ModelError("empirical cdf: quantile level out of range");
    const auto n = static_cast<double>(sorted_.size());
    const auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(q * n) - 1.0));
    return sorted_[std::min(k, sorted_.size() - 1)];
}

double dkw_min_epsilon(std::size_t n) {
    if (n == 0) throw ModelError("dkw: sample count must be positive");
    return std::sqrt(std::log(2.0) / (2.0 * static_cast<double>(n)));
}

double dkw_lower_bound(double fn_x, std::size_t n, double epsilon) {
    if (!(fn_x >= 0.0 && fn_x <= 1.0)) throw ModelError("dkw: F_n(x) must lie in [0, 1]");
    if (epsilon < dkw_min_epsilon(n)) {
        throw ModelError("dkw: epsilon below the validity threshold sqrt(ln 2 / (2n))");
    }
    const double nn = static_cast<double>(n);
    const double bound = (fn_x - epsilon) * (1.0 - std::exp(-2.0 * nn * epsilon * epsilon));
    return std::max(bound, 0.0);
}

double t_quantile(double q, int df) {
    if (!(q > 0.0 && q < 1.0)) throw ModelError("t_quantile: q must lie inside (0, 1)");
    if (df < 1) throw ModelError("t_quantile: degrees of freedom must be at least 1");
    if (q == 0.5) return 0.0;
    double lo = -1.0, hi = 1.0;
    while (t_cdf(lo, df) > q) lo *= 2.0;
    while (t_cdf(hi, df) < q) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (t_cdf(mid, df) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13 * std::max(1.0, std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

GapInterval optimality_gap_ci(const GapStudy& study) {
    const std::size_t m = study.saa_values.size();
    if (m < 2 || study.true_values.size() != m) {
        throw ModelError("gap study: need matching replication lists of length >= 2");
    }
    if (!(study.alpha > 0.0 && study.alpha < 1.0)) {
        throw ModelError("gap study: alpha must lie in (0, 1)");
    }
    const double dm = static_cast<double>(m);
    const auto mean = [dm](const std::vector<double>& xs) {
        return std::accumulate(xs.begin(), xs.end(), 0.0) / dm;
    };
    const auto stdev = [dm](const std::vector<double>& xs, double mu) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mu) * (x - mu);
        return std::sqrt(ss / (dm - 1.0));
    };
    const double mean_true = mean(study.true_values);
    const double mean_saa = mean(study.saa_values);
    const double sd_true = stdev(study.true_values, mean_true);
    const double sd_saa = stdev(study.saa_values, mean_saa);
    const double scale =
        study.dispersion == GapDispersion::StandardError ? 1.0 / std::sqrt(dm) : 1.0;
    const int df = static_cast<int>(m) - 1;
    GapInterval ci;
    ci.lower = mean_true + t_quantile(0.5 * study.alpha, df) * sd_true * scale;
    ci.upper = mean_saa + t_quantile(1.0 - 0.5 * study.alpha, df) * sd_saa * scale;
    if (!(ci.lower > 0.0)) {
        throw UndefinedValueError("gap study: gap fraction undefined for non-positive lower limit");
    }
    ci.gap_fraction = (ci.upper - ci.lower) / ci.lower;
    return ci;
}

} // namespace pdm
