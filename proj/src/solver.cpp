#include "pdm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pdm/errors.hpp"
#include "pdm/stats.hpp"

namespace pdm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double uniform_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

// Order-statistic multiplier for the inner problem: the larger of the service
// quantile and the critical-ratio sample quantile, -inf when neither applies.
double order_weight(int p, const Scenario& scenario, const SaaSample& sample) {
    double w = kNegInf;
    if (scenario.theta < 1.0) w = normal_quantile(1.0 - scenario.theta);
    if (p > scenario.c) {
        const double ratio = (p - scenario.c) / (p - scenario.s);
        const auto n = static_cast<double>(sample.z.size());
        auto k = static_cast<std::ptrdiff_t>(std::ceil(n * ratio));
        k = std::clamp<std::ptrdiff_t>(k, 1, static_cast<std::ptrdiff_t>(sample.z.size()));
        w = std::max(w, sample.z[static_cast<std::size_t>(k - 1)]);
    }
    return w;
}

struct Best {
    bool set = false;
    int p = 0;
    double v = 0;
    double o = 0;
    double objective = kNegInf;

    // Strictly larger objective wins; exact ties go to the lower price, then
    // the lower advertising level.
    void offer(int cp, double cv, double co, double cobj) {
        const bool better = !set || cobj > objective ||
                            (cobj == objective && (cp < p || (cp == p && cv < v)));
        if (better) {
            set = true;
            p = cp;
            v = cv;
            o = co;
            objective = cobj;
        }
    }
};

// Candidate advertising levels for one triangle slice at a fixed price:
// the clamped endpoints, plus the root of the optimal order if it changes
// sign inside the slice (the order is clamped at zero there).
template <typename Eval>
void offer_slice(const SliceInterval& slice, int p, const Scenario& scenario,
                 const SaaSample& sample, double v_lo_cap, double v_hi_cap, const Eval& moments_at,
                 Best& best) {
    const double lo = std::max(slice.v_lo, v_lo_cap);
    const double hi = std::min(slice.v_hi, v_hi_cap);
    if (lo > hi) return;

    const DemandMoments m_lo = moments_at(lo);
    const DemandMoments m_hi = moments_at(hi);
    const double w = order_weight(p, scenario, sample);

    double candidates[3];
    int count = 0;
    candidates[count++] = lo;
    if (hi != lo) candidates[count++] = hi;
    if (w != kNegInf && hi != lo) {
        const double g_lo = m_lo.mu + m_lo.sigma * w;
        const double g_hi = m_hi.mu + m_hi.sigma * w;
        if ((g_lo < 0.0) != (g_hi < 0.0)) {
            candidates[count++] = lo + (hi - lo) * (0.0 - g_lo) / (g_hi - g_lo);
        }
    }
    for (int i = 0; i < count; ++i) {
        const double v = candidates[i];
        const DemandMoments m = v == lo ? m_lo : (v == hi ? m_hi : moments_at(v));
        const double o = optimal_order(m.mu, m.sigma, p, scenario, sample);
        const double obj = saa_objective(p, v, o, m.mu, m.sigma, scenario, sample);
        best.offer(p, v, o, obj);
    }
}

void check_scenario_against(const Surface& surface, const Scenario& scenario) {
    scenario.validate();
    if (scenario.p_min < surface.domain.p_min || scenario.p_max > surface.domain.p_max ||
        scenario.v_max > surface.domain.v_max) {
        throw DomainError("solve: scenario bounds extend beyond the surface domain");
    }
}

} // namespace

void Scenario::validate() const {
    if (!(s >= 0 && s < c)) throw ModelError("scenario: need 0 <= salvage < cost");
    if (!(c < p_max)) throw ModelError("scenario: cost must lie below the price ceiling");
    if (!(p_min <= p_max)) throw ModelError("scenario: empty price range");
    if (!(v_max > 0)) throw ModelError("scenario: advertising bound must be positive");
    if (n_samples < 1) throw ModelError("scenario: need at least one sample");
    if (!(theta > 0 && theta <= 1)) {
        if (theta == 0) {
            throw ServiceLevelError("scenario: theta = 0 demands an infinite order");
        }
        throw ModelError("scenario: theta must lie in (0, 1]");
    }
    if (!(ad_cost_scale >= 0)) throw ModelError("scenario: advertising scale must be non-negative");
}

SaaSample draw_samples(int n, std::uint64_t seed) {
    if (n < 1) throw ModelError("draw_samples: need at least one draw");
    SaaSample sample;
    sample.seed = seed;
    sample.z.reserve(static_cast<std::size_t>(n));
    std::mt19937_64 gen(seed);
    while (static_cast<int>(sample.z.size()) < n) {
        const double u1 = uniform_open(gen);
        const double u2 = uniform_open(gen);
        const double r = std::sqrt(-2.0 * std::log(u1));
        sample.z.push_back(r * std::cos(2.0 * M_PI * u2));
        if (static_cast<int>(sample.z.size()) < n) {
            sample.z.push_back(r * std::sin(2.0 * M_PI * u2));
        }
    }
    std::sort(sample.z.begin(), sample.z.end());
    sample.prefix.resize(sample.z.size() + 1);
    sample.prefix[0] = 0.0;
    for (std::size_t i = 0; i < sample.z.size(); ++i) {
        sample.prefix[i + 1] = sample.prefix[i] + sample.z[i];
    }
    return sample;
}

double chance_bound(double mu, double sigma, double theta) {
    if (!(sigma >= 0)) throw ModelError("chance_bound: sigma must be non-negative");
    if (theta == 0) throw ServiceLevelError("chance_bound: theta = 0 demands an infinite order");
    if (!(theta > 0 && theta <= 1)) throw ModelError("chance_bound: theta must lie in (0, 1]");
    if (theta == 1.0) return 0.0;
    return mu + sigma * normal_quantile(1.0 - theta);
}

double optimal_order(double mu, double sigma, int p, const Scenario& scenario,
                     const SaaSample& sample) {
    if (!(sigma >= 0)) throw ModelError("optimal_order: sigma must be non-negative");
    const double bound = chance_bound(mu, sigma, scenario.theta);
    if (p <= scenario.c) return std::max(bound, 0.0);
    const double w = order_weight(p, scenario, sample);
    return std::max({bound, mu + sigma * w, 0.0});
}

double saa_objective(double p, double v, double o, double mu_hat, double sigma_hat,
                     const Scenario& scenario, const SaaSample& sample) {
    const auto n = static_cast<double>(sample.z.size());
    double sales_sum;
    if (sigma_hat > 0) {
        const double w = (o - mu_hat) / sigma_hat;
        const auto it = std::upper_bound(sample.z.begin(), sample.z.end(), w);
        const auto n_le = static_cast<std::size_t>(it - sample.z.begin());
        sales_sum = mu_hat * static_cast<double>(n_le) + sigma_hat * sample.prefix[n_le] +
                    o * (n - static_cast<double>(n_le));
    } else {
        sales_sum = n * std::min(o, mu_hat);
    }
    return (p - scenario.s) / n * sales_sum + (scenario.s - scenario.c) * o -
           scenario.ad_cost_scale * v;
}

FixedPriceResult solve_fixed_price(int p, const Surface& surface, const Scenario& scenario,
                                   const SaaSample& sample) {
    check_scenario_against(surface, scenario);
    if (p < scenario.p_min || p > scenario.p_max) {
        throw DomainError("solve_fixed_price: price outside the scenario range");
    }
    const double v_lo_cap = std::max(0.0, surface.domain.v_min);
    const double v_hi_cap = std::min(scenario.v_max, surface.domain.v_max);
    Best best;
    for (const SliceInterval& slice : price_slices(surface, static_cast<double>(p))) {
        offer_slice(slice, p, scenario, sample, v_lo_cap, v_hi_cap,
                    [&](double v) { return eval_surface(surface, static_cast<double>(p), v); },
                    best);
    }
    if (!best.set) throw InternalError("solve_fixed_price: no feasible slice at this price");
    return {best.v, best.o, best.objective};
}

SolveResult solve(const Surface& surface, const Scenario& scenario, const SaaSample& sample) {
    check_scenario_against(surface, scenario);
    SolveResult result;
    Best best;
    for (int p = scenario.p_min; p <= scenario.p_max; ++p) {
        const FixedPriceResult r = solve_fixed_price(p, surface, scenario, sample);
        result.per_price.push_back({p, r.v, r.o, r.objective});
        best.offer(p, r.v, r.o, r.objective);
    }
    result.p_star = best.p;
    result.v_star = best.v;
    result.o_star = best.o;
    result.objective = best.objective;
    return result;
}

SolveResult solve_by_code_enumeration(const Surface& surface, const Scenario& scenario,
                                      const SaaSample& sample) {
    check_scenario_against(surface, scenario);
    if (surface.code_width > 20) {
        throw ModelError("solve_by_code_enumeration: code width above 20 refused");
    }

    // code -> triangle table; codes with no triangle are skipped below.
    std::vector<int> triangle_of_code(std::size_t{1} << surface.code_width, -1);
    for (int ti = 0; ti < static_cast<int>(surface.triangles.size()); ++ti) {
        triangle_of_code[surface.triangles[static_cast<std::size_t>(ti)].code] = ti;
    }

    const double v_lo_cap = std::max(0.0, surface.domain.v_min);
    const double v_hi_cap = std::min(scenario.v_max, surface.domain.v_max);
    const std::size_t n_prices = static_cast<std::size_t>(scenario.p_max - scenario.p_min + 1);
    std::vector<std::vector<SliceInterval>> slices_at(n_prices);
    for (int p = scenario.p_min; p <= scenario.p_max; ++p) {
        slices_at[static_cast<std::size_t>(p - scenario.p_min)] =
            price_slices(surface, static_cast<double>(p));
    }

    Best best;
    std::vector<Best> per_price(n_prices);
    for (std::uint64_t code = 0; code < triangle_of_code.size(); ++code) {
        const int ti = triangle_of_code[code];
        if (ti < 0) continue;
        for (int p = scenario.p_min; p <= scenario.p_max; ++p) {
            const auto& slices = slices_at[static_cast<std::size_t>(p - scenario.p_min)];
            for (const SliceInterval& slice : slices) {
                if (slice.triangle != ti) continue;
                const auto patch = [&](double v) {
                    return eval_in_triangle(surface, ti, static_cast<double>(p), v);
                };
                offer_slice(slice, p, scenario, sample, v_lo_cap, v_hi_cap, patch, best);
                offer_slice(slice, p, scenario, sample, v_lo_cap, v_hi_cap, patch,
                            per_price[static_cast<std::size_t>(p - scenario.p_min)]);
            }
        }
    }
    if (!best.set) throw InternalError("solve_by_code_enumeration: no candidate found");
    SolveResult result;
    result.p_star = best.p;
    result.v_star = best.v;
    result.o_star = best.o;
    result.objective = best.objective;
    for (int p = scenario.p_min; p <= scenario.p_max; ++p) {
        const Best& b = per_price[static_cast<std::size_t>(p - scenario.p_min)];
        if (b.set) result.per_price.push_back({p, b.v, b.o, b.objective});
    }
    return result;
}

} // namespace pdm
