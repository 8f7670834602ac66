#pragma once

#include <cstdint>
#include <vector>

#include "pdm/surface.hpp"

namespace pdm {

/// Economic instance of the single-period planning problem.
struct Scenario {
    double c = 0;                ///< unit cost ($)
    double s = 0;                ///< salvage value ($), 0.1 * c by convention
    double theta = 1;            ///< allowed shortfall probability, (0, 1]
    int p_min = 0;               ///< integer price lower bound ($)
    int p_max = 0;               ///< integer price upper bound ($)
    double v_max = 0;            ///< advertising budget ($MM)
    int n_samples = 0;           ///< SAA sample count N
    std::uint64_t seed = 0;      ///< sample seed
    double ad_cost_scale = 1.0;  ///< factor applied to the advertising term

    void validate() const;
};

/// Common-random-number sample shared by every candidate within one solve.
struct SaaSample {
    std::vector<double> z;       ///< standard-normal draws, sorted ascending
    std::vector<double> prefix;  ///< prefix[i] = sum of z[0..i)
    std::uint64_t seed = 0;
};

/// N sorted standard-normal draws, deterministic for a given seed.
SaaSample draw_samples(int n, std::uint64_t seed);

/// Minimum order satisfying the service constraint: mu + sigma * Phi^-1(1 - theta)
/// for theta < 1, and 0 for theta == 1 (the constraint is vacuous).
/// theta == 0 throws ServiceLevelError.
double chance_bound(double mu, double sigma, double theta);

/// Exact maximizer of the sample-average objective over the order quantity
/// alone: the larger of the chance bound and the critical-ratio order
/// statistic mu + sigma * z_(k), k = ceil(N (p - c) / (p - s)).
double optimal_order(double mu, double sigma, int p, const Scenario& scenario,
                     const SaaSample& sample);

/// Sample-average objective (p - s)/N * sum_j min(o, mu + sigma z_j)
/// + (s - c) o - ad_cost_scale * v, with the sales variables eliminated at
/// their closed-form optimum.
double saa_objective(double p, double v, double o, double mu_hat, double sigma_hat,
                     const Scenario& scenario, const SaaSample& sample);

struct FixedPriceResult {
    double v = 0;
    double o = 0;
    double objective = 0;
};

struct PricePoint {
    int p = 0;
    double v = 0;
    double o = 0;
    double objective = 0;
};

struct SolveResult {
    int p_star = 0;
    double v_star = 0;
    double o_star = 0;
    double objective = 0;
    std::vector<PricePoint> per_price;  ///< best (v, o, objective) for each price
};

/// Exact optimum over advertising and order for one fixed integer price.
/// The moments are affine in v within each triangle slice and the optimal
/// order is an affine image of them, so the objective is piecewise affine in
/// v; the maximum is attained at a slice endpoint and those endpoints are
/// enumerated exhaustively.  Ties go to the lowest v.
FixedPriceResult solve_fixed_price(int p, const Surface& surface, const Scenario& scenario,
                                   const SaaSample& sample);

/// Best result over all integer prices in range; ties toward the lowest
/// price, then the lowest advertising level.
SolveResult solve(const Surface& surface, const Scenario& scenario, const SaaSample& sample);

/// Equivalence oracle for solve: enumerates every DLog code, restricts the
/// moments to that triangle's affine patch and optimizes the patch exactly.
/// Refuses code widths above 20.
SolveResult solve_by_code_enumeration(const Surface& surface, const Scenario& scenario,
                                      const SaaSample& sample);

} // namespace pdm
