#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pdm/errors.hpp"
#include "pdm/solver.hpp"
#include "pdm/stats.hpp"

using namespace pdm;

namespace {

Scenario scenario_c1(double theta = 0.05) {
    Scenario s;
    s.c = 246;
    s.s = 24.6;
    s.theta = theta;
    s.p_min = 350;
    s.p_max = 450;
    s.v_max = 100;
    s.n_samples = 15000;
    s.seed = 42;
    s.ad_cost_scale = 1.0;
    return s;
}

Scenario scenario_c2(double theta = 0.05) {
    Scenario s = scenario_c1(theta);
    s.c = 328;
    s.s = 32.8;
    return s;
}

} // namespace

TEST_CASE("sample draws") {
    SUBCASE("deterministic and sorted") {
        const SaaSample a = draw_samples(1, 4242);
        const SaaSample b = draw_samples(1, 4242);
        CHECK(a.z[0] == b.z[0]);
        const SaaSample big = draw_samples(5000, 7);
        CHECK(std::is_sorted(big.z.begin(), big.z.end()));
        CHECK(big.prefix.size() == big.z.size() + 1);
        CHECK(big.prefix.back() ==
              doctest::Approx(std::accumulate(big.z.begin(), big.z.end(), 0.0)));
    }

    SUBCASE("marginally standard normal") {
        const SaaSample s = draw_samples(15000, 42);
        double mean = 0, var = 0;
        for (double z : s.z) mean += z;
        mean /= 15000.0;
        for (double z : s.z) var += (z - mean) * (z - mean);
        var /= 14999.0;
        CHECK(std::fabs(mean) < 4.0 / std::sqrt(15000.0));
        CHECK(std::fabs(var - 1.0) < 0.05);

        double ks = 0.0;
        for (std::size_t i = 0; i < s.z.size(); ++i) {
            const double f = normal_cdf(s.z[i]);
            ks = std::max(ks, std::fabs((i + 1.0) / 15000.0 - f));
            ks = std::max(ks, std::fabs(f - i / 15000.0));
        }
        CHECK(ks < 0.02);
    }

    SUBCASE("needs at least one draw") {
        CHECK_THROWS_AS(draw_samples(0, 1), ModelError);
    }
}

TEST_CASE("chance bound") {
    CHECK(chance_bound(100, 40, 0.5) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(chance_bound(100, 40, 0.05) ==
          doctest::Approx(100.0 + 40.0 * oracles::quantile_by_bisection(0.95)).epsilon(1e-10));
    CHECK(chance_bound(100, 40, 0.05) == doctest::Approx(165.794145).epsilon(1e-6));
    CHECK(chance_bound(100, 40, 1.0) == 0.0);
    CHECK_THROWS_AS(chance_bound(100, 40, 0.0), ServiceLevelError);
    CHECK_THROWS_AS(chance_bound(100, -1, 0.5), ModelError);
}

TEST_CASE("optimal order") {
    const SaaSample sample = draw_samples(15000, 42);

    SUBCASE("degenerate dispersion pins the order at the mean") {
        const Scenario s = scenario_c1(0.5);
        CHECK(optimal_order(100, 0, 410, s, sample) == doctest::Approx(100.0));
    }

    SUBCASE("service bound binds when it tops the critical-ratio quantile") {
        const Scenario s = scenario_c1(0.05);
        const double bound = chance_bound(100, 40, 0.05);
        CHECK(optimal_order(100, 40, 410, s, sample) == doctest::Approx(bound).epsilon(1e-12));
        // The critical-ratio order statistic sits far below the 95% quantile here.
        const double ratio = (410.0 - 246.0) / (410.0 - 24.6);
        const auto k = static_cast<std::size_t>(std::ceil(15000.0 * ratio));
        CHECK(sample.z[k - 1] < normal_quantile(0.95));
    }

    SUBCASE("without the constraint the order is the critical-ratio order statistic") {
        const Scenario s = scenario_c1(1.0);
        const double ratio = (410.0 - 246.0) / (410.0 - 24.6);
        const auto k = static_cast<std::size_t>(std::ceil(15000.0 * ratio));
        const double expected = 100.0 + 40.0 * sample.z[k - 1];
        const double o = optimal_order(100, 40, 410, s, sample);
        CHECK(o == doctest::Approx(expected).epsilon(1e-12));

        const double by_search = oracles::golden_section_argmax(
            [&](double cand) { return saa_objective(410, 0, cand, 100, 40, s, sample); }, 0.0,
            300.0);
        const double f_search = saa_objective(410, 0, by_search, 100, 40, s, sample);
        const double f_closed = saa_objective(410, 0, o, 100, 40, s, sample);
        CHECK(f_closed >= f_search - 1e-6 * std::fabs(f_closed));
    }

    SUBCASE("a price below cost orders only the service minimum") {
        const Scenario s = scenario_c2(0.25);
        const double bound = chance_bound(100, 40, 0.25);
        CHECK(optimal_order(100, 40, 300, s, sample) == doctest::Approx(bound));
        const Scenario s1 = scenario_c2(1.0);
        CHECK(optimal_order(100, 40, 300, s1, sample) == 0.0);
    }

    SUBCASE("no perturbation of the order improves the objective") {
        std::mt19937_64 gen(17);
        std::uniform_real_distribution<double> umu(50, 500), usg(10, 60);
        std::uniform_int_distribution<int> uprice(350, 450);
        const SaaSample small = draw_samples(2000, 9);
        for (int trial = 0; trial < 100; ++trial) {
            const double mu = umu(gen), sg = usg(gen);
            const int p = uprice(gen);
            const Scenario s = scenario_c1(trial % 2 == 0 ? 1.0 : 0.25);
            const double o = optimal_order(mu, sg, p, s, small);
            const double eps = 1e-3 * sg;
            const double base = saa_objective(p, 0, o, mu, sg, s, small);
            const double up = saa_objective(p, 0, o + eps, mu, sg, s, small);
            CHECK(up <= base + 1e-12 * std::max(1.0, std::fabs(base)));
            const double bound = chance_bound(mu, sg, s.theta);
            if (o - eps >= bound) {
                const double down = saa_objective(p, 0, o - eps, mu, sg, s, small);
                CHECK(down <= base + 1e-12 * std::max(1.0, std::fabs(base)));
            }
        }
    }
}

TEST_CASE("sample-average objective") {
    const SaaSample sample = draw_samples(5000, 21);
    const Scenario s = scenario_c1(0.05);

    SUBCASE("no order, no revenue") {
        CHECK(saa_objective(410, 30, 0, 100, 40, s, sample) == doctest::Approx(-30.0));
        Scenario scaled = s;
        scaled.ad_cost_scale = 1000.0;
        CHECK(saa_objective(410, 30, 0, 100, 40, scaled, sample) ==
              doctest::Approx(-30000.0));
    }

    SUBCASE("degenerate demand sells min(order, mean)") {
        const double expected = (410.0 - 24.6) * 80.0 + (24.6 - 246.0) * 90.0 - 5.0;
        CHECK(saa_objective(410, 5, 90, 80, 0, s, sample) ==
              doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("matches the literal per-sample evaluation") {
        std::mt19937_64 gen(31);
        std::uniform_real_distribution<double> umu(50, 2000), usg(10, 60), uo(0, 2200),
            uv(0, 100);
        std::uniform_int_distribution<int> uprice(350, 450);
        for (int trial = 0; trial < 50; ++trial) {
            const double mu = umu(gen), sg = usg(gen), o = uo(gen), v = uv(gen);
            const int p = uprice(gen);
            const double fast = saa_objective(p, v, o, mu, sg, s, sample);
            const double slow = oracles::lp_style_saa_objective(p, v, o, mu, sg, s, sample);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
        }
    }
}

TEST_CASE("fixed-price optimization") {
    const SaaSample sample = draw_samples(15000, 42);

    SUBCASE("two-triangle surface: the returned point beats every breakpoint") {
        const Surface& coarse = fixtures::surface_coarse();
        const Scenario s = scenario_c1(0.25);
        const FixedPriceResult r = solve_fixed_price(410, coarse, s, sample);
        const auto slices = price_slices(coarse, 410);
        CHECK(slices.size() == 2);  // the diagonal splits the line at one interior point
        for (const SliceInterval& sl : slices) {
            for (double v : {sl.v_lo, sl.v_hi}) {
                const DemandMoments m = eval_surface(coarse, 410, v);
                const double o = optimal_order(m.mu, m.sigma, 410, s, sample);
                CHECK(r.objective >=
                      saa_objective(410, v, o, m.mu, m.sigma, s, sample) - 1e-12);
            }
        }
    }

    SUBCASE("matches a dense advertising grid within tolerance") {
        const Surface& surf = fixtures::surface_bits6();
        std::mt19937_64 gen(55);
        std::uniform_int_distribution<int> uprice(350, 450);
        std::uniform_int_distribution<int> utheta(0, 3);
        std::uniform_int_distribution<int> ucost(0, 1);
        const double thetas[] = {1.0, 0.5, 0.25, 0.05};
        const SaaSample small = draw_samples(4000, 3);
        for (int trial = 0; trial < 8; ++trial) {
            Scenario s = ucost(gen) == 0 ? scenario_c1(thetas[utheta(gen)])
                                         : scenario_c2(thetas[utheta(gen)]);
            s.ad_cost_scale = trial % 2 == 0 ? 1.0 : 1000.0;
            s.n_samples = 4000;
            const int p = uprice(gen);
            const FixedPriceResult r = solve_fixed_price(p, surf, s, small);
            double best_grid = -1e300;
            for (int k = 0; k <= 10000; ++k) {
                const double v = 100.0 * k / 10000.0;
                const DemandMoments m = eval_surface(surf, p, v);
                const double o = optimal_order(m.mu, m.sigma, p, s, small);
                best_grid =
                    std::max(best_grid, saa_objective(p, v, o, m.mu, m.sigma, s, small));
            }
            CHECK(r.objective >= best_grid - 1e-6 * std::fabs(best_grid));
        }
    }

    SUBCASE("a price through surface vertices keeps their advertising breakpoints") {
        const Surface& surf = fixtures::surface_bits6();
        // Some refined vertex away from the corners.
        const SurfaceVertex* inner = nullptr;
        for (const SurfaceVertex& vx : surf.vertices) {
            if (vx.p > 350 && vx.p < 450 && vx.v > 0 && vx.v < 100) inner = &vx;
        }
        REQUIRE(inner != nullptr);
        const int p = static_cast<int>(inner->p);
        const auto slices = price_slices(surf, p);
        bool vertex_is_breakpoint = false;
        for (const SliceInterval& sl : slices) {
            if (sl.v_lo == inner->v || sl.v_hi == inner->v) vertex_is_breakpoint = true;
        }
        CHECK(vertex_is_breakpoint);
    }
}

TEST_CASE("full solve") {
    const Surface& surf = fixtures::surface_bits6();
    const SaaSample sample = draw_samples(15000, 42);

    SUBCASE("degenerate price range equals the fixed-price solution") {
        Scenario s = scenario_c2(0.25);
        s.p_min = s.p_max = 420;
        const SolveResult full = solve(surf, s, sample);
        const FixedPriceResult one = solve_fixed_price(420, surf, s, sample);
        CHECK(full.p_star == 420);
        CHECK(full.v_star == one.v);
        CHECK(full.o_star == one.o);
        CHECK(full.objective == one.objective);
    }

    SUBCASE("bit-identical determinism") {
        const Scenario s = scenario_c1(0.05);
        const SolveResult a = solve(surf, s, sample);
        const SolveResult b = solve(surf, s, draw_samples(15000, 42));
        CHECK(a.p_star == b.p_star);
        CHECK(a.v_star == b.v_star);
        CHECK(a.o_star == b.o_star);
        CHECK(a.objective == b.objective);
        REQUIRE(a.per_price.size() == b.per_price.size());
        for (std::size_t i = 0; i < a.per_price.size(); ++i) {
            CHECK(a.per_price[i].objective == b.per_price[i].objective);
        }
    }

    SUBCASE("objective shrinks as the service level tightens") {
        double prev = 1e300;
        for (double theta : {1.0, 0.5, 0.25, 0.05}) {
            const SolveResult r = solve(surf, scenario_c2(theta), sample);
            CHECK(r.objective <= prev + 1e-9 * std::fabs(prev));
            prev = r.objective;
        }
    }

    SUBCASE("the returned order meets the constructed bound exactly") {
        for (double theta : {0.5, 0.25, 0.05}) {
            const SolveResult r = solve(surf, scenario_c1(theta), sample);
            const DemandMoments m = eval_surface(surf, r.p_star, r.v_star);
            CHECK(r.o_star >= chance_bound(m.mu, m.sigma, theta));
        }
    }

    SUBCASE("objective re-evaluates to the stored value") {
        const Scenario s = scenario_c2(0.05);
        const SolveResult r = solve(surf, s, sample);
        const DemandMoments m = eval_surface(surf, r.p_star, r.v_star);
        const double again =
            saa_objective(r.p_star, r.v_star, r.o_star, m.mu, m.sigma, s, sample);
        CHECK(r.objective == doctest::Approx(again).epsilon(1e-9));
    }

    SUBCASE("per-price table covers the whole range") {
        const Scenario s = scenario_c1(0.5);
        const SolveResult r = solve(surf, s, sample);
        REQUIRE(r.per_price.size() == 101);
        double best = -1e300;
        for (const PricePoint& row : r.per_price) best = std::max(best, row.objective);
        CHECK(best == r.objective);
    }

    SUBCASE("scenario bounds must stay inside the surface domain") {
        Scenario s = scenario_c1(0.5);
        s.p_max = 500;
        CHECK_THROWS_AS(solve(surf, s, sample), DomainError);
    }
}

TEST_CASE("code enumeration agrees with the direct solver") {
    const SaaSample sample = draw_samples(8000, 5);
    for (const Surface* surf : {&fixtures::surface_coarse(), &fixtures::surface_bits6()}) {
        for (double theta : {1.0, 0.5, 0.25, 0.05}) {
            for (double cost : {246.0, 328.0}) {
                Scenario s = cost == 246.0 ? scenario_c1(theta) : scenario_c2(theta);
                s.n_samples = 8000;
                s.ad_cost_scale = 1000.0;
                const SolveResult direct = solve(*surf, s, sample);
                const SolveResult coded = solve_by_code_enumeration(*surf, s, sample);
                CHECK(direct.p_star == coded.p_star);
                CHECK(direct.v_star == doctest::Approx(coded.v_star).epsilon(1e-12));
                CHECK(direct.o_star == doctest::Approx(coded.o_star).epsilon(1e-9));
                CHECK(direct.objective ==
                      doctest::Approx(coded.objective).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("code enumeration guard rails") {
    const SaaSample sample = draw_samples(100, 1);
    Surface wide = fixtures::surface_coarse();
    wide.code_width = 21;
    CHECK_THROWS_AS(solve_by_code_enumeration(wide, scenario_c1(0.5), sample), ModelError);
}

TEST_CASE("scenario validation") {
    Scenario s = scenario_c1(0.5);
    s.s = 300;
    CHECK_THROWS_AS(s.validate(), ModelError);
    s = scenario_c1(0.0);
    CHECK_THROWS_AS(s.validate(), ServiceLevelError);
    s = scenario_c1(0.5);
    s.v_max = 0;
    CHECK_THROWS_AS(s.validate(), ModelError);
}
