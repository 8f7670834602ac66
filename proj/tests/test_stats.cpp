#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pdm/errors.hpp"
#include "pdm/solver.hpp"
#include "pdm/stats.hpp"

using namespace pdm;

namespace {

Scenario base_scenario() {
    Scenario s;
    s.c = 246;
    s.s = 24.6;
    s.theta = 0.05;
    s.p_min = 350;
    s.p_max = 450;
    s.v_max = 100;
    s.n_samples = 1000;
    s.seed = 1;
    s.ad_cost_scale = 1.0;
    return s;
}

} // namespace

TEST_CASE("normal distribution basics") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(normal_cdf(1.6449) == doctest::Approx(0.95).epsilon(1e-5));
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(normal_cdf(-x) + normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(normal_cdf(100.0, 100.0, 40.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_pdf(100.0, 100.0, 40.0) ==
          doctest::Approx(0.3989422804014327 / 40.0).epsilon(1e-12));
    CHECK_THROWS_AS(normal_cdf(0, 0, 0), ModelError);
    CHECK_THROWS_AS(normal_pdf(0, 0, -1), ModelError);
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(normal_quantile(0.95) == doctest::Approx(1.644854).epsilon(1e-5));
    CHECK(normal_quantile(0.75) == doctest::Approx(0.674490).epsilon(1e-5));
    CHECK(normal_quantile(0.95) ==
          doctest::Approx(oracles::quantile_by_bisection(0.95)).epsilon(1e-10));
    CHECK_THROWS_AS(normal_quantile(0.0), UndefinedValueError);
    CHECK_THROWS_AS(normal_quantile(1.0), UndefinedValueError);

    SUBCASE("mutual inverse with the distribution function") {
        for (double q = 0.001; q < 0.9995; q += 0.0131) {
            CHECK(normal_cdf(normal_quantile(q)) == doctest::Approx(q).epsilon(1e-8));
        }
    }
}

TEST_CASE("exact expected profit") {
    Scenario scenario = base_scenario();

    SUBCASE("salvage equal to price collapses to a linear form") {
        Scenario s = scenario;
        s.c = 246;
        s.s = 410;  // equal to the price below
        const double value = exact_expected_profit(410, 7, 166, 100, 40, s);
        CHECK(value == doctest::Approx((410.0 - 246.0) * 166.0 - 7.0).epsilon(1e-12));
    }

    SUBCASE("agrees with Monte Carlo") {
        const auto mc = oracles::mc_expected_profit(410, 0, 166, 100, 40, scenario, 10000000, 77);
        const double exact = exact_expected_profit(410, 0, 166, 100, 40, scenario);
        CHECK(std::fabs(exact - mc.value) < 3.0 * mc.std_error);
    }

    SUBCASE("a very large order approaches full sales minus order cost") {
        const double o = 100.0 + 20.0 * 40.0;
        const double value = exact_expected_profit(410, 5, o, 100, 40, scenario);
        const double limit =
            (410.0 - scenario.s) * 100.0 + (scenario.s - scenario.c) * o - 5.0;
        CHECK(value == doctest::Approx(limit).epsilon(1e-6));
    }

    SUBCASE("concave in the order quantity") {
        std::mt19937_64 gen(13);
        std::uniform_real_distribution<double> umu(50, 2000), usg(20, 60), up(350, 450);
        for (int trial = 0; trial < 10; ++trial) {
            const double mu = umu(gen), sg = usg(gen), p = up(gen);
            Scenario s = scenario;
            std::vector<double> values;
            for (int k = 0; k <= 100; ++k) {
                const double o = mu - 3 * sg + (6.0 * sg) * k / 100.0;
                values.push_back(exact_expected_profit(p, 0, std::max(o, 0.0), mu, sg, s));
            }
            for (std::size_t k = 1; k + 1 < values.size(); ++k) {
                CHECK(values[k + 1] - 2 * values[k] + values[k - 1] <= 1e-7);
            }
        }
    }

    SUBCASE("requires positive dispersion and a non-negative order") {
        CHECK_THROWS_AS(exact_expected_profit(410, 0, 100, 100, 0, scenario), ModelError);
        CHECK_THROWS_AS(exact_expected_profit(410, 0, -1, 100, 40, scenario), ModelError);
    }
}

TEST_CASE("empirical distribution function") {
    const EmpiricalCdf cdf({1.0, 2.0, 3.0});
    CHECK(cdf(2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(cdf(0.5) == 0.0);
    CHECK(cdf(3.0) == 1.0);
    CHECK(cdf(99.0) == 1.0);
    CHECK_THROWS_AS(EmpiricalCdf({}), ModelError);

    SUBCASE("median of a large normal sample is near one half") {
        const SaaSample sample = draw_samples(20000, 99);
        const EmpiricalCdf big(sample.z);
        CHECK(std::fabs(big(0.0) - 0.5) < 0.02);
    }

    SUBCASE("quantile picks the smallest attaining sample") {
        const EmpiricalCdf q({10.0, 20.0, 30.0, 40.0});
        CHECK(q.quantile(0.25) == 10.0);
        CHECK(q.quantile(0.5) == 20.0);
        CHECK(q.quantile(0.51) == 30.0);
        CHECK(q.quantile(1.0) == 40.0);
    }
}

TEST_CASE("finite-sample lower confidence bound") {
    CHECK(dkw_min_epsilon(20000) == doctest::Approx(0.0041628).epsilon(1e-4));
    // (0.964 - 0.014) * (1 - e^{-2 * 20000 * 0.014^2}), the factor being 0.999606.
    CHECK(1.0 - std::exp(-2.0 * 20000 * 0.014 * 0.014) ==
          doctest::Approx(0.999606).epsilon(1e-6));
    CHECK(dkw_lower_bound(0.964, 20000, 0.014) == doctest::Approx(0.949626).epsilon(1e-6));
    CHECK(dkw_lower_bound(0.0041628, 20000, 0.0041628) == 0.0);
    CHECK_THROWS_AS(dkw_lower_bound(0.9, 20000, 0.004), ModelError);
    CHECK_THROWS_AS(dkw_lower_bound(1.5, 20000, 0.014), ModelError);

    SUBCASE("monotone in the empirical value and in the sample count") {
        double prev = -1.0;
        for (double f = 0.1; f <= 1.0; f += 0.1) {
            const double b = dkw_lower_bound(f, 20000, 0.014);
            CHECK(b >= prev);
            prev = b;
        }
        prev = -1.0;
        for (std::size_t n : {2000u, 5000u, 20000u, 100000u}) {
            const double b = dkw_lower_bound(0.9, n, 0.014);
            CHECK(b >= prev);
            prev = b;
        }
    }
}

TEST_CASE("student-t quantile") {
    CHECK(t_quantile(0.5, 7) == 0.0);
    CHECK(t_quantile(0.975, 19) == doctest::Approx(2.093024).epsilon(1e-4));
    CHECK(t_quantile(0.025, 19) == doctest::Approx(-2.093024).epsilon(1e-4));
    CHECK(t_quantile(0.975, 19) ==
          doctest::Approx(oracles::t_quantile_by_quadrature(0.975, 19)).epsilon(1e-6));
    CHECK(t_quantile(0.9, 1) == doctest::Approx(oracles::t_quantile_by_quadrature(0.9, 1))
                                    .epsilon(1e-6));
    CHECK_THROWS_AS(t_quantile(0.5, 0), ModelError);
    CHECK_THROWS_AS(t_quantile(0.0, 5), ModelError);
}

TEST_CASE("optimality gap interval") {
    SUBCASE("zero dispersion collapses to a point") {
        GapStudy study;
        study.saa_values.assign(20, 1234.5);
        study.true_values.assign(20, 1234.5);
        const GapInterval ci = optimality_gap_ci(study);
        CHECK(ci.lower == doctest::Approx(1234.5));
        CHECK(ci.upper == doctest::Approx(1234.5));
        CHECK(ci.gap_fraction == doctest::Approx(0.0));
    }

    SUBCASE("critical values enter with the configured dispersion") {
        GapStudy study;
        for (int i = 0; i < 20; ++i) {
            study.saa_values.push_back(1000.0 + (i % 2 == 0 ? 10.0 : -10.0));
            study.true_values.push_back(990.0 + (i % 2 == 0 ? 5.0 : -5.0));
        }
        const double t_hi = t_quantile(0.975, 19);
        CHECK(t_hi == doctest::Approx(2.093024).epsilon(1e-4));

        const GapInterval se = optimality_gap_ci(study);
        const double sd_saa = std::sqrt(100.0 * 20.0 / 19.0);
        const double sd_true = std::sqrt(25.0 * 20.0 / 19.0);
        CHECK(se.lower ==
              doctest::Approx(990.0 - t_hi * sd_true / std::sqrt(20.0)).epsilon(1e-9));
        CHECK(se.upper ==
              doctest::Approx(1000.0 + t_hi * sd_saa / std::sqrt(20.0)).epsilon(1e-9));

        GapStudy printed = study;
        printed.dispersion = GapDispersion::AsPrinted;
        const GapInterval ap = optimality_gap_ci(printed);
        CHECK(ap.lower == doctest::Approx(990.0 - t_hi * sd_true).epsilon(1e-9));
        CHECK(ap.upper == doctest::Approx(1000.0 + t_hi * sd_saa).epsilon(1e-9));
        CHECK(ap.gap_fraction > se.gap_fraction);
    }

    SUBCASE("undefined gap fraction for a non-positive lower limit") {
        GapStudy study;
        study.saa_values.assign(5, 1.0);
        study.true_values.assign(5, -2.0);
        CHECK_THROWS_AS(optimality_gap_ci(study), UndefinedValueError);
    }

    SUBCASE("mismatched replication lists are rejected") {
        GapStudy study;
        study.saa_values.assign(5, 1.0);
        study.true_values.assign(4, 1.0);
        CHECK_THROWS_AS(optimality_gap_ci(study), ModelError);
    }
}
