#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdm/demand.hpp"
#include "pdm/errors.hpp"
#include "pdm/experiment.hpp"
#include "pdm/io.hpp"
#include "pdm/solver.hpp"
#include "pdm/stats.hpp"
#include "pdm/surface.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitModel = 4;
constexpr int kExitInternal = 5;

std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

std::string default_output_dir() {
    const char* env = std::getenv("PDM_OUTPUT_DIR");
    return env != nullptr && *env != '\0' ? env : "out";
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pdm::Error("cannot open output file: " + path);
    out << body;
}

pdm::Surface surface_from(const std::string& surface_path, const std::string& params_path,
                          int bits, double p_min, double p_max, double v_max) {
    if (!surface_path.empty()) {
        std::ifstream in(surface_path, std::ios::binary);
        if (!in) throw pdm::ParseError("cannot open surface file: " + surface_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return pdm::load_surface(buf.str());
    }
    const pdm::PdmParams params = pdm::load_params(params_path);
    return pdm::refine_surface(params, {p_min, p_max, 0.0, v_max}, bits);
}

pdm::Scenario make_scenario(const pdm::Surface& surface, double cost, double salvage_rate,
                            double theta, int samples, std::uint64_t seed, double ad_scale) {
    pdm::Scenario scenario;
    scenario.c = cost;
    scenario.s = salvage_rate * cost;
    scenario.theta = theta;
    scenario.p_min = static_cast<int>(std::lround(surface.domain.p_min));
    scenario.p_max = static_cast<int>(std::lround(surface.domain.p_max));
    scenario.v_max = surface.domain.v_max;
    scenario.n_samples = samples;
    scenario.seed = seed;
    scenario.ad_cost_scale = ad_scale;
    scenario.validate();
    return scenario;
}

nlohmann::json solve_result_json(const pdm::SolveResult& result) {
    nlohmann::json j;
    j["p_star"] = result.p_star;
    j["v_star"] = result.v_star;
    j["o_star"] = result.o_star;
    j["objective"] = result.objective;
    nlohmann::json table = nlohmann::json::array();
    for (const pdm::PricePoint& row : result.per_price) {
        table.push_back({{"p", row.p}, {"v", row.v}, {"o", row.o}, {"objective", row.objective}});
    }
    j["per_price"] = std::move(table);
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pdmplan: diffusion-demand production planning - piecewise-linear moment surfaces,\n"
        "chance-constrained sample-average optimization, and misestimation studies.\n"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 success, 2 usage error, 3 parse/schema error, 4 domain/model error,\n"
        "5 internal invariant breach.  Each command prints a final machine-readable line\n"
        "'RESULT <command> key=value ...'.  PDM_OUTPUT_DIR overrides the default output\n"
        "directory (default 'out').");

    std::string params_path = "data/params_table2.csv";
    std::string surface_path;
    std::string out_path;
    std::string config_path = "data/default_config.json";
    std::string out_dir = default_output_dir();
    int bits = 10;
    double p_min = 350, p_max = 450, v_max = 100;
    double cost = 328, salvage_rate = 0.1, theta = 0.05, alpha_ci = 0.05, ad_scale = 1000.0;
    int samples = 15000, replications = 20, validation_samples = 20000;
    std::uint64_t seed = 42;
    double epsilon = 0.014;
    double sbm_pool = 500, sbm_alpha = 0.26722, sbm_beta = 0.09761, sbm_t = 1.0;
    std::string dispersion = "standard-error";

    CLI::App* build = app.add_subcommand("build-surface",
                                         "Refine and save a piecewise-linear moment surface");
    build->add_option("--params", params_path, "Parameter CSV path")->capture_default_str();
    build->add_option("--bits", bits, "Binary-variable budget")->capture_default_str();
    build->add_option("--p-min", p_min, "Price lower bound")->capture_default_str();
    build->add_option("--p-max", p_max, "Price upper bound")->capture_default_str();
    build->add_option("--v-max", v_max, "Advertising upper bound")->capture_default_str();
    build->add_option("--out", out_path, "Output surface path (default <outdir>/surface.json)");

    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one scenario on a surface");
    solve_cmd->add_option("--surface", surface_path, "Surface JSON path (built if omitted)");
    solve_cmd->add_option("--params", params_path, "Parameter CSV path")->capture_default_str();
    solve_cmd->add_option("--bits", bits, "Budget when building in-process")
        ->capture_default_str();
    solve_cmd->add_option("--cost", cost, "Unit cost c")->capture_default_str();
    solve_cmd->add_option("--salvage-rate", salvage_rate, "Salvage value as a fraction of c")
        ->capture_default_str();
    solve_cmd->add_option("--theta", theta, "Allowed shortfall probability")
        ->capture_default_str();
    solve_cmd->add_option("--samples", samples, "SAA sample count")->capture_default_str();
    solve_cmd->add_option("--seed", seed, "Sample seed")->capture_default_str();
    solve_cmd->add_option("--ad-scale", ad_scale, "Advertising cost scale")
        ->capture_default_str();

    CLI::App* study_cmd = app.add_subcommand("study", "Run the misestimation study");
    study_cmd->add_option("--config", config_path, "Run configuration JSON")
        ->capture_default_str();
    study_cmd->add_option("--out-dir", out_dir, "Output directory override");

    CLI::App* vsurf = app.add_subcommand("validate-surface",
                                         "Sampled percentage-error distributions with "
                                         "finite-sample confidence statements");
    vsurf->add_option("--surface", surface_path, "Surface JSON path (built if omitted)");
    vsurf->add_option("--params", params_path, "Parameter CSV path")->capture_default_str();
    vsurf->add_option("--bits", bits, "Budget when building in-process")->capture_default_str();
    vsurf->add_option("--samples", validation_samples, "Validation sample count")
        ->capture_default_str();
    vsurf->add_option("--seed", seed, "Sampling seed")->capture_default_str();
    vsurf->add_option("--epsilon", epsilon, "DKW epsilon")->capture_default_str();
    vsurf->add_option("--out", out_path, "Optional CSV dump of the sampled errors");

    CLI::App* vgap = app.add_subcommand("validate-gap",
                                        "Optimality-gap confidence interval over M "
                                        "independently sampled replications");
    vgap->add_option("--surface", surface_path, "Surface JSON path (built if omitted)");
    vgap->add_option("--params", params_path, "Parameter CSV path")->capture_default_str();
    vgap->add_option("--bits", bits, "Budget when building in-process")->capture_default_str();
    vgap->add_option("--cost", cost, "Unit cost c")->capture_default_str();
    vgap->add_option("--salvage-rate", salvage_rate, "Salvage value as a fraction of c")
        ->capture_default_str();
    vgap->add_option("--theta", theta, "Allowed shortfall probability")->capture_default_str();
    vgap->add_option("--samples", samples, "SAA sample count per replication")
        ->capture_default_str();
    vgap->add_option("--replications", replications, "Replication count M")
        ->capture_default_str();
    vgap->add_option("--seed", seed, "Base seed; replication i uses seed + i")
        ->capture_default_str();
    vgap->add_option("--alpha", alpha_ci, "Confidence level complement")->capture_default_str();
    vgap->add_option("--ad-scale", ad_scale, "Advertising cost scale")->capture_default_str();
    vgap->add_option("--dispersion", dispersion,
                     "Interval dispersion convention: standard-error | as-printed")
        ->capture_default_str();

    CLI::App* sbm = app.add_subcommand("simulate-sbm",
                                       "Pure-birth adoption simulation against the "
                                       "closed-form mean and variance");
    sbm->add_option("--pool", sbm_pool, "Prospect pool size")->capture_default_str();
    sbm->add_option("--alpha", sbm_alpha, "Intrinsic rate")->capture_default_str();
    sbm->add_option("--beta", sbm_beta, "Induction rate")->capture_default_str();
    sbm->add_option("--t", sbm_t, "Horizon")->capture_default_str();
    sbm->add_option("--replications", replications, "Replication count")->capture_default_str();
    sbm->add_option("--seed", seed, "Base seed; replication i uses seed + i")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (build->parsed()) {
            const pdm::PdmParams params = pdm::load_params(params_path);
            const pdm::Surface surface =
                pdm::refine_surface(params, {p_min, p_max, 0.0, v_max}, bits);
            if (out_path.empty()) {
                std::filesystem::create_directories(default_output_dir());
                out_path = default_output_dir() + "/surface.json";
            }
            write_text(out_path, pdm::dump_surface(surface));
            std::cout << "RESULT build-surface vertices=" << surface.vertices.size()
                      << " triangles=" << surface.triangles.size()
                      << " code_width=" << surface.code_width << " out=" << out_path << "\n";
        } else if (solve_cmd->parsed()) {
            const pdm::Surface surface =
                surface_from(surface_path, params_path, bits, p_min, p_max, v_max);
            const pdm::Scenario scenario =
                make_scenario(surface, cost, salvage_rate, theta, samples, seed, ad_scale);
            const pdm::SaaSample sample = pdm::draw_samples(samples, seed);
            const pdm::SolveResult result = pdm::solve(surface, scenario, sample);
            std::cout << solve_result_json(result).dump(2) << "\n";
            std::cout << "RESULT solve p_star=" << result.p_star << " v_star="
                      << fmt("%.10g", result.v_star) << " o_star=" << fmt("%.10g", result.o_star)
                      << " objective=" << fmt("%.10g", result.objective) << "\n";
        } else if (study_cmd->parsed()) {
            const pdm::RunConfig config = pdm::load_config(config_path);
            const std::string dir =
                study_cmd->count("--out-dir") != 0 || config.output_dir.empty()
                    ? out_dir
                    : config.output_dir;
            const auto rows = pdm::run_study(config.study);
            const auto files = pdm::emit_figures(rows, dir);
            std::cout << "RESULT study rows=" << rows.size() << " files=" << files.size()
                      << " out_dir=" << dir << "\n";
        } else if (vsurf->parsed()) {
            const pdm::PdmParams params = pdm::load_params(params_path);
            const pdm::Surface surface =
                surface_from(surface_path, params_path, bits, p_min, p_max, v_max);
            std::vector<double> abs_mu, abs_sigma;
            std::mt19937_64 gen(seed);
            const auto uniform = [&gen](double lo, double hi) {
                return lo +
                       (hi - lo) * (static_cast<double>(gen() >> 11) + 0.5) *
                           (1.0 / 9007199254740992.0);
            };
            for (int i = 0; i < validation_samples; ++i) {
                const double p = uniform(surface.domain.p_min, surface.domain.p_max);
                const double v = uniform(surface.domain.v_min, surface.domain.v_max);
                const auto err = pdm::surface_percentage_error(surface, params, p, v);
                abs_mu.push_back(std::fabs(err[0]));
                abs_sigma.push_back(std::fabs(err[1]));
            }
            const pdm::EmpiricalCdf cdf_mu(abs_mu), cdf_sigma(abs_sigma);
            const std::size_t n = cdf_mu.size();
            const double factor =
                1.0 - std::exp(-2.0 * static_cast<double>(n) * epsilon * epsilon);
            // Smallest error level whose DKW lower bound still certifies 95%.
            const double level = std::min(1.0, 0.95 / factor + epsilon);
            const double x_mu = cdf_mu.quantile(level);
            const double x_sigma = cdf_sigma.quantile(level);
            std::cout << "Surface validation over n=" << n << " uniform samples (seed " << seed
                      << ")\n";
            std::cout << "  95th percentile |mu error|    = " << fmt("%.8f", cdf_mu.quantile(0.95))
                      << "\n";
            std::cout << "  95th percentile |sigma error| = "
                      << fmt("%.8f", cdf_sigma.quantile(0.95)) << "\n";
            std::cout << "  DKW (epsilon = " << fmt("%.6g", epsilon)
                      << ", factor 1 - exp(-2 n eps^2) = " << fmt("%.6f", factor) << "):\n";
            std::cout << "    P(|mu - mu_hat| / mu <= " << fmt("%.8f", x_mu) << ") >= "
                      << fmt("%.6f", pdm::dkw_lower_bound(cdf_mu(x_mu), n, epsilon)) << "\n";
            std::cout << "    P(|sigma - sigma_hat| / sigma <= " << fmt("%.8f", x_sigma)
                      << ") >= " << fmt("%.6f", pdm::dkw_lower_bound(cdf_sigma(x_sigma), n, epsilon))
                      << "\n";
            if (!out_path.empty()) {
                std::ostringstream csv;
                csv << "abs_mu_error,abs_sigma_error\n";
                for (std::size_t i = 0; i < n; ++i) {
                    csv << fmt("%.10g", cdf_mu.sorted()[i]) << ','
                        << fmt("%.10g", cdf_sigma.sorted()[i]) << '\n';
                }
                write_text(out_path, csv.str());
            }
            std::cout << "RESULT validate-surface n=" << n << " eps=" << fmt("%.6g", epsilon)
                      << " dkw_factor=" << fmt("%.6f", factor)
                      << " mu_p95=" << fmt("%.8f", cdf_mu.quantile(0.95))
                      << " sigma_p95=" << fmt("%.8f", cdf_sigma.quantile(0.95))
                      << " mu_bound=" << fmt("%.8f", x_mu)
                      << " sigma_bound=" << fmt("%.8f", x_sigma) << "\n";
        } else if (vgap->parsed()) {
            if (replications < 2) throw pdm::ModelError("validate-gap: need at least 2 replications");
            const pdm::Surface surface =
                surface_from(surface_path, params_path, bits, p_min, p_max, v_max);
            const pdm::Scenario scenario =
                make_scenario(surface, cost, salvage_rate, theta, samples, seed, ad_scale);
            pdm::GapStudy study;
            study.alpha = alpha_ci;
            if (dispersion == "standard-error") {
                study.dispersion = pdm::GapDispersion::StandardError;
            } else if (dispersion == "as-printed") {
                study.dispersion = pdm::GapDispersion::AsPrinted;
            } else {
                throw pdm::ParseError("validate-gap: unknown dispersion convention '" +
                                      dispersion + "'");
            }
            int p_first = 0;
            bool same_p = true;
            for (int i = 0; i < replications; ++i) {
                const pdm::SaaSample sample =
                    pdm::draw_samples(samples, seed + static_cast<std::uint64_t>(i));
                const pdm::SolveResult result = pdm::solve(surface, scenario, sample);
                if (i == 0) p_first = result.p_star;
                same_p = same_p && result.p_star == p_first;
                const pdm::DemandMoments m =
                    pdm::eval_surface(surface, result.p_star, result.v_star);
                study.saa_values.push_back(result.objective);
                study.true_values.push_back(pdm::exact_expected_profit(
                    result.p_star, result.v_star, result.o_star, m.mu, m.sigma, scenario));
            }
            const pdm::GapInterval ci = pdm::optimality_gap_ci(study);
            std::cout << "Gap study: M=" << replications << ", c=" << fmt("%.10g", cost)
                      << ", theta=" << fmt("%.10g", theta) << ", N=" << samples << "\n";
            std::cout << "  optimum CI [" << fmt("%.6f", ci.lower) << ", "
                      << fmt("%.6f", ci.upper) << "]  gap fraction " << fmt("%.6f", ci.gap_fraction)
                      << "\n";
            std::cout << "  identical p* across replications: " << (same_p ? "yes" : "no")
                      << " (p* = " << p_first << ")\n";
            std::cout << "RESULT validate-gap M=" << replications
                      << " gap_fraction=" << fmt("%.8f", ci.gap_fraction)
                      << " lower=" << fmt("%.6f", ci.lower) << " upper=" << fmt("%.6f", ci.upper)
                      << " same_p_star=" << (same_p ? 1 : 0) << " p_star=" << p_first << "\n";
        } else if (sbm->parsed()) {
            if (replications < 1) throw pdm::ModelError("simulate-sbm: need replications >= 1");
            pdm::EffectiveSpec spec{sbm_pool, sbm_alpha, sbm_beta};
            double sum = 0, sum2 = 0;
            for (int i = 0; i < replications; ++i) {
                const double draw = static_cast<double>(
                    pdm::simulate_sbm(spec, sbm_t, seed + static_cast<std::uint64_t>(i)));
                sum += draw;
                sum2 += draw * draw;
            }
            const double n = replications;
            const double mean = sum / n;
            const double var = n > 1 ? (sum2 - n * mean * mean) / (n - 1) : 0.0;
            const double mu = pdm::bass_mean(sbm_t, sbm_pool, sbm_alpha, sbm_beta);
            const double psi = pdm::bass_variance(sbm_t, sbm_pool, sbm_alpha, sbm_beta);
            std::cout << "Pure-birth simulation: pool=" << fmt("%.10g", sbm_pool)
                      << " alpha=" << fmt("%.10g", sbm_alpha) << " beta=" << fmt("%.10g", sbm_beta)
                      << " t=" << fmt("%.10g", sbm_t) << " reps=" << replications << "\n";
            std::cout << "  sample mean " << fmt("%.6f", mean) << " vs closed-form "
                      << fmt("%.6f", mu) << "\n";
            std::cout << "  sample var  " << fmt("%.6f", var) << " vs closed-form "
                      << fmt("%.6f", psi) << "\n";
            std::cout << "RESULT simulate-sbm mean=" << fmt("%.8f", mean)
                      << " var=" << fmt("%.8f", var) << " mu=" << fmt("%.8f", mu)
                      << " psi=" << fmt("%.8f", psi) << "\n";
        }
    } catch (const pdm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const pdm::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const pdm::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const pdm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
