#include "pdm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "pdm/errors.hpp"
#include "pdm/stats.hpp"
#include "pdm/surface.hpp"

namespace pdm {

namespace {

std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

std::string scenario_label(double cost, double theta) {
    std::ostringstream id;
    id << "c" << fmt("%.10g", cost) << "_theta" << fmt("%.10g", theta);
    return id.str();
}

// One plotted series: a (cost, theta) pair across the multiplier grid.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
    static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const double width = 800, height = 520;
    const double ml = 90, mr = 220, mt = 50, mb = 60;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"18\">" << title << "</text>\n";

    if (series.empty()) {
        svg << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" "
            << "fill=\"#888\">no data</text>\n</svg>\n";
        return svg.str();
    }

    double x_lo = series[0].x[0], x_hi = x_lo;
    double y_lo = series[0].y[0], y_hi = y_lo;
    for (const Series& s : series) {
        for (double x : s.x) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
        }
        for (double y : s.y) {
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    const auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr); };
    const auto py = [&](double y) {
        return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb);
    };

    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 5; ++k) {
        const double xv = x_lo + (x_hi - x_lo) * k / 5.0;
        const double yv = y_lo + (y_hi - y_lo) * k / 5.0;
        svg << "<line x1=\"" << px(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << px(xv)
            << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << fmt("%.3g", xv) << "</text>\n";
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << fmt("%.6g", yv) << "</text>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << x_label
        << "</text>\n";
    svg << "<text x=\"20\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
        << "transform=\"rotate(-90 20 " << (mt + height - mb) / 2 << ")\">" << y_label
        << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kColors[si % 8];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            svg << fmt("%.2f", px(s.x[i])) << "," << fmt("%.2f", py(s.y[i]));
            if (i + 1 < s.x.size()) svg << " ";
        }
        svg << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            svg << "<circle cx=\"" << fmt("%.2f", px(s.x[i])) << "\" cy=\""
                << fmt("%.2f", py(s.y[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = mt + 20 * static_cast<double>(si);
        svg << "<line x1=\"" << width - mr + 15 << "\" y1=\"" << ly << "\" x2=\""
            << width - mr + 45 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << width - mr + 52 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << body;
}

std::vector<Series> collect_series(const std::vector<StudyRow>& rows, MisTarget target,
                                   bool margin, const std::vector<double>& costs,
                                   const std::vector<double>& thetas) {
    std::vector<Series> out;
    for (double cost : costs) {
        for (double theta : thetas) {
            if (margin && theta == 1.0) continue;
            Series s;
            s.label = "c=" + fmt("%.10g", cost) + ", theta=" + fmt("%.10g", theta);
            for (const StudyRow& r : rows) {
                if (r.target != target || r.cost != cost || r.theta != theta) continue;
                if (margin && !r.truth.margin_defined) continue;
                s.x.push_back(r.multiplier);
                s.y.push_back(margin ? r.truth.feasibility_margin_pct : r.truth.expected_profit);
            }
            if (!s.x.empty()) out.push_back(std::move(s));
        }
    }
    return out;
}

} // namespace

const char* to_string(MisTarget target) {
    return target == MisTarget::Eta ? "eta" : "gamma";
}

PdmParams perturb_params(const PdmParams& true_params, const MisestimationCell& cell) {
    if (!(cell.multiplier > 0)) throw ModelError("perturb_params: multiplier must be positive");
    PdmParams biased = true_params;
    if (cell.target == MisTarget::Eta) {
        biased.eta = true_params.eta * cell.multiplier;
    } else {
        biased.gamma_p = true_params.gamma_p * cell.multiplier;
        biased.gamma_b = true_params.gamma_b * cell.multiplier;
    }
    return biased;
}

TruthEvaluation evaluate_under_truth(const SolveResult& result, const PdmParams& true_params,
                                     const Surface& truth_surface, const Scenario& scenario) {
    const DemandMoments truth =
        demand_moments(static_cast<double>(result.p_star), result.v_star, true_params);
    TruthEvaluation eval;
    eval.expected_profit = exact_expected_profit(static_cast<double>(result.p_star),
                                                 result.v_star, result.o_star, truth.mu,
                                                 truth.sigma, scenario);
    if (scenario.theta < 1.0) {
        const DemandMoments surf =
            eval_surface(truth_surface, static_cast<double>(result.p_star), result.v_star);
        eval.min_feasible_order = chance_bound(surf.mu, surf.sigma, scenario.theta);
        if (!(eval.min_feasible_order > 0)) {
            throw ModelError("evaluate_under_truth: non-positive minimum feasible order");
        }
        eval.feasibility_margin_pct =
            (result.o_star - eval.min_feasible_order) / eval.min_feasible_order * 100.0;
        eval.margin_defined = true;
        eval.feasible = eval.feasibility_margin_pct >= 0.0;
    } else {
        eval.min_feasible_order = 0.0;
        eval.feasibility_margin_pct = 0.0;
        eval.margin_defined = false;
        eval.feasible = true;  // only o >= 0 remains and solutions satisfy it by construction
    }
    return eval;
}

std::vector<StudyRow> run_study(const StudyConfig& config) {
    config.true_params.validate();
    if (config.multipliers.empty()) throw ModelError("run_study: empty multiplier grid");
    if (config.costs.empty() || config.thetas.empty()) {
        throw ModelError("run_study: no scenarios configured");
    }

    // The surface depends only on the biased parameters, so each distinct
    // perturbation is built once and shared across scenarios.
    std::map<std::uint64_t, Surface> surfaces;
    const auto surface_for = [&](const PdmParams& params) -> const Surface& {
        const std::uint64_t key = params_fingerprint(params);
        auto it = surfaces.find(key);
        if (it == surfaces.end()) {
            it = surfaces.emplace(key, refine_surface(params, config.domain, config.bit_budget))
                     .first;
        }
        return it->second;
    };

    const Surface& truth_surface = surface_for(config.true_params);

    std::vector<StudyRow> rows;
    int scenario_index = 0;
    for (double cost : config.costs) {
        for (double theta : config.thetas) {
            Scenario scenario;
            scenario.c = cost;
            scenario.s = config.salvage_rate * cost;
            scenario.theta = theta;
            scenario.p_min = static_cast<int>(std::lround(config.domain.p_min));
            scenario.p_max = static_cast<int>(std::lround(config.domain.p_max));
            scenario.v_max = config.domain.v_max;
            scenario.n_samples = config.n_samples;
            scenario.seed = config.base_seed + static_cast<std::uint64_t>(scenario_index);
            scenario.ad_cost_scale = config.ad_cost_scale;
            scenario.validate();
            const SaaSample sample = draw_samples(scenario.n_samples, scenario.seed);

            for (MisTarget target : {MisTarget::Eta, MisTarget::Gamma}) {
                for (double multiplier : config.multipliers) {
                    const MisestimationCell cell{target, multiplier};
                    try {
                        const PdmParams biased = perturb_params(config.true_params, cell);
                        const Surface& surface = surface_for(biased);
                        const SolveResult solved = solve(surface, scenario, sample);
                        StudyRow row;
                        row.scenario_id = scenario_label(cost, theta);
                        row.cost = cost;
                        row.theta = theta;
                        row.target = target;
                        row.multiplier = multiplier;
                        row.p_star = solved.p_star;
                        row.v_star = solved.v_star;
                        row.o_star = solved.o_star;
                        row.saa_objective = solved.objective;
                        row.truth = evaluate_under_truth(solved, config.true_params,
                                                         truth_surface, scenario);
                        rows.push_back(std::move(row));
                    } catch (const Error& e) {
                        std::ostringstream msg;
                        msg << "study cell (" << scenario_label(cost, theta) << ", "
                            << to_string(target) << ", x" << multiplier << ") failed: " << e.what();
                        throw Error(msg.str());
                    }
                }
            }
            ++scenario_index;
        }
    }
    return rows;
}

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out) {
    out << "scenario_id,cost,theta,target,multiplier,p_star,v_star,o_star,saa_objective,"
           "true_profit,min_feasible_order,margin_pct,feasible\n";
    for (const StudyRow& r : rows) {
        out << r.scenario_id << ',' << fmt("%.10g", r.cost) << ',' << fmt("%.10g", r.theta) << ','
            << to_string(r.target) << ',' << fmt("%.10g", r.multiplier) << ',' << r.p_star << ','
            << fmt("%.10g", r.v_star) << ',' << fmt("%.10g", r.o_star) << ','
            << fmt("%.10g", r.saa_objective) << ',' << fmt("%.10g", r.truth.expected_profit)
            << ',';
        if (r.truth.margin_defined) {
            out << fmt("%.10g", r.truth.min_feasible_order) << ','
                << fmt("%.6f", r.truth.feasibility_margin_pct);
        } else {
            out << ",";
        }
        out << ',' << (r.truth.feasible ? 1 : 0) << '\n';
    }
}

std::vector<std::string> emit_figures(const std::vector<StudyRow>& rows,
                                      const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    std::vector<double> costs, thetas;
    for (const StudyRow& r : rows) {
        if (std::find(costs.begin(), costs.end(), r.cost) == costs.end()) costs.push_back(r.cost);
        if (std::find(thetas.begin(), thetas.end(), r.theta) == thetas.end()) {
            thetas.push_back(r.theta);
        }
    }

    const struct {
        const char* file;
        MisTarget target;
        bool margin;
        const char* title;
        const char* y_label;
    } charts[] = {
        {"profit_vs_eta.svg", MisTarget::Eta, false,
         "Expected profit under truth vs eta multiplier", "expected profit"},
        {"margin_vs_eta.svg", MisTarget::Eta, true,
         "Feasibility margin vs eta multiplier", "% above minimum feasible order"},
        {"profit_vs_gamma.svg", MisTarget::Gamma, false,
         "Expected profit under truth vs gamma multiplier", "expected profit"},
        {"margin_vs_gamma.svg", MisTarget::Gamma, true,
         "Feasibility margin vs gamma multiplier", "% above minimum feasible order"},
    };

    std::vector<std::string> written;
    for (const auto& chart : charts) {
        const auto series = collect_series(rows, chart.target, chart.margin, costs, thetas);
        const std::string path = out_dir + "/" + chart.file;
        write_file(path, svg_line_chart(chart.title, "multiplier", chart.y_label, series));
        written.push_back(path);
    }
    const std::string csv_path = out_dir + "/study.csv";
    std::ostringstream csv;
    write_study_csv(rows, csv);
    write_file(csv_path, csv.str());
    written.push_back(csv_path);
    return written;
}

} // namespace pdm
