#include "pdm/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) {
            cell.erase(cell.begin());
        }
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw ParseError(path + ": empty file");
    return rows;
}

double parse_cell(const std::string& path, std::size_t row, const std::string& column,
                  const std::string& text) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        std::ostringstream msg;
        msg << path << ": row " << row << ", column '" << column << "': cannot parse '" << text
            << "' as a number";
        throw ParseError(msg.str());
    }
}

std::string fmt_g17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace

PdmParams load_params(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.size() != 2) {
        throw ParseError(path + ": expected a header row and exactly one data row");
    }
    const std::vector<std::string>& header = rows[0];
    const std::vector<std::string>& data = rows[1];
    if (data.size() != header.size()) {
        throw ParseError(path + ": data row length does not match the header");
    }

    static const std::vector<std::string> required = {"m",     "a0",   "pi_p", "alpha", "beta",
                                                      "delta", "eta",  "pi_m", "gamma_p",
                                                      "gamma_b"};
    static const std::vector<std::string> optional = {"p_ref", "v0", "t"};

    std::map<std::string, double> values;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& name = header[i];
        const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                           std::find(optional.begin(), optional.end(), name) != optional.end();
        if (!known) throw ParseError(path + ": unknown column '" + name + "'");
        if (values.count(name)) throw ParseError(path + ": duplicate column '" + name + "'");
        values[name] = parse_cell(path, 1, name, data[i]);
    }
    for (const std::string& name : required) {
        if (!values.count(name)) throw ParseError(path + ": missing column '" + name + "'");
    }

    PdmParams params;
    params.m = values["m"];
    params.a0 = values["a0"];
    params.pi_p = values["pi_p"];
    params.alpha = values["alpha"];
    params.beta = values["beta"];
    params.delta = values["delta"];
    params.eta = values["eta"];
    params.pi_m = values["pi_m"];
    params.gamma_p = values["gamma_p"];
    params.gamma_b = values["gamma_b"];
    if (values.count("p_ref")) params.p_ref = values["p_ref"];
    if (values.count("v0")) params.v0 = values["v0"];
    if (values.count("t")) params.t = values["t"];
    params.validate();
    return params;
}

void save_params(const PdmParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << "m,a0,pi_p,alpha,beta,delta,eta,pi_m,gamma_p,gamma_b,p_ref,v0,t\n";
    out << fmt_g17(params.m) << ',' << fmt_g17(params.a0) << ',' << fmt_g17(params.pi_p) << ','
        << fmt_g17(params.alpha) << ',' << fmt_g17(params.beta) << ',' << fmt_g17(params.delta)
        << ',' << fmt_g17(params.eta) << ',' << fmt_g17(params.pi_m) << ','
        << fmt_g17(params.gamma_p) << ',' << fmt_g17(params.gamma_b) << ','
        << fmt_g17(params.p_ref) << ',' << fmt_g17(params.v0) << ',' << fmt_g17(params.t) << '\n';
}

std::vector<HistoryRow> load_history(const std::string& path) {
    const auto rows = read_csv(path);
    static const std::vector<std::string> expected = {"year", "sales", "price", "advertising"};
    if (rows[0] != expected) {
        throw ParseError(path + ": header must be year,sales,price,advertising");
    }
    std::vector<HistoryRow> history;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != expected.size()) {
            std::ostringstream msg;
            msg << path << ": row " << i << " has " << rows[i].size() << " cells, expected 4";
            throw ParseError(msg.str());
        }
        HistoryRow row;
        row.year = static_cast<int>(parse_cell(path, i, "year", rows[i][0]));
        row.sales = parse_cell(path, i, "sales", rows[i][1]);
        row.price = parse_cell(path, i, "price", rows[i][2]);
        row.advertising = parse_cell(path, i, "advertising", rows[i][3]);
        if (row.sales < 0 || row.price <= 0 || row.advertising < 0) {
            std::ostringstream msg;
            msg << path << ": row " << i << " violates sales >= 0, price > 0, advertising >= 0";
            throw ModelError(msg.str());
        }
        if (!history.empty() && row.year <= history.back().year) {
            std::ostringstream msg;
            msg << path << ": row " << i << ": years must be strictly increasing";
            throw ParseError(msg.str());
        }
        history.push_back(row);
    }
    return history;
}

RunConfig load_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }

    static const std::vector<std::string> known = {
        "params",      "domain",  "bits",   "costs",        "thetas", "salvage_rate",
        "samples",     "seed",    "multipliers", "ad_cost_scale", "output_dir"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ParseError(path + ": unknown configuration key '" + key + "'");
        }
    }

    RunConfig config;
    try {
        if (!j.contains("params")) throw ParseError(path + ": missing required key 'params'");
        config.params_path = j.at("params").get<std::string>();
        if (!std::filesystem::exists(config.params_path)) {
            throw ParseError(path + ": referenced params file does not exist: " +
                             config.params_path);
        }
        config.study.true_params = load_params(config.params_path);

        if (j.contains("domain")) {
            const auto& d = j.at("domain");
            for (const auto& [key, value] : d.items()) {
                if (key != "p_min" && key != "p_max" && key != "v_max") {
                    throw ParseError(path + ": unknown domain key '" + key + "'");
                }
            }
            config.study.domain.p_min = d.at("p_min").get<double>();
            config.study.domain.p_max = d.at("p_max").get<double>();
            config.study.domain.v_min = 0.0;
            config.study.domain.v_max = d.at("v_max").get<double>();
        }
        if (j.contains("bits")) config.study.bit_budget = j.at("bits").get<int>();
        if (j.contains("costs")) config.study.costs = j.at("costs").get<std::vector<double>>();
        if (j.contains("thetas")) config.study.thetas = j.at("thetas").get<std::vector<double>>();
        if (j.contains("salvage_rate")) {
            config.study.salvage_rate = j.at("salvage_rate").get<double>();
        }
        if (j.contains("samples")) config.study.n_samples = j.at("samples").get<int>();
        if (j.contains("seed")) config.study.base_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("multipliers")) {
            config.study.multipliers = j.at("multipliers").get<std::vector<double>>();
        }
        if (j.contains("ad_cost_scale")) {
            config.study.ad_cost_scale = j.at("ad_cost_scale").get<double>();
        }
        if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": mistyped configuration value: " + e.what());
    }

    if (!(config.study.domain.p_min < config.study.domain.p_max) ||
        !(config.study.domain.v_max > 0)) {
        throw ParseError(path + ": empty study domain");
    }
    if (config.study.bit_budget < 1 || config.study.bit_budget > 20) {
        throw ParseError(path + ": bits must lie in [1, 20]");
    }
    if (config.study.costs.empty() || config.study.thetas.empty()) {
        throw ParseError(path + ": costs and thetas must be non-empty");
    }
    if (config.study.n_samples < 1) throw ParseError(path + ": samples must be positive");
    if (!(config.study.salvage_rate >= 0 && config.study.salvage_rate < 1)) {
        throw ParseError(path + ": salvage_rate must lie in [0, 1)");
    }
    for (double m : config.study.multipliers) {
        if (!(m > 0)) throw ParseError(path + ": multipliers must be positive");
    }
    return config;
}

} // namespace pdm
