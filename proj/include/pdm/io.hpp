#pragma once

#include <string>
#include <vector>

#include "pdm/demand.hpp"
#include "pdm/experiment.hpp"

namespace pdm {

/// One year of the bundled sales history.
struct HistoryRow {
    int year = 0;
    double sales = 0;        ///< thousands of units
    double price = 0;        ///< dollars
    double advertising = 0;  ///< $MM
};

/// Reads a one-row CSV parameter table.  Required columns:
/// m,a0,pi_p,alpha,beta,delta,eta,pi_m,gamma_p,gamma_b; optional columns
/// p_ref, v0, t receive their documented defaults (410, 0, 1) when absent.
/// Malformed files throw ParseError naming the offending row and column;
/// range violations throw ModelError.
PdmParams load_params(const std::string& path);

/// Writes the full parameter set (including calibration constants) so that a
/// load round trip reproduces every field bit-exactly.
void save_params(const PdmParams& params, const std::string& path);

/// Reads the year,sales,price,advertising history table; years must be
/// strictly increasing.
std::vector<HistoryRow> load_history(const std::string& path);

/// Run configuration for the study and validation commands.
struct RunConfig {
    std::string params_path;
    StudyConfig study;          ///< true_params populated from params_path
    std::string output_dir = "out";
};

/// Parses and schema-validates a JSON run configuration; unknown keys and
/// missing files are rejected.  Every omitted field takes the bundled
/// calibration defaults.
RunConfig load_config(const std::string& path);

} // namespace pdm
