#pragma once

#include <string>

#include "pdm/demand.hpp"
#include "pdm/io.hpp"
#include "pdm/surface.hpp"

#ifndef PDM_DATA_DIR
#define PDM_DATA_DIR "data"
#endif

namespace fixtures {

inline std::string data_file(const std::string& name) {
    return std::string(PDM_DATA_DIR) + "/" + name;
}

inline const pdm::PdmParams& table2_params() {
    static const pdm::PdmParams params = pdm::load_params(data_file("params_table2.csv"));
    return params;
}

inline const pdm::SurfaceDomain& full_domain() {
    static const pdm::SurfaceDomain domain{350, 450, 0, 100};
    return domain;
}

// Shared surfaces; built once per test binary.  The 6-bit surface keeps unit
// tests fast, the coarse 1-bit surface is the untouched two-triangle split.
inline const pdm::Surface& surface_bits6() {
    static const pdm::Surface s = pdm::refine_surface(table2_params(), full_domain(), 6);
    return s;
}

inline const pdm::Surface& surface_coarse() {
    static const pdm::Surface s = pdm::refine_surface(table2_params(), full_domain(), 1);
    return s;
}

inline const pdm::Surface& surface_bits10() {
    static const pdm::Surface s = pdm::refine_surface(table2_params(), full_domain(), 10);
    return s;
}

} // namespace fixtures
