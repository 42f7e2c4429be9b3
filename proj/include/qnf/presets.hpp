#pragma once

#include "qnf/response.hpp"

#include <string>
#include <vector>

namespace qnf {

// Published two- and three-pole filter designs, fixed in rad/s.
zpk table1_lossless_2();
zpk table1_lossless_3();
zpk table1_lossy_2();
zpk table1_lossy_3();

struct preset_curve {
    std::string label;            // file-name stem for the curve
    interferometer_config config; // per-curve losses where applicable
    gain_model gain;
    bool is_approx = false;       // closed-form envelope instead of a full solve
    approx_kind approx = approx_kind::nb;
    bool export_zpk = false;      // additionally write the filter as JSON (Hz)
};

std::vector<std::string> preset_names();
std::vector<preset_curve> preset_curves(const std::string& name);

} // namespace qnf
