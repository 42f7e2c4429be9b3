#pragma once

#include "qnf/transfer.hpp"

#include <cstdint>
#include <vector>

namespace qnf {

// Raised when the mapped contour's winding cannot be pinned to an integer.
struct indeterminate_verdict : std::runtime_error {
    explicit indeterminate_verdict(const std::string& msg) : std::runtime_error(msg) {}
};

struct nyquist_report {
    int N = 0;             // clockwise encirclements of the critical point -1
    int P = 0;             // unstable open-loop poles
    int Z = 0;             // closed-loop unstable poles, Z = N + P
    double rho_min = 0.0;  // minimum distance of the mapped axis samples to -1
    bool stable = false;   // Z == 0
    std::vector<std::pair<double, cplx>> contour; // (omega rad/s, open-loop value)
};

struct contour_spec {
    double omega_max = 0.0;   // axis truncation, rad/s; 0 -> 2 pi / tau_s
    int n_axis = 12000;       // log-spaced samples per half-axis
    int n_arc = 4001;         // samples on the closing semicircle
    double step_deg = 10.0;   // refinement threshold on phase steps about -1
    int max_rounds = 18;      // midpoint-insertion passes
    std::size_t max_points = 3000000;
    bool keep_contour = false; // retain refined axis samples in the report
};

cplx open_loop(const interferometer_config& config, const derived_rates& rates,
               const gain_model& gain, cplx s, delay_mode mode);

// Open-loop unstable pole count with stability margin: rational gains count
// each pole twice (the loop passes the filter twice per round trip); the
// all-pass dispersion-cancelling gain is handled analytically.
int count_unstable_open_poles(const gain_model& gain, const derived_rates& rates,
                              double margin);

nyquist_report nyquist(const interferometer_config& config, const derived_rates& rates,
                       const gain_model& gain, contour_spec spec, delay_mode mode);

} // namespace qnf
