#pragma once

#include "qnf/stability.hpp"

#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace qnf {

struct optimize_options {
    double tol = 1e-9;             // simplex spread below which a segment converges
    int max_iterations = 5000;     // cumulative Nelder-Mead iteration budget
    double init_scale = 0.05;      // relative vertex offset for fresh simplexes
    double weight = 1e8;           // penalty scale for instabilities and margin loss
    double margin_unstable = 2e-2 * std::numbers::pi; // rad/s open-loop pole margin
    double margin_rho = 1e-4;      // minimum allowed distance to the critical point
    double phi_init = std::numbers::pi / 2.0; // homodyne warm start, rad
    delay_mode mode = delay_mode::exact;
};

struct cost_breakdown {
    double total = 0.0;            // -I/I0 plus weighted penalties
    double normalized_integral = 0.0;
    double phi_lo = 0.0;           // homodyne angle delivering the integral, rad
    int n_unstable_gain = 0;       // margin-counted open-loop poles, doubled
    int n_unstable_closed = 0;     // clockwise encirclements clipped at zero
    double rho_min = 0.0;
    double rho_penalty = 0.0;
    bool evaluation_failed = false; // singular or indeterminate point; total is a cap
};

struct nm_result {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Downhill simplex with greedy expansion and mandatory inside contraction.
nm_result nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                      std::vector<double> x0, double init_scale, double tol,
                      int max_iter,
                      const std::function<void(int, double)>& on_iteration = {});

// Band-integral cost of a candidate filter: noise-normalized signal integral
// over [0, pi/(2 tau_s)] at the best homodyne angle (found by a warm-started
// one-dimensional simplex search), minus penalties for margin-violating gain
// poles, closed-loop encirclements, and critical-point proximity.
struct cost_evaluator {
    cost_evaluator(const interferometer_config& config, const derived_rates& rates,
                   const optimize_options& options);
    cost_breakdown operator()(const zpk& candidate);

    const interferometer_config& config;
    const derived_rates& rates;
    optimize_options options;
    std::vector<double> grid; // rad/s, half-band quadrature nodes
    double phi_warm;          // carried between evaluations
};

struct optimization_result {
    zpk model;
    cost_breakdown best;
    nyquist_report verdict;    // fresh run at twice the default axis truncation
    std::vector<std::pair<int, double>> trace; // (cumulative iteration, best cost)
    int iterations = 0;
    int evaluations = 0;
    int segments = 0;          // simplex restarts consumed
    bool converged = false;    // at least one segment met tol
    bool seed_feasible = true; // seed cost cleared the penalty scale
};

optimization_result optimize_filter(const interferometer_config& config,
                                    const derived_rates& rates, const zpk& seed,
                                    optimize_options options = {});

} // namespace qnf
