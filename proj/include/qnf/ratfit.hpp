#pragma once

#include "qnf/gains.hpp"

#include <vector>

namespace qnf {

// Raised when the least-squares system degenerates or the direct term vanishes.
struct ill_posed_fit : std::runtime_error {
    explicit ill_posed_fit(const std::string& msg) : std::runtime_error(msg) {}
};

struct fit_problem {
    std::vector<cplx> s;         // evaluation points, same length as f
    std::vector<cplx> f;         // target values at s
    int n_poles = 3;
    int iterations = 20;         // pole-relocation passes
    std::vector<double> weights; // per-sample row weights; empty means 1
};

struct fit_result {
    zpk model;
    double max_rel_err = 0.0;    // over samples with |f| > 0
    std::vector<std::vector<cplx>> pole_history; // working poles after each pass
    bool conjugate_repaired = false; // set when the sample set was symmetrized
};

fit_result vector_fit(const fit_problem& problem);

// Rational stand-in for the dispersion-cancelling gain, fit on 400 log-spaced
// points over [gamma_s (1 + 1e-6), 2 pi 1e5] rad/s with unit weights. When the
// direct fit closes an unstable loop, refits on a conjugate-symmetrized sample
// set so the coefficients come out real.
fit_result seed_from_gopt(const interferometer_config& config,
                          const derived_rates& rates, int n_poles = 3);

} // namespace qnf
