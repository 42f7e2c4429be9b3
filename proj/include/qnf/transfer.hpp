#pragma once

#include "qnf/gains.hpp"
#include "qnf/model.hpp"

namespace qnf {

enum class delay_mode {
    exact,        // Z(s) = exp(-s tau)
    second_order, // Z(s) = 1 - s tau + s^2 tau^2 / 2
};

// Signal and noise transfer values at one complex frequency. The loss
// channels T_nLo / T_nLf / T_nLs vanish when the matching loss is zero.
struct transfer_values {
    cplx T_xi;  // end-mirror signal to output
    cplx T_nq;  // input vacuum to output
    cplx T_na1; // filter added noise, cavity path
    cplx T_na2; // filter added noise, direct path
    cplx T_nLo; // output-loss vacuum (= sqrt(Lambda_o), frequency independent)
    cplx T_nLf; // filter-cavity loss vacuum
    cplx T_nLs; // sensing-cavity loss vacuum
    cplx den;   // shared denominator, evaluated once
};

// One-way cavity propagator including round-trip loss: delay * sqrt(1 - loss).
cplx propagator(double tau, cplx s, delay_mode mode, double loss);

transfer_values transfer_set(const interferometer_config& config,
                             const derived_rates& rates,
                             const gain_model& gain, cplx s, delay_mode mode);

// Convenience overload deriving the rates on the fly.
transfer_values transfer_set(const interferometer_config& config,
                             const gain_model& gain, cplx s, delay_mode mode);

} // namespace qnf
