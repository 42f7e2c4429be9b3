#pragma once

#include "qnf/model.hpp"

namespace qnf {

struct gain_value {
    cplx value;       // complex gain
    double magnitude; // |value|
    double phase;     // arg(value), rad
};

// Evaluates any gain law at complex frequency s (rad/s).
//   unity        -> 1
//   detuned(phi) -> exp(i phi)
//   optimal      -> principal sqrt((s + gamma_s)/(s - gamma_s)); branch cut on
//                   the real segment [-gamma_s, gamma_s], so the imaginary axis
//                   is evaluated continuously
//   pt_symmetric -> 1 - 4i g^2 tau_f omega_m / ((s + gamma_m)(s + gamma_m - 2i omega_m)),
//                   gamma_m = omega_m / (2 Q_m)
//   rational     -> zpk product formula
gain_value eval_gain(const gain_model& model, cplx s, const derived_rates& rates);

cplx zpk_eval(const zpk& model, cplx s);

// Rational form of the pt_symmetric law: poles {-gamma_m, -gamma_m + 2i omega_m},
// zeros from the quadratic (s+gamma_m)(s+gamma_m-2i omega_m) - 4i g^2 tau_f omega_m = 0,
// k = 1.
zpk pt_to_zpk(double f_m, double Q_m, double g, double tau_f);

} // namespace qnf
