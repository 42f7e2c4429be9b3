#include "qnf/model.hpp"

#include <cmath>
#include <numbers>

namespace qnf {

void validate(const interferometer_config& c) {
    if (!(c.L_s > 0.0) || !(c.L_f > 0.0))
        throw input_error("cavity lengths must be positive");
    for (double t : {c.T_IM, c.T_CM, c.T_EM})
        if (!(t >= 0.0 && t <= 1.0))
            throw input_error("mirror power transmissions must lie in [0,1]");
    for (double l : {c.Lambda_o, c.Lambda_f, c.Lambda_s})
        if (!(l >= 0.0 && l < 1.0))
            throw input_error("power losses must lie in [0,1)");
    if (!(c.lambda > 0.0))
        throw input_error("wavelength must be positive");
}

derived_rates derive_rates(const interferometer_config& c) {
    validate(c);
    derived_rates r;
    r.tau_s = c.L_s / speed_of_light;
    r.tau_f = c.L_f / speed_of_light;
    r.t_IM = std::sqrt(c.T_IM);
    r.r_IM = std::sqrt(1.0 - c.T_IM);
    r.t_CM = std::sqrt(c.T_CM);
    r.r_CM = std::sqrt(1.0 - c.T_CM);
    r.gamma_s = speed_of_light * c.T_CM / (4.0 * c.L_s);
    r.gamma_f = speed_of_light * c.T_IM / (4.0 * c.L_f);
    // t_CM / (2 sqrt(tau_f tau_s)); the squared form keeps it exact.
    r.omega_s = std::sqrt(c.T_CM / (4.0 * r.tau_f * r.tau_s));
    r.eta = std::sqrt(1.0 - c.Lambda_o);
    return r;
}

double pump_power_to_coupling(double P_f, double m, double lambda,
                              double omega_m, double L_f) {
    if (!(P_f >= 0.0))
        throw input_error("pump power must be nonnegative");
    if (!(m > 0.0) || !(lambda > 0.0) || !(omega_m > 0.0) || !(L_f > 0.0))
        throw input_error("mass, wavelength, frequency and length must be positive");
    return std::sqrt(16.0 * std::numbers::pi * P_f / (m * lambda * omega_m * L_f));
}

double pt_condition_coupling(const derived_rates& rates) {
    if (!(rates.tau_s > 0.0) || !(rates.tau_f > 0.0))
        throw input_error("derived rates carry nonpositive propagation times");
    return std::sqrt(rates.t_CM * rates.t_CM / (8.0 * rates.tau_f * rates.tau_s));
}

} // namespace qnf
