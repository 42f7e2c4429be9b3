#pragma once

#include "qnf/transfer.hpp"

namespace qnf {

struct chi_point {
    double omega;  // rad/s
    double chi_sq; // SNR enhancement power ratio, >= 0
    double phi_lo; // homodyne angle used, rad
};

struct frequency_band {
    double lo = 0.0; // rad/s
    double hi = 0.0; // rad/s
};

struct enhancement_integral {
    double value = 0.0;      // rad/s
    double normalized = 0.0; // value / I0, I0 = pi / tau_s
    frequency_band band;
    double phi_lo = 0.0;     // angle used (fixed) or found (global); NaN for per-frequency
    double achieved_rel = 0.0;
    bool converged = true;
};

struct homodyne_choice {
    enum class kind { per_frequency, fixed, global_optimal };
    kind mode = kind::per_frequency;
    double phi = 0.0; // rad, used when mode == fixed
    static homodyne_choice per_frequency() { return {kind::per_frequency, 0.0}; }
    static homodyne_choice fixed(double phi) { return {kind::fixed, phi}; }
    static homodyne_choice global_optimal() { return {kind::global_optimal, 0.0}; }
};

enum class approx_kind { nb, bb, bb2, opt, opt2, pt_infq };

// |T1 sin(phi) + i T2 cos(phi)|^2 with T1 = T_xi(+) + conj(T_xi(-)),
// T2 = T_xi(+) - conj(T_xi(-)); plus/minus are the two sidebands +-i omega.
double signal_psd_ratio(const transfer_values& plus, const transfer_values& minus,
                        double phi_lo);

// Sum over the six noise channels of |T(+)|^2 + |T(-)|^2.
double noise_psd_ratio(const transfer_values& plus, const transfer_values& minus);

chi_point chi_sq_at(const interferometer_config& config, const derived_rates& rates,
                    const gain_model& gain, double omega, double phi_lo,
                    delay_mode mode);

// Closed-form per-frequency maximizer of the homodyne quadratic form.
// Returns (phi_star, chi_sq_star).
std::pair<double, double> optimal_homodyne_at(const interferometer_config& config,
                                              const derived_rates& rates,
                                              const gain_model& gain, double omega,
                                              delay_mode mode);

// Adaptive band integral of chi^2; band must lie within [0, pi/tau_s].
// The flat region below 1e-3 * omega_nb is added as an analytic plateau.
enhancement_integral integral_enhancement(const interferometer_config& config,
                                          const derived_rates& rates,
                                          const gain_model& gain,
                                          homodyne_choice homodyne,
                                          frequency_band band, delay_mode mode,
                                          double rel_tol = 1e-6);

// Closed-form approximations of chi (amplitude, not squared).
double chi_approx(approx_kind kind, const derived_rates& rates, double omega);

// Relative enhancement for gain magnitude 1 + epsilon at the optimal phase.
// |epsilon| <= 0.5 is the validity window; outside it the value is still
// returned and *within_validity (if given) is set false.
double chi_rel(double epsilon, double t_IM, bool* within_validity = nullptr);

struct pt_bound_pair {
    double hf; // high-frequency bound
    double lf; // low-frequency bound
};

pt_bound_pair pt_bounds(const derived_rates& rates, double omega);

} // namespace qnf
