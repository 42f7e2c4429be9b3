#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qnf {

using cplx = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0; // m/s, fixed

// Thrown on invalid configuration or malformed input files.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an evaluation lands on a pole / branch point / cavity resonance.
struct singular_evaluation : std::runtime_error {
    explicit singular_evaluation(const std::string& msg) : std::runtime_error(msg) {}
};

struct interferometer_config {
    double L_s = 4000.0;     // sensing-cavity length, m
    double L_f = 40.0;       // filter-cavity length, m
    double T_IM = 0.02;      // input-mirror power transmission
    double T_CM = 0.005;     // central-mirror power transmission
    double T_EM = 0.0;       // end-mirror power transmission (kept 0: perfect reflector)
    double lambda = 1.064e-6; // carrier wavelength, m (pump-power conversion only)
    double Lambda_o = 0.0;   // output power loss
    double Lambda_f = 0.0;   // filter-cavity round-trip power loss
    double Lambda_s = 0.0;   // sensing-cavity round-trip power loss
};

struct derived_rates {
    double tau_s = 0.0;   // one-way sensing propagation time, s
    double tau_f = 0.0;   // one-way filter propagation time, s
    double t_IM = 0.0;    // amplitude transmissions/reflections, t^2 + r^2 = 1
    double r_IM = 0.0;
    double t_CM = 0.0;
    double r_CM = 0.0;
    double gamma_s = 0.0; // sensing-cavity bandwidth, rad/s
    double gamma_f = 0.0; // filter-cavity bandwidth, rad/s
    double omega_s = 0.0; // cavity-coupling rate, rad/s
    double eta = 0.0;     // output efficiency amplitude sqrt(1 - Lambda_o)
};

// Rational transfer function K * prod(s - z_i) / prod(s - p_j).
// Zeros and poles are complex in rad/s with no conjugate pairing imposed;
// zero and pole counts match so |G(i inf)| -> k.
struct zpk {
    std::vector<cplx> zeros; // rad/s
    std::vector<cplx> poles; // rad/s
    double k = 1.0;          // real positive gain
};

struct gain_unity {};

struct gain_detuned {
    double phi = 0.0; // constant phase, rad
};

struct gain_optimal {};

struct gain_pt_symmetric {
    double f_m = 5.0e5; // mechanical frequency, Hz
    double Q_m = 5.0e5; // mechanical quality factor
    double g = 0.0;     // optomechanical coupling rate, rad/s
};

struct gain_rational {
    zpk model;
};

using gain_model = std::variant<gain_unity, gain_detuned, gain_optimal,
                                gain_pt_symmetric, gain_rational>;

derived_rates derive_rates(const interferometer_config& config);

// g = sqrt(16 pi P_f / (m lambda omega_m L_f)), all inputs strictly positive
// except P_f which may be zero.
double pump_power_to_coupling(double P_f, double m, double lambda,
                              double omega_m, double L_f);

// Coupling that balances the mechanical pump against the cavity decay:
// g = sqrt(t_CM^2 / (8 tau_f tau_s)), equivalently 4 g^2 tau_f = 2 gamma_s.
double pt_condition_coupling(const derived_rates& rates);

void validate(const interferometer_config& config);

} // namespace qnf
