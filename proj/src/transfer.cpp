#include "qnf/transfer.hpp"

#include <cmath>
#include <sstream>

namespace qnf {

cplx propagator(double tau, cplx s, delay_mode mode, double loss) {
    if (!(tau >= 0.0))
        throw input_error("propagation time must be nonnegative");
    if (!(loss >= 0.0 && loss < 1.0))
        throw input_error("propagation loss must lie in [0,1)");
    const double amp = std::sqrt(1.0 - loss);
    if (mode == delay_mode::exact)
        return std::exp(-s * tau) * amp;
    return (1.0 - s * tau + 0.5 * (s * tau) * (s * tau)) * amp;
}

transfer_values transfer_set(const interferometer_config& c,
                             const derived_rates& r,
                             const gain_model& gain, cplx s, delay_mode mode) {
    const cplx g = eval_gain(gain, s, r).value;
    const cplx Zf = propagator(r.tau_f, s, mode, c.Lambda_f);
    const cplx Zs = propagator(r.tau_s, s, mode, c.Lambda_s);
    const cplx zs_plain = propagator(r.tau_s, s, mode, 0.0);
    const double eta = r.eta;
    const cplx g2 = g * g;
    const cplx Zf2 = Zf * Zf;
    const cplx Zs2 = Zs * Zs;
    const cplx den = -1.0 + r.r_CM * Zs2 + g2 * r.r_IM * Zf2 * (r.r_CM - Zs2);
    if (den == cplx(0.0, 0.0)) {
        std::ostringstream msg;
        msg << "transfer denominator vanishes at s = (" << s.real() << ", " << s.imag() << ")";
        throw singular_evaluation(msg.str());
    }
    // Added-noise coupling from the gain magnitude; real below unit gain,
    // pure imaginary above, contributing |1 - g0^2| to the noise power.
    // norm() keeps 1 - |g|^2 at one rounding of x^2 + y^2, so the sqrt does
    // not manufacture a spurious O(1e-8) coupling for all-pass gains.
    const cplx K = std::sqrt(cplx(1.0 - std::norm(g), 0.0));

    transfer_values t;
    t.den = den;
    t.T_xi = -eta * g * r.t_CM * r.t_IM * Zf * Zs / den;
    t.T_nq = eta * (g2 * Zf2 * (r.r_CM - Zs2) + r.r_IM * (-1.0 + r.r_CM * Zs2)) / den;
    t.T_na1 = eta * g * K * r.t_IM * Zf2 * (r.r_CM - Zs2) / den;
    t.T_na2 = eta * std::sqrt(1.0 - c.Lambda_f) * K * r.t_IM * (-1.0 + r.r_CM * Zs2) / den;
    t.T_nLo = cplx(std::sqrt(c.Lambda_o), 0.0);
    t.T_nLf = eta * std::sqrt(c.Lambda_f) * r.t_IM * (-1.0 + r.r_CM * Zs2) / den;
    t.T_nLs = -eta * g * r.t_CM * r.t_IM * Zf * zs_plain * std::sqrt(c.Lambda_s) / den;
    return t;
}

transfer_values transfer_set(const interferometer_config& c,
                             const gain_model& gain, cplx s, delay_mode mode) {
    return transfer_set(c, derive_rates(c), gain, s, mode);
}

} // namespace qnf
