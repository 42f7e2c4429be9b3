#include "qnf/gains.hpp"

#include <cmath>
#include <numbers>

namespace qnf {

cplx zpk_eval(const zpk& model, cplx s) {
    cplx v(model.k, 0.0);
    for (const cplx& z : model.zeros) v *= (s - z);
    for (const cplx& p : model.poles) {
        const cplx d = s - p;
        if (d == cplx(0.0, 0.0))
            throw singular_evaluation("zpk evaluation at a pole");
        v /= d;
    }
    return v;
}

zpk pt_to_zpk(double f_m, double Q_m, double g, double tau_f) {
    if (!(f_m > 0.0) || !(Q_m > 0.0) || !(g >= 0.0) || !(tau_f > 0.0))
        throw input_error("pt_to_zpk needs f_m, Q_m, tau_f > 0 and g >= 0");
    const double omega_m = 2.0 * std::numbers::pi * f_m;
    const double gamma_m = omega_m / (2.0 * Q_m);
    // (s + gamma_m)(s + gamma_m - 2i omega_m) - 4i g^2 tau_f omega_m = 0
    const cplx b(2.0 * gamma_m, -2.0 * omega_m);
    const cplx c = cplx(gamma_m, 0.0) * cplx(gamma_m, -2.0 * omega_m)
                 - cplx(0.0, 4.0 * g * g * tau_f * omega_m);
    const cplx disc = std::sqrt(b * b - 4.0 * c);
    zpk out;
    out.zeros = {(-b + disc) / 2.0, (-b - disc) / 2.0};
    out.poles = {cplx(-gamma_m, 0.0), cplx(-gamma_m, 2.0 * omega_m)};
    out.k = 1.0;
    return out;
}

namespace {

cplx eval_pt(const gain_pt_symmetric& m, cplx s, double tau_f) {
    const double omega_m = 2.0 * std::numbers::pi * m.f_m;
    const double gamma_m = omega_m / (2.0 * m.Q_m);
    const cplx den = (s + gamma_m) * (s + cplx(gamma_m, -2.0 * omega_m));
    if (den == cplx(0.0, 0.0))
        throw singular_evaluation("pt_symmetric gain evaluated at a pole");
    return 1.0 - cplx(0.0, 4.0 * m.g * m.g * tau_f * omega_m) / den;
}

} // namespace

gain_value eval_gain(const gain_model& model, cplx s, const derived_rates& rates) {
    cplx v;
    if (std::holds_alternative<gain_unity>(model)) {
        v = cplx(1.0, 0.0);
    } else if (const auto* d = std::get_if<gain_detuned>(&model)) {
        v = std::exp(cplx(0.0, d->phi));
    } else if (std::holds_alternative<gain_optimal>(model)) {
        const double gs = rates.gamma_s;
        if (s == cplx(gs, 0.0) || s == cplx(-gs, 0.0))
            throw singular_evaluation("optimal gain evaluated at a branch point");
        v = std::sqrt((s + gs) / (s - gs));
    } else if (const auto* pt = std::get_if<gain_pt_symmetric>(&model)) {
        v = eval_pt(*pt, s, rates.tau_f);
    } else {
        v = zpk_eval(std::get<gain_rational>(model).model, s);
    }
    return {v, std::abs(v), std::arg(v)};
}

} // namespace qnf
