#include "qnf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qnf {

cplx open_loop(const interferometer_config& c, const derived_rates& r,
               const gain_model& gain, cplx s, delay_mode mode) {
    const cplx Zs = propagator(r.tau_s, s, mode, c.Lambda_s);
    const cplx Zs2 = Zs * Zs;
    const cplx rs_den = 1.0 - r.r_CM * Zs2;
    if (rs_den == cplx(0.0, 0.0)) {
        std::ostringstream msg;
        msg << "sensing-cavity resonance at s = (" << s.real() << ", " << s.imag() << ")";
        throw singular_evaluation(msg.str());
    }
    const cplx r_s = (Zs2 - r.r_CM) / rs_den;
    const cplx Zf = propagator(r.tau_f, s, mode, c.Lambda_f);
    const cplx g = eval_gain(gain, s, r).value;
    return r.r_IM * g * g * Zf * Zf * r_s;
}

namespace {

std::vector<cplx> gain_poles(const gain_model& gain, const derived_rates& rates) {
    if (const auto* rat = std::get_if<gain_rational>(&gain))
        return rat->model.poles;
    if (const auto* pt = std::get_if<gain_pt_symmetric>(&gain))
        return pt_to_zpk(pt->f_m, pt->Q_m, pt->g, rates.tau_f).poles;
    return {};
}

} // namespace

int count_unstable_open_poles(const gain_model& gain, const derived_rates& rates,
                              double margin) {
    if (std::holds_alternative<gain_unity>(gain) ||
        std::holds_alternative<gain_detuned>(gain))
        return 0;
    if (std::holds_alternative<gain_optimal>(gain))
        return 2; // one branch-point pole at +gamma_s, traversed twice by the loop
    int n = 0;
    for (const cplx& p : gain_poles(gain, rates))
        if (p.real() > -margin) n += 2;
    return n;
}

namespace {

int open_rhp_pole_count(const gain_model& gain, const derived_rates& rates) {
    if (std::holds_alternative<gain_optimal>(gain))
        return 1; // G^2 collapses to a single simple pole at +gamma_s
    int n = 0;
    for (const cplx& p : gain_poles(gain, rates))
        if (p.real() > 0.0) n += 2;
    return n;
}

double principal_step(double a, double b) {
    return std::remainder(b - a, 2.0 * std::numbers::pi);
}

struct mapped_path {
    std::vector<cplx> s;    // contour points
    std::vector<cplx> val;  // 1 + T_OL at each point
};

double winding_turns(const std::vector<cplx>& vals) {
    double total = 0.0;
    double prev = std::arg(vals.front());
    for (size_t i = 1; i < vals.size(); ++i) {
        const double cur = std::arg(vals[i]);
        total += principal_step(prev, cur);
        prev = cur;
    }
    return -total / (2.0 * std::numbers::pi); // clockwise positive
}

} // namespace

nyquist_report nyquist(const interferometer_config& c, const derived_rates& r,
                       const gain_model& gain, contour_spec spec, delay_mode mode) {
    const double omega_max =
        spec.omega_max > 0.0 ? spec.omega_max : 2.0 * std::numbers::pi / r.tau_s;
    const double w_seed = 1e-3;
    const double indent_radius = 1e-6 * r.gamma_s;

    auto f = [&](cplx s) { return 1.0 + open_loop(c, r, gain, s, mode); };

    // ascending imaginary-axis samples, log-spaced away from zero
    mapped_path path;
    path.s.reserve(2 * spec.n_axis + 1);
    for (int i = spec.n_axis - 1; i >= 0; --i) {
        const double w = w_seed * std::pow(omega_max / w_seed,
                                           static_cast<double>(i) / (spec.n_axis - 1));
        path.s.push_back(cplx(0.0, -w));
    }
    path.s.push_back(cplx(0.0, 0.0));
    for (int i = 0; i < spec.n_axis; ++i) {
        const double w = w_seed * std::pow(omega_max / w_seed,
                                           static_cast<double>(i) / (spec.n_axis - 1));
        path.s.push_back(cplx(0.0, w));
    }

    // indent around gain poles sitting on (or hugging) the imaginary axis
    for (const cplx& p : gain_poles(gain, r)) {
        if (std::abs(p.real()) > indent_radius) continue;
        if (std::abs(p.imag()) > omega_max) continue;
        const double w_p = p.imag();
        std::vector<cplx> kept;
        kept.reserve(path.s.size() + 65);
        bool inserted = false;
        for (const cplx& s : path.s) {
            if (std::abs(s.imag() - w_p) <= indent_radius && s.real() == 0.0) {
                if (!inserted) {
                    for (int j = 0; j <= 64; ++j) {
                        const double th = -std::numbers::pi / 2.0
                                        + std::numbers::pi * static_cast<double>(j) / 64.0;
                        kept.push_back(cplx(0.0, w_p)
                                       + indent_radius * std::exp(cplx(0.0, th)));
                    }
                    inserted = true;
                }
                continue;
            }
            kept.push_back(s);
        }
        path.s = std::move(kept);
    }

    path.val.resize(path.s.size());
    for (size_t i = 0; i < path.s.size(); ++i) path.val[i] = f(path.s[i]);

    // adaptive midpoint insertion where phase steps about -1 exceed the bound
    const double step_max = spec.step_deg * std::numbers::pi / 180.0;
    for (int round = 0; round < spec.max_rounds; ++round) {
        std::vector<size_t> bad;
        for (size_t i = 0; i + 1 < path.val.size(); ++i) {
            const double d = principal_step(std::arg(path.val[i]),
                                            std::arg(path.val[i + 1]));
            if (std::abs(d) > step_max) bad.push_back(i);
        }
        if (bad.empty()) break;
        if (path.s.size() + bad.size() > spec.max_points) break;
        mapped_path next;
        next.s.reserve(path.s.size() + bad.size());
        next.val.reserve(path.s.size() + bad.size());
        size_t bi = 0;
        for (size_t i = 0; i < path.s.size(); ++i) {
            next.s.push_back(path.s[i]);
            next.val.push_back(path.val[i]);
            if (bi < bad.size() && bad[bi] == i) {
                const cplx mid = 0.5 * (path.s[i] + path.s[i + 1]);
                next.s.push_back(mid);
                next.val.push_back(f(mid));
                ++bi;
            }
        }
        path = std::move(next);
    }

    const double n_axis_turns = winding_turns(path.val);

    double rho_min = std::numeric_limits<double>::infinity();
    for (const cplx& v : path.val) rho_min = std::min(rho_min, std::abs(v));

    // clockwise right-half-plane arc closing the contour
    std::vector<cplx> arc(spec.n_arc);
    for (int i = 0; i < spec.n_arc; ++i) {
        const double th = std::numbers::pi / 2.0
                        - std::numbers::pi * static_cast<double>(i) / (spec.n_arc - 1);
        arc[i] = f(omega_max * std::exp(cplx(0.0, th)));
    }
    const double n_arc_turns = winding_turns(arc);

    const double n_total = n_axis_turns + n_arc_turns;
    const long N = std::lround(n_total);
    if (std::abs(n_total - static_cast<double>(N)) > 0.2) {
        std::ostringstream msg;
        msg << "winding number did not settle to an integer (got " << n_total << ")";
        throw indeterminate_verdict(msg.str());
    }

    nyquist_report rep;
    rep.N = static_cast<int>(N);
    rep.P = open_rhp_pole_count(gain, r);
    rep.Z = rep.N + rep.P;
    rep.rho_min = rho_min;
    rep.stable = (rep.Z == 0);
    if (spec.keep_contour) {
        rep.contour.reserve(path.s.size());
        for (size_t i = 0; i < path.s.size(); ++i)
            rep.contour.emplace_back(path.s[i].imag(), path.val[i] - 1.0);
    }
    return rep;
}

} // namespace qnf
