#include "qnf/presets.hpp"

#include <numbers>
#include <sstream>

namespace qnf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

cplx hz(double re, double im) { return {re * two_pi, im * two_pi}; }

gain_model pt_limit_gain(const interferometer_config& config, double Q_m) {
    const derived_rates rates = derive_rates(config);
    return gain_pt_symmetric{5e5, Q_m, pt_condition_coupling(rates)};
}

interferometer_config cavity_loss_config() {
    interferometer_config c;
    c.Lambda_f = 0.002;
    c.Lambda_s = 5e-5;
    return c;
}

} // namespace

zpk table1_lossless_2() {
    zpk m;
    m.zeros = {hz(14.82, 17.75e4), hz(-14.79, 5.16e-3)};
    m.poles = {hz(-1.0e-2, -3.61e-4), hz(-7.39e-1, 18.13e4)};
    m.k = 1.019389;
    return m;
}

zpk table1_lossless_3() {
    zpk m;
    m.zeros = {hz(-21.33, 0.0), hz(-6.91, 12.78), hz(-6.91, -12.78)};
    m.poles = {hz(-8.56, -7.48e-4), hz(-2.62, 11.31e-5), hz(-9.33, 9.90e-4)};
    m.k = 0.998930;
    return m;
}

zpk table1_lossy_2() {
    zpk m;
    m.zeros = {hz(10.84, 9.98e5), hz(-14.78, -3.49e-4)};
    m.poles = {hz(-1.0e-2, -2.76e-5), hz(-19.36e-2, 10.03e5)};
    m.k = 1.003015;
    return m;
}

zpk table1_lossy_3() {
    zpk m;
    m.zeros = {hz(-21.09, 0.0), hz(-7.18, 12.30), hz(-7.18, -12.30)};
    m.poles = {hz(-7.26, 8.30e-4), hz(-2.20, 16.66e-5), hz(-11.37, 10.38e-4)};
    m.k = 0.999188;
    return m;
}

std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4", "fig5", "fig7", "table1"};
}

std::vector<preset_curve> preset_curves(const std::string& name) {
    const interferometer_config ref;
    std::vector<preset_curve> out;

    if (name == "fig2") {
        const double phis[] = {0.0, std::numbers::pi / 8.0, std::numbers::pi / 4.0,
                               3.0 * std::numbers::pi / 8.0, std::numbers::pi / 2.0};
        const char* labels[] = {"detuned_0", "detuned_pi8", "detuned_pi4",
                                "detuned_3pi8", "detuned_pi2"};
        for (int i = 0; i < 5; ++i)
            out.push_back({labels[i], ref, gain_detuned{phis[i]}});
        out.push_back({"optimal", ref, gain_optimal{}});
        return out;
    }
    if (name == "fig3") {
        out.push_back({"lossless2", ref, gain_rational{table1_lossless_2()}});
        out.push_back({"lossless3", ref, gain_rational{table1_lossless_3()}});
        out.push_back({"pt_limit", ref, pt_limit_gain(ref, 1e10)});
        return out;
    }
    if (name == "fig4") {
        interferometer_config readout_loss = ref;
        readout_loss.Lambda_o = 0.3;
        interferometer_config full_loss = cavity_loss_config();
        full_loss.Lambda_o = 0.3;
        out.push_back({"no_loss", ref, gain_rational{table1_lossless_3()}});
        out.push_back({"output_loss", readout_loss, gain_rational{table1_lossless_3()}});
        out.push_back({"full_loss", full_loss, gain_rational{table1_lossy_3()}});
        return out;
    }
    if (name == "fig5") {
        out.push_back({"full_nb", ref, gain_detuned{std::numbers::pi / 2.0}});
        out.push_back({"full_bb", ref, gain_detuned{0.0}});
        out.push_back({"full_opt", ref, gain_optimal{}});
        out.push_back({"full_pt", ref, pt_limit_gain(ref, 1e10)});
        const struct { const char* label; approx_kind kind; } envs[] = {
            {"approx_nb", approx_kind::nb},   {"approx_bb", approx_kind::bb},
            {"approx_bb2", approx_kind::bb2}, {"approx_opt", approx_kind::opt},
            {"approx_opt2", approx_kind::opt2}, {"approx_pt", approx_kind::pt_infq},
        };
        for (const auto& e : envs)
            out.push_back({e.label, ref, gain_unity{}, true, e.kind});
        return out;
    }
    if (name == "fig7") {
        const struct { const char* label; double q; } rows[] = {
            {"pt_q1e3", 1e3}, {"pt_q1e4", 1e4}, {"pt_q1e5", 1e5}, {"pt_q1e10", 1e10},
        };
        for (const auto& r : rows)
            out.push_back({r.label, ref, pt_limit_gain(ref, r.q)});
        out.push_back({"approx_pt", ref, gain_unity{}, true, approx_kind::pt_infq});
        return out;
    }
    if (name == "table1") {
        const interferometer_config lossy = cavity_loss_config();
        out.push_back({"lossless2", ref, gain_rational{table1_lossless_2()}, false,
                       approx_kind::nb, true});
        out.push_back({"lossless3", ref, gain_rational{table1_lossless_3()}, false,
                       approx_kind::nb, true});
        out.push_back({"lossy2", lossy, gain_rational{table1_lossy_2()}, false,
                       approx_kind::nb, true});
        out.push_back({"lossy3", lossy, gain_rational{table1_lossy_3()}, false,
                       approx_kind::nb, true});
        out.push_back({"pt_limit", ref, pt_limit_gain(ref, 1e10)});
        return out;
    }

    std::ostringstream msg;
    msg << "unknown preset \"" << name << "\"; expected one of";
    for (const std::string& n : preset_names()) msg << ' ' << n;
    throw input_error(msg.str());
}

} // namespace qnf
