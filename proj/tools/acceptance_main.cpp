#include "qnf/optimize.hpp"
#include "qnf/presets.hpp"
#include "qnf/ratfit.hpp"
#include "qnf/response.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace qnf;

namespace {

int pass_count = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s - %s\n", idx, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (ok) ++pass_count;
}

std::string num(double v, const char* spec = "%.6g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double to_db(double power_ratio) { return 10.0 * std::log10(power_ratio); }

struct band_result {
    double value;
    double db;
};

band_result enhancement(const interferometer_config& config, const gain_model& gain,
                        homodyne_choice homodyne, bool full_band) {
    const derived_rates rates = derive_rates(config);
    const double hi = full_band ? std::numbers::pi / rates.tau_s
                                : std::numbers::pi / (2.0 * rates.tau_s);
    const auto integral = integral_enhancement(config, rates, gain, homodyne,
                                               frequency_band{0.0, hi},
                                               delay_mode::exact);
    return {integral.normalized, to_db(integral.normalized)};
}

} // namespace

int main() {
    const interferometer_config ref;
    const derived_rates rates = derive_rates(ref);
    const double g_pt = pt_condition_coupling(rates);
    const auto per_freq = homodyne_choice::per_frequency();
    const auto global_phi = homodyne_choice::global_optimal();

    // 1. sensing-cavity bandwidth
    {
        const double f_hz = rates.gamma_s / (2.0 * std::numbers::pi);
        report(1, std::abs(f_hz - 14.91) <= 0.01,
               "gamma_s/(2 pi) = " + num(f_hz, "%.6f") + " Hz (need 14.91 +- 0.01)");
    }

    // 2. passive integral window and detuning spread
    {
        const double phis[] = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0};
        double lo = 1e300, hi = 0.0;
        std::string vals;
        bool in_window = true;
        for (double phi : phis) {
            const double v = enhancement(ref, gain_detuned{phi}, per_freq, false).value;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            in_window = in_window && v >= 0.5 && v <= 1.2;
            if (!vals.empty()) vals += ", ";
            vals += num(v, "%.4f");
        }
        const double spread = (hi - lo) / lo;
        const bool ok = in_window && spread < 0.25;
        report(2, ok,
               "passive I/I0 = {" + vals + "} (window [0.5, 1.2] " +
                   (in_window ? "holds" : "violated") + "); spread " +
                   num(100.0 * spread, "%.1f") + "% (need < 25%)");
    }

    // 3. dispersion-cancelling gain integral
    {
        const double v = enhancement(ref, gain_optimal{}, per_freq, false).value;
        report(3, std::abs(v - 200.0) <= 20.0,
               "optimal-gain I/I0 = " + num(v, "%.4f") + " (need 200 +- 10%)");
    }

    // 4. high-Q mechanical filter at the balanced-coupling point
    {
        const gain_model pt = gain_pt_symmetric{5e5, 1e10, g_pt};
        const auto r = enhancement(ref, pt, per_freq, true);
        const bool linear_ok = std::abs(r.value - 7.07) <= 0.05 * 7.07;
        const bool db_ok = std::abs(r.db - 8.5) <= 0.3;
        report(4, linear_ok || db_ok,
               "PT-limit I/I0 = " + num(r.value, "%.4f") + " = " + num(r.db, "%.4f") +
                   " dB (linear window " + (linear_ok ? "holds" : "missed") +
                   ", dB window " + (db_ok ? "holds" : "missed") + ")");
    }

    // 5. published-filter regression with stability margins
    {
        const gain_model l2 = gain_rational{table1_lossless_2()};
        const gain_model l3 = gain_rational{table1_lossless_3()};
        const double db2 = enhancement(ref, l2, global_phi, false).db;
        const double db3 = enhancement(ref, l3, global_phi, false).db;
        const nyquist_report rep2 = nyquist(ref, rates, l2, contour_spec{}, delay_mode::exact);
        const nyquist_report rep3 = nyquist(ref, rates, l3, contour_spec{}, delay_mode::exact);
        const bool db_ok = std::abs(db2 - 9.2) <= 0.5 && std::abs(db3 - 12.5) <= 0.5;
        const bool stable_ok = rep2.N == 0 && rep2.Z == 0 && rep3.N == 0 && rep3.Z == 0;
        const bool rho_ok = rep2.rho_min >= 1e-4 && rep3.rho_min >= 1e-4;
        report(5, db_ok && stable_ok && rho_ok,
               "2-pole " + num(db2, "%.3f") + " dB, 3-pole " + num(db3, "%.3f") +
                   " dB (need 9.2/12.5 +- 0.5); N = {" + std::to_string(rep2.N) + "," +
                   std::to_string(rep3.N) + "}, Z = {" + std::to_string(rep2.Z) + "," +
                   std::to_string(rep3.Z) + "}; rho_min = {" + num(rep2.rho_min, "%.3e") +
                   ", " + num(rep3.rho_min, "%.3e") + "} (need >= 1e-4)");
    }

    // 6. loss ladder and passive comparison
    {
        interferometer_config readout_loss = ref;
        readout_loss.Lambda_o = 0.3;
        interferometer_config full_loss = readout_loss;
        full_loss.Lambda_f = 0.002;
        full_loss.Lambda_s = 5e-5;

        const gain_model l3 = gain_rational{table1_lossless_3()};
        const gain_model y3 = gain_rational{table1_lossy_3()};
        const double base = enhancement(ref, l3, per_freq, false).value;
        const double with_readout = enhancement(readout_loss, l3, per_freq, false).value;
        const double with_all = enhancement(full_loss, y3, per_freq, false).value;
        const double drop1 = 100.0 * (1.0 - with_readout / base);
        const double drop2 = 100.0 * (1.0 - with_all / base);

        double best_passive = 0.0;
        for (double phi : {0.0, std::numbers::pi / 8.0, std::numbers::pi / 4.0,
                           3.0 * std::numbers::pi / 8.0, std::numbers::pi / 2.0})
            best_passive = std::max(
                best_passive, enhancement(ref, gain_detuned{phi}, per_freq, false).value);
        const double ratio = with_all / best_passive;

        const bool ok = std::abs(drop1 - 20.0) <= 5.0 && std::abs(drop2 - 34.0) <= 5.0 &&
                        std::abs(ratio - 12.0) <= 2.0;
        report(6, ok,
               "readout-loss drop " + num(drop1, "%.2f") + "% (need 20 +- 5), full-loss drop " +
                   num(drop2, "%.2f") + "% (need 34 +- 5), passive ratio " +
                   num(ratio, "%.2f") + " (need 12 +- 2)");
    }

    // 7. stability verdicts and contour-range invariance
    {
        std::string detail;
        bool ok = true;

        const nyquist_report opt2fsr =
            nyquist(ref, rates, gain_optimal{}, contour_spec{}, delay_mode::exact);
        const bool opt_ok = opt2fsr.N == 0 && opt2fsr.P == 1 && opt2fsr.Z == 1 && !opt2fsr.stable;
        ok = ok && opt_ok;
        detail += "optimal N,P,Z = " + std::to_string(opt2fsr.N) + "," +
                  std::to_string(opt2fsr.P) + "," + std::to_string(opt2fsr.Z) +
                  (opt_ok ? " (as required 0,1,1)" : " (need 0,1,1)");

        interferometer_config lossy = ref;
        lossy.Lambda_f = 0.002;
        lossy.Lambda_s = 5e-5;
        const struct {
            const char* label;
            interferometer_config config;
            gain_model gain;
        } rows[] = {
            {"lossless2", ref, gain_rational{table1_lossless_2()}},
            {"lossless3", ref, gain_rational{table1_lossless_3()}},
            {"lossy2", lossy, gain_rational{table1_lossy_2()}},
            {"lossy3", lossy, gain_rational{table1_lossy_3()}},
        };
        detail += "; rows stable/invariant:";
        for (const auto& row : rows) {
            const derived_rates rr = derive_rates(row.config);
            const nyquist_report narrow =
                nyquist(row.config, rr, row.gain, contour_spec{}, delay_mode::exact);
            contour_spec wide;
            wide.omega_max = 4.0 * std::numbers::pi / rr.tau_s;
            const nyquist_report doubled =
                nyquist(row.config, rr, row.gain, wide, delay_mode::exact);
            const bool row_stable = narrow.stable;
            const bool row_invariant =
                narrow.N == doubled.N && narrow.Z == doubled.Z && narrow.stable == doubled.stable;
            ok = ok && row_stable && row_invariant;
            detail += std::string(" ") + row.label + "=" + (row_stable ? "stable" : "unstable") +
                      "/" + (row_invariant ? "same" : ("N " + std::to_string(narrow.N) + "->" +
                                                       std::to_string(doubled.N)));
        }

        const nyquist_report opt4fsr = [&] {
            contour_spec wide;
            wide.omega_max = 4.0 * std::numbers::pi / rates.tau_s;
            return nyquist(ref, rates, gain_optimal{}, wide, delay_mode::exact);
        }();
        const bool opt_invariant = opt2fsr.N == opt4fsr.N && opt2fsr.Z == opt4fsr.Z;
        ok = ok && opt_invariant;
        detail += std::string(" optimal=") + (opt_invariant ? "same" : "changed");

        report(7, ok, detail);
    }

    // 8. optimizer reaches the published marks from both seeds
    {
        const zpk pt_seed = pt_to_zpk(5e5, 5e5, g_pt, rates.tau_f);
        const optimization_result from_pt = optimize_filter(ref, rates, pt_seed);
        const double pt_db = to_db(from_pt.best.normalized_integral);
        const bool pt_ok = from_pt.seed_feasible && pt_db >= 9.0 && from_pt.verdict.stable;

        const fit_result vf = seed_from_gopt(ref, rates, 3);
        const optimization_result from_vf = optimize_filter(ref, rates, vf.model);
        const double vf_db = to_db(from_vf.best.normalized_integral);
        const bool vf_ok = from_vf.seed_feasible && vf_db >= 12.0 && from_vf.verdict.stable;

        report(8, pt_ok && vf_ok,
               "PT seed -> " + num(pt_db, "%.3f") + " dB " +
                   (from_pt.verdict.stable ? "stable" : "unstable") +
                   " (need >= 9.0 stable); vectfit seed -> " + num(vf_db, "%.3f") + " dB " +
                   (from_vf.verdict.stable ? "stable" : "unstable") + " (need >= 12.0 stable)");
    }

    // 9. invariant suite
    {
        std::vector<std::string> broken;

        { // all-pass magnitude of the dispersion-cancelling gain
            double worst = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const double w = 1e-3 * std::pow(1e10, i / 999.0);
                worst = std::max(worst, std::abs(eval_gain(gain_optimal{}, cplx(0.0, w), rates)
                                                     .magnitude - 1.0));
            }
            if (worst > 1e-12) broken.push_back("|G_opt| drift " + num(worst, "%.1e"));
        }

        { // lossless passive vacuum channel is all-pass, added noise absent
            double worst = 0.0, worst_added = 0.0;
            for (int i = 0; i < 200; ++i) {
                const double w = 1e-2 * std::pow(1e8, i / 199.0);
                const auto tv = transfer_set(ref, rates, gain_unity{}, cplx(0.0, w),
                                             delay_mode::exact);
                worst = std::max(worst, std::abs(std::abs(tv.T_nq) - 1.0));
                worst_added = std::max({worst_added, std::abs(tv.T_na1), std::abs(tv.T_na2)});
            }
            if (worst > 1e-10) broken.push_back("passive |T_nq| drift " + num(worst, "%.1e"));
            if (worst_added != 0.0)
                broken.push_back("added noise at unit gain " + num(worst_added, "%.1e"));
        }

        { // zero-loss evaluation matches independently coded lossless forms
            double worst = 0.0;
            const gain_model gains[] = {gain_unity{}, gain_detuned{0.6}, gain_optimal{},
                                        gain_pt_symmetric{5e5, 5e5, g_pt}};
            for (const gain_model& gm : gains) {
                for (int i = 0; i < 50; ++i) {
                    const double w = 1e-1 * std::pow(1e6, i / 49.0);
                    const cplx s(0.0, w);
                    const auto tv = transfer_set(ref, rates, gm, s, delay_mode::exact);
                    const cplx g = eval_gain(gm, s, rates).value;
                    const cplx zf = std::exp(-s * rates.tau_f);
                    const cplx zs = std::exp(-s * rates.tau_s);
                    // group squares as in the production code: near dc the
                    // denominator cancels to ~1e-5, so association-order
                    // roundoff would otherwise swamp the 1e-12 agreement bar
                    const cplx g2 = g * g;
                    const cplx zf2 = zf * zf;
                    const cplx zs2 = zs * zs;
                    const cplx den = -1.0 + rates.r_CM * zs2 +
                                     g2 * rates.r_IM * zf2 * (rates.r_CM - zs2);
                    const cplx txi = -g * rates.t_CM * rates.t_IM * zf * zs / den;
                    const cplx tnq = (g2 * zf2 * (rates.r_CM - zs2) +
                                      rates.r_IM * (-1.0 + rates.r_CM * zs2)) / den;
                    const cplx K = std::sqrt(cplx(1.0 - std::norm(g), 0.0));
                    const cplx tna1 = g * K * rates.t_IM * zf2 * (rates.r_CM - zs2) / den;
                    const cplx tna2 = K * rates.t_IM * (-1.0 + rates.r_CM * zs2) / den;
                    worst = std::max({worst, std::abs(tv.T_xi - txi), std::abs(tv.T_nq - tnq),
                                      std::abs(tv.T_na1 - tna1), std::abs(tv.T_na2 - tna2),
                                      std::abs(tv.T_nLo), std::abs(tv.T_nLf),
                                      std::abs(tv.T_nLs)});
                }
            }
            if (worst > 1e-12) broken.push_back("zero-loss reduction drift " + num(worst, "%.1e"));
        }

        { // closed-form homodyne optimum vs brute force
            const gain_model gains[] = {gain_detuned{std::numbers::pi / 4.0},
                                        gain_rational{table1_lossless_3()}};
            const double omegas[] = {1.0, 30.0, rates.gamma_s, 500.0, 5000.0};
            double worst = 0.0;
            for (const gain_model& gm : gains)
                for (double w : omegas) {
                    const auto [phi_star, best] =
                        optimal_homodyne_at(ref, rates, gm, w, delay_mode::exact);
                    (void)phi_star;
                    double scanned = 0.0;
                    for (int i = 0; i < 10000; ++i) {
                        const double phi = std::numbers::pi * i / 10000.0;
                        scanned = std::max(
                            scanned, chi_sq_at(ref, rates, gm, w, phi, delay_mode::exact).chi_sq);
                    }
                    worst = std::max(worst, (scanned - best) / best);
                }
            if (worst > 1e-6) broken.push_back("homodyne optimum beaten by " + num(worst, "%.1e"));
        }

        { // exact rational recovery
            zpk target;
            target.zeros = {cplx(-30.0, 60.0), cplx(-120.0, 10.0)};
            target.poles = {cplx(-40.0, 150.0), cplx(-70.0, -90.0)};
            target.k = 1.35;
            fit_problem prob;
            prob.n_poles = 2;
            for (int i = 0; i < 200; ++i) {
                const double w = 1.0 * std::pow(1e4, i / 199.0);
                prob.s.emplace_back(0.0, w);
                prob.f.push_back(zpk_eval(target, prob.s.back()));
            }
            const fit_result fit = vector_fit(prob);
            auto sorted = [](std::vector<cplx> v) {
                std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
                    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
                });
                return v;
            };
            const auto got = sorted(fit.model.poles);
            const auto want = sorted(target.poles);
            double worst = 0.0;
            for (size_t i = 0; i < want.size(); ++i)
                worst = std::max(worst, std::abs(got[i] - want[i]) / std::abs(want[i]));
            if (worst > 1e-6) broken.push_back("exact-pole recovery off by " + num(worst, "%.1e"));
        }

        { // banded fit of the dispersion-cancelling gain
            fit_problem prob;
            prob.n_poles = 3;
            const double lo = rates.gamma_s * (1.0 + 1e-6);
            const double hi = 2.0 * std::numbers::pi * 1e5;
            for (int i = 0; i < 400; ++i) {
                const double w = lo * std::pow(hi / lo, i / 399.0);
                prob.s.emplace_back(0.0, w);
                prob.f.push_back(eval_gain(gain_optimal{}, prob.s.back(), rates).value);
            }
            const fit_result fit = vector_fit(prob);
            bool poles_stable = true;
            for (const cplx& p : fit.model.poles) poles_stable = poles_stable && p.real() < 0.0;
            if (fit.max_rel_err >= 0.05)
                broken.push_back("banded fit error " + num(100.0 * fit.max_rel_err, "%.2f") + "%");
            if (!poles_stable) broken.push_back("banded fit produced unstable poles");
        }

        { // closed-form envelopes against the full model in their corner bands
            const double w_nb = rates.gamma_s * rates.t_IM * rates.t_IM / 4.0;
            double worst_nb = 0.0;
            for (int i = 0; i < 9; ++i) {
                const double w = 0.1 * w_nb * std::pow(100.0, i / 8.0);
                const double full = to_db(optimal_homodyne_at(ref, rates,
                                                              gain_detuned{std::numbers::pi / 2.0},
                                                              w, delay_mode::exact)
                                              .second);
                const double approx = 20.0 * std::log10(chi_approx(approx_kind::nb, rates, w));
                worst_nb = std::max(worst_nb, std::abs(full - approx));
            }
            double worst_opt = 0.0;
            for (int i = 0; i < 7; ++i) {
                const double w = 0.1 * rates.gamma_s * std::pow(10.0, i / 6.0);
                const double full = to_db(
                    optimal_homodyne_at(ref, rates, gain_optimal{}, w, delay_mode::exact).second);
                const double approx = 20.0 * std::log10(chi_approx(approx_kind::opt, rates, w));
                worst_opt = std::max(worst_opt, std::abs(full - approx));
            }
            if (worst_nb > 1.0)
                broken.push_back("narrowband envelope off by " + num(worst_nb, "%.2f") + " dB");
            if (worst_opt > 1.0)
                broken.push_back("dispersion-cancelling envelope off by " +
                                 num(worst_opt, "%.2f") + " dB");
        }

        std::string detail;
        if (broken.empty()) {
            detail = "all 8 invariant groups hold";
        } else {
            detail = "violated:";
            for (const std::string& b : broken) detail += " [" + b + "]";
        }
        report(9, broken.empty(), detail);
    }

    // 10. relative-enhancement spot values
    {
        const double at_zero = chi_rel(0.0, rates.t_IM);
        const double at_centi = chi_rel(0.01, rates.t_IM);
        const bool ok = at_zero == 1.0 && std::abs(at_centi - 0.242) <= 1e-3;
        report(10, ok,
               "chi_rel(0) = " + num(at_zero, "%.12g") + " (need 1 exactly), chi_rel(0.01) = " +
                   num(at_centi, "%.6f") + " (need 0.242 +- 1e-3)");
    }

    std::printf("summary: %d/10 criteria pass\n", pass_count);
    return 0;
}
