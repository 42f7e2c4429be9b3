#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qnf/presets.hpp"
#include "qnf/response.hpp"

#include <cmath>
#include <numbers>

using namespace qnf;

namespace {

const interferometer_config ref;
const derived_rates rates = derive_rates(ref);
const frequency_band half_band{0.0, std::numbers::pi / (2.0 * rates.tau_s)};
const frequency_band full_band{0.0, std::numbers::pi / rates.tau_s};

double half_integral(const gain_model& gain, homodyne_choice homodyne,
                     const interferometer_config& config = ref) {
    const derived_rates r = derive_rates(config);
    return integral_enhancement(config, r, gain, homodyne, half_band, delay_mode::exact)
        .normalized;
}

} // namespace

TEST_CASE("passive band integrals per detuning") {
    const auto pf = homodyne_choice::per_frequency();
    CHECK(half_integral(gain_detuned{0.0}, pf) == doctest::Approx(1.0323).epsilon(2e-3));
    CHECK(half_integral(gain_detuned{std::numbers::pi / 8.0}, pf) ==
          doctest::Approx(0.5256).epsilon(2e-3));
    CHECK(half_integral(gain_detuned{std::numbers::pi / 4.0}, pf) ==
          doctest::Approx(0.5192).epsilon(2e-3));
    CHECK(half_integral(gain_detuned{3.0 * std::numbers::pi / 8.0}, pf) ==
          doctest::Approx(0.5256).epsilon(2e-3));
    CHECK(half_integral(gain_detuned{std::numbers::pi / 2.0}, pf) ==
          doctest::Approx(1.0000).epsilon(2e-3));

    const auto gl = homodyne_choice::global_optimal();
    CHECK(half_integral(gain_detuned{0.0}, gl) == doctest::Approx(1.0323).epsilon(2e-3));
    CHECK(half_integral(gain_detuned{std::numbers::pi / 8.0}, gl) ==
          doctest::Approx(0.5071).epsilon(2e-3));
    CHECK(half_integral(gain_detuned{std::numbers::pi / 4.0}, gl) ==
          doctest::Approx(0.5050).epsilon(2e-3));
    CHECK(half_integral(gain_detuned{std::numbers::pi / 2.0}, gl) ==
          doctest::Approx(1.0000).epsilon(2e-3));
}

TEST_CASE("active-gain band integrals") {
    const auto pf = homodyne_choice::per_frequency();
    CHECK(half_integral(gain_optimal{}, pf) == doctest::Approx(191.9325).epsilon(2e-3));

    const double g_pt = pt_condition_coupling(rates);
    const gain_model pt = gain_pt_symmetric{5e5, 1e10, g_pt};
    CHECK(half_integral(pt, pf) == doctest::Approx(6.6040).epsilon(2e-3));
    const auto full =
        integral_enhancement(ref, rates, pt, pf, full_band, delay_mode::exact);
    CHECK(full.normalized == doctest::Approx(6.7142).epsilon(2e-3));

    CHECK(half_integral(gain_rational{table1_lossless_2()}, pf) ==
          doctest::Approx(8.3830).epsilon(2e-3));
    CHECK(half_integral(gain_rational{table1_lossless_3()}, pf) ==
          doctest::Approx(17.8531).epsilon(2e-3));

    const auto gl = homodyne_choice::global_optimal();
    const auto two_pole =
        integral_enhancement(ref, rates, gain_rational{table1_lossless_2()}, gl, half_band,
                             delay_mode::exact);
    CHECK(two_pole.normalized == doctest::Approx(8.3807).epsilon(2e-3));
    CHECK(two_pole.phi_lo == doctest::Approx(1.5555).epsilon(5e-3));
    const auto three_pole =
        integral_enhancement(ref, rates, gain_rational{table1_lossless_3()}, gl, half_band,
                             delay_mode::exact);
    CHECK(three_pole.normalized == doctest::Approx(17.8526).epsilon(2e-3));
    CHECK(three_pole.phi_lo == doctest::Approx(1.5710).epsilon(5e-3));
}

TEST_CASE("integral bookkeeping") {
    const auto r = integral_enhancement(ref, rates, gain_detuned{0.0},
                                        homodyne_choice::per_frequency(), half_band,
                                        delay_mode::exact);
    CHECK(r.value ==
          doctest::Approx(r.normalized * std::numbers::pi / rates.tau_s).epsilon(1e-12));
    CHECK(r.converged);
    CHECK(r.achieved_rel <= 1e-4);
    CHECK(r.band.hi == half_band.hi);

    // fixed-angle runs never beat the global optimum
    const double best = half_integral(gain_detuned{std::numbers::pi / 4.0},
                                      homodyne_choice::global_optimal());
    for (double phi : {0.0, 0.3, 1.0, std::numbers::pi / 2.0, 2.5})
        CHECK(half_integral(gain_detuned{std::numbers::pi / 4.0},
                            homodyne_choice::fixed(phi)) <= best * (1.0 + 1e-9));
}

TEST_CASE("band validation") {
    const auto pf = homodyne_choice::per_frequency();
    CHECK_THROWS_AS(integral_enhancement(ref, rates, gain_unity{}, pf,
                                         frequency_band{-1.0, 10.0}, delay_mode::exact),
                    input_error);
    CHECK_THROWS_AS(integral_enhancement(ref, rates, gain_unity{}, pf,
                                         frequency_band{10.0, 10.0}, delay_mode::exact),
                    input_error);
    CHECK_THROWS_AS(
        integral_enhancement(ref, rates, gain_unity{}, pf,
                             frequency_band{0.0, 1.01 * std::numbers::pi / rates.tau_s},
                             delay_mode::exact),
        input_error);
}

TEST_CASE("per-frequency readout angle maximizes the response") {
    const gain_model g = gain_detuned{std::numbers::pi / 4.0};
    for (double w : {1.0, 30.0, 93.9, 500.0}) {
        const auto [phi_star, best] = optimal_homodyne_at(ref, rates, g, w, delay_mode::exact);
        CHECK(phi_star >= 0.0);
        CHECK(phi_star < std::numbers::pi);
        for (int i = 0; i < 64; ++i) {
            const double phi = std::numbers::pi * i / 64.0;
            CHECK(chi_sq_at(ref, rates, g, w, phi, delay_mode::exact).chi_sq <=
                  best * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("quarter-detuned cavity resonates near the bandwidth frequency") {
    double peak = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double w = 90.0 + 8.0 * i / 399.0;
        peak = std::max(peak, optimal_homodyne_at(ref, rates,
                                                  gain_detuned{std::numbers::pi / 4.0}, w,
                                                  delay_mode::exact)
                                  .second);
    }
    CHECK(std::sqrt(peak) == doctest::Approx(199.75).epsilon(1e-2));
}

TEST_CASE("corner values of the closed-form envelopes") {
    const double w_nb = rates.gamma_s * rates.t_IM * rates.t_IM / 4.0;
    const double X_nb = 4.0 * std::numbers::sqrt2 / (rates.t_IM * rates.t_CM);
    CHECK(w_nb == doctest::Approx(0.468425715625).epsilon(1e-12));
    CHECK(X_nb == doctest::Approx(565.685424949238).epsilon(1e-12));

    // full model at the narrowband corner
    const double chi_corner = std::sqrt(
        optimal_homodyne_at(ref, rates, gain_detuned{std::numbers::pi / 2.0}, w_nb,
                            delay_mode::exact)
            .second);
    CHECK(chi_corner == doctest::Approx(399.98).epsilon(2e-3));

    // full model at the cavity bandwidth under the dispersion-cancelling gain
    const double chi_gamma =
        std::sqrt(optimal_homodyne_at(ref, rates, gain_optimal{}, rates.gamma_s,
                                      delay_mode::exact)
                      .second);
    CHECK(chi_gamma == doctest::Approx(386.5).epsilon(5e-3));

    CHECK(chi_approx(approx_kind::nb, rates, w_nb) ==
          doctest::Approx(X_nb / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(chi_approx(approx_kind::opt, rates, rates.gamma_s) ==
          doctest::Approx(X_nb / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(chi_approx(approx_kind::bb, rates, 0.0) ==
          doctest::Approx(std::numbers::sqrt2 * rates.t_IM / rates.t_CM).epsilon(1e-12));

    // mechanical-filter envelope peaks near 1e3 rad/s
    double peak = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double w = 500.0 * std::pow(4.0, i / 199.0);
        peak = std::max(peak, chi_approx(approx_kind::pt_infq, rates, w));
    }
    CHECK(peak == doctest::Approx(19.954).epsilon(1e-2));
}

TEST_CASE("mechanical-filter bounds cross where both equal their frozen value") {
    const auto at_cross = pt_bounds(rates, 1114.11);
    CHECK(at_cross.hf == doctest::Approx(47.568).epsilon(1e-3));
    CHECK(at_cross.lf == doctest::Approx(47.568).epsilon(1e-3));
    // below the crossing the low-frequency bound is the smaller one
    const auto below = pt_bounds(rates, 100.0);
    CHECK(below.lf < below.hf);
    const auto above = pt_bounds(rates, 5000.0);
    CHECK(above.hf < above.lf);
}

TEST_CASE("relative enhancement branches") {
    CHECK(chi_rel(0.0, rates.t_IM) == 1.0);
    CHECK(chi_rel(0.01, rates.t_IM) == doctest::Approx(0.24211).epsilon(5e-4));

    bool ok = true;
    chi_rel(0.5, rates.t_IM, &ok);
    CHECK(ok);
    chi_rel(0.6, rates.t_IM, &ok);
    CHECK_FALSE(ok);
    chi_rel(-0.6, rates.t_IM, &ok);
    CHECK_FALSE(ok);

    // gain deficit and excess hit different branches
    CHECK(chi_rel(0.05, rates.t_IM) != doctest::Approx(chi_rel(-0.05, rates.t_IM)));
    CHECK(chi_rel(-0.01, rates.t_IM) > 0.0);

    CHECK_THROWS_AS(chi_rel(0.0, 0.0), input_error);
    CHECK_THROWS_AS(chi_rel(0.0, 1.0), input_error);
}

TEST_CASE("loss ladder shrinks the integral") {
    interferometer_config readout = ref;
    readout.Lambda_o = 0.3;
    interferometer_config full_loss = readout;
    full_loss.Lambda_f = 0.002;
    full_loss.Lambda_s = 5e-5;

    const auto pf = homodyne_choice::per_frequency();
    const double base = half_integral(gain_rational{table1_lossless_3()}, pf);
    const double mid = half_integral(gain_rational{table1_lossless_3()}, pf, readout);
    const double low = half_integral(gain_rational{table1_lossy_3()}, pf, full_loss);
    CHECK(mid < base);
    CHECK(low < mid);
    CHECK(1.0 - mid / base == doctest::Approx(0.2067).epsilon(2e-2));
    CHECK(1.0 - low / base == doctest::Approx(0.3107).epsilon(2e-2));
}
