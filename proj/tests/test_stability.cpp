#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qnf/presets.hpp"
#include "qnf/stability.hpp"

#include <cmath>
#include <numbers>

using namespace qnf;

namespace {

const interferometer_config ref;
const derived_rates rates = derive_rates(ref);

interferometer_config cavity_losses() {
    interferometer_config c;
    c.Lambda_f = 0.002;
    c.Lambda_s = 5e-5;
    return c;
}

} // namespace

TEST_CASE("open-loop value composes reflection, delays, and gain") {
    const cplx s(0.0, 321.0);
    const gain_model g = gain_detuned{0.4};
    const cplx got = open_loop(ref, rates, g, s, delay_mode::exact);

    const cplx zs2 = std::exp(-2.0 * s * rates.tau_s);
    const cplx zf2 = std::exp(-2.0 * s * rates.tau_f);
    const cplx gv = std::exp(cplx(0.0, 0.4));
    const cplx want =
        rates.r_IM * gv * gv * zf2 * (zs2 - rates.r_CM) / (1.0 - rates.r_CM * zs2);
    CHECK(std::abs(got - want) < 1e-14 * std::abs(want));
}

TEST_CASE("margin-aware open-loop pole counts") {
    const double margin = 2e-2 * std::numbers::pi;
    CHECK(count_unstable_open_poles(gain_unity{}, rates, margin) == 0);
    CHECK(count_unstable_open_poles(gain_detuned{1.0}, rates, margin) == 0);
    CHECK(count_unstable_open_poles(gain_optimal{}, rates, margin) == 2);

    zpk m;
    m.zeros = {cplx(-1.0, 0.0), cplx(-1.0, 0.0), cplx(-1.0, 0.0)};
    m.poles = {cplx(-1.0, 0.0), cplx(1.0, 5.0), cplx(-0.01, 3.0)};
    // +1 is beyond the axis, -0.01 sits inside the margin band: both count twice
    CHECK(count_unstable_open_poles(gain_rational{m}, rates, margin) == 4);

    const double g_pt = pt_condition_coupling(rates);
    // heavy mechanical damping keeps the poles clear of the margin
    CHECK(count_unstable_open_poles(gain_pt_symmetric{5e5, 5e5, g_pt}, rates, margin) == 0);
    // vanishing damping parks them inside it
    CHECK(count_unstable_open_poles(gain_pt_symmetric{5e5, 1e10, g_pt}, rates, margin) == 4);
}

TEST_CASE("passive loops are stable") {
    const nyquist_report rep = nyquist(ref, rates, gain_unity{}, contour_spec{},
                                       delay_mode::exact);
    CHECK(rep.N == 0);
    CHECK(rep.P == 0);
    CHECK(rep.Z == 0);
    CHECK(rep.stable);
    CHECK(rep.rho_min > 0.0);
}

TEST_CASE("dispersion-cancelling gain closes an unstable loop without encirclements") {
    const nyquist_report rep = nyquist(ref, rates, gain_optimal{}, contour_spec{},
                                       delay_mode::exact);
    CHECK(rep.N == 0);
    CHECK(rep.P == 1);
    CHECK(rep.Z == 1);
    CHECK_FALSE(rep.stable);
}

TEST_CASE("published lossless filters close stable loops") {
    for (const zpk& m : {table1_lossless_2(), table1_lossless_3()}) {
        const nyquist_report rep = nyquist(ref, rates, gain_rational{m}, contour_spec{},
                                           delay_mode::exact);
        CHECK(rep.N == 0);
        CHECK(rep.P == 0);
        CHECK(rep.Z == 0);
        CHECK(rep.stable);
    }
}

TEST_CASE("three-pole margin and loss sensitivity") {
    // closest approach of the lossless 3-pole loop to the critical point
    const nyquist_report rep = nyquist(ref, rates, gain_rational{table1_lossless_3()},
                                       contour_spec{}, delay_mode::exact);
    CHECK(rep.rho_min == doctest::Approx(5.935e-5).epsilon(0.05));

    // the lossy 3-pole design goes unstable under its own cavity losses
    const interferometer_config lossy = cavity_losses();
    const derived_rates lr = derive_rates(lossy);
    const nyquist_report lossy_rep = nyquist(lossy, lr, gain_rational{table1_lossy_3()},
                                             contour_spec{}, delay_mode::exact);
    CHECK(lossy_rep.N == 2);
    CHECK(lossy_rep.Z == 2);
    CHECK_FALSE(lossy_rep.stable);
}

TEST_CASE("axis truncation changes the two-pole verdict") {
    contour_spec wide;
    wide.omega_max = 4.0 * std::numbers::pi / rates.tau_s;
    const nyquist_report narrow = nyquist(ref, rates, gain_rational{table1_lossless_2()},
                                          contour_spec{}, delay_mode::exact);
    const nyquist_report doubled = nyquist(ref, rates, gain_rational{table1_lossless_2()},
                                           wide, delay_mode::exact);
    CHECK(narrow.N == 0);
    CHECK(doubled.N == 1); // a second-band resonance enters the widened contour
}

TEST_CASE("contour retention") {
    contour_spec spec;
    spec.keep_contour = true;
    const nyquist_report rep = nyquist(ref, rates, gain_unity{}, spec, delay_mode::exact);
    CHECK(rep.contour.size() >= 24001);
    CHECK(rep.contour.front().first ==
          doctest::Approx(-2.0 * std::numbers::pi / rates.tau_s).epsilon(1e-12));
    CHECK(rep.contour.back().first ==
          doctest::Approx(2.0 * std::numbers::pi / rates.tau_s).epsilon(1e-12));

    const nyquist_report bare = nyquist(ref, rates, gain_unity{}, contour_spec{},
                                        delay_mode::exact);
    CHECK(bare.contour.empty());
    CHECK(bare.N == rep.N);
    CHECK(bare.rho_min == doctest::Approx(rep.rho_min).epsilon(1e-12));
}
