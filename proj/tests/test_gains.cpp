#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qnf/gains.hpp"
#include "qnf/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qnf;

namespace {
const interferometer_config ref;
const derived_rates rates = derive_rates(ref);
} // namespace

TEST_CASE("unity and detuned gains") {
    CHECK(eval_gain(gain_unity{}, cplx(0.0, 123.0), rates).value == cplx(1.0, 0.0));

    const double phi = 0.7;
    const gain_value g = eval_gain(gain_detuned{phi}, cplx(0.0, -5.0), rates);
    CHECK(g.magnitude == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.phase == doctest::Approx(phi).epsilon(1e-15));
    CHECK(eval_gain(gain_detuned{0.0}, cplx(2.0, 3.0), rates).value == cplx(1.0, 0.0));
}

TEST_CASE("dispersion-cancelling gain on the imaginary axis") {
    // all-pass magnitude
    for (int i = 0; i < 1000; ++i) {
        const double w = 1e-3 * std::pow(1e10, i / 999.0);
        CHECK(eval_gain(gain_optimal{}, cplx(0.0, w), rates).magnitude ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    // quarter-wave lag at the cavity bandwidth
    const gain_value at_gamma = eval_gain(gain_optimal{}, cplx(0.0, rates.gamma_s), rates);
    CHECK(at_gamma.phase == doctest::Approx(-std::numbers::pi / 4.0).epsilon(1e-12));
    // approaches a pure integrator-like lag toward zero frequency
    const gain_value near_dc = eval_gain(gain_optimal{}, cplx(0.0, 1e-9), rates);
    CHECK(near_dc.phase == doctest::Approx(-std::numbers::pi / 2.0).epsilon(1e-6));
    // squared gain at s = 0 flips the sign of the signal path
    const cplx at_zero = eval_gain(gain_optimal{}, cplx(0.0, 0.0), rates).value;
    CHECK((at_zero * at_zero).real() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs((at_zero * at_zero).imag()) < 1e-15);

    CHECK_THROWS_AS(eval_gain(gain_optimal{}, cplx(rates.gamma_s, 0.0), rates),
                    singular_evaluation);
    CHECK_THROWS_AS(eval_gain(gain_optimal{}, cplx(-rates.gamma_s, 0.0), rates),
                    singular_evaluation);
}

TEST_CASE("mechanical filter gain at balanced coupling") {
    const double g_pt = pt_condition_coupling(rates);

    // dc value 1 + gamma_s / gamma_m for the reference mechanical linewidth
    const gain_value dc =
        eval_gain(gain_pt_symmetric{5e5, 5e5, g_pt}, cplx(0.0, 0.0), rates);
    CHECK(dc.value.real() == doctest::Approx(30.820907245223427).epsilon(1e-9));
    // dc response is real only in the infinite-Q limit; at Q = 5e5 the residual
    // quadrature is 4 g^2 tau_f omega_m / (4 omega_m^2 + gamma_m^2) ~ 1.5e-5
    CHECK(std::abs(dc.value.imag()) < 1e-6 * std::abs(dc.value.real()));

    // phase tracks the dispersion-cancelling gain above the mechanical linewidth
    const gain_model pt = gain_pt_symmetric{5e5, 1e10, g_pt};
    const double lo = 10.0 * rates.gamma_s;
    const double hi = 0.1 * 2.0 * std::numbers::pi * 5e5;
    for (int i = 0; i < 50; ++i) {
        const double w = lo * std::pow(hi / lo, i / 49.0);
        const double a = eval_gain(pt, cplx(0.0, w), rates).phase;
        const double b = eval_gain(gain_optimal{}, cplx(0.0, w), rates).phase;
        CHECK(std::abs(std::remainder(a - b, 2.0 * std::numbers::pi)) <
              std::numbers::pi / 180.0);
    }
}

TEST_CASE("rational form of the mechanical gain matches its closed form") {
    const double g_pt = pt_condition_coupling(rates);
    const gain_model pt = gain_pt_symmetric{5e5, 5e5, g_pt};
    const zpk model = pt_to_zpk(5e5, 5e5, g_pt, rates.tau_f);

    CHECK(model.zeros.size() == 2);
    CHECK(model.poles.size() == 2);
    CHECK(model.k == 1.0);
    const double gamma_m = 2.0 * std::numbers::pi * 5e5 / (2.0 * 5e5);
    CHECK(model.poles[0].real() == doctest::Approx(-gamma_m).epsilon(1e-12));

    std::mt19937 rng(20240811u);
    for (int i = 0; i < 200; ++i) {
        const double mag = 1e-2 * std::pow(1e9, rng() / 4294967296.0);
        const double ang = 2.0 * std::numbers::pi * (rng() / 4294967296.0);
        const cplx s = mag * std::exp(cplx(0.0, ang));
        const cplx direct = eval_gain(pt, s, rates).value;
        const cplx rational = zpk_eval(model, s);
        CHECK(std::abs(direct - rational) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("zpk evaluation") {
    zpk m;
    m.zeros = {cplx(-1.0, 0.0)};
    m.poles = {cplx(-2.0, 0.0)};
    m.k = 3.0;
    CHECK(zpk_eval(m, cplx(0.0, 0.0)) == cplx(1.5, 0.0));
    CHECK_THROWS_AS(zpk_eval(m, cplx(-2.0, 0.0)), singular_evaluation);

    // published 3-pole design has a large dc boost
    CHECK(std::abs(zpk_eval(table1_lossless_3(), cplx(0.0, 0.0))) ==
          doctest::Approx(21.4936).epsilon(1e-3));
}

TEST_CASE("gain_value fields are consistent") {
    const gain_value g = eval_gain(gain_detuned{1.1}, cplx(0.0, 7.0), rates);
    const cplx rebuilt = g.magnitude * std::exp(cplx(0.0, g.phase));
    CHECK(std::abs(rebuilt - g.value) < 1e-14);
}
