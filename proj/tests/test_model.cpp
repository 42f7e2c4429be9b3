#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qnf/model.hpp"

#include <cmath>
#include <numbers>

using namespace qnf;

TEST_CASE("reference rates") {
    const interferometer_config c;
    const derived_rates r = derive_rates(c);

    CHECK(r.tau_s == doctest::Approx(1.3342563807926082e-5).epsilon(1e-14));
    CHECK(r.tau_f == doctest::Approx(1.3342563807926082e-7).epsilon(1e-14));
    CHECK(r.gamma_s == doctest::Approx(93.685143125).epsilon(1e-12));
    CHECK(r.gamma_f == doctest::Approx(37474.05725).epsilon(1e-12));
    CHECK(r.gamma_s / (2.0 * std::numbers::pi) ==
          doctest::Approx(14.910453622615444).epsilon(1e-12));
    CHECK(r.t_IM == doctest::Approx(std::sqrt(0.02)).epsilon(1e-15));
    CHECK(r.r_IM == doctest::Approx(std::sqrt(0.98)).epsilon(1e-15));
    CHECK(r.t_CM == doctest::Approx(std::sqrt(0.005)).epsilon(1e-15));
    CHECK(r.r_CM == doctest::Approx(std::sqrt(0.995)).epsilon(1e-15));
    CHECK(r.omega_s ==
          doctest::Approx(std::sqrt(0.005 / (4.0 * r.tau_f * r.tau_s))).epsilon(1e-14));
    CHECK(r.eta == 1.0);

    CHECK(r.t_IM * r.t_IM + r.r_IM * r.r_IM == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.t_CM * r.t_CM + r.r_CM * r.r_CM == doctest::Approx(1.0).epsilon(1e-15));

    // passive-bound scale pi / tau_s
    CHECK(std::numbers::pi / r.tau_s == doctest::Approx(235456.44591360664).epsilon(1e-12));
}

TEST_CASE("output efficiency tracks readout loss") {
    interferometer_config c;
    c.Lambda_o = 0.3;
    CHECK(derive_rates(c).eta == doctest::Approx(std::sqrt(0.7)).epsilon(1e-15));
}

TEST_CASE("validation rejects out-of-range parameters") {
    interferometer_config c;
    CHECK_NOTHROW(validate(c));

    c = {};
    c.L_s = 0.0;
    CHECK_THROWS_AS(validate(c), input_error);
    c = {};
    c.L_f = -1.0;
    CHECK_THROWS_AS(validate(c), input_error);
    c = {};
    c.T_IM = 1.5;
    CHECK_THROWS_AS(validate(c), input_error);
    c = {};
    c.T_CM = -0.1;
    CHECK_THROWS_AS(validate(c), input_error);
    c = {};
    c.Lambda_o = 1.0;
    CHECK_THROWS_AS(validate(c), input_error);
    c = {};
    c.Lambda_f = -0.2;
    CHECK_THROWS_AS(validate(c), input_error);
    c = {};
    c.lambda = 0.0;
    CHECK_THROWS_AS(validate(c), input_error);

    c = {};
    c.T_IM = 1.0; // boundary transmissions stay legal
    c.Lambda_s = 0.999;
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("pump power to coupling rate") {
    const double omega_m = 2.0 * std::numbers::pi * 5e5;
    const double g = pump_power_to_coupling(1.0, 1.0, 1.064e-6, omega_m, 40.0);
    CHECK(g == doctest::Approx(0.6131393).epsilon(1e-6));
    CHECK(pump_power_to_coupling(0.0, 1.0, 1.064e-6, omega_m, 40.0) == 0.0);
    CHECK_THROWS_AS(pump_power_to_coupling(-1.0, 1.0, 1.064e-6, omega_m, 40.0), input_error);
    CHECK_THROWS_AS(pump_power_to_coupling(1.0, 0.0, 1.064e-6, omega_m, 40.0), input_error);
    CHECK_THROWS_AS(pump_power_to_coupling(1.0, 1.0, 1.064e-6, 0.0, 40.0), input_error);
}

TEST_CASE("balanced-coupling condition") {
    const derived_rates r = derive_rates(interferometer_config{});
    const double g = pt_condition_coupling(r);
    CHECK(g == doctest::Approx(18737.028625).epsilon(1e-9));
    // 4 g^2 tau_f = 2 gamma_s
    CHECK(4.0 * g * g * r.tau_f == doctest::Approx(2.0 * r.gamma_s).epsilon(1e-12));
}
