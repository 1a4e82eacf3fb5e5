#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "starkecho/decay_fit.hpp"
#include "starkecho/pathways.hpp"
#include "starkecho/efficiency.hpp"
#include "starkecho/rng.hpp"
#include "starkecho/units.hpp"

using namespace starkecho;

namespace {

DecayCurve excited_curve(double g35, double gamma, double noise, std::uint64_t seed)
{
    DecayCurve c;
    c.swept = SweptVariable::excited_storage;
    CounterRng rng(seed, 0, 3);
    for (double b = 0.5; b <= 40.0; b += 2.0) {
        double truth = decay_factor(0.0, g35, gamma, 0.0, b);
        double y = truth * (1.0 + noise * rng.gaussian());
        c.delay_us.push_back(b);
        c.intensity.push_back(std::max(y, 1e-15));
        if (noise > 0) c.sigma.push_back(noise * truth);
    }
    return c;
}

} // namespace

TEST_CASE("noiseless excited-branch fit recovers exactly")
{
    DecayCurve c = excited_curve(21.9, 11.0, 0.0, 1);
    c.sigma.assign(c.delay_us.size(), 1e-3);
    FitResult f = fit_decay(c, DecayModel::eq_excited);
    REQUIRE(f.converged);
    CHECK(f.parameters[1] == doctest::Approx(21.9).epsilon(1e-6));
    CHECK(f.parameters[2] == doctest::Approx(11.0).epsilon(1e-6));
    CHECK(f.residual_norm < 1e-8);
}

TEST_CASE("noisy fits recover generating parameters across random draws")
{
    // Mild noise keeps the optical rate identifiable against the Gaussian
    // branch; intensities carry matched per-point uncertainties.
    std::uint64_t state = 77;
    auto next = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    for (int trial = 0; trial < 20; ++trial) {
        double g35 = 12.0 + 25.0 * next();
        double gamma = 6.0 + 12.0 * next();
        DecayCurve c = excited_curve(g35, gamma, 0.005, 100 + static_cast<std::uint64_t>(trial));
        FitResult f = fit_decay(c, DecayModel::eq_excited);
        REQUIRE(f.converged);
        INFO("g35 ", g35, " gamma ", gamma);
        CHECK(std::abs(f.parameters[1] - g35) / g35 < 0.05);
        CHECK(std::abs(f.parameters[2] - gamma) / gamma < 0.05);
    }
}

TEST_CASE("ground-branch fit recovers the ground linewidth")
{
    DecayCurve c;
    c.swept = SweptVariable::ground_storage;
    for (double a = 1.0; a <= 45.0; a += 2.0) {
        c.delay_us.push_back(a);
        c.intensity.push_back(decay_factor(17.4, 0.0, 0.0, a, 0.0));
        c.sigma.push_back(1e-3);
    }
    FitResult f = fit_decay(c, DecayModel::eq_ground);
    REQUIRE(f.converged);
    CHECK(f.parameters[1] == doctest::Approx(17.4).epsilon(1e-6));
}

TEST_CASE("constant curve gives a degenerate ground-width estimate")
{
    DecayCurve c;
    for (double a = 1.0; a <= 21.0; a += 2.0) {
        c.delay_us.push_back(a);
        c.intensity.push_back(1.0);
        c.sigma.push_back(0.01);
    }
    FitResult f = fit_decay(c, DecayModel::eq_ground);
    CHECK(f.parameters[1] == doctest::Approx(0.0).epsilon(1e-3));
    bool flagged = false;
    for (const auto& fl : f.flags) flagged = flagged || fl == "degenerate";
    CHECK(flagged);
}

TEST_CASE("two-pulse-echo fit recovers the optical rate")
{
    DecayCurve c;
    c.swept = SweptVariable::two_pe_delay;
    for (double tau = 2.0; tau <= 62.0; tau += 4.0) {
        c.delay_us.push_back(tau);
        c.intensity.push_back(std::exp(-4.0 * 11.0 * units::khz_us_to_cycles * tau));
        c.sigma.push_back(1e-4);
    }
    FitResult f = fit_decay(c, DecayModel::two_pe);
    REQUIRE(f.converged);
    CHECK(f.parameters[1] == doctest::Approx(11.0).epsilon(1e-6));
}

TEST_CASE("fit preconditions")
{
    DecayCurve tiny;
    tiny.delay_us = {1, 2, 3};
    tiny.intensity = {1, 0.9, 0.8};
    CHECK_THROWS(fit_decay(tiny, DecayModel::eq_ground));

    DecayCurve bad;
    bad.delay_us = {1, 2, 3, 4, 5};
    bad.intensity = {1, 0.9, 0.8, 0.7, std::nan("")};
    CHECK_THROWS(fit_decay(bad, DecayModel::eq_ground));
}

TEST_CASE("stark modulation fit recovers the coefficient and silencing area")
{
    DecayCurve c;
    c.swept = SweptVariable::stark_area;
    for (int i = 0; i <= 24; ++i) {
        double a = 0.8 * i;
        double phi = 2.0 * units::stark_phase_rad(27.5, a);
        c.delay_us.push_back(a);
        c.intensity.push_back(silencing_factor(phi, 0.0));
        c.sigma.push_back(0.01);
    }
    StarkModulationFit f = fit_stark_modulation(c);
    REQUIRE(f.fit.converged);
    CHECK(f.kappa_khz_per_v_cm == doctest::Approx(27.5).epsilon(0.01));
    CHECK(f.silencing_area_v_us_cm == doctest::Approx(9.0909).epsilon(0.01));
}

TEST_CASE("stark modulation fit recovers a field spread")
{
    DecayCurve c;
    c.swept = SweptVariable::stark_area;
    for (int i = 0; i <= 24; ++i) {
        double a = 0.8 * i;
        double phi = 2.0 * units::stark_phase_rad(27.5, a);
        c.delay_us.push_back(a);
        c.intensity.push_back(2.0 * silencing_factor(phi, 0.12));
        c.sigma.push_back(0.01);
    }
    StarkModulationFit f = fit_stark_modulation(c);
    REQUIRE(f.fit.converged);
    CHECK(f.kappa_khz_per_v_cm == doctest::Approx(27.5).epsilon(0.02));
    CHECK(f.sigma_e == doctest::Approx(0.12).epsilon(0.05));
}

TEST_CASE("stark modulation fit rejects non-identifiable sweeps")
{
    DecayCurve zeros;
    for (int i = 0; i < 8; ++i) {
        zeros.delay_us.push_back(i);
        zeros.intensity.push_back(0.0);
    }
    CHECK_THROWS(fit_stark_modulation(zeros));

    DecayCurve flat;
    for (int i = 0; i < 8; ++i) {
        double a = 0.3 * i; // never reaches the first minimum
        double phi = 2.0 * units::stark_phase_rad(27.5, a);
        flat.delay_us.push_back(a);
        flat.intensity.push_back(silencing_factor(phi, 0.0));
    }
    CHECK_THROWS(fit_stark_modulation(flat));
}
