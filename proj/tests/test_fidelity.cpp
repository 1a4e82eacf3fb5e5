#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "starkecho/fidelity.hpp"
#include "starkecho/interference.hpp"
#include "starkecho/units.hpp"

using namespace starkecho;

TEST_CASE("pole fidelity from signal-to-noise")
{
    CHECK(pole_fidelity(10.0, 0.0) == 1.0);
    CHECK(pole_fidelity(0.0, 5.0) == 0.5);
    CHECK(pole_fidelity(60.5, 1.0) == doctest::Approx(0.984).epsilon(1e-4));
    CHECK_THROWS(pole_fidelity(-1.0, 1.0));
    CHECK_THROWS(pole_fidelity(0.0, 0.0));
}

TEST_CASE("pole fidelity is monotone in signal and noise")
{
    double prev = 0.5;
    for (double s = 0.5; s < 40; s += 0.5) {
        double f = pole_fidelity(s, 1.0);
        CHECK(f > prev);
        CHECK(f > 0.5);
        CHECK(f <= 1.0);
        prev = f;
    }
    prev = 1.0;
    for (double n = 0.5; n < 40; n += 0.5) {
        double f = pole_fidelity(10.0, n);
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("equator fidelity from visibility")
{
    CHECK(equator_fidelity(1.0) == 1.0);
    CHECK(equator_fidelity(0.94) == doctest::Approx(0.97));
    CHECK(equator_fidelity(0.0) == 0.5);
    CHECK_THROWS(equator_fidelity(1.2));
}

TEST_CASE("total fidelity combines poles and equator one-to-two")
{
    TotalFidelity fwd = total_fidelity(0.984, 0.967, 0.970, 0.986);
    CHECK(fwd.total == doctest::Approx(0.9772).epsilon(1e-3));
    TotalFidelity bwd = total_fidelity(0.963, 0.971, 0.982, 0.976);
    CHECK(bwd.total == doctest::Approx(0.9750).epsilon(1e-3));
    TotalFidelity ones = total_fidelity(1, 1, 1, 1);
    CHECK(ones.poles == 1.0);
    CHECK(ones.equator == 1.0);
    CHECK(ones.total == 1.0);
}

TEST_CASE("total fidelity is linear and symmetric within each pair")
{
    TotalFidelity a = total_fidelity(0.9, 0.8, 0.7, 0.6);
    TotalFidelity b = total_fidelity(0.8, 0.9, 0.6, 0.7);
    CHECK(a.total == doctest::Approx(b.total).epsilon(1e-15));
    // linearity in one argument
    double f0 = total_fidelity(0.0, 0.8, 0.7, 0.6).total;
    double f1 = total_fidelity(1.0, 0.8, 0.7, 0.6).total;
    double fm = total_fidelity(0.5, 0.8, 0.7, 0.6).total;
    CHECK(fm == doctest::Approx(0.5 * (f0 + f1)).epsilon(1e-15));
}

TEST_CASE("qubit result pipeline with uncertainties")
{
    QubitCounts c;
    c.s_early = 605.0;
    c.n_early = 10.0;
    c.s_late = 300.0;
    c.n_late = 5.0;
    c.v_0 = 0.94;
    c.v_90 = 0.972;
    c.sigma_v_0 = 0.01;
    c.sigma_v_90 = 0.01;
    QubitResult lin = qubit_fidelities(c);
    CHECK(lin.f_early == doctest::Approx(pole_fidelity(605, 10)));
    CHECK(lin.f_plus == doctest::Approx(0.97));
    CHECK(lin.sigma_f_total > 0);

    QubitResult mc = qubit_fidelities(c, 4000, 1);
    CHECK(mc.f_total == doctest::Approx(lin.f_total));
    CHECK(mc.sigma_f_total == doctest::Approx(lin.sigma_f_total).epsilon(0.25));
}

TEST_CASE("interferometer fringe extrema")
{
    std::vector<double> beta = {0.0, units::pi / 2, units::pi, 1.5 * units::pi};
    std::vector<double> f0 = mzi_fringe(0.0, 1.0, beta);
    CHECK(f0[0] == doctest::Approx(1.0)); // constructive at beta = alpha
    CHECK(f0[2] == doctest::Approx(0.0));

    std::vector<double> f90 = mzi_fringe(units::pi / 2, 1.0, beta);
    CHECK(f90[1] == doctest::Approx(1.0)); // maximum at beta = 90 deg
    CHECK(f90[3] == doctest::Approx(0.0)); // minimum at beta = 270 deg
}

TEST_CASE("visibility extraction is exact on noiseless grids")
{
    std::vector<double> beta;
    for (int i = 0; i < 4; ++i) beta.push_back(units::two_pi * i / 4.0 + 0.3);
    for (double v : {0.2, 0.7, 0.995}) {
        for (double alpha : {0.0, 0.7, 2.5}) {
            std::vector<double> y = mzi_fringe(alpha, v, beta, 3.7);
            VisibilityFit fit = extract_visibility(beta, y);
            CHECK(fit.visibility == doctest::Approx(v).epsilon(1e-9));
            double dphase = std::remainder(fit.phase_rad - alpha, units::two_pi);
            CHECK(std::abs(dphase) < 1e-9);
        }
    }
    CHECK_THROWS(extract_visibility({0.0, 0.1}, {1.0, 1.0}));
}
