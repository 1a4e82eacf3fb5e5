#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "starkecho/cavity.hpp"
#include "starkecho/efficiency.hpp"

using namespace starkecho;

TEST_CASE("retrieval efficiency closed forms")
{
    CHECK(retrieval_efficiency(2.0, Retrieval::forward) ==
          doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK(retrieval_efficiency(1.3, Retrieval::forward) == doctest::Approx(0.4606).epsilon(1e-3));
    CHECK(retrieval_efficiency(50.0, Retrieval::backward) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(retrieval_efficiency(0.0, Retrieval::forward) == 0.0);
    CHECK_THROWS(retrieval_efficiency(-0.1, Retrieval::forward));
}

TEST_CASE("forward retrieval peaks at d = 2 and backward is monotone")
{
    double best_d = 0, best = -1;
    for (int i = 0; i <= 10000; ++i) {
        double d = 1e-3 * i;
        double v = retrieval_efficiency(d, Retrieval::forward);
        if (v > best) {
            best = v;
            best_d = d;
        }
    }
    CHECK(best_d == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(best == doctest::Approx(0.5413411).epsilon(1e-6));

    // forward slope changes sign at d = 2, backward never decreases
    double h = 1e-4;
    auto slope_fwd = [&](double d) {
        return (retrieval_efficiency(d + h, Retrieval::forward) -
                retrieval_efficiency(d - h, Retrieval::forward)) /
               (2 * h);
    };
    CHECK(slope_fwd(1.9) > 0);
    CHECK(slope_fwd(2.1) < 0);
    for (double d = 0.05; d < 8.0; d += 0.05)
        CHECK(retrieval_efficiency(d + 0.05, Retrieval::backward) >
              retrieval_efficiency(d, Retrieval::backward));
}

TEST_CASE("decay factor values and units")
{
    CHECK(decay_factor(17.4, 21.9, 11.0, 0.0, 0.0) == 1.0);
    // hand evaluation at the backward-retrieval linewidths
    CHECK(decay_factor(16.6, 24.3, 11.0, 15.0, 8.0) == doctest::Approx(0.41211).epsilon(2e-3));
    CHECK_THROWS(decay_factor(16.6, 24.3, 11.0, -1.0, 8.0));

    // with no excited-branch broadening the factor depends on a only
    double va = decay_factor(16.6, 0.0, 0.0, 12.0, 3.0);
    double vb = decay_factor(16.6, 0.0, 0.0, 12.0, 23.0);
    CHECK(va == doctest::Approx(vb).epsilon(1e-12));

    // kHz*us reconciliation: 1 kHz over 1000 us of Gaussian spread decays
    // intensity by exp(-pi^2/(2 ln 2))
    double one_cycle = decay_factor(1.0, 0.0, 0.0, 1000.0, 0.0);
    CHECK(one_cycle ==
          doctest::Approx(std::exp(-M_PI * M_PI / (2.0 * std::log(2.0)))).epsilon(1e-9));
}

TEST_CASE("decay factor is log-concave in each duration")
{
    double h = 0.5;
    for (double a = 1.0; a < 25.0; a += 2.0) {
        double la = std::log(decay_factor(17.4, 21.9, 11.0, a - h, 8.0));
        double lb = std::log(decay_factor(17.4, 21.9, 11.0, a, 8.0));
        double lc = std::log(decay_factor(17.4, 21.9, 11.0, a + h, 8.0));
        CHECK(la + lc - 2 * lb <= 1e-12);
    }
    for (double b = 1.0; b < 25.0; b += 2.0) {
        double la = std::log(decay_factor(17.4, 21.9, 11.0, 8.0, b - h));
        double lb = std::log(decay_factor(17.4, 21.9, 11.0, 8.0, b));
        double lc = std::log(decay_factor(17.4, 21.9, 11.0, 8.0, b + h));
        CHECK(la + lc - 2 * lb <= 1e-12);
    }
}

TEST_CASE("total efficiency factorization")
{
    EfficiencyBreakdown b = total_efficiency(1.3, 1.0, 0.828, 0.2217, Retrieval::forward);
    CHECK(b.total == doctest::Approx(0.048).epsilon(0.01));
    CHECK(b.total ==
          b.retrieval * b.phase_matching * b.control * b.control * b.control * b.control * b.decay);

    CHECK(total_efficiency(1.3, 0.0, 0.8, 0.5, Retrieval::forward).total == 0.0);

    double full = total_efficiency(1.3, 1.0, 0.8, 0.5, Retrieval::forward).total;
    double halved = total_efficiency(1.3, 1.0, 0.4, 0.5, Retrieval::forward).total;
    CHECK(halved == doctest::Approx(full / 16.0).epsilon(1e-12));

    CHECK_THROWS(total_efficiency(1.3, 1.2, 0.8, 0.5, Retrieval::forward));
}

TEST_CASE("control-efficiency inference inverts the intensity scaling")
{
    CHECK(infer_control_efficiency(1.0, 1.0, 1.0) == doctest::Approx(0.5));
    double r = (0.815 / 0.185) * (0.815 / 0.185);
    CHECK(r == doctest::Approx(19.41).epsilon(1e-3));
    CHECK(infer_control_efficiency(r, 1.0, 1.0) == doctest::Approx(0.815).epsilon(1e-12));
    CHECK(infer_control_efficiency(1e8, 1.0, 1.0) > 0.9999);
    CHECK_THROWS(infer_control_efficiency(0.0, 1.0, 1.0));
    CHECK_THROWS(infer_control_efficiency(1.0, 1.0, 0.0));

    // identity on the full range
    for (double eta = 0.05; eta < 1.0; eta += 0.05) {
        double ratio = (eta / (1 - eta)) * (eta / (1 - eta));
        CHECK(infer_control_efficiency(ratio, 1.0, 1.0) ==
              doctest::Approx(eta).epsilon(1e-12));
    }

    // the decay correction rescales the raw intensity ratio
    CHECK(infer_control_efficiency(2.0, 1.0, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("cavity retrieval limits")
{
    CHECK(cavity_retrieval({1.0, 0.999, 0.1}) == 0.0);
    CHECK(cavity_retrieval({0.5, 0.0, 0.1}) == 0.0);
    CHECK_THROWS(cavity_retrieval({1.0, 1.0, 0.0})); // divergent round trip
    CHECK_THROWS(cavity_retrieval({-0.1, 0.999, 0.1}));
}

TEST_CASE("cavity optimizer matches a brute-force grid")
{
    for (double d : {0.05, 0.1, 0.5, 2.0}) {
        CavityOptimum opt = optimize_cavity(d, 0.999);
        double best = -1, best_r1 = 0;
        for (int i = 0; i < 100000; ++i) {
            double r1 = 1e-5 * i;
            double v = cavity_retrieval({r1, 0.999, d});
            if (v > best) {
                best = v;
                best_r1 = r1;
            }
        }
        CHECK(std::abs(opt.efficiency - best) <= 1e-6);
        CHECK(std::abs(opt.r1 - best_r1) <= 1e-4);
        // the optimum sits at the impedance-matching point R1 = R2 e^(-2d)
        CHECK(opt.r1 == doctest::Approx(0.999 * std::exp(-2.0 * d)).epsilon(1e-5));
    }
}

TEST_CASE("cavity efficiency approaches unity at vanishing depth")
{
    CavityOptimum opt = optimize_cavity(1e-3, 1.0);
    CHECK(opt.efficiency > 0.999);
}

TEST_CASE("optimal cavity efficiency is unimodal in optical depth")
{
    // Rises in the impedance-matched low-depth regime, peaks, then falls
    // off with reabsorption; one sign change over the sweep.
    std::vector<double> etas;
    for (double d = 0.05; d <= 3.0; d += 0.05) etas.push_back(optimize_cavity(d, 0.999).efficiency);
    int changes = 0;
    for (std::size_t i = 2; i < etas.size(); ++i) {
        bool was_up = etas[i - 1] > etas[i - 2];
        bool is_up = etas[i] > etas[i - 1];
        if (was_up != is_up) ++changes;
    }
    CHECK(changes == 1);
    double top = *std::max_element(etas.begin(), etas.end());
    CHECK(top > 0.98);
}
