#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "starkecho/pathways.hpp"
#include "starkecho/propagate.hpp"
#include "starkecho/scenario.hpp"
#include "starkecho/sequence_builder.hpp"
#include "starkecho/units.hpp"

using namespace starkecho;

namespace {

MaterialParams clean_material()
{
    MaterialParams m;
    m.gamma13_khz = 0;
    m.gamma35_khz = 0;
    m.gamma_opt_khz = 0;
    return m;
}

} // namespace

TEST_CASE("ensemble classes alternate deterministically")
{
    MaterialParams m;
    LevelScheme s = LevelScheme::eu151_default();
    auto ions = sample_ensemble(m, s, 6, 99, {{"1/2g", 1.0}});
    for (std::size_t i = 0; i < ions.size(); ++i)
        CHECK(ions[i].stark_class == (i % 2 == 0 ? 1 : -1));
}

TEST_CASE("same seed and size give bit-identical ensembles")
{
    MaterialParams m;
    LevelScheme s = LevelScheme::eu151_default();
    auto a = sample_ensemble(m, s, 257, 7, {{"1/2g", 1.0}});
    auto b = sample_ensemble(m, s, 257, 7, {{"1/2g", 1.0}});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].optical_detuning_khz == b[i].optical_detuning_khz);
        CHECK(a[i].spatial_phase_rad == b[i].spatial_phase_rad);
        CHECK(a[i].spin_detunings_khz == b[i].spin_detunings_khz);
        CHECK(a[i].stark_field_error == b[i].stark_field_error);
    }
    auto c = sample_ensemble(m, s, 257, 8, {{"1/2g", 1.0}});
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_diff = any_diff || a[i].optical_detuning_khz != c[i].optical_detuning_khz;
    CHECK(any_diff);
}

TEST_CASE("sampled feature width matches the configured FWHM")
{
    MaterialParams m;
    m.feature_width_mhz = 2.0;
    LevelScheme s = LevelScheme::eu151_default();
    auto ions = sample_ensemble(m, s, 100000, 5, {{"1/2g", 1.0}});
    double mean = 0, var = 0;
    for (const IonState& ion : ions) mean += ion.optical_detuning_khz;
    mean /= static_cast<double>(ions.size());
    for (const IonState& ion : ions)
        var += (ion.optical_detuning_khz - mean) * (ion.optical_detuning_khz - mean);
    var /= static_cast<double>(ions.size() - 1);
    double fwhm_khz = units::sigma_to_fwhm(std::sqrt(var));
    CHECK(fwhm_khz == doctest::Approx(2000.0).epsilon(0.05));
}

TEST_CASE("populations must be normalized and reference known levels")
{
    MaterialParams m;
    LevelScheme s = LevelScheme::eu151_default();
    CHECK_THROWS(sample_ensemble(m, s, 4, 1, {{"1/2g", 0.6}}));
    CHECK_THROWS(sample_ensemble(m, s, 4, 1, {{"nope", 1.0}}));
    CHECK_THROWS(sample_ensemble(m, s, 0, 1, {{"1/2g", 1.0}}));
}

TEST_CASE("propagation is invariant under the worker count")
{
    Scenario sc = Scenario::bundled_forward();
    sc.simulation.ions = 3000;
    ValidatedSequence seq = sc.build_sequence();
    auto ions = sc.sample();

    PropagateOptions one = sc.propagate_options();
    one.threads = 1;
    PropagateOptions two = sc.propagate_options();
    two.threads = 2;
    EmissionRecord ra = propagate(seq, ions, sc.material, one);
    EmissionRecord rb = propagate(seq, ions, sc.material, two);
    REQUIRE(ra.n_points == rb.n_points);
    for (std::size_t p = 0; p < ra.transitions.size(); ++p) {
        for (std::size_t k = 0; k < ra.n_points; ++k) {
            CHECK(ra.forward[p][k] == rb.forward[p][k]);
            CHECK(ra.backward[p][k] == rb.backward[p][k]);
        }
    }
}

TEST_CASE("density-matrix invariants hold through the full sequence")
{
    Scenario sc = Scenario::bundled_forward();
    sc.simulation.ions = 64;
    ValidatedSequence seq = sc.build_sequence();
    auto ions = sc.sample();
    PropagateOptions opt = sc.propagate_options();
    opt.validation_stride = 1;     // full positivity check on every ion
    opt.invariant_tolerance = 1e-9;
    CHECK_NOTHROW(propagate(seq, ions, sc.material, opt));
}

TEST_CASE("grid step must resolve the shortest inter-pulse gap")
{
    Scenario sc = Scenario::bundled_forward();
    sc.simulation.ions = 8;
    ValidatedSequence seq = sc.build_sequence();
    auto ions = sc.sample();
    PropagateOptions opt = sc.propagate_options();
    opt.grid_step_us = 1.0; // shortest gap is 4 us
    CHECK_THROWS(propagate(seq, ions, sc.material, opt));
}

TEST_CASE("forward memory sequence emits at the predicted echo time")
{
    MaterialParams mat = clean_material();
    LevelScheme scheme = LevelScheme::eu151_default();
    MemoryTimings t;
    ValidatedSequence seq = memory_sequence(RetrievalDirection::forward, t, scheme);
    auto ions = sample_ensemble(mat, scheme, 4000, 3, {{"1/2g", 1.0}});
    PropagateOptions opt;
    opt.record_start_us = 28.5;
    opt.record_end_us = 36.0;
    EmissionRecord rec = propagate(seq, ions, mat, opt);
    auto peaks = find_peaks(rec, 0.5);
    REQUIRE_FALSE(peaks.empty());
    CHECK(peaks[0].time_us == doctest::Approx(stark_echo_time(t)).epsilon(0.01));
    CHECK(peaks[0].direction == 1);
    CHECK(peaks[0].transition == "wa");
}

TEST_CASE("restored echo equals the unmodulated echo")
{
    // Two Stark pulses at the exact silencing area rotate both classes by
    // a full cycle, so the echo must coincide with the Stark-free case.
    MaterialParams mat = clean_material();
    LevelScheme scheme = LevelScheme::eu151_default();
    MemoryTimings t;
    BuilderOptions with;
    with.stark_area_v_us_cm = units::silencing_area_v_us_cm(mat.kappa_khz_per_v_cm);
    BuilderOptions without;
    without.stark_area_v_us_cm = 0.0;
    ValidatedSequence seq_with = memory_sequence(RetrievalDirection::forward, t, scheme, with);
    ValidatedSequence seq_without =
        memory_sequence(RetrievalDirection::forward, t, scheme, without);
    auto ions = sample_ensemble(mat, scheme, 10000, 11, {{"1/2g", 1.0}});
    PropagateOptions opt;
    opt.record_start_us = 31.0;
    opt.record_end_us = 33.5;
    double t8 = stark_echo_time(t);
    double a = echo_intensity(propagate(seq_with, ions, mat, opt), t8 - 0.5, t8 + 0.5, +1);
    double b = echo_intensity(propagate(seq_without, ions, mat, opt), t8 - 0.5, t8 + 0.5, +1);
    CHECK(a / b == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("echo intensity windows")
{
    MaterialParams mat = clean_material();
    LevelScheme scheme = LevelScheme::eu151_default();
    MemoryTimings t;
    ValidatedSequence seq = memory_sequence(RetrievalDirection::forward, t, scheme);
    auto ions = sample_ensemble(mat, scheme, 2000, 13, {{"1/2g", 1.0}});
    PropagateOptions opt;
    opt.record_start_us = 30.0;
    opt.record_end_us = 34.0;
    EmissionRecord rec = propagate(seq, ions, mat, opt);
    double t8 = stark_echo_time(t);
    double full = echo_intensity(rec, t8 - 1.0, t8 + 1.0, +1);
    double half = echo_intensity(rec, t8 - 1.0, t8, +1);
    CHECK(full >= half);
    CHECK_THROWS(echo_intensity(rec, 33.0, 32.0, +1));
    CHECK_THROWS(echo_intensity(rec, 100.0, 101.0, +1));

    EmissionRecord zero = rec;
    for (auto& ch : zero.forward)
        for (auto& v : ch) v = 0.0;
    CHECK(echo_intensity(zero, t8 - 1.0, t8 + 1.0, +1) == 0.0);
}

TEST_CASE("every detectable pathway appears in the oracle record")
{
    Scenario sc = Scenario::bundled_forward();
    sc.simulation.ions = 20000;
    sc.material.gamma_opt_khz = 0; // keep the late weak echo above the sampling floor
    ValidatedSequence seq = sc.build_sequence();
    auto ions = sc.sample();
    PropagateOptions opt = sc.propagate_options();
    opt.record_end_us = 48.0;
    EmissionRecord rec = propagate(seq, ions, sc.material, opt);
    auto peaks = find_peaks(rec, 1e-7);
    auto paths = enumerate_pathways(seq, sc.material.kappa_khz_per_v_cm);

    double t8 = stark_echo_time(sc.builder->timings);
    double se_peak = 0.0;
    const auto& det = rec.channel(+1);
    for (std::size_t k = 0; k < rec.n_points; ++k)
        if (std::abs(rec.time_at(k) - t8) <= 0.5) se_peak = std::max(se_peak, std::norm(det[k]));
    REQUIRE(se_peak > 0.0);

    // Each unsilenced pathway must coincide with a local maximum in its
    // predicted direction.
    for (const EchoPathway& p : paths) {
        if (!detectable(p) || p.kind == PathwayKind::FID) continue;
        bool matched = false;
        for (const EmissionPeak& peak : peaks) {
            if (peak.direction != p.emission_direction) continue;
            if (std::abs(peak.time_us - p.emission_time_us) <= opt.grid_step_us + 1e-9)
                matched = true;
        }
        INFO("pathway ", p.label, " at ", p.emission_time_us);
        CHECK(matched);
    }
    // And every peak above 1% of the stimulated-echo peak must be
    // explained by some enumerated pathway (free-induction tails ring
    // down across a few grid steps).
    for (const EmissionPeak& peak : peaks) {
        if (peak.intensity < 0.01 * se_peak) continue;
        bool explained = false;
        for (const EchoPathway& p : paths) {
            double tol = p.kind == PathwayKind::FID ? 0.6 : opt.grid_step_us + 1e-9;
            if (std::abs(peak.time_us - p.emission_time_us) <= tol) explained = true;
        }
        INFO("peak at ", peak.time_us, " dir ", peak.direction, " on ", peak.transition);
        CHECK(explained);
    }
}
