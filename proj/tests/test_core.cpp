#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "starkecho/level_scheme.hpp"
#include "starkecho/material.hpp"
#include "starkecho/pulse_sequence.hpp"
#include "starkecho/sequence_builder.hpp"
#include "starkecho/units.hpp"

using namespace starkecho;

namespace {

bool has_code(const ValidationResult& r, const std::string& code)
{
    for (const Diagnostic& d : r.diagnostics)
        if (d.code == code) return true;
    return false;
}

} // namespace

TEST_CASE("default level scheme wires four optical and two spin transitions")
{
    LevelScheme s = LevelScheme::eu151_default();
    CHECK(s.levels().size() == 4);
    int n_opt = 0, n_spin = 0;
    for (const Transition& t : s.transitions())
        (t.kind == TransitionKind::optical ? n_opt : n_spin)++;
    CHECK(n_opt == 4);
    CHECK(n_spin == 2);
    CHECK(s.is_excited(s.upper_level(s.transition_index("wa"))));
    CHECK_FALSE(s.is_excited(s.lower_level(s.transition_index("wa"))));
}

TEST_CASE("scheme construction rejects band violations and duplicate names")
{
    std::vector<Level> levels = {{"g", Band::ground, ""}, {"e", Band::excited, ""}};
    CHECK_THROWS(LevelScheme(levels, {{"t", "e", "g", TransitionKind::optical, 0.0}}));
    CHECK_THROWS(LevelScheme(levels, {{"t", "g", "e", TransitionKind::spin, 0.0}}));
    CHECK_THROWS(LevelScheme(levels, {{"t", "g", "e", TransitionKind::optical, 0.0},
                                      {"t", "g", "e", TransitionKind::optical, 0.0}}));
    CHECK_THROWS(LevelScheme(levels, {{"t", "g", "nope", TransitionKind::optical, 0.0}}));
}

TEST_CASE("full memory sequence validates")
{
    LevelScheme scheme = LevelScheme::eu151_default();
    ValidatedSequence v = memory_sequence(RetrievalDirection::forward, {}, scheme);
    CHECK(v.signal_pulses().size() == 1);
    CHECK(v.control_pulses().size() == 4);
    ValidationResult again = validate_sequence(v);
    REQUIRE(again.ok());
    CHECK(again.sequence->sequence().optical.size() == v.sequence().optical.size());
}

TEST_CASE("validation reports the named failure modes")
{
    LevelScheme scheme = LevelScheme::eu151_default();

    PulseSequence empty;
    empty.detection = {30.0, 34.0};
    ValidationResult r = validate_sequence(empty, scheme);
    CHECK_FALSE(r.ok());
    CHECK(has_code(r, "no-signal-pulse"));

    PulseSequence seq;
    seq.optical.push_back({1.0, "wa", units::pi / 2, 0.0, +1, PulseRole::signal, ""});
    seq.optical.push_back({1.0, "wb", units::pi, 0.0, +1, PulseRole::control, ""});
    seq.detection = {30.0, 34.0};
    r = validate_sequence(seq, scheme);
    CHECK(has_code(r, "non-monotone-times"));

    seq.optical[1].time_us = 5.0;
    seq.optical[1].transition = "nope";
    r = validate_sequence(seq, scheme);
    CHECK(has_code(r, "unknown-transition"));

    seq.optical[1].transition = "wb";
    seq.detection = {30.0, 30.0};
    r = validate_sequence(seq, scheme);
    CHECK(has_code(r, "zero-length-window"));
}

TEST_CASE("validation is idempotent")
{
    LevelScheme scheme = LevelScheme::eu151_default();
    ValidatedSequence v = memory_sequence(RetrievalDirection::backward, {}, scheme);
    ValidationResult r1 = validate_sequence(v);
    REQUIRE(r1.ok());
    ValidationResult r2 = validate_sequence(*r1.sequence);
    REQUIRE(r2.ok());
    const auto& a = r1.sequence->sequence().optical;
    const auto& b = r2.sequence->sequence().optical;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].time_us == b[i].time_us);
        CHECK(a[i].direction == b[i].direction);
        CHECK(a[i].transition == b[i].transition);
    }
}

TEST_CASE("forward and backward sequences differ in exactly one pulse direction")
{
    LevelScheme scheme = LevelScheme::eu151_default();
    MemoryTimings t;
    ValidatedSequence f = memory_sequence(RetrievalDirection::forward, t, scheme);
    ValidatedSequence b = memory_sequence(RetrievalDirection::backward, t, scheme);
    const auto& fo = f.sequence().optical;
    const auto& bo = b.sequence().optical;
    REQUIRE(fo.size() == bo.size());
    int diffs = 0;
    for (std::size_t i = 0; i < fo.size(); ++i) {
        CHECK(fo[i].time_us == bo[i].time_us);
        CHECK(fo[i].transition == bo[i].transition);
        if (fo[i].direction != bo[i].direction) ++diffs;
    }
    CHECK(diffs == 1);
    CHECK(bo[3].direction == -1); // the control at t5
}

TEST_CASE("builder timing rules")
{
    LevelScheme scheme = LevelScheme::eu151_default();
    MemoryTimings t{0, 2, 4, 10, 20, 26, 28};
    CHECK(stark_echo_time(t) == doctest::Approx(32.0));

    // t5 - t3 < t2 - t0 would put the echo before the last control pulse.
    MemoryTimings bad{0, 2, 4, 10, 13, 26, 28};
    CHECK_THROWS(memory_sequence(RetrievalDirection::forward, bad, scheme));

    // the echo must follow the rephasing Stark pulse
    MemoryTimings late7{0, 2, 4, 10, 20, 26, 33};
    CHECK_THROWS(memory_sequence(RetrievalDirection::forward, late7, scheme));

    MemoryTimings unordered{0, 2, 4, 3, 20, 26, 28};
    CHECK_THROWS(memory_sequence(RetrievalDirection::forward, unordered, scheme));
}

TEST_CASE("material parameters reject negatives")
{
    MaterialParams m;
    m.gamma13_khz = -1;
    CHECK_THROWS(m.validate());
    m = MaterialParams{};
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("unit helpers")
{
    // One kHz for one ms is one cycle.
    CHECK(units::detuning_rate_rad_per_us(1.0) * 1000.0 == doctest::Approx(units::two_pi));
    // The silencing area for the measured Stark coefficient.
    CHECK(units::silencing_area_v_us_cm(27.5) == doctest::Approx(100.0 / 11.0).epsilon(1e-12));
    // FWHM round trip.
    CHECK(units::sigma_to_fwhm(units::fwhm_to_sigma(2.0)) == doctest::Approx(2.0));
}
