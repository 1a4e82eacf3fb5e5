#pragma once

#include <array>
#include <string>

#include "starkecho/pulse_sequence.hpp"
#include "starkecho/units.hpp"

namespace starkecho {

enum class RetrievalDirection { forward, backward };

// Pulse slot times of the memory sequence. t4 and t8 are emission times,
// not pulses, so they are not part of the input.
struct MemoryTimings {
    double t0 = 0.0;  // signal
    double t1 = 2.0;  // first Stark pulse
    double t2 = 4.0;  // control pi
    double t3 = 10.0; // control pi
    double t5 = 20.0; // control pi (direction reversed for backward retrieval)
    double t6 = 26.0; // control pi
    double t7 = 28.0; // second Stark pulse
};

struct BuilderOptions {
    double stark_area_v_us_cm = 9.25;
    double stark_sigma_e = 0.0;
    double signal_area_rad = units::pi / 2.0;
    std::string signal_transition = "wa";
    // Transitions of the four control pulses at t2, t3, t5, t6. The default
    // keeps the first and third on one frequency and the second and fourth
    // on the other, which pins the spin-storage intervals of the echo chain.
    std::array<std::string, 4> control_transitions = {"wb", "wd", "wb", "wd"};
    double detection_halfwidth_us = 1.0; // half-width of the detection window around the echo
    double record_tail_us = 16.0;        // how far past the echo the window extends
};

// Echo emission instant implied by the signed-time rule over the five
// optical pulses of the memory sequence.
inline double stark_echo_time(const MemoryTimings& t)
{
    return t.t0 - t.t2 - t.t3 + t.t5 + t.t6;
}

// Builds the full memory sequence (signal, four control pi pulses, two
// Stark pulses). Backward retrieval differs from forward in exactly one
// pulse direction: the control at t5 propagates along -k.
ValidatedSequence memory_sequence(RetrievalDirection dir, const MemoryTimings& timings,
                                 const LevelScheme& scheme, const BuilderOptions& opt = {});

// Interference variant: the input is split into early/late temporal bins
// with relative phase alpha, and the control at t6 is replaced by two
// pi/2 pulses separated by the same bin delay with relative phase beta.
// The central output bin then interferes the two input bins.
ValidatedSequence interference_sequence(RetrievalDirection dir, const MemoryTimings& timings,
                                        double bin_delay_us, double alpha_rad, double beta_rad,
                                        const LevelScheme& scheme, const BuilderOptions& opt = {});

} // namespace starkecho
