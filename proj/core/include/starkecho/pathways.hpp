#pragma once

#include <string>
#include <utility>
#include <vector>

#include "starkecho/pulse_sequence.hpp"

namespace starkecho {

enum class PathwayKind { SE, FourLE, TwoPE, FID };

std::string to_string(PathwayKind k);

// One inter-pulse interval of a pathway, with the levels occupied by the
// ket and bra legs of the tracked coherence element. Segments are
// contiguous; consecutive segments differ by the action of one pulse on
// one leg (or, for a two-pulse echo, a conjugating flip of both legs).
struct TraceSegment {
    double start_us = 0.0;
    double end_us = 0.0;
    int ket = -1;
    int bra = -1;
    int orientation = 0; // -1 ket excited/bra ground, +1 conjugate, 0 spin coherence
};

struct CoherenceTrace {
    std::vector<TraceSegment> segments;
    bool consistent = true; // false when some pulse does not touch the coherence
    std::string note;
};

struct PulseTerm {
    std::size_t pulse = 0; // index into the sequence's optical pulse list
    int sign = 0;          // signed weight in the emission time/direction sums
};

// One coherent emission channel of a sequence. The same signed pulse
// combination fixes both the emission instant (sum of sign*time) and the
// emission wave vector (sum of sign*direction).
struct EchoPathway {
    PathwayKind kind = PathwayKind::FID;
    std::string label;
    std::vector<PulseTerm> pulse_terms;
    double emission_time_us = 0.0;
    int direction_sum = 0;          // sum of sign*direction over pulse_terms
    int emission_direction = 0;     // +1/-1 when phase matched, else 0
    bool phase_matched = false;     // |direction_sum| == 1
    bool level_consistent = false;  // the level walk closes on an optical coherence
    double stark_relative_phase_rad = 0.0;
    double stark_sigma_eff = 0.0;
    double silencing_factor = 0.0;
    std::string emission_transition;
    CoherenceTrace trace;
    std::vector<std::string> flags; // "outside-sequence", "inside-pulse", ...
};

// Enumerates every coherent emission channel up to second order: the
// stimulated echo through all controls, one four-level echo candidate per
// (signal, control pair), one two-pulse echo per co-frequency control
// pair, and one free-induction decay per optical pulse. Candidates whose
// level walk cannot close on an emitting optical coherence, or whose
// signed-time rephasing point precedes their last pulse, are kept with
// silencing_factor 0 rather than dropped. Output is sorted by emission
// time, then label. kappa feeds the Stark-phase bookkeeping.
std::vector<EchoPathway> enumerate_pathways(const ValidatedSequence& seq,
                                            double kappa_khz_per_v_cm);

// Emission instant and direction from the signed pulse combination.
// direction_sum with |sum| != 1 marks the pathway non-phase-matched.
std::pair<double, int> emission_kinematics(const EchoPathway& pathway,
                                           const ValidatedSequence& seq);

// Bra/ket level pair occupied during each inter-pulse interval, ending on
// the emitting optical coherence (conjugated if needed so the final
// segment has the ket on the excited leg).
CoherenceTrace trace_coherence(const ValidatedSequence& seq, const EchoPathway& pathway);

// Class-to-class relative phase 2*phi_S accumulated by the traced
// coherence from the given Stark pulses. Only pulses inside an optical
// segment (one leg ground, one excited) and before emission contribute,
// with sign +1 when the ket leg is excited and -1 otherwise. A Stark
// pulse exactly at a pulse time belongs to the following segment.
double stark_relative_phase(const CoherenceTrace& trace, const std::vector<StarkPulse>& stark,
                            double kappa_khz_per_v_cm);

// Intensity retention of a pathway with class-to-class relative phase phi
// under a Gaussian fractional spread sigma_e of the Stark field:
//   exp(-(sigma_e*phi)^2/2) cos^2(phi/2) + (1 - exp(-(sigma_e*phi)^2/2))/2.
// sigma_e = 0 reduces to the ideal cos^2.
double silencing_factor(double relative_phase_rad, double sigma_e);

// A pathway expected to show up in a detected trace: phase matched, level
// consistent, and not silenced below the oracle-visibility threshold.
bool detectable(const EchoPathway& p, double silencing_threshold = 0.1);

} // namespace starkecho
