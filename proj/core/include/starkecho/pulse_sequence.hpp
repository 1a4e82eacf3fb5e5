#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "starkecho/level_scheme.hpp"

namespace starkecho {

enum class PulseRole { signal, control, readout_half };

struct OpticalPulse {
    double time_us = 0.0;
    std::string transition;
    double area_rad = 0.0; // in (0, 2pi]
    double phase_rad = 0.0;
    int direction = +1; // +1 forward, -1 backward
    PulseRole role = PulseRole::control;
    std::string slot; // canonical name for pathway labels ("0", "2", ...), optional
};

struct StarkPulse {
    double time_us = 0.0;
    double area_v_us_cm = 0.0; // field amplitude x duration
    double sigma_e = 0.0;      // fractional RMS spread of the field over the sample
};

struct DetectionWindow {
    double start_us = 0.0;
    double end_us = 0.0;
};

struct PulseSequence {
    std::vector<OpticalPulse> optical; // strictly ordered in time
    std::vector<StarkPulse> stark;
    DetectionWindow detection;
    int detection_direction = +1;
    std::string detection_transition; // empty: transition of the first signal pulse
};

struct Diagnostic {
    std::string code;
    std::string message;
};

// How many signal pulses validation demands. Memory scenarios carry
// exactly one; time-bin qubit scenarios carry one per temporal mode.
enum class SignalRule { exactly_one, at_least_one, any };

// A sequence whose cross-references into the level scheme have been
// resolved. Immutable value type; validating it again returns an
// identical copy.
class ValidatedSequence {
  public:
    const PulseSequence& sequence() const { return seq_; }
    const LevelScheme& scheme() const { return *scheme_; }

    int transition_of(std::size_t pulse_idx) const
    {
        return transition_idx_.at(pulse_idx);
    }
    const std::vector<std::size_t>& signal_pulses() const { return signal_; }
    const std::vector<std::size_t>& control_pulses() const { return controls_; }
    int detection_transition_index() const { return detection_transition_; }

    // Label used when naming pathways through this pulse.
    const std::string& slot_of(std::size_t pulse_idx) const
    {
        return slots_.at(pulse_idx);
    }

    double last_event_time() const;

  private:
    friend struct ValidationAccess;
    PulseSequence seq_;
    std::shared_ptr<const LevelScheme> scheme_;
    std::vector<int> transition_idx_;
    std::vector<std::size_t> signal_;
    std::vector<std::size_t> controls_;
    std::vector<std::string> slots_;
    int detection_transition_ = -1;
};

struct ValidationResult {
    std::optional<ValidatedSequence> sequence;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return sequence.has_value(); }
};

ValidationResult validate_sequence(const PulseSequence& seq, const LevelScheme& scheme,
                                   SignalRule rule = SignalRule::exactly_one);

// Idempotence overload: a validated sequence revalidates to itself.
ValidationResult validate_sequence(const ValidatedSequence& seq,
                                   SignalRule rule = SignalRule::exactly_one);

} // namespace starkecho
