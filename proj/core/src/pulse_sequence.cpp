#include "starkecho/pulse_sequence.hpp"

#include <algorithm>
#include <cmath>

#include "starkecho/units.hpp"

namespace starkecho {

struct ValidationAccess {
    static ValidatedSequence build(PulseSequence seq, const LevelScheme& scheme,
                                   std::vector<int> tidx, std::vector<std::size_t> signal,
                                   std::vector<std::size_t> controls, std::vector<std::string> slots,
                                   int det_transition)
    {
        ValidatedSequence v;
        v.seq_ = std::move(seq);
        v.scheme_ = std::make_shared<const LevelScheme>(scheme);
        v.transition_idx_ = std::move(tidx);
        v.signal_ = std::move(signal);
        v.controls_ = std::move(controls);
        v.slots_ = std::move(slots);
        v.detection_transition_ = det_transition;
        return v;
    }
};

double ValidatedSequence::last_event_time() const
{
    double t = seq_.detection.end_us;
    if (!seq_.optical.empty()) t = std::max(t, seq_.optical.back().time_us);
    for (const StarkPulse& s : seq_.stark) t = std::max(t, s.time_us);
    return t;
}

ValidationResult validate_sequence(const PulseSequence& seq, const LevelScheme& scheme,
                                   SignalRule rule)
{
    std::vector<Diagnostic> diags;
    std::vector<int> tidx;
    std::vector<std::size_t> signal;
    std::vector<std::size_t> controls;
    std::vector<std::string> slots;

    for (std::size_t i = 0; i < seq.optical.size(); ++i) {
        const OpticalPulse& p = seq.optical[i];
        auto t = scheme.try_transition_index(p.transition);
        if (!t) {
            diags.push_back({"unknown-transition",
                             "pulse " + std::to_string(i) + " references unknown transition '" +
                                 p.transition + "'"});
            tidx.push_back(-1);
        } else if (scheme.transition(*t).kind != TransitionKind::optical) {
            diags.push_back({"non-optical-transition",
                             "pulse " + std::to_string(i) + " drives spin transition '" +
                                 p.transition + "'"});
            tidx.push_back(-1);
        } else {
            tidx.push_back(*t);
        }
        if (p.time_us < 0)
            diags.push_back({"negative-time", "pulse " + std::to_string(i) + " has time < 0"});
        if (!(p.area_rad > 0.0) || p.area_rad > units::two_pi + 1e-12)
            diags.push_back({"bad-area",
                             "pulse " + std::to_string(i) + " area must lie in (0, 2pi]"});
        if (p.direction != 1 && p.direction != -1)
            diags.push_back({"bad-direction",
                             "pulse " + std::to_string(i) + " direction must be +1 or -1"});
        if (i > 0 && !(seq.optical[i].time_us > seq.optical[i - 1].time_us))
            diags.push_back({"non-monotone-times",
                             "pulses " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                 " are not strictly ordered in time"});
        if (p.role == PulseRole::signal)
            signal.push_back(i);
        else
            controls.push_back(i);
        slots.push_back(p.slot.empty() ? std::to_string(i) : p.slot);
    }

    for (std::size_t i = 0; i < seq.stark.size(); ++i) {
        const StarkPulse& s = seq.stark[i];
        if (s.area_v_us_cm < 0)
            diags.push_back({"bad-stark-area", "stark pulse " + std::to_string(i) + " area < 0"});
        if (s.sigma_e < 0)
            diags.push_back({"bad-sigma-e", "stark pulse " + std::to_string(i) + " sigma_e < 0"});
    }

    if (!(seq.detection.start_us < seq.detection.end_us))
        diags.push_back({"zero-length-window", "detection window start must precede its end"});

    if (rule == SignalRule::exactly_one && signal.size() != 1) {
        diags.push_back({"no-signal-pulse",
                         signal.empty() ? "no signal pulse"
                                        : "expected exactly one signal pulse, found " +
                                              std::to_string(signal.size())});
    } else if (rule == SignalRule::at_least_one && signal.empty()) {
        diags.push_back({"no-signal-pulse", "no signal pulse"});
    }

    int det = -1;
    if (!seq.detection_transition.empty()) {
        auto t = scheme.try_transition_index(seq.detection_transition);
        if (!t || scheme.transition(*t).kind != TransitionKind::optical)
            diags.push_back({"unknown-transition",
                             "detection transition '" + seq.detection_transition + "' not optical"});
        else
            det = *t;
    } else if (!signal.empty() && tidx[signal.front()] >= 0) {
        det = tidx[signal.front()];
    }
    if (det < 0 && diags.empty())
        diags.push_back({"no-detection-transition",
                         "no detection transition given and no signal pulse to infer it from"});

    if (!diags.empty()) return {std::nullopt, std::move(diags)};
    return {ValidationAccess::build(seq, scheme, std::move(tidx), std::move(signal),
                                    std::move(controls), std::move(slots), det),
            {}};
}

ValidationResult validate_sequence(const ValidatedSequence& seq, SignalRule rule)
{
    return validate_sequence(seq.sequence(), seq.scheme(), rule);
}

} // namespace starkecho
