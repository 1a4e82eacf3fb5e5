#include "starkecho/sequence_builder.hpp"

#include <stdexcept>

namespace starkecho {

namespace {

void check_timings(const MemoryTimings& t)
{
    const double order[] = {t.t0, t.t1, t.t2, t.t3, t.t5, t.t6, t.t7};
    for (std::size_t i = 1; i < std::size(order); ++i)
        if (!(order[i] > order[i - 1]))
            throw std::invalid_argument("memory timings must satisfy t0 < t1 < t2 < t3 < t5 < t6 < t7");
    double t8 = stark_echo_time(t);
    if (!(t8 > t.t6))
        throw std::invalid_argument("echo would precede the last control pulse (t5 - t3 < t2 - t0)");
    if (!(t8 > t.t7))
        throw std::invalid_argument("echo would precede the rephasing Stark pulse at t7");
}

} // namespace

ValidatedSequence memory_sequence(RetrievalDirection dir, const MemoryTimings& t,
                                 const LevelScheme& scheme, const BuilderOptions& opt)
{
    check_timings(t);

    PulseSequence seq;
    const double pi = units::pi;
    seq.optical.push_back(
        {t.t0, opt.signal_transition, opt.signal_area_rad, 0.0, +1, PulseRole::signal, "0"});
    const double times[4] = {t.t2, t.t3, t.t5, t.t6};
    const char* slots[4] = {"2", "3", "5", "6"};
    for (int i = 0; i < 4; ++i) {
        int direction = +1;
        if (dir == RetrievalDirection::backward && i == 2) direction = -1; // the t5 pulse
        seq.optical.push_back({times[i], opt.control_transitions[static_cast<std::size_t>(i)], pi,
                               0.0, direction, PulseRole::control, slots[i]});
    }
    seq.stark.push_back({t.t1, opt.stark_area_v_us_cm, opt.stark_sigma_e});
    seq.stark.push_back({t.t7, opt.stark_area_v_us_cm, opt.stark_sigma_e});

    double t8 = stark_echo_time(t);
    seq.detection = {t8 - opt.detection_halfwidth_us, t8 + opt.record_tail_us};
    seq.detection_direction = dir == RetrievalDirection::forward ? +1 : -1;
    seq.detection_transition = opt.signal_transition;

    ValidationResult res = validate_sequence(seq, scheme, SignalRule::exactly_one);
    if (!res.ok())
        throw std::invalid_argument("memory_sequence produced an invalid sequence: " +
                                    res.diagnostics.front().message);
    return *res.sequence;
}

ValidatedSequence interference_sequence(RetrievalDirection dir, const MemoryTimings& t,
                                        double bin_delay_us, double alpha_rad, double beta_rad,
                                        const LevelScheme& scheme, const BuilderOptions& opt)
{
    check_timings(t);
    if (!(bin_delay_us > 0)) throw std::invalid_argument("bin delay must be positive");
    if (!(t.t0 + bin_delay_us < t.t1))
        throw std::invalid_argument("late input bin must precede the first Stark pulse");
    if (!(t.t6 + bin_delay_us < t.t7))
        throw std::invalid_argument("second pi/2 pulse must precede the Stark pulse at t7");

    PulseSequence seq;
    const double pi = units::pi;
    // Early/late input bins, equal weight, relative phase alpha.
    seq.optical.push_back(
        {t.t0, opt.signal_transition, opt.signal_area_rad, 0.0, +1, PulseRole::signal, "0e"});
    seq.optical.push_back({t.t0 + bin_delay_us, opt.signal_transition, opt.signal_area_rad,
                           alpha_rad, +1, PulseRole::signal, "0l"});

    const double times[3] = {t.t2, t.t3, t.t5};
    const char* slots[3] = {"2", "3", "5"};
    for (int i = 0; i < 3; ++i) {
        int direction = +1;
        if (dir == RetrievalDirection::backward && i == 2) direction = -1;
        seq.optical.push_back({times[i], opt.control_transitions[static_cast<std::size_t>(i)], pi,
                               0.0, direction, PulseRole::control, slots[i]});
    }
    // The readout pi pulse becomes two pi/2 pulses with relative phase beta.
    seq.optical.push_back({t.t6, opt.control_transitions[3], pi / 2.0, 0.0, +1,
                           PulseRole::readout_half, "6e"});
    seq.optical.push_back({t.t6 + bin_delay_us, opt.control_transitions[3], pi / 2.0, beta_rad, +1,
                           PulseRole::readout_half, "6l"});

    seq.stark.push_back({t.t1, opt.stark_area_v_us_cm, opt.stark_sigma_e});
    seq.stark.push_back({t.t7, opt.stark_area_v_us_cm, opt.stark_sigma_e});

    // Central output bin: early input through the late pi/2, and late input
    // through the early pi/2, both land at t8 + bin_delay.
    double t8_central = stark_echo_time(t) + bin_delay_us;
    seq.detection = {t8_central - opt.detection_halfwidth_us,
                     t8_central + opt.detection_halfwidth_us};
    seq.detection_direction = dir == RetrievalDirection::forward ? +1 : -1;
    seq.detection_transition = opt.signal_transition;

    ValidationResult res = validate_sequence(seq, scheme, SignalRule::at_least_one);
    if (!res.ok())
        throw std::invalid_argument("interference_sequence produced an invalid sequence: " +
                                    res.diagnostics.front().message);
    return *res.sequence;
}

} // namespace starkecho
