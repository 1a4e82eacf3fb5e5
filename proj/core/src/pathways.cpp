#include "starkecho/pathways.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starkecho/units.hpp"

namespace starkecho {

std::string to_string(PathwayKind k)
{
    switch (k) {
        case PathwayKind::SE: return "SE";
        case PathwayKind::FourLE: return "4LE";
        case PathwayKind::TwoPE: return "2PE";
        case PathwayKind::FID: return "FID";
    }
    return "?";
}

namespace {

// Orientation of a coherence element: -1 when the ket leg is excited and
// the bra leg is ground, +1 for the conjugate arrangement, 0 for spin
// coherences. The optical-detuning phase of the element advances at
// orientation * detuning, so emission requires the signed interval sum to
// vanish; the per-pulse signs of that sum are the same ones that weight
// the pulse wave vectors.
int orientation(const LevelScheme& s, int ket, int bra)
{
    bool ke = s.is_excited(ket), be = s.is_excited(bra);
    if (ke && !be) return -1;
    if (!ke && be) return +1;
    return 0;
}

struct WalkPoint {
    double time;
    int ket, bra;
};

struct Walk {
    bool ok = false;
    std::string note;
    std::vector<WalkPoint> points; // state after each participating pulse
    std::vector<int> orient;       // orientation after each participating pulse
};

// Advance the tracked coherence through one pulse. A pulse moves whichever
// leg sits on its transition; if the coherence lies exactly on the pulse's
// transition both legs flip (conjugation), which is what rephases a
// two-pulse echo. The candidate action is always unique or absent.
bool apply_pulse(int lo, int up, int& ket, int& bra, std::string& note)
{
    int nket = ket, nbra = bra;
    if ((ket == lo && bra == up) || (ket == up && bra == lo)) {
        std::swap(nket, nbra);
    } else if (ket == lo) {
        nket = up;
    } else if (ket == up) {
        nket = lo;
    } else if (bra == lo) {
        nbra = up;
    } else if (bra == up) {
        nbra = lo;
    } else {
        note = "pulse transition does not touch the current coherence";
        return false;
    }
    if (nket == nbra) {
        note = "pulse action collapses the coherence onto a population";
        return false;
    }
    ket = nket;
    bra = nbra;
    return true;
}

Walk walk_from_signal(const ValidatedSequence& seq, std::size_t signal,
                      const std::vector<std::size_t>& pulses)
{
    const LevelScheme& scheme = seq.scheme();
    Walk w;
    int t_sig = seq.transition_of(signal);
    int ket = scheme.upper_level(t_sig);
    int bra = scheme.lower_level(t_sig);
    w.points.push_back({seq.sequence().optical[signal].time_us, ket, bra});
    w.orient.push_back(orientation(scheme, ket, bra));
    for (std::size_t p : pulses) {
        int tr = seq.transition_of(p);
        if (!apply_pulse(scheme.lower_level(tr), scheme.upper_level(tr), ket, bra, w.note))
            return w;
        w.points.push_back({seq.sequence().optical[p].time_us, ket, bra});
        w.orient.push_back(orientation(scheme, ket, bra));
    }
    w.ok = true;
    return w;
}

// Two-pulse echo: the first pulse converts population into a coherence in
// the dephasing-reversed orientation, the second conjugates it.
Walk walk_two_pulse(const ValidatedSequence& seq, std::size_t m, std::size_t n)
{
    const LevelScheme& scheme = seq.scheme();
    Walk w;
    int tr = seq.transition_of(m);
    int ket = scheme.lower_level(tr);
    int bra = scheme.upper_level(tr);
    w.points.push_back({seq.sequence().optical[m].time_us, ket, bra});
    w.orient.push_back(orientation(scheme, ket, bra));
    int tr2 = seq.transition_of(n);
    if (tr2 != tr) {
        w.note = "two-pulse echo requires a co-frequency pair";
        return w;
    }
    if (!apply_pulse(scheme.lower_level(tr2), scheme.upper_level(tr2), ket, bra, w.note))
        return w;
    w.points.push_back({seq.sequence().optical[n].time_us, ket, bra});
    w.orient.push_back(orientation(scheme, ket, bra));
    w.ok = true;
    return w;
}

struct StarkPhaseDetail {
    double relative_phase = 0.0;
    double sigma_eff = 0.0;
};

StarkPhaseDetail stark_phase_detail(const CoherenceTrace& trace,
                                    const std::vector<StarkPulse>& stark, double kappa)
{
    double per_class = 0.0;
    double weighted_sigma = 0.0;
    for (const StarkPulse& s : stark) {
        for (const TraceSegment& seg : trace.segments) {
            // Half-open on the left: a Stark pulse coincident with an
            // optical pulse is attributed to the following segment.
            if (!(s.time_us >= seg.start_us && s.time_us < seg.end_us)) continue;
            if (seg.orientation == 0) break; // spin segment, Stark-insensitive
            double phi = units::stark_phase_rad(kappa, s.area_v_us_cm);
            double sign = seg.orientation == -1 ? +1.0 : -1.0; // +1 when the ket leg is excited
            per_class += sign * phi;
            weighted_sigma += sign * phi * s.sigma_e;
            break;
        }
    }
    StarkPhaseDetail out;
    out.relative_phase = 2.0 * per_class;
    out.sigma_eff = std::abs(per_class) > 1e-300 ? std::abs(weighted_sigma / per_class) : 0.0;
    return out;
}

struct AssembledPathway {
    EchoPathway p;
};

// Turn a completed walk into a pathway: signs from orientation changes,
// conjugation so that the tracked element emits with the ket leg excited,
// kinematics from the signed sums, Stark phase from the trace.
EchoPathway assemble(const ValidatedSequence& seq, PathwayKind kind, std::string label,
                     const std::vector<std::size_t>& member_pulses, const Walk& walk,
                     double kappa)
{
    const LevelScheme& scheme = seq.scheme();
    const PulseSequence& pseq = seq.sequence();
    EchoPathway p;
    p.kind = kind;
    p.label = std::move(label);

    if (!walk.ok) {
        p.level_consistent = false;
        p.trace.consistent = false;
        p.trace.note = walk.note;
        p.flags.push_back("level-inconsistent");
        return p;
    }

    int s_final = walk.orient.back();
    if (s_final == 0) {
        p.level_consistent = false;
        p.trace.consistent = false;
        p.trace.note = "pathway ends on a spin coherence and cannot emit";
        p.flags.push_back("level-inconsistent");
        return p;
    }

    for (std::size_t j = 0; j < member_pulses.size(); ++j) {
        int prev = j == 0 ? 0 : walk.orient[j - 1];
        int sign = (walk.orient[j] - prev) * s_final;
        p.pulse_terms.push_back({member_pulses[j], sign});
    }

    double t_emit = 0.0;
    int dir_sum = 0;
    for (const PulseTerm& term : p.pulse_terms) {
        t_emit += term.sign * pseq.optical[term.pulse].time_us;
        dir_sum += term.sign * pseq.optical[term.pulse].direction;
    }
    p.emission_time_us = t_emit;
    p.direction_sum = dir_sum;
    p.phase_matched = std::abs(dir_sum) == 1;
    p.emission_direction = p.phase_matched ? dir_sum : 0;

    // Trace, conjugated if the walk ended in the ground-ket orientation.
    double t_last = walk.points.back().time;
    bool emits = t_emit > t_last + 1e-12;
    double final_end = t_emit;
    if (kind == PathwayKind::FID) {
        final_end = std::max(pseq.detection.end_us, t_last);
        emits = true;
    }
    for (std::size_t j = 0; j < walk.points.size(); ++j) {
        TraceSegment seg;
        seg.start_us = walk.points[j].time;
        seg.end_us = j + 1 < walk.points.size() ? walk.points[j + 1].time : final_end;
        seg.ket = s_final == -1 ? walk.points[j].ket : walk.points[j].bra;
        seg.bra = s_final == -1 ? walk.points[j].bra : walk.points[j].ket;
        seg.orientation = orientation(scheme, seg.ket, seg.bra);
        p.trace.segments.push_back(seg);
    }
    p.level_consistent = true;

    int fket = p.trace.segments.back().ket;
    int fbra = p.trace.segments.back().bra;
    if (auto tr = scheme.find_optical(fket, fbra)) p.emission_transition = scheme.transition(*tr).name;

    StarkPhaseDetail sp = stark_phase_detail(p.trace, pseq.stark, kappa);
    p.stark_relative_phase_rad = sp.relative_phase;
    p.stark_sigma_eff = sp.sigma_eff;

    if (!emits) {
        // The signed-time rephasing point precedes the last participating
        // pulse, so the coherence never refocuses and nothing is emitted.
        p.silencing_factor = 0.0;
        p.flags.push_back("before-last-pulse");
    } else {
        p.silencing_factor = silencing_factor(sp.relative_phase, sp.sigma_eff);
        if (t_emit < 0.0 || t_emit > seq.last_event_time()) p.flags.push_back("outside-sequence");
        for (const OpticalPulse& op : pseq.optical)
            if (kind != PathwayKind::FID && std::abs(op.time_us - t_emit) < 1e-9)
                p.flags.push_back("inside-pulse");
    }
    return p;
}

} // namespace

double silencing_factor(double relative_phase_rad, double sigma_e)
{
    if (sigma_e < 0) throw std::invalid_argument("sigma_e must be nonnegative");
    double phi = relative_phase_rad;
    double coh = std::exp(-0.5 * (sigma_e * phi) * (sigma_e * phi));
    double c = std::cos(0.5 * phi);
    double f = coh * c * c + 0.5 * (1.0 - coh);
    return std::clamp(f, 0.0, 1.0);
}

double stark_relative_phase(const CoherenceTrace& trace, const std::vector<StarkPulse>& stark,
                            double kappa_khz_per_v_cm)
{
    if (kappa_khz_per_v_cm < 0) throw std::invalid_argument("kappa must be nonnegative");
    return stark_phase_detail(trace, stark, kappa_khz_per_v_cm).relative_phase;
}

std::vector<EchoPathway> enumerate_pathways(const ValidatedSequence& seq, double kappa)
{
    const PulseSequence& pseq = seq.sequence();
    std::vector<EchoPathway> out;
    const auto& signals = seq.signal_pulses();
    const auto& controls = seq.control_pulses();

    auto slot = [&](std::size_t i) { return seq.slot_of(i); };

    for (std::size_t sig : signals) {
        std::string suffix = signals.size() > 1 ? "_" + slot(sig) : "";
        // Stimulated echo through every control that follows the signal.
        std::vector<std::size_t> later;
        for (std::size_t c : controls)
            if (pseq.optical[c].time_us > pseq.optical[sig].time_us) later.push_back(c);
        if (!later.empty()) {
            std::vector<std::size_t> members;
            members.push_back(sig);
            members.insert(members.end(), later.begin(), later.end());
            Walk w = walk_from_signal(seq, sig, later);
            out.push_back(assemble(seq, PathwayKind::SE, "SE" + suffix, members, w, kappa));
        }
        // One four-level echo candidate per ordered control pair.
        for (std::size_t a = 0; a < later.size(); ++a) {
            for (std::size_t b = a + 1; b < later.size(); ++b) {
                std::vector<std::size_t> pair = {later[a], later[b]};
                std::vector<std::size_t> members = {sig, later[a], later[b]};
                Walk w = walk_from_signal(seq, sig, pair);
                std::string label =
                    "4LE_" + slot(sig) + slot(later[a]) + slot(later[b]) + suffix;
                out.push_back(assemble(seq, PathwayKind::FourLE, label, members, w, kappa));
            }
        }
    }

    // Two-pulse echoes from co-frequency control pairs.
    for (std::size_t a = 0; a < controls.size(); ++a) {
        for (std::size_t b = a + 1; b < controls.size(); ++b) {
            if (seq.transition_of(controls[a]) != seq.transition_of(controls[b])) continue;
            Walk w = walk_two_pulse(seq, controls[a], controls[b]);
            std::string label = "2PE_" + slot(controls[a]) + slot(controls[b]);
            out.push_back(assemble(seq, PathwayKind::TwoPE, label,
                                   {controls[a], controls[b]}, w, kappa));
        }
    }

    // Free-induction decay of every optical pulse.
    for (std::size_t i = 0; i < pseq.optical.size(); ++i) {
        const LevelScheme& scheme = seq.scheme();
        int tr = seq.transition_of(i);
        Walk w;
        w.ok = true;
        w.points.push_back({pseq.optical[i].time_us, scheme.upper_level(tr), scheme.lower_level(tr)});
        w.orient.push_back(-1);
        out.push_back(assemble(seq, PathwayKind::FID, "FID_" + slot(i), {i}, w, kappa));
    }

    std::sort(out.begin(), out.end(), [](const EchoPathway& x, const EchoPathway& y) {
        if (x.emission_time_us != y.emission_time_us) return x.emission_time_us < y.emission_time_us;
        return x.label < y.label;
    });
    return out;
}

std::pair<double, int> emission_kinematics(const EchoPathway& pathway, const ValidatedSequence& seq)
{
    const PulseSequence& pseq = seq.sequence();
    double t = 0.0;
    int dir = 0;
    for (const PulseTerm& term : pathway.pulse_terms) {
        if (term.pulse >= pseq.optical.size())
            throw std::out_of_range("pathway references a pulse index outside the sequence");
        t += term.sign * pseq.optical[term.pulse].time_us;
        dir += term.sign * pseq.optical[term.pulse].direction;
    }
    return {t, dir};
}

CoherenceTrace trace_coherence(const ValidatedSequence& seq, const EchoPathway& pathway)
{
    // Rebuild the walk from the pathway's member pulses so that a trace can
    // be produced for externally constructed pathways as well.
    std::vector<std::size_t> members;
    for (const PulseTerm& t : pathway.pulse_terms) members.push_back(t.pulse);
    if (members.empty()) return {};

    if (pathway.kind == PathwayKind::TwoPE && members.size() == 2) {
        Walk w = walk_two_pulse(seq, members[0], members[1]);
        EchoPathway tmp = assemble(seq, pathway.kind, pathway.label, members, w, 0.0);
        return tmp.trace;
    }
    if (pathway.kind == PathwayKind::FID && members.size() == 1) {
        const LevelScheme& scheme = seq.scheme();
        int tr = seq.transition_of(members[0]);
        Walk w;
        w.ok = true;
        w.points.push_back({seq.sequence().optical[members[0]].time_us, scheme.upper_level(tr),
                            scheme.lower_level(tr)});
        w.orient.push_back(-1);
        EchoPathway tmp = assemble(seq, pathway.kind, pathway.label, members, w, 0.0);
        return tmp.trace;
    }
    std::vector<std::size_t> rest(members.begin() + 1, members.end());
    Walk w = walk_from_signal(seq, members[0], rest);
    EchoPathway tmp = assemble(seq, pathway.kind, pathway.label, members, w, 0.0);
    return tmp.trace;
}

bool detectable(const EchoPathway& p, double silencing_threshold)
{
    return p.phase_matched && p.level_consistent && p.silencing_factor >= silencing_threshold;
}

} // namespace starkecho
