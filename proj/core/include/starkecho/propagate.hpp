#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "starkecho/ion_ensemble.hpp"
#include "starkecho/pulse_sequence.hpp"

namespace starkecho {

// How control-pulse areas are realized by the propagator. The signal
// pulse is never rescaled.
struct ControlModel {
    enum class Kind { as_declared, area_scale } kind = Kind::as_declared;
    double scale = 1.0; // applied area = declared area * scale

    static ControlModel ideal() { return {}; }
    // Scale such that a declared pi pulse transfers population with
    // probability eta: theta = 2 asin(sqrt(eta)).
    static ControlModel from_transfer_efficiency(double eta);
    static ControlModel from_area_scale(double s) { return {Kind::area_scale, s}; }
};

struct PropagateOptions {
    double grid_step_us = 0.05;
    double record_start_us = 0.0;
    double record_end_us = -1.0; // <= 0: detection window end
    ControlModel control_model{};
    unsigned threads = 0;        // 0: hardware concurrency
    unsigned validation_stride = 97; // positive-semidefiniteness checked on every k-th ion
    double invariant_tolerance = 1e-9;
};

// Phase-matched emission amplitudes on a uniform time grid, one channel
// per optical transition and propagation direction. Amplitudes are the
// per-ion averages sum(rho_eg * exp(-/+ i k z)) / N, so |amplitude|^2 is
// comparable across ensemble sizes.
struct EmissionRecord {
    double t0_us = 0.0;
    double step_us = 0.0;
    std::size_t n_points = 0;
    std::vector<std::string> transitions;
    std::vector<std::vector<std::complex<double>>> forward; // [transition][point]
    std::vector<std::vector<std::complex<double>>> backward;
    std::size_t n_ions = 0;
    std::uint64_t seed = 0;
    std::string detection_transition;
    int detection_direction = +1;

    double time_at(std::size_t k) const { return t0_us + step_us * static_cast<double>(k); }
    const std::vector<std::complex<double>>& channel(int direction,
                                                     const std::string& transition = "") const;
};

// Propagates every ion through the sequence: free evolution between
// events accumulates detuning phases and damps optical coherences at
// amplitude rate 2*pi*gamma; optical pulses act as instantaneous
// rotations carrying exp(+-i k z) on the raised/lowered leg; Stark pulses
// kick excited-level phases by +-2*pi*kappa*area per class. Emission
// channels are reduced per ion in fixed index order (block-pairwise), so
// results are bit-identical for any thread count.
EmissionRecord propagate(const ValidatedSequence& seq, const std::vector<IonState>& ensemble,
                         const MaterialParams& params, const PropagateOptions& opt = {});

// Integrated |amplitude|^2 over [start, end) for one direction (and
// transition; empty means the record's detection transition).
double echo_intensity(const EmissionRecord& record, double start_us, double end_us, int direction,
                      const std::string& transition = "");

struct EmissionPeak {
    double time_us = 0.0;
    double intensity = 0.0;
    int direction = 0;
    std::string transition;
};

// Local maxima of |amplitude|^2 above rel_threshold times the strongest
// point of the whole record, sorted by intensity descending.
std::vector<EmissionPeak> find_peaks(const EmissionRecord& record, double rel_threshold = 0.01);

} // namespace starkecho
