#pragma once

#include <string>

#include "starkecho/least_squares.hpp"

namespace starkecho {

enum class SweptVariable { excited_storage, ground_storage, two_pe_delay, stark_area };

struct DecayCurve {
    std::vector<double> delay_us; // or V*us/cm for Stark-area sweeps
    std::vector<double> intensity;
    std::vector<double> sigma; // optional per-point uncertainty
    SweptVariable swept = SweptVariable::excited_storage;
};

enum class DecayModel {
    eq_ground,  // A * exp(-pi^2 G13^2 a^2 / 2ln2)                  params (A, G13)
    eq_excited, // A * exp(-pi^2 G35^2 b^2 / 2ln2 - 2 gamma b)       params (A, G35, gamma)
    two_pe      // A * exp(-4 gamma tau)                             params (A, gamma)
};

// Weighted least squares against the selected decay factor; linewidths in
// kHz, delays in us. Weights default to Poissonian sqrt(intensity).
FitResult fit_decay(const DecayCurve& curve, DecayModel model);

struct StarkModulationFit {
    FitResult fit;                 // parameters (I0, kappa, sigma_e)
    double kappa_khz_per_v_cm = 0; // convenience copies of the estimates
    double sigma_e = 0;
    double silencing_area_v_us_cm = 0; // first modulation minimum, 1/(4 kappa 1e-3)
};

// Fits I(A) = I0 [exp(-(s phi)^2/2) cos^2(phi/2) + (1 - exp(-(s phi)^2/2))/2]
// with phi = 2 * 2pi * kappa * 1e-3 * A against a Stark-area sweep. Errors
// when the sampled range contains no modulation minimum.
StarkModulationFit fit_stark_modulation(const DecayCurve& curve);

} // namespace starkecho
