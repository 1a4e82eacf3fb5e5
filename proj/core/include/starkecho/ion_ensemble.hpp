#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "starkecho/level_scheme.hpp"
#include "starkecho/material.hpp"

namespace starkecho {

// One ensemble member. spin_detunings_khz is aligned with
// scheme.spin_transition_indices(). rho is row-major over the scheme's
// levels; it stays Hermitian, trace one and positive semidefinite to
// 1e-9 through any sequence.
struct IonState {
    int stark_class = +1; // +1 or -1, sign of the linear Stark shift
    double spatial_phase_rad = 0.0;
    double optical_detuning_khz = 0.0;
    std::vector<double> spin_detunings_khz;
    double stark_field_error = 0.0; // unit-normal draw; pulse areas scale by 1 + sigma_e * this
    std::vector<std::complex<double>> rho;
};

// Deterministic ensemble: classes alternate +1/-1 so the split is exactly
// even, and all draws come from a counter RNG keyed by (seed, ion index).
std::vector<IonState> sample_ensemble(const MaterialParams& params, const LevelScheme& scheme,
                                      std::size_t n_ions, std::uint64_t seed,
                                      const std::map<std::string, double>& initial_populations);

// Sample drawn from the configured spectral feature, in kHz.
double sample_feature_detuning(const MaterialParams& params, double u_or_gauss_uniform,
                               double gauss);

double density_matrix_trace_error(const std::vector<std::complex<double>>& rho, std::size_t n);
double density_matrix_hermiticity_error(const std::vector<std::complex<double>>& rho,
                                        std::size_t n);
// Most negative eigenvalue of a Hermitian matrix (0 if none negative).
double density_matrix_negativity(const std::vector<std::complex<double>>& rho, std::size_t n);

} // namespace starkecho
