#pragma once

#include <cstdint>

namespace starkecho {

// Counts and visibilities of one time-bin qubit measurement, with the
// fidelities derived from them. S is the noise-subtracted signal, N the
// noise; V_0 and V_90 are interference visibilities for input phases of
// 0 and 90 degrees.
struct QubitCounts {
    double s_early = 0, n_early = 0;
    double s_late = 0, n_late = 0;
    double v_0 = 0, v_90 = 0;
    // optional 1-sigma uncertainties; <= 0 means Poissonian for counts, 0 for V
    double sigma_s_early = -1, sigma_n_early = -1;
    double sigma_s_late = -1, sigma_n_late = -1;
    double sigma_v_0 = 0, sigma_v_90 = 0;
};

struct QubitResult {
    double f_early = 0, f_late = 0;
    double f_plus = 0, f_minus = 0;
    double f_poles = 0, f_equator = 0, f_total = 0;
    double sigma_f_early = 0, sigma_f_late = 0;
    double sigma_f_plus = 0, sigma_f_minus = 0;
    double sigma_f_poles = 0, sigma_f_equator = 0, sigma_f_total = 0;
};

// (S + N) / (S + 2N): 1 for noiseless retrieval, 1/2 for pure noise.
double pole_fidelity(double s, double n);

// (1 + V) / 2.
double equator_fidelity(double visibility);

struct TotalFidelity {
    double poles = 0, equator = 0, total = 0;
};

// F_poles = (F_e + F_l)/2, F_equator = (F_+ + F_-)/2,
// F_T = F_poles/3 + 2 F_equator/3.
TotalFidelity total_fidelity(double f_early, double f_late, double f_plus, double f_minus);

// Full result with first-order uncertainty propagation. When
// monte_carlo_samples > 0, uncertainties come instead from resampling the
// inputs with the given seed.
QubitResult qubit_fidelities(const QubitCounts& counts, int monte_carlo_samples = 0,
                             std::uint64_t seed = 1);

} // namespace starkecho
