#pragma once

#include <stdexcept>

namespace starkecho {

enum class Retrieval { forward, backward };

// Factorized memory efficiency: eta_total = eta_retrieval * eta_pm *
// eta_control^4 * eta_decay, exact to floating point.
struct EfficiencyBreakdown {
    double retrieval = 0.0;
    double phase_matching = 0.0;
    double control = 0.0;
    double decay = 0.0;
    Retrieval direction = Retrieval::forward;
    double total = 0.0;
};

// d^2 e^-d for forward retrieval (reabsorption-limited), (1 - e^-d)^2 for
// backward.
double retrieval_efficiency(double optical_depth, Retrieval direction);

// Intensity retention after spin storage:
//   exp(-pi^2 G13^2 a^2 / (2 ln 2)) * exp(-pi^2 G35^2 b^2 / (2 ln 2) - 2 gamma b)
// with linewidths in kHz, durations a = t5-t2 and b = t6-t3 in us, and the
// kHz*us reconciliation applied exactly once.
double decay_factor(double gamma13_khz, double gamma35_khz, double gamma_opt_khz, double a_us,
                    double b_us);

EfficiencyBreakdown total_efficiency(double optical_depth, double eta_pm, double eta_control,
                                     double eta_decay, Retrieval direction);

// Inverts the intensity-scaling pair I_SE ~ eta^4, I_4LE ~ (1-eta)^2 eta^2:
// with r = (I_SE / I_4LE) / decay_correction, eta = sqrt(r) / (1 + sqrt(r)).
double infer_control_efficiency(double intensity_se, double intensity_4le,
                                double decay_correction);

} // namespace starkecho
