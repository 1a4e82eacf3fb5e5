#include "starkecho/efficiency.hpp"

#include <cmath>

#include "starkecho/units.hpp"

namespace starkecho {

double retrieval_efficiency(double optical_depth, Retrieval direction)
{
    if (optical_depth < 0) throw std::invalid_argument("optical depth must be nonnegative");
    double d = optical_depth;
    if (direction == Retrieval::forward) return d * d * std::exp(-d);
    double a = 1.0 - std::exp(-d);
    return a * a;
}

double decay_factor(double gamma13_khz, double gamma35_khz, double gamma_opt_khz, double a_us,
                    double b_us)
{
    if (a_us < 0 || b_us < 0) throw std::invalid_argument("storage durations must be nonnegative");
    if (gamma13_khz < 0 || gamma35_khz < 0 || gamma_opt_khz < 0)
        throw std::invalid_argument("linewidths must be nonnegative");
    double c = units::gaussian_decay_coeff();
    double ground = std::exp(-c * gamma13_khz * gamma13_khz * a_us * a_us);
    double excited = std::exp(-c * gamma35_khz * gamma35_khz * b_us * b_us -
                              2.0 * gamma_opt_khz * units::khz_us_to_cycles * b_us);
    return ground * excited;
}

EfficiencyBreakdown total_efficiency(double optical_depth, double eta_pm, double eta_control,
                                     double eta_decay, Retrieval direction)
{
    if (eta_pm < 0 || eta_pm > 1 || eta_control < 0 || eta_control > 1 || eta_decay < 0 ||
        eta_decay > 1)
        throw std::invalid_argument("efficiency factors must lie in [0, 1]");
    EfficiencyBreakdown b;
    b.retrieval = retrieval_efficiency(optical_depth, direction);
    b.phase_matching = eta_pm;
    b.control = eta_control;
    b.decay = eta_decay;
    b.direction = direction;
    b.total = b.retrieval * b.phase_matching * b.control * b.control * b.control * b.control *
              b.decay;
    return b;
}

double infer_control_efficiency(double intensity_se, double intensity_4le,
                                double decay_correction)
{
    if (!(intensity_se > 0) || !(intensity_4le > 0))
        throw std::invalid_argument("intensities must be positive");
    if (!(decay_correction > 0))
        throw std::invalid_argument("decay correction must be positive");
    double r = (intensity_se / intensity_4le) / decay_correction;
    if (!(r > 0)) throw std::invalid_argument("intensity ratio must be positive");
    double s = std::sqrt(r);
    return s / (1.0 + s);
}

} // namespace starkecho
