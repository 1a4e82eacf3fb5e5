#include "starkecho/cavity.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace starkecho {

double cavity_retrieval(const CavityParams& c)
{
    if (c.r1 < 0 || c.r1 > 1 || c.r2 < 0 || c.r2 > 1)
        throw std::invalid_argument("mirror reflectivities must lie in [0, 1]");
    if (c.optical_depth < 0) throw std::invalid_argument("optical depth must be nonnegative");
    double d = c.optical_depth;
    double round_trip = std::sqrt(c.r1 * c.r2) * std::exp(-d);
    double denom = 1.0 - round_trip;
    if (denom < 1e-12)
        throw std::domain_error("cavity round-trip gain too close to unity");
    double num = 4.0 * d * d * std::exp(-2.0 * d) * (1.0 - c.r1) * (1.0 - c.r1) * c.r2;
    double d2 = denom * denom;
    return num / (d2 * d2);
}

CavityOptimum optimize_cavity(double optical_depth, double r2)
{
    if (!(optical_depth > 0)) throw std::invalid_argument("optical depth must be positive");
    if (!(r2 > 0) || r2 > 1) throw std::invalid_argument("R2 must lie in (0, 1]");

    auto eta = [&](double r1) { return cavity_retrieval({r1, r2, optical_depth}); };

    // Grid pre-scan over [0, 1).
    const int n = 2000;
    const double hi = 1.0 - 1e-9;
    int best = 0;
    double best_eta = -1.0;
    std::vector<double> values(n + 1);
    for (int i = 0; i <= n; ++i) {
        double r1 = hi * static_cast<double>(i) / n;
        values[static_cast<std::size_t>(i)] = eta(r1);
        if (values[static_cast<std::size_t>(i)] > best_eta) {
            best_eta = values[static_cast<std::size_t>(i)];
            best = i;
        }
    }
    // Unimodality check: one rising stretch followed by one falling one.
    int sign_changes = 0;
    int prev = 0;
    for (int i = 1; i <= n; ++i) {
        double diff = values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(i - 1)];
        int s = diff > 0 ? 1 : (diff < 0 ? -1 : prev);
        if (prev != 0 && s != prev) ++sign_changes;
        prev = s;
    }
    double lo_r = hi * static_cast<double>(std::max(0, best - 1)) / n;
    double hi_r = hi * static_cast<double>(std::min(n, best + 1)) / n;
    if (sign_changes > 1) {
        // Not unimodal on the grid; report the grid argmax.
        return {hi * static_cast<double>(best) / n, best_eta};
    }

    // Golden-section refinement.
    const double invphi = 0.6180339887498949;
    double a = lo_r, b = hi_r;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = eta(x1), f2 = eta(x2);
    for (int it = 0; it < 200; ++it) {
        if (std::abs(f1 - f2) < 1e-12 && (b - a) < 1e-10) break;
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = eta(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = eta(x1);
        }
    }
    double r1 = 0.5 * (a + b);
    return {r1, eta(r1)};
}

} // namespace starkecho
