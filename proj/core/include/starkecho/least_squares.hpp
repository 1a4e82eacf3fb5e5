#pragma once

#include <functional>
#include <string>
#include <vector>

namespace starkecho {

struct FitResult {
    std::vector<double> parameters;
    std::vector<double> uncertainties; // 1-sigma from the inverse approximate Hessian
    double residual_norm = 0.0;        // sqrt(sum of weighted squared residuals)
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> flags; // "degenerate", "non-identifiable", ...
};

// model(x, p, dydp): value at x for parameters p; when dydp is non-null it
// receives the partial derivatives with respect to each parameter.
using FitModel =
    std::function<double(double x, const std::vector<double>& p, std::vector<double>* dydp)>;

struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma; // empty: Poissonian sqrt(max(y, eps)) weighting
};

// Damped Gauss-Newton (Levenberg-Marquardt style) weighted least squares.
FitResult fit_least_squares(const FitData& data, const FitModel& model,
                            std::vector<double> initial, int max_iterations = 200,
                            double tolerance = 1e-12);

} // namespace starkecho
