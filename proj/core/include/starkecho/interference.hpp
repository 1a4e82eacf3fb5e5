#pragma once

#include <vector>

namespace starkecho {

// Ideal unbalanced-interferometer fringe: I(beta) = I0 (1 + V cos(alpha - beta)) / 2.
std::vector<double> mzi_fringe(double alpha_rad, double visibility,
                               const std::vector<double>& beta_grid_rad, double i0 = 1.0);

struct VisibilityFit {
    double visibility = 0.0;
    double phase_rad = 0.0; // fringe maximum location (the prepared alpha)
    double offset = 0.0;    // I0 / 2
};

// Three-parameter cosine fit I = c0 + c1 cos(beta) + c2 sin(beta), solved
// exactly by linear least squares; robust to sparse beta sampling.
VisibilityFit extract_visibility(const std::vector<double>& beta_rad,
                                 const std::vector<double>& intensity);

} // namespace starkecho
