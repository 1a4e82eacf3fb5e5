#pragma once

#include <utility>

namespace starkecho {

struct CavityParams {
    double r1 = 0.0; // input coupling mirror reflectivity
    double r2 = 0.0; // end mirror reflectivity
    double optical_depth = 0.0;
};

// Retrieval efficiency of the impedance-matched cavity memory:
//   4 d^2 e^-2d (1-R1)^2 R2 / (1 - sqrt(R1 R2) e^-d)^4.
// Throws when the denominator is within underflow distance of the
// divergent limit sqrt(R1 R2) e^-d -> 1.
double cavity_retrieval(const CavityParams& c);

struct CavityOptimum {
    double r1 = 0.0;
    double efficiency = 0.0;
};

// Maximizes cavity_retrieval over R1 in [0, 1) for fixed d and R2 by a
// coarse grid pre-scan (which doubles as a unimodality check) followed by
// golden-section refinement to |delta eta| < 1e-9. Falls back to the grid
// argmax when the scan is not unimodal.
CavityOptimum optimize_cavity(double optical_depth, double r2);

} // namespace starkecho
