#include "starkecho/interference.hpp"

#include <cmath>
#include <stdexcept>

namespace starkecho {

std::vector<double> mzi_fringe(double alpha_rad, double visibility,
                               const std::vector<double>& beta_grid_rad, double i0)
{
    if (visibility < 0 || visibility > 1)
        throw std::invalid_argument("visibility must lie in [0, 1]");
    std::vector<double> out;
    out.reserve(beta_grid_rad.size());
    for (double beta : beta_grid_rad)
        out.push_back(0.5 * i0 * (1.0 + visibility * std::cos(alpha_rad - beta)));
    return out;
}

VisibilityFit extract_visibility(const std::vector<double>& beta_rad,
                                 const std::vector<double>& intensity)
{
    std::size_t m = beta_rad.size();
    if (m < 3 || intensity.size() != m)
        throw std::invalid_argument("visibility extraction needs >= 3 matched samples");

    // Normal equations for I = c0 + c1 cos b + c2 sin b.
    double s[3][3] = {{0}};
    double rhs[3] = {0, 0, 0};
    for (std::size_t i = 0; i < m; ++i) {
        double basis[3] = {1.0, std::cos(beta_rad[i]), std::sin(beta_rad[i])};
        for (int a = 0; a < 3; ++a) {
            rhs[a] += basis[a] * intensity[i];
            for (int b = 0; b < 3; ++b) s[a][b] += basis[a] * basis[b];
        }
    }
    double a[9] = {s[0][0], s[0][1], s[0][2], s[1][0], s[1][1],
                   s[1][2], s[2][0], s[2][1], s[2][2]};
    double x[3] = {rhs[0], rhs[1], rhs[2]};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r * 3 + col]) > std::abs(a[piv * 3 + col])) piv = r;
        if (std::abs(a[piv * 3 + col]) < 1e-12)
            throw std::invalid_argument("beta grid does not constrain the fringe (degenerate)");
        for (int cc = 0; cc < 3; ++cc) std::swap(a[col * 3 + cc], a[piv * 3 + cc]);
        std::swap(x[col], x[piv]);
        for (int r = col + 1; r < 3; ++r) {
            double f = a[r * 3 + col] / a[col * 3 + col];
            for (int cc = col; cc < 3; ++cc) a[r * 3 + cc] -= f * a[col * 3 + cc];
            x[r] -= f * x[col];
        }
    }
    double c2 = x[2] / a[8];
    double c1 = (x[1] - a[5] * c2) / a[4];
    double c0 = (x[0] - a[1] * c1 - a[2] * c2) / a[0];

    VisibilityFit out;
    out.offset = c0;
    out.phase_rad = std::atan2(c2, c1);
    double amp = std::hypot(c1, c2);
    out.visibility = c0 > 0 ? amp / c0 : 0.0;
    return out;
}

} // namespace starkecho
