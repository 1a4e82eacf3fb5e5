#include "starkecho/least_squares.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace starkecho {

namespace {

// Solve A x = b for a small symmetric positive matrix by Gaussian
// elimination with partial pivoting. Returns false when singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n,
                 std::vector<double>& x)
{
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return true;
}

bool invert_dense(const std::vector<double>& a, std::size_t n, std::vector<double>& inv)
{
    inv.assign(n * n, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        std::vector<double> x;
        if (!solve_dense(a, e, n, x)) return false;
        for (std::size_t r = 0; r < n; ++r) inv[r * n + col] = x[r];
    }
    return true;
}

} // namespace

FitResult fit_least_squares(const FitData& data, const FitModel& model,
                            std::vector<double> initial, int max_iterations, double tolerance)
{
    std::size_t m = data.x.size();
    std::size_t n = initial.size();
    if (m != data.y.size() || (!data.sigma.empty() && data.sigma.size() != m))
        throw std::invalid_argument("fit data arrays must have equal length");
    if (m < n) throw std::invalid_argument("fewer points than parameters");

    auto weight = [&](std::size_t i) {
        double s = data.sigma.empty() ? std::sqrt(std::max(std::abs(data.y[i]), 1e-12))
                                      : data.sigma[i];
        return 1.0 / (s * s);
    };

    auto chi2 = [&](const std::vector<double>& p) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double r = data.y[i] - model(data.x[i], p, nullptr);
            s += weight(i) * r * r;
        }
        return s;
    };

    FitResult out;
    std::vector<double> p = std::move(initial);
    double lambda = 1e-3;
    double prev = chi2(p);
    std::vector<double> jrow(n);
    int it = 0;
    bool converged = false;
    for (; it < max_iterations; ++it) {
        // Normal equations JtWJ and JtW r.
        std::vector<double> jtj(n * n, 0.0), jtr(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double f = model(data.x[i], p, &jrow);
            double w = weight(i);
            double r = data.y[i] - f;
            for (std::size_t a = 0; a < n; ++a) {
                jtr[a] += w * jrow[a] * r;
                for (std::size_t b = 0; b < n; ++b) jtj[a * n + b] += w * jrow[a] * jrow[b];
            }
        }
        bool improved = false;
        for (int attempt = 0; attempt < 32; ++attempt) {
            std::vector<double> damped = jtj;
            for (std::size_t a = 0; a < n; ++a) damped[a * n + a] *= (1.0 + lambda);
            std::vector<double> step;
            if (!solve_dense(damped, jtr, n, step)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial(n);
            for (std::size_t a = 0; a < n; ++a) trial[a] = p[a] + step[a];
            double c = chi2(trial);
            if (c <= prev) {
                double rel = prev > 0 ? (prev - c) / std::max(prev, 1e-300) : 0.0;
                p = std::move(trial);
                improved = true;
                lambda = std::max(lambda * 0.3, 1e-12);
                if (rel < tolerance) converged = true;
                prev = c;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            // No damped step improves chi^2: the iterate is a local
            // minimum to within numerical precision.
            converged = true;
            break;
        }
        if (converged) break;
    }

    out.parameters = p;
    out.iterations = it + 1;
    out.converged = converged;
    out.residual_norm = std::sqrt(prev);

    // Uncertainties from the inverse of JtWJ at the solution.
    std::vector<double> jtj(n * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        model(data.x[i], p, &jrow);
        double w = weight(i);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) jtj[a * n + b] += w * jrow[a] * jrow[b];
    }
    std::vector<double> cov;
    if (invert_dense(jtj, n, cov)) {
        out.uncertainties.resize(n);
        for (std::size_t a = 0; a < n; ++a)
            out.uncertainties[a] = std::sqrt(std::max(cov[a * n + a], 0.0));
    } else {
        out.uncertainties.assign(n, std::numeric_limits<double>::infinity());
        out.flags.push_back("rank-deficient");
    }
    return out;
}

} // namespace starkecho
