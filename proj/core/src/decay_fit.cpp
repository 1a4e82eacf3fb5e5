#include "starkecho/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starkecho/units.hpp"

namespace starkecho {

namespace {

// Linear least squares of log(y) against the exponent structure gives a
// robust starting point before the damped nonlinear polish.
void linear_log_seed(const DecayCurve& c, bool with_linear_term, double& amp, double& quad,
                     double& lin)
{
    // log y = a0 - quad * x^2 - lin * x
    std::size_t m = c.delay_us.size();
    double s[3][3] = {{0}};
    double b[3] = {0, 0, 0};
    std::size_t n = with_linear_term ? 3 : 2;
    for (std::size_t i = 0; i < m; ++i) {
        double y = std::max(c.intensity[i], 1e-300);
        double x = c.delay_us[i];
        double basis[3] = {1.0, -x * x, -x};
        double ly = std::log(y);
        for (std::size_t a = 0; a < n; ++a) {
            b[a] += basis[a] * ly;
            for (std::size_t q = 0; q < n; ++q) s[a][q] += basis[a] * basis[q];
        }
    }
    // Solve the tiny system by Cramer-free elimination.
    double m00 = s[0][0], m01 = s[0][1], m02 = s[0][2];
    double m11 = s[1][1], m12 = s[1][2], m22 = s[2][2];
    amp = 1.0;
    quad = 0.0;
    lin = 0.0;
    if (!with_linear_term) {
        double det = m00 * m11 - m01 * m01;
        if (std::abs(det) < 1e-300) return;
        double a0 = (b[0] * m11 - m01 * b[1]) / det;
        quad = (m00 * b[1] - m01 * b[0]) / det;
        amp = std::exp(a0);
        return;
    }
    double a[9] = {m00, m01, m02, m01, m11, m12, m02, m12, m22};
    double rhs[3] = {b[0], b[1], b[2]};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r * 3 + col]) > std::abs(a[piv * 3 + col])) piv = r;
        if (std::abs(a[piv * 3 + col]) < 1e-300) return;
        for (int cc = 0; cc < 3; ++cc) std::swap(a[col * 3 + cc], a[piv * 3 + cc]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = col + 1; r < 3; ++r) {
            double f = a[r * 3 + col] / a[col * 3 + col];
            for (int cc = col; cc < 3; ++cc) a[r * 3 + cc] -= f * a[col * 3 + cc];
            rhs[r] -= f * rhs[col];
        }
    }
    double x2 = rhs[2] / a[8];
    double x1 = (rhs[1] - a[5] * x2) / a[4];
    double x0 = (rhs[0] - a[1] * x1 - a[2] * x2) / a[0];
    amp = std::exp(x0);
    quad = x1;
    lin = x2;
}

} // namespace

FitResult fit_decay(const DecayCurve& curve, DecayModel model)
{
    std::size_t m = curve.delay_us.size();
    if (m < 5) throw std::invalid_argument("decay fits need at least 5 points");
    if (m != curve.intensity.size())
        throw std::invalid_argument("delay and intensity arrays differ in length");
    for (double y : curve.intensity)
        if (!(y >= 0) || !std::isfinite(y))
            throw std::invalid_argument("intensities must be finite and nonnegative");

    const double c = units::gaussian_decay_coeff();
    const double k = units::khz_us_to_cycles;

    FitData data{curve.delay_us, curve.intensity, curve.sigma};

    FitModel fn;
    std::vector<double> p0;
    double amp, quad, lin;
    switch (model) {
        case DecayModel::eq_ground: {
            linear_log_seed(curve, false, amp, quad, lin);
            double g0 = quad > 0 ? std::sqrt(quad / c) : 0.0;
            p0 = {amp, g0};
            fn = [c](double x, const std::vector<double>& p, std::vector<double>* d) {
                double e = std::exp(-c * p[1] * p[1] * x * x);
                if (d) {
                    (*d)[0] = e;
                    (*d)[1] = -2.0 * c * p[1] * x * x * p[0] * e;
                }
                return p[0] * e;
            };
            break;
        }
        case DecayModel::eq_excited: {
            linear_log_seed(curve, true, amp, quad, lin);
            double g0 = quad > 0 ? std::sqrt(quad / c) : 1.0;
            double gam0 = std::max(lin / (2.0 * k), 0.1);
            p0 = {amp, g0, gam0};
            fn = [c, k](double x, const std::vector<double>& p, std::vector<double>* d) {
                double e = std::exp(-c * p[1] * p[1] * x * x - 2.0 * k * p[2] * x);
                if (d) {
                    (*d)[0] = e;
                    (*d)[1] = -2.0 * c * p[1] * x * x * p[0] * e;
                    (*d)[2] = -2.0 * k * x * p[0] * e;
                }
                return p[0] * e;
            };
            break;
        }
        case DecayModel::two_pe: {
            linear_log_seed(curve, true, amp, quad, lin);
            double gam0 = std::max(lin / (4.0 * k), 0.1);
            p0 = {amp, gam0};
            fn = [k](double x, const std::vector<double>& p, std::vector<double>* d) {
                double e = std::exp(-4.0 * k * p[1] * x);
                if (d) {
                    (*d)[0] = e;
                    (*d)[1] = -4.0 * k * x * p[0] * e;
                }
                return p[0] * e;
            };
            break;
        }
    }

    FitResult res = fit_least_squares(data, fn, p0);
    for (double& v : res.parameters) v = std::abs(v); // widths and rates are magnitudes
    if (res.parameters.size() > 1 && res.uncertainties.size() > 1) {
        double g = res.parameters[1];
        double sg = res.uncertainties[1];
        if (g < 1e-6 || (sg > 0 && sg > 2.0 * std::max(g, 1e-12)))
            res.flags.push_back("degenerate");
    }
    return res;
}

StarkModulationFit fit_stark_modulation(const DecayCurve& curve)
{
    std::size_t m = curve.delay_us.size();
    if (m < 5) throw std::invalid_argument("stark modulation fits need at least 5 points");
    double imax = *std::max_element(curve.intensity.begin(), curve.intensity.end());
    double imin = *std::min_element(curve.intensity.begin(), curve.intensity.end());
    if (!(imax > 0)) throw std::invalid_argument("non-identifiable: all intensities are zero");
    if (imin > 0.5 * imax)
        throw std::invalid_argument("non-identifiable: no modulation minimum in sampled range");

    // Initial kappa from the location of the sampled minimum (the first
    // silencing point), phi(A_min) = pi.
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (curve.intensity[i] < curve.intensity[argmin]) argmin = i;
    double a_min = curve.delay_us[argmin];
    if (!(a_min > 0)) throw std::invalid_argument("non-identifiable: minimum at zero area");
    double kappa0 = 1.0 / (4.0 * units::khz_us_to_cycles * a_min);

    FitData data{curve.delay_us, curve.intensity, curve.sigma};
    FitModel fn = [](double a, const std::vector<double>& p, std::vector<double>* d) {
        double i0 = p[0], kappa = p[1], s = p[2];
        double phi = 2.0 * units::stark_phase_rad(kappa, a);
        double dphi_dk = phi / std::max(kappa, 1e-300);
        double g = std::exp(-0.5 * s * s * phi * phi);
        double cc = std::cos(0.5 * phi);
        double shape = g * cc * cc + 0.5 * (1.0 - g);
        if (d) {
            double dg_dphi = -s * s * phi * g;
            double dshape_dphi = dg_dphi * (cc * cc - 0.5) - g * cc * std::sin(0.5 * phi);
            double dg_ds = -s * phi * phi * g;
            (*d)[0] = shape;
            (*d)[1] = i0 * dshape_dphi * dphi_dk;
            (*d)[2] = i0 * dg_ds * (cc * cc - 0.5);
        }
        return i0 * shape;
    };

    FitResult res = fit_least_squares(data, fn, {imax, kappa0, 0.05});
    res.parameters[1] = std::abs(res.parameters[1]);
    res.parameters[2] = std::abs(res.parameters[2]);

    StarkModulationFit out;
    out.fit = res;
    out.kappa_khz_per_v_cm = res.parameters[1];
    out.sigma_e = res.parameters[2];
    out.silencing_area_v_us_cm = units::silencing_area_v_us_cm(res.parameters[1]);
    return out;
}

} // namespace starkecho
