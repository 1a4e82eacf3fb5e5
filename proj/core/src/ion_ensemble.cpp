#include "starkecho/ion_ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "starkecho/rng.hpp"
#include "starkecho/units.hpp"

namespace starkecho {

double CounterRng::gaussian()
{
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(units::two_pi * u2);
}

double sample_feature_detuning(const MaterialParams& params, double u, double gauss)
{
    double fwhm_khz = params.feature_width_mhz * 1e3;
    switch (params.feature_shape) {
        case FeatureShape::gaussian: return units::fwhm_to_sigma(fwhm_khz) * gauss;
        case FeatureShape::lorentzian:
            return 0.5 * fwhm_khz * std::tan(units::pi * (u - 0.5));
        case FeatureShape::square: return fwhm_khz * (u - 0.5);
    }
    return 0.0;
}

std::vector<IonState> sample_ensemble(const MaterialParams& params, const LevelScheme& scheme,
                                      std::size_t n_ions, std::uint64_t seed,
                                      const std::map<std::string, double>& initial_populations)
{
    if (n_ions < 1) throw std::invalid_argument("ensemble needs at least one ion");
    params.validate();

    std::size_t n = scheme.levels().size();
    std::vector<std::complex<double>> rho0(n * n, 0.0);
    double total = 0.0;
    for (const auto& [id, p] : initial_populations) {
        int idx = scheme.level_index(id);
        rho0[static_cast<std::size_t>(idx) * n + static_cast<std::size_t>(idx)] = p;
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("initial populations must sum to 1");

    std::vector<int> spin_idx = scheme.spin_transition_indices();
    std::vector<IonState> ions(n_ions);
    for (std::size_t i = 0; i < n_ions; ++i) {
        IonState& ion = ions[i];
        ion.stark_class = (i % 2 == 0) ? +1 : -1;

        CounterRng opt(seed, i, 0);
        ion.optical_detuning_khz = sample_feature_detuning(params, opt.uniform(), opt.gaussian());

        ion.spin_detunings_khz.resize(spin_idx.size(), 0.0);
        for (std::size_t s = 0; s < spin_idx.size(); ++s) {
            const Transition& t = scheme.transition(spin_idx[s]);
            // Ground pair widths come from gamma13, excited pair widths
            // from gamma35; keyed by the band of the transition's levels.
            double fwhm = scheme.level(scheme.level_index(t.lower)).band == Band::ground
                              ? params.gamma13_khz
                              : params.gamma35_khz;
            CounterRng rng(seed, i, 1 + s);
            ion.spin_detunings_khz[s] = units::fwhm_to_sigma(fwhm) * rng.gaussian();
        }

        CounterRng spatial(seed, i, 10);
        ion.spatial_phase_rad = units::two_pi * spatial.uniform();
        CounterRng field(seed, i, 11);
        ion.stark_field_error = field.gaussian();
        ion.rho = rho0;
    }
    return ions;
}

double density_matrix_trace_error(const std::vector<std::complex<double>>& rho, std::size_t n)
{
    std::complex<double> tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += rho[i * n + i];
    return std::abs(tr - 1.0);
}

double density_matrix_hermiticity_error(const std::vector<std::complex<double>>& rho,
                                        std::size_t n)
{
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            err = std::max(err, std::abs(rho[i * n + j] - std::conj(rho[j * n + i])));
    return err;
}

double density_matrix_negativity(const std::vector<std::complex<double>>& rho, std::size_t n)
{
    // Embed the Hermitian matrix as the real symmetric [[Re, -Im], [Im, Re]]
    // (eigenvalues doubled up) and run cyclic real Jacobi sweeps. n is 4 for
    // the default scheme, so this stays cheap.
    std::size_t m = 2 * n;
    std::vector<double> a(m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::complex<double> v = rho[i * n + j];
            a[i * m + j] = v.real();
            a[(i + n) * m + (j + n)] = v.real();
            a[i * m + (j + n)] = -v.imag();
            a[(i + n) * m + j] = v.imag();
        }
    }
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * m + j]; };
    for (int sweep = 0; sweep < 30; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = 0.5 * (at(q, q) - at(p, p)) / apq;
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::min(worst, at(i, i));
    return -worst;
}

} // namespace starkecho
