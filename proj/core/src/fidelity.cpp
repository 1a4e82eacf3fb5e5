#include "starkecho/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "starkecho/rng.hpp"

namespace starkecho {

double pole_fidelity(double s, double n)
{
    if (s < 0 || n < 0) throw std::invalid_argument("counts must be nonnegative");
    double denom = s + 2.0 * n;
    if (!(denom > 0)) throw std::invalid_argument("S + 2N must be positive");
    return (s + n) / denom;
}

double equator_fidelity(double visibility)
{
    if (visibility < 0 || visibility > 1)
        throw std::invalid_argument("visibility must lie in [0, 1]");
    return 0.5 * (1.0 + visibility);
}

TotalFidelity total_fidelity(double f_early, double f_late, double f_plus, double f_minus)
{
    for (double f : {f_early, f_late, f_plus, f_minus})
        if (f < 0 || f > 1) throw std::invalid_argument("fidelities must lie in [0, 1]");
    TotalFidelity t;
    t.poles = 0.5 * (f_early + f_late);
    t.equator = 0.5 * (f_plus + f_minus);
    t.total = t.poles / 3.0 + 2.0 * t.equator / 3.0;
    return t;
}

namespace {

double sigma_or_poisson(double sigma, double count)
{
    return sigma >= 0 ? sigma : std::sqrt(std::max(count, 0.0));
}

// dF/dS = N / (S+2N)^2, dF/dN = -S / (S+2N)^2
double pole_sigma(double s, double n, double ss, double sn)
{
    double d = s + 2.0 * n;
    double dfs = n / (d * d);
    double dfn = -s / (d * d);
    return std::sqrt(dfs * dfs * ss * ss + dfn * dfn * sn * sn);
}

} // namespace

QubitResult qubit_fidelities(const QubitCounts& c, int monte_carlo_samples, std::uint64_t seed)
{
    QubitResult r;
    r.f_early = pole_fidelity(c.s_early, c.n_early);
    r.f_late = pole_fidelity(c.s_late, c.n_late);
    r.f_plus = equator_fidelity(c.v_0);
    r.f_minus = equator_fidelity(c.v_90);
    TotalFidelity t = total_fidelity(r.f_early, r.f_late, r.f_plus, r.f_minus);
    r.f_poles = t.poles;
    r.f_equator = t.equator;
    r.f_total = t.total;

    double sse = sigma_or_poisson(c.sigma_s_early, c.s_early);
    double sne = sigma_or_poisson(c.sigma_n_early, c.n_early);
    double ssl = sigma_or_poisson(c.sigma_s_late, c.s_late);
    double snl = sigma_or_poisson(c.sigma_n_late, c.n_late);

    if (monte_carlo_samples <= 0) {
        r.sigma_f_early = pole_sigma(c.s_early, c.n_early, sse, sne);
        r.sigma_f_late = pole_sigma(c.s_late, c.n_late, ssl, snl);
        r.sigma_f_plus = 0.5 * c.sigma_v_0;
        r.sigma_f_minus = 0.5 * c.sigma_v_90;
        r.sigma_f_poles = 0.5 * std::hypot(r.sigma_f_early, r.sigma_f_late);
        r.sigma_f_equator = 0.5 * std::hypot(r.sigma_f_plus, r.sigma_f_minus);
        r.sigma_f_total = std::hypot(r.sigma_f_poles / 3.0, 2.0 * r.sigma_f_equator / 3.0);
        return r;
    }

    std::vector<double> totals;
    std::vector<double> fe, fl, fp, fm;
    for (int i = 0; i < monte_carlo_samples; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i), 42);
        auto clampc = [](double v) { return std::max(v, 0.0); };
        double se = clampc(c.s_early + sse * rng.gaussian());
        double ne = clampc(c.n_early + sne * rng.gaussian());
        double sl = clampc(c.s_late + ssl * rng.gaussian());
        double nl = clampc(c.n_late + snl * rng.gaussian());
        double v0 = std::clamp(c.v_0 + c.sigma_v_0 * rng.gaussian(), 0.0, 1.0);
        double v90 = std::clamp(c.v_90 + c.sigma_v_90 * rng.gaussian(), 0.0, 1.0);
        double a = pole_fidelity(se, ne), b = pole_fidelity(sl, nl);
        double p = equator_fidelity(v0), q = equator_fidelity(v90);
        fe.push_back(a);
        fl.push_back(b);
        fp.push_back(p);
        fm.push_back(q);
        totals.push_back(total_fidelity(a, b, p, q).total);
    }
    auto stddev = [](const std::vector<double>& v) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double s2 = 0;
        for (double x : v) s2 += (x - mean) * (x - mean);
        return std::sqrt(s2 / std::max<std::size_t>(v.size() - 1, 1));
    };
    r.sigma_f_early = stddev(fe);
    r.sigma_f_late = stddev(fl);
    r.sigma_f_plus = stddev(fp);
    r.sigma_f_minus = stddev(fm);
    r.sigma_f_poles = 0.5 * std::hypot(r.sigma_f_early, r.sigma_f_late);
    r.sigma_f_equator = 0.5 * std::hypot(r.sigma_f_plus, r.sigma_f_minus);
    r.sigma_f_total = stddev(totals);
    return r;
}

} // namespace starkecho
