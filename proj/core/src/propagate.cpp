#include "starkecho/propagate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "starkecho/units.hpp"

namespace starkecho {

namespace {

using cd = std::complex<double>;

struct Event {
    double time = 0.0;
    bool is_stark = false;
    std::size_t index = 0; // into optical or stark list
};

struct OpticalPair {
    int lower = 0;
    int upper = 0;
    std::size_t transition = 0; // index into scheme transitions
};

struct Lattice {
    std::size_t n_levels = 0;
    std::vector<OpticalPair> pairs; // recorded channels, scheme order
    std::vector<Event> events;      // time-sorted, optical before stark at ties
    std::vector<bool> excited;      // per level
};

Lattice build_lattice(const ValidatedSequence& seq)
{
    const LevelScheme& scheme = seq.scheme();
    Lattice lat;
    lat.n_levels = scheme.levels().size();
    for (std::size_t i = 0; i < lat.n_levels; ++i)
        lat.excited.push_back(scheme.level(static_cast<int>(i)).band == Band::excited);
    for (std::size_t t = 0; t < scheme.transitions().size(); ++t) {
        if (scheme.transitions()[t].kind != TransitionKind::optical) continue;
        lat.pairs.push_back({scheme.lower_level(static_cast<int>(t)),
                             scheme.upper_level(static_cast<int>(t)), t});
    }
    const PulseSequence& pseq = seq.sequence();
    for (std::size_t i = 0; i < pseq.optical.size(); ++i)
        lat.events.push_back({pseq.optical[i].time_us, false, i});
    for (std::size_t i = 0; i < pseq.stark.size(); ++i)
        lat.events.push_back({pseq.stark[i].time_us, true, i});
    std::sort(lat.events.begin(), lat.events.end(), [](const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.is_stark < b.is_stark; // a Stark kick at a pulse time follows the pulse
    });
    return lat;
}

// Per-level phase rates (rad/us) for one ion: the reference ground level
// sits at zero, the detection transition's upper level carries the
// optical detuning, and spin partners are offset by their sampled spin
// detunings. Spin detunings therefore also tick during optical intervals
// whose legs touch those levels, which is what makes the ground-spin
// decay depend on t5-t2 rather than t3-t2.
std::vector<double> level_rates(const ValidatedSequence& seq, const IonState& ion)
{
    const LevelScheme& scheme = seq.scheme();
    std::size_t n = scheme.levels().size();
    std::vector<double> eps(n, 0.0);
    std::vector<bool> known(n, false);

    int det = seq.detection_transition_index();
    int ref_g = scheme.lower_level(det);
    int ref_e = scheme.upper_level(det);
    eps[static_cast<std::size_t>(ref_g)] = 0.0;
    known[static_cast<std::size_t>(ref_g)] = true;
    eps[static_cast<std::size_t>(ref_e)] = units::detuning_rate_rad_per_us(ion.optical_detuning_khz);
    known[static_cast<std::size_t>(ref_e)] = true;

    std::vector<int> spins = scheme.spin_transition_indices();
    for (int pass = 0; pass < 4; ++pass) {
        for (std::size_t s = 0; s < spins.size(); ++s) {
            int lo = scheme.lower_level(spins[s]);
            int up = scheme.upper_level(spins[s]);
            double d = units::detuning_rate_rad_per_us(ion.spin_detunings_khz[s]);
            if (known[static_cast<std::size_t>(lo)] && !known[static_cast<std::size_t>(up)]) {
                eps[static_cast<std::size_t>(up)] = eps[static_cast<std::size_t>(lo)] + d;
                known[static_cast<std::size_t>(up)] = true;
            } else if (known[static_cast<std::size_t>(up)] && !known[static_cast<std::size_t>(lo)]) {
                eps[static_cast<std::size_t>(lo)] = eps[static_cast<std::size_t>(up)] - d;
                known[static_cast<std::size_t>(lo)] = true;
            }
        }
    }
    // Levels not reachable through spin transitions share the common
    // optical detuning if excited and sit at zero otherwise.
    for (std::size_t l = 0; l < n; ++l) {
        if (known[l]) continue;
        eps[l] = scheme.level(static_cast<int>(l)).band == Band::excited
                     ? units::detuning_rate_rad_per_us(ion.optical_detuning_khz)
                     : 0.0;
    }
    return eps;
}

// Advance all elements by dt: rho_ab *= exp((-i (eps_a - eps_b) - lambda_ab) dt).
void advance(std::vector<cd>& rho, const std::vector<double>& eps, const std::vector<bool>& excited,
             double lambda_opt, double dt, std::size_t n)
{
    if (dt <= 0) return;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            double damp = excited[a] != excited[b] ? lambda_opt * dt : 0.0;
            double phase = -(eps[a] - eps[b]) * dt;
            rho[a * n + b] *= std::polar(std::exp(-damp), phase);
        }
    }
}

void apply_rotation(std::vector<cd>& rho, std::size_t n, std::size_t lo, std::size_t up,
                    double area, double chi)
{
    cd c = std::cos(0.5 * area);
    cd s = cd(0.0, -1.0) * std::sin(0.5 * area);
    cd ul = s * std::polar(1.0, chi);  // raising matrix element
    cd lu = s * std::polar(1.0, -chi); // lowering matrix element
    // rho <- U rho, columns
    for (std::size_t j = 0; j < n; ++j) {
        cd rl = rho[lo * n + j], ru = rho[up * n + j];
        rho[lo * n + j] = c * rl + lu * ru;
        rho[up * n + j] = ul * rl + c * ru;
    }
    // rho <- rho U^dagger, rows
    for (std::size_t i = 0; i < n; ++i) {
        cd rl = rho[i * n + lo], ru = rho[i * n + up];
        rho[i * n + lo] = rl * std::conj(c) + ru * std::conj(lu);
        rho[i * n + up] = rl * std::conj(ul) + ru * std::conj(c);
    }
}

void apply_stark_kick(std::vector<cd>& rho, std::size_t n, const std::vector<bool>& excited,
                      double phi_rad)
{
    // Excited levels pick up exp(-i phi), so coherences rotate according
    // to which legs sit in the excited band.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (excited[a] == excited[b]) continue;
            rho[a * n + b] *= std::polar(1.0, excited[a] ? -phi_rad : +phi_rad);
        }
    }
}

struct BlockAccum {
    std::vector<std::vector<cd>> fwd, bwd; // [pair][point]
};

} // namespace

ControlModel ControlModel::from_transfer_efficiency(double eta)
{
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("transfer efficiency must lie in (0, 1]");
    double theta = 2.0 * std::asin(std::sqrt(eta));
    return {Kind::area_scale, theta / units::pi};
}

const std::vector<cd>& EmissionRecord::channel(int direction, const std::string& transition) const
{
    const std::string& name = transition.empty() ? detection_transition : transition;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        if (transitions[i] == name) return direction >= 0 ? forward[i] : backward[i];
    }
    throw std::invalid_argument("record has no channel for transition '" + name + "'");
}

EmissionRecord propagate(const ValidatedSequence& seq, const std::vector<IonState>& ensemble,
                         const MaterialParams& params, const PropagateOptions& opt)
{
    if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
    params.validate();
    const PulseSequence& pseq = seq.sequence();
    const Lattice lat = build_lattice(seq);
    const std::size_t n = lat.n_levels;

    // The grid must resolve the shortest inter-pulse gap by >= 10 points.
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pseq.optical.size(); ++i)
        min_gap = std::min(min_gap, pseq.optical[i].time_us - pseq.optical[i - 1].time_us);
    if (std::isfinite(min_gap) && opt.grid_step_us > min_gap / 10.0 + 1e-12)
        throw std::invalid_argument("grid step must resolve the shortest inter-pulse gap by 10x");

    double t_end = opt.record_end_us > 0 ? opt.record_end_us : pseq.detection.end_us;
    double t_start = std::max(0.0, opt.record_start_us);
    if (!(t_end > t_start)) throw std::invalid_argument("record window is empty");
    std::size_t n_points =
        static_cast<std::size_t>(std::floor((t_end - t_start) / opt.grid_step_us)) + 1;

    const double lambda_opt =
        units::two_pi * params.gamma_opt_khz * units::khz_us_to_cycles; // amplitude rate, 1/us

    const std::size_t block_size = 1024;
    const std::size_t n_blocks = (ensemble.size() + block_size - 1) / block_size;
    const std::size_t wave = 64; // blocks resident at once

    unsigned n_threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());

    std::vector<BlockAccum> accums(std::min(wave, n_blocks));
    for (auto& acc : accums) {
        acc.fwd.assign(lat.pairs.size(), std::vector<cd>(n_points, 0.0));
        acc.bwd.assign(lat.pairs.size(), std::vector<cd>(n_points, 0.0));
    }
    BlockAccum total;
    total.fwd.assign(lat.pairs.size(), std::vector<cd>(n_points, 0.0));
    total.bwd.assign(lat.pairs.size(), std::vector<cd>(n_points, 0.0));

    std::atomic<std::size_t> fail_ion{static_cast<std::size_t>(-1)};
    std::string fail_what;
    std::mutex fail_mutex;

    auto run_ion = [&](const IonState& ion, std::size_t ion_idx, BlockAccum& acc) {
        std::vector<cd> rho = ion.rho;
        std::vector<double> eps = level_rates(seq, ion);

        // Per-grid-step multiplier for each recorded pair.
        std::vector<cd> step_mult(lat.pairs.size());
        for (std::size_t p = 0; p < lat.pairs.size(); ++p) {
            std::size_t lo = static_cast<std::size_t>(lat.pairs[p].lower);
            std::size_t up = static_cast<std::size_t>(lat.pairs[p].upper);
            double rate = -(eps[up] - eps[lo]);
            step_mult[p] = std::polar(std::exp(-lambda_opt * opt.grid_step_us),
                                      rate * opt.grid_step_us);
        }
        cd fwd_det = std::polar(1.0, -ion.spatial_phase_rad);
        cd bwd_det = std::polar(1.0, +ion.spatial_phase_rad);

        bool check_full = opt.validation_stride > 0 && (ion_idx % opt.validation_stride == 0);

        double tau = 0.0; // rho is synced to this time
        std::size_t next_event = 0;
        // skip events before t=0 (none in valid sequences)
        std::size_t k = 0;
        while (k < n_points || next_event < lat.events.size()) {
            double t_grid = k < n_points
                                ? t_start + opt.grid_step_us * static_cast<double>(k)
                                : std::numeric_limits<double>::infinity();
            if (next_event < lat.events.size() && lat.events[next_event].time <= t_grid) {
                const Event& ev = lat.events[next_event];
                advance(rho, eps, lat.excited, lambda_opt, ev.time - tau, n);
                tau = ev.time;
                if (!ev.is_stark) {
                    const OpticalPulse& pulse = pseq.optical[ev.index];
                    double area = pulse.area_rad;
                    if (pulse.role != PulseRole::signal &&
                        opt.control_model.kind == ControlModel::Kind::area_scale)
                        area *= opt.control_model.scale;
                    int tr = seq.transition_of(ev.index);
                    double chi = pulse.direction * ion.spatial_phase_rad + pulse.phase_rad;
                    apply_rotation(rho, n,
                                   static_cast<std::size_t>(seq.scheme().lower_level(tr)),
                                   static_cast<std::size_t>(seq.scheme().upper_level(tr)), area,
                                   chi);
                } else {
                    const StarkPulse& sp = pseq.stark[ev.index];
                    double area = sp.area_v_us_cm * (1.0 + sp.sigma_e * ion.stark_field_error);
                    double phi = ion.stark_class *
                                 units::stark_phase_rad(params.kappa_khz_per_v_cm, area);
                    apply_stark_kick(rho, n, lat.excited, phi);
                }
                double terr = density_matrix_trace_error(rho, n);
                double herr = density_matrix_hermiticity_error(rho, n);
                double nerr = check_full ? density_matrix_negativity(rho, n) : 0.0;
                if (terr > opt.invariant_tolerance || herr > opt.invariant_tolerance ||
                    nerr > opt.invariant_tolerance) {
                    std::scoped_lock lock(fail_mutex);
                    fail_ion = ion_idx;
                    fail_what = "density-matrix invariant violated at t=" +
                                std::to_string(ev.time) + " us (trace " + std::to_string(terr) +
                                ", herm " + std::to_string(herr) + ", neg " + std::to_string(nerr) +
                                ")";
                    return;
                }
                ++next_event;
                continue;
            }
            if (k >= n_points) break;
            // Record every grid point until the next event using the
            // constant per-step multiplier.
            double span_end = next_event < lat.events.size() ? lat.events[next_event].time
                                                             : std::numeric_limits<double>::infinity();
            std::vector<cd> live(lat.pairs.size());
            double lead = t_grid - tau;
            for (std::size_t p = 0; p < lat.pairs.size(); ++p) {
                std::size_t lo = static_cast<std::size_t>(lat.pairs[p].lower);
                std::size_t up = static_cast<std::size_t>(lat.pairs[p].upper);
                double rate = -(eps[up] - eps[lo]);
                live[p] = rho[up * n + lo] *
                          std::polar(std::exp(-lambda_opt * lead), rate * lead);
            }
            while (k < n_points && t_grid < span_end) {
                for (std::size_t p = 0; p < lat.pairs.size(); ++p) {
                    acc.fwd[p][k] += live[p] * fwd_det;
                    acc.bwd[p][k] += live[p] * bwd_det;
                    live[p] *= step_mult[p];
                }
                ++k;
                t_grid += opt.grid_step_us;
            }
        }
    };

    std::size_t done_blocks = 0;
    while (done_blocks < n_blocks && fail_ion.load() == static_cast<std::size_t>(-1)) {
        std::size_t this_wave = std::min(wave, n_blocks - done_blocks);
        for (std::size_t w = 0; w < this_wave; ++w)
            for (auto& ch : accums[w].fwd) std::fill(ch.begin(), ch.end(), cd(0.0));
        for (std::size_t w = 0; w < this_wave; ++w)
            for (auto& ch : accums[w].bwd) std::fill(ch.begin(), ch.end(), cd(0.0));

        std::atomic<std::size_t> next_block{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t w = next_block.fetch_add(1);
                if (w >= this_wave) return;
                std::size_t b = done_blocks + w;
                std::size_t lo = b * block_size;
                std::size_t hi = std::min(lo + block_size, ensemble.size());
                for (std::size_t i = lo; i < hi; ++i) {
                    if (fail_ion.load() != static_cast<std::size_t>(-1)) return;
                    run_ion(ensemble[i], i, accums[w]);
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();

        // Pairwise tree over the wave, then a left fold across waves; the
        // grouping depends only on the ensemble size, never on threads.
        std::size_t len = this_wave;
        while (len > 1) {
            for (std::size_t i = 0; i + 1 < len; i += 2) {
                BlockAccum& dst = accums[i];
                BlockAccum& src = accums[i + 1];
                for (std::size_t p = 0; p < lat.pairs.size(); ++p) {
                    for (std::size_t q = 0; q < n_points; ++q) {
                        dst.fwd[p][q] += src.fwd[p][q];
                        dst.bwd[p][q] += src.bwd[p][q];
                    }
                }
            }
            std::size_t nl = (len + 1) / 2;
            for (std::size_t i = 0; i < nl; ++i)
                if (i != 2 * i) std::swap(accums[i], accums[2 * i]);
            len = nl;
        }
        for (std::size_t p = 0; p < lat.pairs.size(); ++p)
            for (std::size_t q = 0; q < n_points; ++q) {
                total.fwd[p][q] += accums[0].fwd[p][q];
                total.bwd[p][q] += accums[0].bwd[p][q];
            }
        done_blocks += this_wave;
    }

    if (fail_ion.load() != static_cast<std::size_t>(-1))
        throw std::runtime_error("ion " + std::to_string(fail_ion.load()) + ": " + fail_what);

    EmissionRecord rec;
    rec.t0_us = t_start;
    rec.step_us = opt.grid_step_us;
    rec.n_points = n_points;
    rec.n_ions = ensemble.size();
    rec.detection_transition =
        seq.scheme().transition(seq.detection_transition_index()).name;
    rec.detection_direction = pseq.detection_direction;
    double inv_n = 1.0 / static_cast<double>(ensemble.size());
    for (std::size_t p = 0; p < lat.pairs.size(); ++p) {
        rec.transitions.push_back(seq.scheme().transitions()[lat.pairs[p].transition].name);
        rec.forward.push_back(std::move(total.fwd[p]));
        rec.backward.push_back(std::move(total.bwd[p]));
        for (auto& v : rec.forward.back()) v *= inv_n;
        for (auto& v : rec.backward.back()) v *= inv_n;
    }
    return rec;
}

double echo_intensity(const EmissionRecord& record, double start_us, double end_us, int direction,
                      const std::string& transition)
{
    if (!(end_us > start_us)) throw std::invalid_argument("empty integration window");
    const auto& ch = record.channel(direction, transition);
    double sum = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < record.n_points; ++k) {
        double t = record.time_at(k);
        if (t < start_us || t >= end_us) continue;
        sum += std::norm(ch[k]);
        any = true;
    }
    if (!any) throw std::invalid_argument("integration window contains no grid points");
    return sum * record.step_us;
}

std::vector<EmissionPeak> find_peaks(const EmissionRecord& record, double rel_threshold)
{
    double global_max = 0.0;
    for (std::size_t p = 0; p < record.transitions.size(); ++p)
        for (std::size_t k = 0; k < record.n_points; ++k)
            global_max = std::max(global_max,
                                  std::max(std::norm(record.forward[p][k]),
                                           std::norm(record.backward[p][k])));
    std::vector<EmissionPeak> peaks;
    auto scan = [&](const std::vector<std::complex<double>>& ch, int dir,
                    const std::string& name) {
        for (std::size_t k = 1; k + 1 < record.n_points; ++k) {
            double v = std::norm(ch[k]);
            if (v < rel_threshold * global_max) continue;
            if (v > std::norm(ch[k - 1]) && v >= std::norm(ch[k + 1]))
                peaks.push_back({record.time_at(k), v, dir, name});
        }
    };
    for (std::size_t p = 0; p < record.transitions.size(); ++p) {
        scan(record.forward[p], +1, record.transitions[p]);
        scan(record.backward[p], -1, record.transitions[p]);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const EmissionPeak& a, const EmissionPeak& b) { return a.intensity > b.intensity; });
    return peaks;
}

} // namespace starkecho
