#include "starkecho/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "starkecho/cavity.hpp"
#include "starkecho/decay_fit.hpp"
#include "starkecho/efficiency.hpp"
#include "starkecho/fidelity.hpp"
#include "starkecho/pathways.hpp"
#include "starkecho/propagate.hpp"
#include "starkecho/rng.hpp"
#include "starkecho/scenario.hpp"
#include "starkecho/units.hpp"

namespace starkecho {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

CriterionResult criterion_fidelity()
{
    CriterionResult r{1, "fidelity reproduction (reference values)", false, "", 0};
    auto t0 = clock_type::now();
    TotalFidelity fwd = total_fidelity(0.984, 0.967, 0.970, 0.986);
    TotalFidelity bwd = total_fidelity(0.963, 0.971, 0.982, 0.976);
    double elapsed = seconds_since(t0);
    bool ok_fwd = std::abs(fwd.total - 0.9772) <= 5e-4;
    bool ok_bwd = std::abs(bwd.total - 0.9750) <= 5e-4;
    bool ok_time = elapsed < 1e-3;
    r.pass = ok_fwd && ok_bwd && ok_time;
    r.details = "F_T forward " + fmt(fwd.total * 100) + "% (97.72 +- 0.05), backward " +
                fmt(bwd.total * 100) + "% (97.50 +- 0.05), runtime " + fmt(elapsed * 1e3) + " ms";
    r.elapsed_s = elapsed;
    return r;
}

CriterionResult criterion_forward_bound()
{
    CriterionResult r{2, "forward-retrieval bound (grid over d)", false, "", 0};
    auto t0 = clock_type::now();
    double best_d = 0, best = -1;
    for (int i = 0; i <= 100000; ++i) {
        double d = 1e-4 * i;
        double v = retrieval_efficiency(d, Retrieval::forward);
        if (v > best) {
            best = v;
            best_d = d;
        }
    }
    r.elapsed_s = seconds_since(t0);
    bool ok_val = std::abs(best - 0.54134) <= 1e-4;
    bool ok_arg = std::abs(best_d - 2.0) <= 1e-3;
    r.pass = ok_val && ok_arg;
    r.details = "max " + fmt(best) + " at d = " + fmt(best_d) + " (expect 0.54134 at 2.000)";
    return r;
}

CriterionResult criterion_cavity()
{
    CriterionResult r{3, "cavity near-unity optimum (d=0.1, R2=0.999)", false, "", 0};
    auto t0 = clock_type::now();
    CavityOptimum opt = optimize_cavity(0.1, 0.999);
    // Brute-force oracle with step 1e-5 over R1.
    double brute_eta = -1, brute_r1 = 0;
    for (int i = 0; i < 100000; ++i) {
        double r1 = 1e-5 * i;
        double v = cavity_retrieval({r1, 0.999, 0.1});
        if (v > brute_eta) {
            brute_eta = v;
            brute_r1 = r1;
        }
    }
    r.elapsed_s = seconds_since(t0);
    bool ok_grid = std::abs(opt.efficiency - brute_eta) <= 1e-6;
    bool ok_value = opt.efficiency >= 0.99;
    bool ok_time = r.elapsed_s < 1.0;
    r.pass = ok_grid && ok_value && ok_time;
    r.details = "eta* = " + fmt(opt.efficiency) + " at R1* = " + fmt(opt.r1) +
                " (grid oracle " + fmt(brute_eta) + " at " + fmt(brute_r1) +
                ", |delta| = " + fmt(std::abs(opt.efficiency - brute_eta)) +
                "); requirement eta* >= 0.99 " + (ok_value ? "met" : "NOT met") +
                ", grid agreement " + (ok_grid ? "met" : "NOT met");
    return r;
}

CriterionResult criterion_silencing(unsigned threads)
{
    CriterionResult r{4, "ensemble silencing (single Stark pulse, 2phi_S = pi)", false, "", 0};
    auto t0 = clock_type::now();

    Scenario sc;
    sc.material.kappa_khz_per_v_cm = 27.5;
    sc.material.gamma13_khz = 0;
    sc.material.gamma35_khz = 0;
    sc.material.gamma_opt_khz = 0;
    BuilderSpec b;
    b.timings = {0.0, 2.0, 4.0, 10.0, 20.0, 26.0, 28.0};
    b.options.stark_area_v_us_cm = units::silencing_area_v_us_cm(27.5);
    sc.builder = b;
    sc.simulation.ions = 10000;
    sc.simulation.seed = 41;
    sc.simulation.threads = threads;
    sc.simulation.initial_populations = {{"1/2g", 1.0}};

    ValidatedSequence rephased = sc.build_sequence();
    double t8 = stark_echo_time(b.timings);

    PulseSequence silenced_seq = rephased.sequence();
    silenced_seq.stark.pop_back(); // only the scrambling pulse at t1 remains
    ValidatedSequence silenced = *validate_sequence(silenced_seq, sc.scheme).sequence;

    PropagateOptions opt = sc.propagate_options();
    opt.record_start_us = t8 - 1.0;
    opt.record_end_us = t8 + 1.0;

    std::vector<IonState> ions = sc.sample();
    double i_reph = echo_intensity(propagate(rephased, ions, sc.material, opt), t8 - 0.5,
                                   t8 + 0.5, +1);
    double i_sil = echo_intensity(propagate(silenced, ions, sc.material, opt), t8 - 0.5, t8 + 0.5,
                                  +1);
    r.elapsed_s = seconds_since(t0);
    double ratio = i_sil / i_reph;
    bool ok_ratio = ratio <= 1e-3;
    bool ok_time = r.elapsed_s < 30.0;
    r.pass = ok_ratio && ok_time;
    r.details = "silenced/rephased = " + fmt(ratio) + " (<= 1e-3), N = 10^4, runtime " +
                fmt(r.elapsed_s) + " s";
    return r;
}

CriterionResult criterion_pathway_sets()
{
    CriterionResult r{5, "pathway sets (forward and backward parasitic 4LEs)", false, "", 0};
    auto t0 = clock_type::now();

    auto detectable_4les = [](const Scenario& sc) {
        std::set<std::string> names;
        std::map<std::string, int> dirs;
        ValidatedSequence seq = sc.build_sequence();
        for (const EchoPathway& p : enumerate_pathways(seq, sc.material.kappa_khz_per_v_cm)) {
            if (p.kind != PathwayKind::FourLE) continue;
            if (p.label == "4LE_023") continue; // the intended, silenced echo
            if (detectable(p)) {
                names.insert(p.label);
                dirs[p.label] = p.emission_direction;
            }
        }
        return std::make_pair(names, dirs);
    };

    Scenario fwd = Scenario::bundled_forward();
    auto [fwd_names, fwd_dirs] = detectable_4les(fwd);
    bool ok_fwd = fwd_names == std::set<std::string>{"4LE_026", "4LE_035", "4LE_056"} &&
                  fwd_dirs["4LE_026"] == 1 && fwd_dirs["4LE_035"] == 1 && fwd_dirs["4LE_056"] == 1;

    Scenario bwd = Scenario::bundled_backward();
    auto [bwd_names, bwd_dirs] = detectable_4les(bwd);
    bool ok_bwd = bwd_names == std::set<std::string>{"4LE_026", "4LE_035", "4LE_056"} &&
                  bwd_dirs["4LE_026"] == 1 && bwd_dirs["4LE_035"] == -1 &&
                  bwd_dirs["4LE_056"] == -1;

    // 4LE_025 must appear in the backward enumeration, silenced and
    // backward-directed.
    bool found_025 = false, ok_025 = false;
    ValidatedSequence bseq = bwd.build_sequence();
    for (const EchoPathway& p : enumerate_pathways(bseq, bwd.material.kappa_khz_per_v_cm)) {
        if (p.label != "4LE_025") continue;
        found_025 = true;
        ok_025 = p.silencing_factor < 0.01 && p.direction_sum == -1;
    }
    r.elapsed_s = seconds_since(t0);
    r.pass = ok_fwd && ok_bwd && found_025 && ok_025;
    std::string fl, bl;
    for (const auto& n : fwd_names) fl += n + " ";
    for (const auto& n : bwd_names) bl += n + " ";
    r.details = "forward detectable: " + fl + "; backward detectable: " + bl +
                "; 4LE_025 silenced backward: " + (found_025 && ok_025 ? "yes" : "no");
    return r;
}

CriterionResult criterion_decay_agreement(unsigned threads)
{
    CriterionResult r{6, "oracle vs analytic spin-storage decay (Gamma35 sweep)", false, "", 0};
    auto t0 = clock_type::now();

    MaterialParams mat;
    mat.gamma13_khz = 0;
    mat.gamma35_khz = 21.9;
    mat.gamma_opt_khz = 0;
    LevelScheme scheme = LevelScheme::eu151_default();

    MemoryTimings t;
    t.t0 = 0.0;
    t.t1 = 0.75;
    t.t2 = 1.5;
    t.t3 = 10.0;
    t.t5 = 12.0;
    BuilderOptions opt;
    opt.stark_area_v_us_cm = 0.0; // this check isolates the spin-storage decay

    std::vector<IonState> ions = sample_ensemble(mat, scheme, 100000, 61, {{"1/2g", 1.0}});

    std::vector<double> b_values;
    std::vector<double> sim, model;
    for (int i = 0; i < 10; ++i) {
        double b = 4.0 + 2.0 * i; // t6 - t3
        t.t6 = t.t3 + b;
        t.t7 = t.t6 + 0.25;
        double t8 = stark_echo_time(t);
        ValidatedSequence seq = memory_sequence(RetrievalDirection::forward, t, scheme, opt);
        PropagateOptions popt;
        popt.grid_step_us = 0.02;
        popt.record_start_us = t8 - 0.5;
        popt.record_end_us = t8 + 0.5;
        popt.threads = threads;
        EmissionRecord rec = propagate(seq, ions, mat, popt);
        sim.push_back(echo_intensity(rec, t8 - 0.4, t8 + 0.4, +1));
        model.push_back(decay_factor(0.0, mat.gamma35_khz, 0.0, t.t5 - t.t2, b));
        b_values.push_back(b);
    }
    double worst = 0.0;
    for (std::size_t i = 1; i < sim.size(); ++i) {
        double ratio_sim = sim[i] / sim[0];
        double ratio_model = model[i] / model[0];
        worst = std::max(worst, std::abs(ratio_sim / ratio_model - 1.0));
    }
    r.elapsed_s = seconds_since(t0);
    bool ok_dev = worst <= 0.02;
    bool ok_time = r.elapsed_s < 300.0;
    r.pass = ok_dev && ok_time;
    r.details = "worst relative deviation " + fmt(worst) + " (<= 0.02) over b in [" +
                fmt(b_values.front()) + ", " + fmt(b_values.back()) + "] us, N = 10^5, runtime " +
                fmt(r.elapsed_s) + " s";
    return r;
}

CriterionResult criterion_intensity_scaling(unsigned threads)
{
    CriterionResult r{7, "intensity-scaling law (SE/4LE vs control efficiency)", false, "", 0};
    auto t0 = clock_type::now();

    MaterialParams mat;
    mat.gamma13_khz = 0;
    mat.gamma35_khz = 0;
    mat.gamma_opt_khz = 0;
    LevelScheme scheme = LevelScheme::eu151_default();

    MemoryTimings t;
    t.t0 = 0;
    t.t1 = 2;
    t.t2 = 4;
    t.t3 = 10;
    t.t5 = 20;
    t.t6 = 27;
    t.t7 = 29;
    BuilderOptions bopt;
    bopt.stark_area_v_us_cm = 0.0;
    ValidatedSequence seq = memory_sequence(RetrievalDirection::forward, t, scheme, bopt);
    double t_se = stark_echo_time(t);       // 33
    double t_4le = -t.t0 + t.t5 + t.t6;     // 47, the 4LE through the last two controls

    std::vector<IonState> ions = sample_ensemble(mat, scheme, 300000, 71, {{"1/2g", 1.0}});

    double worst = 0.0;
    std::string per_eta;
    for (double eta : {0.6, 0.7, 0.8, 0.9}) {
        PropagateOptions popt;
        popt.grid_step_us = 0.1;
        popt.record_start_us = t_se - 1.0;
        popt.record_end_us = t_4le + 1.0;
        popt.threads = threads;
        popt.control_model = ControlModel::from_transfer_efficiency(eta);
        EmissionRecord rec = propagate(seq, ions, mat, popt);
        double i_se = echo_intensity(rec, t_se - 0.45, t_se + 0.45, +1, "wa");
        double i_4le = echo_intensity(rec, t_4le - 0.45, t_4le + 0.45, +1, "wc");
        double ratio = i_se / i_4le;
        double expected = (eta / (1.0 - eta)) * (eta / (1.0 - eta));
        double dev = std::abs(ratio / expected - 1.0);
        worst = std::max(worst, dev);
        per_eta += fmt(eta) + ": " + fmt(ratio) + "/" + fmt(expected) + " ";
    }

    // Analytic round trip through the intensity-scaling inversion.
    double worst_rt = 0.0;
    for (double eta : {0.35, 0.6, 0.7, 0.8, 0.9, 0.99}) {
        double ratio = (eta / (1.0 - eta)) * (eta / (1.0 - eta));
        double back = infer_control_efficiency(ratio, 1.0, 1.0);
        worst_rt = std::max(worst_rt, std::abs(back - eta) / eta);
    }
    r.elapsed_s = seconds_since(t0);
    bool ok_dev = worst <= 0.05;
    bool ok_rt = worst_rt <= 1e-12;
    r.pass = ok_dev && ok_rt;
    r.details = "SE/4LE measured/expected " + per_eta + "(worst dev " + fmt(worst) +
                ", <= 0.05); inversion round-trip worst " + fmt(worst_rt) + " (<= 1e-12); runtime " +
                fmt(r.elapsed_s) + " s";
    return r;
}

CriterionResult criterion_directional_extinction(unsigned threads)
{
    CriterionResult r{8, "backward retrieval directional extinction", false, "", 0};
    auto t0 = clock_type::now();

    Scenario sc = Scenario::bundled_backward();
    sc.simulation.ions = 10000;
    sc.simulation.threads = threads;
    ValidatedSequence seq = sc.build_sequence();
    double t8 = stark_echo_time(sc.builder->timings);

    PropagateOptions opt = sc.propagate_options();
    opt.record_start_us = t8 - 1.0;
    opt.record_end_us = t8 + 1.0;
    std::vector<IonState> ions = sc.sample();
    EmissionRecord rec = propagate(seq, ions, sc.material, opt);
    double i_bwd = echo_intensity(rec, t8 - 0.4, t8 + 0.4, -1);
    double i_fwd = echo_intensity(rec, t8 - 0.4, t8 + 0.4, +1);
    r.elapsed_s = seconds_since(t0);
    double db = 10.0 * std::log10(i_bwd / i_fwd);
    r.pass = db >= 20.0;
    r.details = "backward/forward = " + fmt(db) + " dB (>= 20 dB), N = 10^4, runtime " +
                fmt(r.elapsed_s) + " s";
    return r;
}

CriterionResult criterion_fit_recovery()
{
    CriterionResult r{9, "fit recovery (decay parameters and Stark coefficient)", false, "", 0};
    auto t0 = clock_type::now();

    // Synthetic excited-branch decay: three delay clusters spanning the
    // curvature- and slope-dominated regions.
    std::vector<double> b;
    for (double v : {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}) b.push_back(v);
    for (double v : {29.0, 29.5, 30.0, 30.5, 31.0, 31.5}) b.push_back(v);
    for (double v : {59.0, 59.5, 60.0, 60.5, 61.0, 61.5, 62.0}) b.push_back(v);

    const double g35 = 21.9, gamma = 11.0;
    int success = 0;
    for (int trial = 0; trial < 100; ++trial) {
        DecayCurve c;
        c.swept = SweptVariable::excited_storage;
        CounterRng rng(9000, static_cast<std::uint64_t>(trial), 5);
        for (double x : b) {
            double truth = decay_factor(0.0, g35, gamma, 0.0, x);
            double y = truth * (1.0 + 0.03 * rng.gaussian());
            c.delay_us.push_back(x);
            c.intensity.push_back(std::max(y, 1e-12));
            c.sigma.push_back(0.03 * truth);
        }
        FitResult f = fit_decay(c, DecayModel::eq_excited);
        if (!f.converged || f.parameters.size() < 3) continue;
        bool ok = std::abs(f.parameters[1] - g35) / g35 <= 0.05 &&
                  std::abs(f.parameters[2] - gamma) / gamma <= 0.05;
        if (ok) ++success;
    }
    bool ok_decay = success >= 95;

    // Noiseless Stark-area sweep.
    DecayCurve sm;
    sm.swept = SweptVariable::stark_area;
    for (int i = 0; i <= 20; ++i) {
        double a = static_cast<double>(i);
        double phi = 2.0 * units::stark_phase_rad(27.5, a);
        sm.delay_us.push_back(a);
        sm.intensity.push_back(std::cos(0.5 * phi) * std::cos(0.5 * phi));
        sm.sigma.push_back(0.01);
    }
    StarkModulationFit smf = fit_stark_modulation(sm);
    double a_pi_expected = units::silencing_area_v_us_cm(27.5); // 9.0909
    bool ok_kappa = std::abs(smf.kappa_khz_per_v_cm - 27.5) / 27.5 <= 0.01;
    bool ok_area = std::abs(smf.silencing_area_v_us_cm - a_pi_expected) / a_pi_expected <= 0.01;

    r.elapsed_s = seconds_since(t0);
    r.pass = ok_decay && ok_kappa && ok_area;
    r.details = "decay recovery " + std::to_string(success) +
                "/100 trials within 5% (need >= 95); kappa = " + fmt(smf.kappa_khz_per_v_cm) +
                " (27.5 +- 1%), silencing area = " + fmt(smf.silencing_area_v_us_cm) + " (" +
                fmt(a_pi_expected) + " +- 1%)";
    return r;
}

CriterionResult criterion_consistency()
{
    CriterionResult r{10, "efficiency consistency (decay split feasibility)", false, "", 0};
    auto t0 = clock_type::now();

    double eta_ret = retrieval_efficiency(1.3, Retrieval::forward);
    double eta_c = 0.828;
    double target = 0.048 / (eta_ret * 1.0 * eta_c * eta_c * eta_c * eta_c);

    double best_a = -1, best_b = -1, best_dev = 1e9;
    for (double a = 0.0; a <= 29.0; a += 0.25) {
        for (double bb = 0.0; a + bb <= 29.0; bb += 0.25) {
            double v = decay_factor(17.4, 21.9, 11.0, a, bb);
            double dev = std::abs(v - target) / target;
            if (dev < best_dev) {
                best_dev = dev;
                best_a = a;
                best_b = bb;
            }
        }
    }
    r.elapsed_s = seconds_since(t0);
    r.pass = best_dev <= 0.10;
    r.details = "required eta_decay = " + fmt(target) + "; closest split a = " + fmt(best_a) +
                ", b = " + fmt(best_b) + " gives " +
                fmt(decay_factor(17.4, 21.9, 11.0, best_a, best_b)) + " (deviation " +
                fmt(best_dev) + ", <= 0.10, a + b <= 29 us)";
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt)
{
    auto wanted = [&](int id) {
        return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end();
    };
    std::vector<CriterionResult> out;
    if (wanted(1)) out.push_back(criterion_fidelity());
    if (wanted(2)) out.push_back(criterion_forward_bound());
    if (wanted(3)) out.push_back(criterion_cavity());
    if (wanted(4)) out.push_back(criterion_silencing(opt.threads));
    if (wanted(5)) out.push_back(criterion_pathway_sets());
    if (wanted(6)) out.push_back(criterion_decay_agreement(opt.threads));
    if (wanted(7)) out.push_back(criterion_intensity_scaling(opt.threads));
    if (wanted(8)) out.push_back(criterion_directional_extinction(opt.threads));
    if (wanted(9)) out.push_back(criterion_fit_recovery());
    if (wanted(10)) out.push_back(criterion_consistency());
    return out;
}

std::string format_report(const std::vector<CriterionResult>& results)
{
    std::ostringstream os;
    for (const CriterionResult& r : results)
        os << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << " - " << r.name
           << " (" << r.details << ")\n";
    return os.str();
}

nlohmann::json report_to_json(const std::vector<CriterionResult>& results)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const CriterionResult& r : results)
        arr.push_back({{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"details", r.details},
                       {"elapsed_s", r.elapsed_s}});
    bool all = true;
    for (const CriterionResult& r : results) all = all && r.pass;
    return {{"criteria", arr}, {"all_pass", all}, {"notes", consistency_notes()}};
}

nlohmann::json consistency_notes()
{
    // Backward retrieval: the combined quantity eta_pm * eta_control^4
    // evaluated two ways from declared inputs. Route A divides the
    // measured efficiency by retrieval and decay factors; route B
    // multiplies the separately inferred eta_pm and eta_control. They
    // disagree; both are reported.
    double eta_ret_bwd = retrieval_efficiency(1.3, Retrieval::backward);
    double eta_decay_23us = 0.44;
    double route_a = 0.006 / (eta_ret_bwd * eta_decay_23us);
    double eta_c = 0.853;
    double route_b = 0.071 * eta_c * eta_c * eta_c * eta_c;
    return {{"backward_combined_pm_control4",
             {{"from_measured_efficiency", route_a},
              {"from_inferred_factors", route_b},
              {"reported_value", 0.134},
              {"inputs",
               {{"eta_total", 0.006},
                {"eta_retrieval_backward_d1.3", eta_ret_bwd},
                {"eta_decay_at_23us", eta_decay_23us},
                {"eta_pm", 0.071},
                {"eta_control", eta_c}}}}}};
}

} // namespace starkecho
