#include "starkecho/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "starkecho/cavity.hpp"
#include "starkecho/decay_fit.hpp"
#include "starkecho/efficiency.hpp"
#include "starkecho/fidelity.hpp"
#include "starkecho/interference.hpp"
#include "starkecho/pathways.hpp"
#include "starkecho/propagate.hpp"
#include "starkecho/report.hpp"
#include "starkecho/scenario.hpp"

namespace starkecho {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fnv_hash(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf).substr(0, 8);
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

// Timestamps live only in the .meta.json sidecar so the data artifacts
// are byte-identical across reruns.
void write_meta(const fs::path& dir, const std::string& stem, const std::string& command,
                double elapsed_s)
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    json meta = {{"command", command}, {"generated_at", ts}, {"elapsed_s", elapsed_s}};
    write_file(dir / (stem + ".meta.json"), meta.dump(2) + "\n");
}

struct CommonOpts {
    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string format = "csv";
};

Scenario load_scenario(const CommonOpts& c)
{
    Scenario sc = Scenario::load(c.scenario_path);
    if (c.seed) sc.simulation.seed = c.seed;
    if (c.threads) sc.simulation.threads = c.threads;
    return sc;
}

int cmd_simulate(const CommonOpts& c)
{
    auto t0 = std::chrono::steady_clock::now();
    Scenario sc = load_scenario(c);
    std::string stem = "simulate_" + sc.hash().substr(0, 8);
    fs::create_directories(c.out_dir);

    ValidatedSequence seq = sc.build_sequence();
    std::vector<IonState> ions = sc.sample();
    EmissionRecord rec = propagate(seq, ions, sc.material, sc.propagate_options());

    const auto& fwd = rec.channel(+1);
    const auto& bwd = rec.channel(-1);
    if (c.format == "json") {
        json rows = json::array();
        for (std::size_t k = 0; k < rec.n_points; ++k)
            rows.push_back({{"time_us", rec.time_at(k)},
                            {"fwd_re", fwd[k].real()},
                            {"fwd_im", fwd[k].imag()},
                            {"bwd_re", bwd[k].real()},
                            {"bwd_im", bwd[k].imag()}});
        write_file(fs::path(c.out_dir) / (stem + ".json"), rows.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "time_us,fwd_re,fwd_im,bwd_re,bwd_im\n";
        for (std::size_t k = 0; k < rec.n_points; ++k)
            os << num(rec.time_at(k)) << ',' << num(fwd[k].real()) << ',' << num(fwd[k].imag())
               << ',' << num(bwd[k].real()) << ',' << num(bwd[k].imag()) << '\n';
        write_file(fs::path(c.out_dir) / (stem + ".csv"), os.str());
    }

    json peaks = json::array();
    for (const EmissionPeak& p : find_peaks(rec))
        peaks.push_back({{"time_us", p.time_us},
                         {"intensity", p.intensity},
                         {"direction", p.direction},
                         {"transition", p.transition}});
    const DetectionWindow& w = seq.sequence().detection;
    json summary = {
        {"n_ions", rec.n_ions},
        {"seed", sc.simulation.seed},
        {"detection_transition", rec.detection_transition},
        {"detection_direction", rec.detection_direction},
        {"detection_window_us", {w.start_us, w.end_us}},
        {"detection_window_intensity",
         echo_intensity(rec, w.start_us, w.end_us, rec.detection_direction)},
        {"peaks", peaks}};
    write_file(fs::path(c.out_dir) / (stem + ".peaks.json"), summary.dump(2) + "\n");
    write_meta(c.out_dir, stem, "simulate",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::cout << stem << "\n";
    return 0;
}

int cmd_pathways(const CommonOpts& c)
{
    auto t0 = std::chrono::steady_clock::now();
    Scenario sc = load_scenario(c);
    std::string stem = "pathways_" + sc.hash().substr(0, 8);
    fs::create_directories(c.out_dir);

    ValidatedSequence seq = sc.build_sequence();
    std::vector<EchoPathway> paths = enumerate_pathways(seq, sc.material.kappa_khz_per_v_cm);

    if (c.format == "json") {
        json rows = json::array();
        for (const EchoPathway& p : paths)
            rows.push_back({{"label", p.label},
                            {"kind", to_string(p.kind)},
                            {"emission_time_us", p.emission_time_us},
                            {"direction", p.emission_direction},
                            {"relative_phase_rad", p.stark_relative_phase_rad},
                            {"silencing_factor", p.silencing_factor}});
        write_file(fs::path(c.out_dir) / (stem + ".json"), rows.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "label,kind,emission_time_us,direction,relative_phase_rad,silencing_factor\n";
        for (const EchoPathway& p : paths)
            os << p.label << ',' << to_string(p.kind) << ',' << num(p.emission_time_us) << ','
               << p.emission_direction << ',' << num(p.stark_relative_phase_rad) << ','
               << num(p.silencing_factor) << '\n';
        write_file(fs::path(c.out_dir) / (stem + ".csv"), os.str());
    }
    write_meta(c.out_dir, stem, "pathways",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::cout << stem << "\n";
    return 0;
}

int cmd_efficiency(const CommonOpts& c, double eta_pm, const std::string& sweep)
{
    auto t0 = std::chrono::steady_clock::now();
    Scenario sc = load_scenario(c);
    std::string stem = "efficiency_" + fnv_hash(sc.hash() + sweep + num(eta_pm));
    fs::create_directories(c.out_dir);

    if (!sc.builder) throw std::invalid_argument("efficiency needs a builder-based scenario");
    const MemoryTimings& t = sc.builder->timings;
    double a = t.t5 - t.t2, b = t.t6 - t.t3;
    double eta_decay =
        decay_factor(sc.material.gamma13_khz, sc.material.gamma35_khz, sc.material.gamma_opt_khz,
                     a, b);
    double eta_c = sc.simulation.control_transfer_efficiency.value_or(1.0);
    Retrieval dir = sc.builder->kind == RetrievalDirection::forward ? Retrieval::forward
                                                                    : Retrieval::backward;
    EfficiencyBreakdown eb =
        total_efficiency(sc.material.optical_depth, eta_pm, eta_c, eta_decay, dir);
    json out = {{"direction", dir == Retrieval::forward ? "forward" : "backward"},
                {"optical_depth", sc.material.optical_depth},
                {"eta_retrieval", eb.retrieval},
                {"eta_pm", eb.phase_matching},
                {"eta_control", eb.control},
                {"eta_decay", eb.decay},
                {"eta_total", eb.total},
                {"storage_us", {{"a_t5_minus_t2", a}, {"b_t6_minus_t3", b}}}};
    write_file(fs::path(c.out_dir) / (stem + ".json"), out.dump(2) + "\n");

    if (!sweep.empty()) {
        double lo, hi, step;
        if (std::sscanf(sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw std::invalid_argument("--sweep-d expects start:stop:step");
        std::ostringstream os;
        os << "d,eta_fwd,eta_bwd,eta_total\n";
        for (double d = lo; d <= hi + 1e-12; d += step) {
            double ef = retrieval_efficiency(d, Retrieval::forward);
            double ebk = retrieval_efficiency(d, Retrieval::backward);
            double ret = dir == Retrieval::forward ? ef : ebk;
            os << num(d) << ',' << num(ef) << ',' << num(ebk) << ','
               << num(ret * eta_pm * eta_c * eta_c * eta_c * eta_c * eta_decay) << '\n';
        }
        write_file(fs::path(c.out_dir) / (stem + ".csv"), os.str());
    }
    write_meta(c.out_dir, stem, "efficiency",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::cout << stem << "\n";
    return 0;
}

int cmd_cavity_opt(const std::string& out_dir, double d, double r2, const std::string& sweep)
{
    auto t0 = std::chrono::steady_clock::now();
    json cfg = {{"d", d}, {"r2", r2}, {"sweep", sweep}};
    std::string stem = "cavity-opt_" + fnv_hash(cfg.dump());
    fs::create_directories(out_dir);

    CavityOptimum opt = optimize_cavity(d, r2);
    json out = {{"optical_depth", d}, {"r2", r2}, {"r1_opt", opt.r1}, {"eta_max", opt.efficiency}};
    write_file(fs::path(out_dir) / (stem + ".json"), out.dump(2) + "\n");

    if (!sweep.empty()) {
        double lo, hi, step;
        if (std::sscanf(sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw std::invalid_argument("--sweep-d expects start:stop:step");
        std::ostringstream os;
        os << "d,R1_opt,eta_max\n";
        for (double dd = lo; dd <= hi + 1e-12; dd += step) {
            CavityOptimum o = optimize_cavity(dd, r2);
            os << num(dd) << ',' << num(o.r1) << ',' << num(o.efficiency) << '\n';
        }
        write_file(fs::path(out_dir) / (stem + ".csv"), os.str());
    }
    write_meta(out_dir, stem, "cavity-opt",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::cout << stem << "\n";
    return 0;
}

DecayCurve read_curve_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    DecayCurve c;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        // skip a header line
        if (line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos) continue;
        double x, y, s;
        int got = std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &s);
        if (got < 2) continue;
        c.delay_us.push_back(x);
        c.intensity.push_back(y);
        if (got == 3) c.sigma.push_back(s);
    }
    if (!c.sigma.empty() && c.sigma.size() != c.delay_us.size())
        throw std::invalid_argument("sigma column must be present on every row or absent");
    return c;
}

json fit_result_to_json(const FitResult& f, const std::vector<std::string>& names)
{
    json params = json::object();
    for (std::size_t i = 0; i < f.parameters.size(); ++i) {
        json entry = {{"value", f.parameters[i]}};
        if (i < f.uncertainties.size()) entry["sigma"] = f.uncertainties[i];
        params[names[i]] = entry;
    }
    return {{"parameters", params},
            {"residual_norm", f.residual_norm},
            {"converged", f.converged},
            {"iterations", f.iterations},
            {"flags", f.flags}};
}

int cmd_fit(const std::string& out_dir, const std::string& input, const std::string& model)
{
    auto t0 = std::chrono::steady_clock::now();
    DecayCurve curve = read_curve_csv(input);
    std::ifstream in(input, std::ios::binary);
    std::stringstream raw;
    raw << in.rdbuf();
    std::string stem = "fit_" + fnv_hash(raw.str() + model);
    fs::create_directories(out_dir);

    json out;
    if (model == "stark") {
        StarkModulationFit f = fit_stark_modulation(curve);
        out = fit_result_to_json(f.fit, {"i0", "kappa_khz_per_v_cm", "sigma_e"});
        out["silencing_area_v_us_cm"] = f.silencing_area_v_us_cm;
    } else if (model == "eq-ground") {
        out = fit_result_to_json(fit_decay(curve, DecayModel::eq_ground),
                                 {"amplitude", "gamma13_khz"});
    } else if (model == "eq-excited") {
        out = fit_result_to_json(fit_decay(curve, DecayModel::eq_excited),
                                 {"amplitude", "gamma35_khz", "gamma_opt_khz"});
    } else if (model == "2pe") {
        out = fit_result_to_json(fit_decay(curve, DecayModel::two_pe),
                                 {"amplitude", "gamma_opt_khz"});
    } else {
        throw std::invalid_argument("unknown fit model: " + model);
    }
    write_file(fs::path(out_dir) / (stem + ".json"), out.dump(2) + "\n");
    write_meta(out_dir, stem, "fit",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::cout << stem << "\n";
    return 0;
}

int cmd_fidelity(const std::string& out_dir, const std::string& counts_path, int monte_carlo)
{
    auto t0 = std::chrono::steady_clock::now();
    std::ifstream in(counts_path);
    if (!in) throw std::runtime_error("cannot open " + counts_path);
    json j;
    in >> j;
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::set<std::string> allowed = {
            "s_early", "n_early", "s_late", "n_late", "v_0", "v_90",
            "sigma_s_early", "sigma_n_early", "sigma_s_late", "sigma_n_late",
            "sigma_v_0", "sigma_v_90"};
        if (!allowed.count(it.key()))
            throw std::invalid_argument("unknown field '" + it.key() + "' in counts file");
    }
    QubitCounts c;
    c.s_early = j.at("s_early").get<double>();
    c.n_early = j.at("n_early").get<double>();
    c.s_late = j.at("s_late").get<double>();
    c.n_late = j.at("n_late").get<double>();
    c.v_0 = j.at("v_0").get<double>();
    c.v_90 = j.at("v_90").get<double>();
    c.sigma_s_early = j.value("sigma_s_early", -1.0);
    c.sigma_n_early = j.value("sigma_n_early", -1.0);
    c.sigma_s_late = j.value("sigma_s_late", -1.0);
    c.sigma_n_late = j.value("sigma_n_late", -1.0);
    c.sigma_v_0 = j.value("sigma_v_0", 0.0);
    c.sigma_v_90 = j.value("sigma_v_90", 0.0);

    QubitResult r = qubit_fidelities(c, monte_carlo);
    std::string stem = "fidelity_" + fnv_hash(j.dump() + std::to_string(monte_carlo));
    fs::create_directories(out_dir);
    json out = {{"f_early", r.f_early},       {"f_late", r.f_late},
                {"f_plus", r.f_plus},         {"f_minus", r.f_minus},
                {"f_poles", r.f_poles},       {"f_equator", r.f_equator},
                {"f_total", r.f_total},       {"sigma_f_early", r.sigma_f_early},
                {"sigma_f_late", r.sigma_f_late}, {"sigma_f_plus", r.sigma_f_plus},
                {"sigma_f_minus", r.sigma_f_minus}, {"sigma_f_poles", r.sigma_f_poles},
                {"sigma_f_equator", r.sigma_f_equator}, {"sigma_f_total", r.sigma_f_total}};
    write_file(fs::path(out_dir) / (stem + ".json"), out.dump(2) + "\n");
    write_meta(out_dir, stem, "fidelity",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::cout << stem << "\n";
    return 0;
}

int cmd_reproduce(const std::string& out_dir, const std::string& criteria, unsigned threads)
{
    auto t0 = std::chrono::steady_clock::now();
    AcceptanceOptions opt;
    opt.threads = threads;
    if (!criteria.empty()) {
        std::stringstream ss(criteria);
        std::string tok;
        while (std::getline(ss, tok, ',')) opt.only.push_back(std::stoi(tok));
    }
    std::vector<CriterionResult> results = run_acceptance(opt);
    std::string text = format_report(results);
    std::cout << text;
    std::string stem = "reproduce_" + fnv_hash(criteria.empty() ? "all" : criteria);
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / (stem + ".txt"), text);
    write_file(fs::path(out_dir) / (stem + ".json"), report_to_json(results).dump(2) + "\n");
    write_meta(out_dir, stem, "reproduce",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    for (const CriterionResult& r : results)
        if (!r.pass) return 1;
    return 0;
}

void emit_error(const std::string& type, const std::string& message, int code)
{
    nlohmann::json err = {{"error", {{"type", type}, {"message", message}, {"exit", code}}}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args)
{
    CLI::App app{"Stark-echo spin-wave quantum memory simulator and analysis toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    auto add_common = [&](CLI::App* sub, bool needs_scenario) {
        if (needs_scenario)
            sub->add_option("--scenario", common.scenario_path, "scenario JSON file")
                ->required();
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "override the scenario seed");
        sub->add_option("--threads", common.threads, "worker threads (never affects results)");
        sub->add_option("--format", common.format, "table format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* sim = app.add_subcommand("simulate", "propagate the ensemble and record emission");
    add_common(sim, true);

    auto* pw = app.add_subcommand("pathways", "enumerate echo pathways of a scenario");
    add_common(pw, true);

    auto* eff = app.add_subcommand("efficiency", "evaluate the factorized efficiency model");
    add_common(eff, true);
    double eta_pm = 1.0;
    std::string eff_sweep;
    eff->add_option("--eta-pm", eta_pm, "phase-matching efficiency");
    eff->add_option("--sweep-d", eff_sweep, "optical-depth sweep start:stop:step");

    auto* cav = app.add_subcommand("cavity-opt", "optimize the cavity input mirror");
    double cav_d = 0.1, cav_r2 = 0.999;
    std::string cav_out = "out", cav_sweep;
    cav->add_option("--d", cav_d, "optical depth");
    cav->add_option("--r2", cav_r2, "end mirror reflectivity");
    cav->add_option("--out", cav_out, "output directory");
    cav->add_option("--sweep-d", cav_sweep, "optical-depth sweep start:stop:step");

    auto* fit = app.add_subcommand("fit", "least-squares fits of decay or Stark sweeps");
    std::string fit_input, fit_model = "eq-excited", fit_out = "out";
    fit->add_option("--input", fit_input, "CSV with columns x,y[,sigma]")->required();
    fit->add_option("--model", fit_model, "eq-ground | eq-excited | 2pe | stark");
    fit->add_option("--out", fit_out, "output directory");

    auto* fid = app.add_subcommand("fidelity", "time-bin qubit fidelities from counts");
    std::string fid_counts, fid_out = "out";
    int fid_mc = 0;
    fid->add_option("--counts", fid_counts, "JSON with counts and visibilities")->required();
    fid->add_option("--out", fid_out, "output directory");
    fid->add_option("--monte-carlo", fid_mc, "Monte-Carlo uncertainty samples (0: linearized)");

    auto* rep = app.add_subcommand("reproduce", "run the bundled scenarios against the models");
    std::string rep_out = "out", rep_criteria;
    unsigned rep_threads = 0;
    rep->add_option("--out", rep_out, "output directory");
    rep->add_option("--criteria", rep_criteria, "comma-separated criterion ids (default all)");
    rep->add_option("--threads", rep_threads, "worker threads");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what(), 2);
        std::cerr << app.help();
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(common);
        if (pw->parsed()) return cmd_pathways(common);
        if (eff->parsed()) return cmd_efficiency(common, eta_pm, eff_sweep);
        if (cav->parsed()) return cmd_cavity_opt(cav_out, cav_d, cav_r2, cav_sweep);
        if (fit->parsed()) return cmd_fit(fit_out, fit_input, fit_model);
        if (fid->parsed()) return cmd_fidelity(fid_out, fid_counts, fid_mc);
        if (rep->parsed()) return cmd_reproduce(rep_out, rep_criteria, rep_threads);
        emit_error("usage", "no command given", 2);
        return 2;
    } catch (const nlohmann::json::exception& e) {
        emit_error("schema", e.what(), 2);
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("schema", e.what(), 2);
        return 2;
    } catch (const std::domain_error& e) {
        emit_error("numerical", e.what(), 3);
        return 3;
    } catch (const std::runtime_error& e) {
        emit_error("io", e.what(), 4);
        return 4;
    } catch (const std::exception& e) {
        emit_error("numerical", e.what(), 3);
        return 3;
    }
}

} // namespace starkecho
