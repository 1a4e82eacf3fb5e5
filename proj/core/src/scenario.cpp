#include "starkecho/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "starkecho/units.hpp"

namespace starkecho {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw std::invalid_argument("unknown field '" + it.key() + "' in " + where);
    }
}

json scheme_to_json(const LevelScheme& s)
{
    json levels = json::array();
    for (const Level& l : s.levels())
        levels.push_back({{"id", l.id},
                          {"band", l.band == Band::ground ? "ground" : "excited"},
                          {"label", l.label}});
    json transitions = json::array();
    for (const Transition& t : s.transitions())
        transitions.push_back({{"name", t.name},
                               {"lower", t.lower},
                               {"upper", t.upper},
                               {"kind", t.kind == TransitionKind::optical ? "optical" : "spin"},
                               {"offset_mhz", t.offset_mhz}});
    return {{"levels", levels}, {"transitions", transitions}};
}

LevelScheme scheme_from_json(const json& j)
{
    check_keys(j, {"levels", "transitions"}, "scheme");
    std::vector<Level> levels;
    for (const json& l : j.at("levels")) {
        check_keys(l, {"id", "band", "label"}, "scheme.levels[]");
        Level lv;
        lv.id = l.at("id").get<std::string>();
        std::string band = l.at("band").get<std::string>();
        if (band != "ground" && band != "excited")
            throw std::invalid_argument("level band must be 'ground' or 'excited'");
        lv.band = band == "ground" ? Band::ground : Band::excited;
        lv.label = l.value("label", lv.id);
        levels.push_back(lv);
    }
    std::vector<Transition> transitions;
    for (const json& t : j.at("transitions")) {
        check_keys(t, {"name", "lower", "upper", "kind", "offset_mhz"}, "scheme.transitions[]");
        Transition tr;
        tr.name = t.at("name").get<std::string>();
        tr.lower = t.at("lower").get<std::string>();
        tr.upper = t.at("upper").get<std::string>();
        std::string kind = t.at("kind").get<std::string>();
        if (kind != "optical" && kind != "spin")
            throw std::invalid_argument("transition kind must be 'optical' or 'spin'");
        tr.kind = kind == "optical" ? TransitionKind::optical : TransitionKind::spin;
        tr.offset_mhz = t.value("offset_mhz", 0.0);
        transitions.push_back(tr);
    }
    return LevelScheme(std::move(levels), std::move(transitions));
}

json material_to_json(const MaterialParams& m)
{
    return {{"kappa_khz_per_v_cm", m.kappa_khz_per_v_cm},
            {"optical_depth", m.optical_depth},
            {"gamma13_khz", m.gamma13_khz},
            {"gamma35_khz", m.gamma35_khz},
            {"gamma_opt_khz", m.gamma_opt_khz},
            {"feature_width_mhz", m.feature_width_mhz},
            {"feature_shape", to_string(m.feature_shape)}};
}

MaterialParams material_from_json(const json& j)
{
    check_keys(j,
               {"kappa_khz_per_v_cm", "optical_depth", "gamma13_khz", "gamma35_khz",
                "gamma_opt_khz", "feature_width_mhz", "feature_shape"},
               "material");
    MaterialParams m;
    m.kappa_khz_per_v_cm = j.value("kappa_khz_per_v_cm", m.kappa_khz_per_v_cm);
    m.optical_depth = j.value("optical_depth", m.optical_depth);
    m.gamma13_khz = j.value("gamma13_khz", m.gamma13_khz);
    m.gamma35_khz = j.value("gamma35_khz", m.gamma35_khz);
    m.gamma_opt_khz = j.value("gamma_opt_khz", m.gamma_opt_khz);
    m.feature_width_mhz = j.value("feature_width_mhz", m.feature_width_mhz);
    m.feature_shape = feature_shape_from_string(j.value("feature_shape", "gaussian"));
    m.validate();
    return m;
}

json builder_to_json(const BuilderSpec& b)
{
    json t = {{"t0", b.timings.t0}, {"t1", b.timings.t1}, {"t2", b.timings.t2},
              {"t3", b.timings.t3}, {"t5", b.timings.t5}, {"t6", b.timings.t6},
              {"t7", b.timings.t7}};
    return {{"kind", b.kind == RetrievalDirection::forward ? "forward" : "backward"},
            {"timings", t},
            {"stark_area_v_us_cm", b.options.stark_area_v_us_cm},
            {"stark_sigma_e", b.options.stark_sigma_e},
            {"signal_area_rad", b.options.signal_area_rad},
            {"signal_transition", b.options.signal_transition},
            {"control_transitions", b.options.control_transitions},
            {"detection_halfwidth_us", b.options.detection_halfwidth_us},
            {"record_tail_us", b.options.record_tail_us}};
}

BuilderSpec builder_from_json(const json& j)
{
    check_keys(j,
               {"kind", "timings", "stark_area_v_us_cm", "stark_sigma_e", "signal_area_rad",
                "signal_transition", "control_transitions", "detection_halfwidth_us",
                "record_tail_us"},
               "sequence.builder");
    BuilderSpec b;
    std::string kind = j.at("kind").get<std::string>();
    if (kind != "forward" && kind != "backward")
        throw std::invalid_argument("builder kind must be 'forward' or 'backward'");
    b.kind = kind == "forward" ? RetrievalDirection::forward : RetrievalDirection::backward;
    const json& t = j.at("timings");
    check_keys(t, {"t0", "t1", "t2", "t3", "t5", "t6", "t7"}, "sequence.builder.timings");
    b.timings.t0 = t.at("t0").get<double>();
    b.timings.t1 = t.at("t1").get<double>();
    b.timings.t2 = t.at("t2").get<double>();
    b.timings.t3 = t.at("t3").get<double>();
    b.timings.t5 = t.at("t5").get<double>();
    b.timings.t6 = t.at("t6").get<double>();
    b.timings.t7 = t.at("t7").get<double>();
    b.options.stark_area_v_us_cm = j.value("stark_area_v_us_cm", b.options.stark_area_v_us_cm);
    b.options.stark_sigma_e = j.value("stark_sigma_e", b.options.stark_sigma_e);
    b.options.signal_area_rad = j.value("signal_area_rad", b.options.signal_area_rad);
    b.options.signal_transition = j.value("signal_transition", b.options.signal_transition);
    if (j.contains("control_transitions")) {
        auto v = j.at("control_transitions").get<std::vector<std::string>>();
        if (v.size() != 4)
            throw std::invalid_argument("control_transitions must list four transitions");
        for (std::size_t i = 0; i < 4; ++i) b.options.control_transitions[i] = v[i];
    }
    b.options.detection_halfwidth_us =
        j.value("detection_halfwidth_us", b.options.detection_halfwidth_us);
    b.options.record_tail_us = j.value("record_tail_us", b.options.record_tail_us);
    return b;
}

json pulse_sequence_to_json(const PulseSequence& s)
{
    json optical = json::array();
    for (const OpticalPulse& p : s.optical) {
        std::string role = p.role == PulseRole::signal
                               ? "signal"
                               : (p.role == PulseRole::control ? "control" : "readout-half");
        optical.push_back({{"time_us", p.time_us},
                           {"transition", p.transition},
                           {"area_rad", p.area_rad},
                           {"phase_rad", p.phase_rad},
                           {"direction", p.direction},
                           {"role", role},
                           {"slot", p.slot}});
    }
    json stark = json::array();
    for (const StarkPulse& p : s.stark)
        stark.push_back(
            {{"time_us", p.time_us}, {"area_v_us_cm", p.area_v_us_cm}, {"sigma_e", p.sigma_e}});
    return {{"optical", optical},
            {"stark", stark},
            {"detection",
             {{"start_us", s.detection.start_us},
              {"end_us", s.detection.end_us},
              {"direction", s.detection_direction},
              {"transition", s.detection_transition}}}};
}

PulseSequence pulse_sequence_from_json(const json& j)
{
    check_keys(j, {"optical", "stark", "detection"}, "sequence");
    PulseSequence s;
    for (const json& p : j.at("optical")) {
        check_keys(p, {"time_us", "transition", "area_rad", "phase_rad", "direction", "role",
                       "slot"},
                   "sequence.optical[]");
        OpticalPulse op;
        op.time_us = p.at("time_us").get<double>();
        op.transition = p.at("transition").get<std::string>();
        op.area_rad = p.at("area_rad").get<double>();
        op.phase_rad = p.value("phase_rad", 0.0);
        op.direction = p.value("direction", 1);
        std::string role = p.value("role", "control");
        if (role == "signal")
            op.role = PulseRole::signal;
        else if (role == "control")
            op.role = PulseRole::control;
        else if (role == "readout-half")
            op.role = PulseRole::readout_half;
        else
            throw std::invalid_argument("unknown pulse role: " + role);
        op.slot = p.value("slot", "");
        s.optical.push_back(op);
    }
    if (j.contains("stark")) {
        for (const json& p : j.at("stark")) {
            check_keys(p, {"time_us", "area_v_us_cm", "sigma_e"}, "sequence.stark[]");
            s.stark.push_back({p.at("time_us").get<double>(), p.at("area_v_us_cm").get<double>(),
                               p.value("sigma_e", 0.0)});
        }
    }
    const json& d = j.at("detection");
    check_keys(d, {"start_us", "end_us", "direction", "transition"}, "sequence.detection");
    s.detection.start_us = d.at("start_us").get<double>();
    s.detection.end_us = d.at("end_us").get<double>();
    s.detection_direction = d.value("direction", 1);
    s.detection_transition = d.value("transition", "");
    return s;
}

json simulation_to_json(const SimulationSettings& s)
{
    json pops = json::object();
    for (const auto& [k, v] : s.initial_populations) pops[k] = v;
    json out = {{"ions", s.ions},
                {"seed", s.seed},
                {"grid_step_us", s.grid_step_us},
                {"threads", s.threads},
                {"initial_populations", pops},
                {"record_start_us", s.record_start_us},
                {"record_end_us", s.record_end_us}};
    if (s.control_transfer_efficiency) out["control_transfer_efficiency"] = *s.control_transfer_efficiency;
    return out;
}

SimulationSettings simulation_from_json(const json& j)
{
    check_keys(j,
               {"ions", "seed", "grid_step_us", "threads", "initial_populations",
                "control_transfer_efficiency", "record_start_us", "record_end_us"},
               "simulation");
    SimulationSettings s;
    s.ions = j.value("ions", s.ions);
    s.seed = j.value("seed", s.seed);
    s.grid_step_us = j.value("grid_step_us", s.grid_step_us);
    s.threads = j.value("threads", s.threads);
    if (j.contains("initial_populations")) {
        s.initial_populations.clear();
        for (auto it = j.at("initial_populations").begin(); it != j.at("initial_populations").end();
             ++it)
            s.initial_populations[it.key()] = it.value().get<double>();
    }
    if (j.contains("control_transfer_efficiency"))
        s.control_transfer_efficiency = j.at("control_transfer_efficiency").get<double>();
    s.record_start_us = j.value("record_start_us", s.record_start_us);
    s.record_end_us = j.value("record_end_us", s.record_end_us);
    return s;
}

} // namespace

ValidatedSequence Scenario::build_sequence() const
{
    if (builder) return memory_sequence(builder->kind, builder->timings, scheme, builder->options);
    if (!explicit_sequence) throw std::invalid_argument("scenario has no sequence");
    ValidationResult res = validate_sequence(*explicit_sequence, scheme, SignalRule::any);
    if (!res.ok()) {
        std::string what = "invalid sequence:";
        for (const Diagnostic& d : res.diagnostics) what += " [" + d.code + "] " + d.message;
        throw std::invalid_argument(what);
    }
    return *res.sequence;
}

std::vector<IonState> Scenario::sample(std::uint64_t seed_override) const
{
    std::uint64_t s = seed_override ? seed_override : simulation.seed;
    return sample_ensemble(material, scheme, simulation.ions, s, simulation.initial_populations);
}

PropagateOptions Scenario::propagate_options() const
{
    PropagateOptions opt;
    opt.grid_step_us = simulation.grid_step_us;
    opt.record_start_us = simulation.record_start_us;
    opt.record_end_us = simulation.record_end_us;
    opt.threads = simulation.threads;
    if (simulation.control_transfer_efficiency)
        opt.control_model =
            ControlModel::from_transfer_efficiency(*simulation.control_transfer_efficiency);
    return opt;
}

json Scenario::to_json() const
{
    json j;
    j["schema_version"] = schema_version;
    j["scheme"] = scheme_tag == "eu151-default" ? json("eu151-default") : scheme_to_json(scheme);
    j["material"] = material_to_json(material);
    json seq;
    if (builder) seq["builder"] = builder_to_json(*builder);
    if (explicit_sequence) seq = pulse_sequence_to_json(*explicit_sequence);
    j["sequence"] = seq;
    j["simulation"] = simulation_to_json(simulation);
    return j;
}

Scenario Scenario::from_json(const json& j)
{
    check_keys(j, {"schema_version", "scheme", "material", "sequence", "simulation"}, "scenario");
    Scenario s;
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version != 1)
        throw std::invalid_argument("unsupported schema_version " +
                                    std::to_string(s.schema_version));
    if (j.contains("scheme")) {
        if (j.at("scheme").is_string()) {
            std::string tag = j.at("scheme").get<std::string>();
            if (tag != "eu151-default")
                throw std::invalid_argument("unknown scheme tag: " + tag);
            s.scheme_tag = tag;
            s.scheme = LevelScheme::eu151_default();
        } else {
            s.scheme_tag = "custom";
            s.scheme = scheme_from_json(j.at("scheme"));
        }
    }
    if (j.contains("material")) s.material = material_from_json(j.at("material"));
    if (j.contains("sequence")) {
        const json& seq = j.at("sequence");
        if (seq.contains("builder")) {
            check_keys(seq, {"builder"}, "sequence");
            s.builder = builder_from_json(seq.at("builder"));
        } else if (!seq.empty()) {
            s.explicit_sequence = pulse_sequence_from_json(seq);
        }
    }
    if (j.contains("simulation")) s.simulation = simulation_from_json(j.at("simulation"));
    return s;
}

Scenario Scenario::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json j;
    in >> j;
    return from_json(j);
}

void Scenario::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << to_json().dump(2) << "\n";
}

std::string Scenario::hash() const
{
    // The worker count never affects results, so it does not participate
    // in the output identity either.
    Scenario canon = *this;
    canon.simulation.threads = 0;
    std::string dump = canon.to_json().dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Scenario Scenario::bundled_forward()
{
    Scenario s;
    s.material.kappa_khz_per_v_cm = 27.5;
    s.material.optical_depth = 1.3;
    s.material.gamma13_khz = 17.4;
    s.material.gamma35_khz = 21.9;
    s.material.gamma_opt_khz = 11.0;
    s.material.feature_width_mhz = 2.0;
    BuilderSpec b;
    b.kind = RetrievalDirection::forward;
    b.timings = {0.0, 2.0, 4.0, 10.0, 20.0, 26.0, 28.0};
    b.options.stark_area_v_us_cm = 9.25;
    s.builder = b;
    s.simulation.ions = 10000;
    s.simulation.seed = 20250810;
    s.simulation.initial_populations = {{"1/2g", 0.97}, {"3/2g", 0.03}};
    s.simulation.control_transfer_efficiency = 0.828;
    return s;
}

Scenario Scenario::bundled_backward()
{
    Scenario s = bundled_forward();
    s.builder->kind = RetrievalDirection::backward;
    s.material.gamma13_khz = 16.6;
    s.material.gamma35_khz = 24.3;
    s.simulation.control_transfer_efficiency = 0.853;
    return s;
}

} // namespace starkecho
