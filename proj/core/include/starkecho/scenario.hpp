#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "starkecho/level_scheme.hpp"
#include "starkecho/material.hpp"
#include "starkecho/propagate.hpp"
#include "starkecho/sequence_builder.hpp"

namespace starkecho {

struct BuilderSpec {
    RetrievalDirection kind = RetrievalDirection::forward;
    MemoryTimings timings;
    BuilderOptions options;
};

struct SimulationSettings {
    std::size_t ions = 10000;
    std::uint64_t seed = 7;
    double grid_step_us = 0.05;
    unsigned threads = 0;
    std::map<std::string, double> initial_populations = {{"1/2g", 1.0}};
    std::optional<double> control_transfer_efficiency; // empty: areas as declared
    double record_start_us = 0.0;
    double record_end_us = -1.0; // <= 0: detection window end
};

// Everything one run needs: level scheme, material parameters, sequence
// (explicit or via the memory-sequence builder) and simulation settings.
// Round-trips losslessly through JSON; unknown fields are rejected.
struct Scenario {
    int schema_version = 1;
    std::string scheme_tag = "eu151-default"; // or "custom"
    LevelScheme scheme = LevelScheme::eu151_default();
    MaterialParams material;
    std::optional<BuilderSpec> builder;
    std::optional<PulseSequence> explicit_sequence;
    SimulationSettings simulation;

    ValidatedSequence build_sequence() const;
    std::vector<IonState> sample(std::uint64_t seed_override = 0) const;
    PropagateOptions propagate_options() const;

    nlohmann::json to_json() const;
    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::string& path);
    void save(const std::string& path) const;

    // FNV-1a over the canonical JSON dump, as 16 hex digits.
    std::string hash() const;

    // Bundled memory scenarios (forward and backward retrieval with the
    // measured material parameters).
    static Scenario bundled_forward();
    static Scenario bundled_backward();
};

} // namespace starkecho
