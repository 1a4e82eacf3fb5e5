#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace starkecho {

enum class Band { ground, excited };
enum class TransitionKind { optical, spin };

struct Level {
    std::string id;
    Band band = Band::ground;
    std::string label;
};

struct Transition {
    std::string name;
    std::string lower;
    std::string upper;
    TransitionKind kind = TransitionKind::optical;
    double offset_mhz = 0.0; // cosmetic frequency offset, labels the diagram only
};

// Hyperfine level diagram plus the named transitions pulses may address.
// Optical transitions must connect a ground level to an excited level,
// spin transitions two levels of the same band. Immutable after
// construction; safe to share across threads.
class LevelScheme {
  public:
    LevelScheme(std::vector<Level> levels, std::vector<Transition> transitions);

    // Four-level Eu-151 site-1 scheme: grounds 1/2g, 3/2g and excited
    // 3/2e, 5/2e. Optical transitions wa..wd, spin transitions s13
    // (ground pair) and s35 (excited pair).
    static LevelScheme eu151_default();

    const std::vector<Level>& levels() const { return levels_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

    int level_index(const std::string& id) const;
    int transition_index(const std::string& name) const;
    std::optional<int> try_transition_index(const std::string& name) const;

    const Level& level(int idx) const { return levels_.at(static_cast<std::size_t>(idx)); }
    const Transition& transition(int idx) const
    {
        return transitions_.at(static_cast<std::size_t>(idx));
    }

    bool is_excited(int level_idx) const { return level(level_idx).band == Band::excited; }
    int lower_level(int transition_idx) const;
    int upper_level(int transition_idx) const;

    // Optical transition connecting the given level pair, if any.
    std::optional<int> find_optical(int level_a, int level_b) const;
    std::vector<int> spin_transition_indices() const;

  private:
    std::vector<Level> levels_;
    std::vector<Transition> transitions_;
    std::unordered_map<std::string, int> level_by_id_;
    std::unordered_map<std::string, int> transition_by_name_;
};

} // namespace starkecho
