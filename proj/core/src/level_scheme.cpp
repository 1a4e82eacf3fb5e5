#include "starkecho/level_scheme.hpp"

namespace starkecho {

LevelScheme::LevelScheme(std::vector<Level> levels, std::vector<Transition> transitions)
    : levels_(std::move(levels)), transitions_(std::move(transitions))
{
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (!level_by_id_.emplace(levels_[i].id, static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate level id: " + levels_[i].id);
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        const Transition& t = transitions_[i];
        if (!transition_by_name_.emplace(t.name, static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate transition name: " + t.name);
        auto lo = level_by_id_.find(t.lower);
        auto up = level_by_id_.find(t.upper);
        if (lo == level_by_id_.end() || up == level_by_id_.end())
            throw std::invalid_argument("transition " + t.name + " references unknown level");
        Band blo = levels_[static_cast<std::size_t>(lo->second)].band;
        Band bup = levels_[static_cast<std::size_t>(up->second)].band;
        if (t.kind == TransitionKind::optical) {
            if (!(blo == Band::ground && bup == Band::excited))
                throw std::invalid_argument(
                    "optical transition " + t.name + " must go from a ground to an excited level");
        } else {
            if (blo != bup)
                throw std::invalid_argument(
                    "spin transition " + t.name + " must connect levels of the same band");
        }
    }
}

LevelScheme LevelScheme::eu151_default()
{
    std::vector<Level> levels = {
        {"1/2g", Band::ground, "±1/2_g"},
        {"3/2g", Band::ground, "±3/2_g"},
        {"3/2e", Band::excited, "±3/2_e"},
        {"5/2e", Band::excited, "±5/2_e"},
    };
    std::vector<Transition> transitions = {
        {"wa", "1/2g", "5/2e", TransitionKind::optical, 0.0},
        {"wb", "3/2g", "5/2e", TransitionKind::optical, -34.5},
        {"wc", "3/2g", "3/2e", TransitionKind::optical, -136.5},
        {"wd", "1/2g", "3/2e", TransitionKind::optical, -102.0},
        {"s13", "1/2g", "3/2g", TransitionKind::spin, 0.0},
        {"s35", "3/2e", "5/2e", TransitionKind::spin, 0.0},
    };
    return LevelScheme(std::move(levels), std::move(transitions));
}

int LevelScheme::level_index(const std::string& id) const
{
    auto it = level_by_id_.find(id);
    if (it == level_by_id_.end()) throw std::invalid_argument("unknown level id: " + id);
    return it->second;
}

int LevelScheme::transition_index(const std::string& name) const
{
    auto it = transition_by_name_.find(name);
    if (it == transition_by_name_.end())
        throw std::invalid_argument("unknown transition name: " + name);
    return it->second;
}

std::optional<int> LevelScheme::try_transition_index(const std::string& name) const
{
    auto it = transition_by_name_.find(name);
    if (it == transition_by_name_.end()) return std::nullopt;
    return it->second;
}

int LevelScheme::lower_level(int transition_idx) const
{
    return level_index(transition(transition_idx).lower);
}

int LevelScheme::upper_level(int transition_idx) const
{
    return level_index(transition(transition_idx).upper);
}

std::optional<int> LevelScheme::find_optical(int level_a, int level_b) const
{
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        if (transitions_[i].kind != TransitionKind::optical) continue;
        int lo = lower_level(static_cast<int>(i));
        int up = upper_level(static_cast<int>(i));
        if ((lo == level_a && up == level_b) || (lo == level_b && up == level_a))
            return static_cast<int>(i);
    }
    return std::nullopt;
}

std::vector<int> LevelScheme::spin_transition_indices() const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < transitions_.size(); ++i)
        if (transitions_[i].kind == TransitionKind::spin) out.push_back(static_cast<int>(i));
    return out;
}

} // namespace starkecho
