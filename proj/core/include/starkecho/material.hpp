#pragma once

#include <stdexcept>
#include <string>

namespace starkecho {

enum class FeatureShape { gaussian, lorentzian, square };

struct MaterialParams {
    double kappa_khz_per_v_cm = 27.5; // linear Stark coefficient
    double optical_depth = 1.3;
    double gamma13_khz = 17.4;     // FWHM, ground spin transition
    double gamma35_khz = 21.9;     // FWHM, excited spin transition
    double gamma_opt_khz = 11.0;   // effective optical decoherence rate
    double feature_width_mhz = 2.0; // FWHM of the prepared optical feature
    FeatureShape feature_shape = FeatureShape::gaussian;

    void validate() const
    {
        if (kappa_khz_per_v_cm < 0 || gamma13_khz < 0 || gamma35_khz < 0 || gamma_opt_khz < 0 ||
            feature_width_mhz < 0 || optical_depth < 0)
            throw std::invalid_argument("material parameters must be nonnegative");
    }
};

inline std::string to_string(FeatureShape s)
{
    switch (s) {
        case FeatureShape::gaussian: return "gaussian";
        case FeatureShape::lorentzian: return "lorentzian";
        case FeatureShape::square: return "square";
    }
    return "gaussian";
}

inline FeatureShape feature_shape_from_string(const std::string& s)
{
    if (s == "gaussian") return FeatureShape::gaussian;
    if (s == "lorentzian") return FeatureShape::lorentzian;
    if (s == "square") return FeatureShape::square;
    throw std::invalid_argument("unknown feature shape: " + s);
}

} // namespace starkecho
