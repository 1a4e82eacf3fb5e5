#pragma once

#include <cmath>

// Unit conventions used across the library: times in microseconds,
// linewidths and rates in kHz, optical detunings in kHz, Stark pulse
// areas in V*us/cm, phases in radians. Every kHz*us product needs one
// factor of 1e-3 to become cycles; that factor lives here and nowhere
// else.

namespace starkecho::units {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double pi = 3.141592653589793238462643383279;

// kHz * us -> cycles
inline constexpr double khz_us_to_cycles = 1.0e-3;

// Phase accumulated by one Stark class from a single electric-field pulse:
// kappa [kHz/(V/cm)] * area [V*us/cm] cycles, as radians.
inline double stark_phase_rad(double kappa_khz_per_v_cm, double area_v_us_cm)
{
    return two_pi * kappa_khz_per_v_cm * khz_us_to_cycles * area_v_us_cm;
}

// Angular phase rate [rad/us] of a detuning given in kHz.
inline double detuning_rate_rad_per_us(double detuning_khz)
{
    return two_pi * detuning_khz * khz_us_to_cycles;
}

// Gaussian FWHM <-> standard deviation.
inline double fwhm_to_sigma(double fwhm) { return fwhm / std::sqrt(8.0 * std::log(2.0)); }
inline double sigma_to_fwhm(double sigma) { return sigma * std::sqrt(8.0 * std::log(2.0)); }

// Intensity decay exponent coefficient for a Gaussian-distributed static
// detuning of FWHM gamma [kHz] acting over a [us]:
//   exp(-coeff * gamma^2 * a^2), coeff = pi^2 * 1e-6 / (2 ln 2).
inline double gaussian_decay_coeff()
{
    return pi * pi * khz_us_to_cycles * khz_us_to_cycles / (2.0 * std::log(2.0));
}

// Stark pulse area silencing the echo (relative phase pi between classes):
// 2 * 2*pi*kappa*1e-3 * A = pi  =>  A = 1 / (4 * kappa * 1e-3)  [V*us/cm].
inline double silencing_area_v_us_cm(double kappa_khz_per_v_cm)
{
    return 1.0 / (4.0 * kappa_khz_per_v_cm * khz_us_to_cycles);
}

} // namespace starkecho::units
