#pragma once

#include <cmath>

// Unit policy for the whole library: wavelengths and linewidths in nm,
// device lengths in um, propagation loss in 1/cm and dB/cm. Every
// conversion lives here so no other file hard-codes a power of ten.
namespace photonic::units {

inline constexpr double nm_per_um = 1.0e3;
inline constexpr double nm_per_cm = 1.0e7;
inline constexpr double um_per_cm = 1.0e4;

inline double db_from_linear(double x) { return 10.0 * std::log10(x); }
inline double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Field attenuation coefficient alpha (1/cm) expressed in dB/cm.
inline double db_per_cm_from_alpha(double alpha_per_cm) {
    return alpha_per_cm * 10.0 / std::log(10.0);
}

}  // namespace photonic::units
