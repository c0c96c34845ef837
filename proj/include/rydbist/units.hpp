// Unit conventions: angular frequencies are rad/us, so 1 MHz of ordinary
// frequency is 2*pi rad/us. Powers are linear milliwatts internally.
#pragma once

#include <numbers>

namespace rydbist {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz; }
constexpr double angular_to_mhz(double angular) { return angular / kTwoPi; }

/// Returns the MHz value whose conversion back to rad/us reproduces `angular`
/// bit for bit, when such a value exists. Used by the config writer.
double angular_to_mhz_exact(double angular);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

} // namespace rydbist
