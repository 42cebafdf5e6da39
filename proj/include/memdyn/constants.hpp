#ifndef MEMDYN_CONSTANTS_HPP_
#define MEMDYN_CONSTANTS_HPP_

#include <numbers>

namespace memdyn
{

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values, SI.
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Converts a cyclic frequency in Hz to an angular frequency in rad/s.
constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }

}  // namespace memdyn

#endif  // MEMDYN_CONSTANTS_HPP_
