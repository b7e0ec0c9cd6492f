#include "fastsize/atmosphere.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastsize/error.hpp"
#include "fastsize/units.hpp"

namespace fastsize {

AtmosphereState atmosphere(double altitude) {
  using namespace isa;
  constexpr double kSlack = 1e-6;
  if (!(altitude >= -kSlack && altitude <= kCeiling + kSlack)) {
    throw MissionError("altitude " + std::to_string(altitude) + " m is outside the modeled atmosphere (0-20000 m)");
  }
  const double h = std::clamp(altitude, 0.0, kCeiling);
  const double exponent = kStandardGravity / (kGasConstant * kLapseRate);

  AtmosphereState s;
  s.altitude = altitude;
  if (h <= kTropopause) {
    s.temperature = kSeaLevelTemperature - kLapseRate * h;
    s.pressure = kSeaLevelPressure * std::pow(s.temperature / kSeaLevelTemperature, exponent);
  } else {
    const double t11 = kSeaLevelTemperature - kLapseRate * kTropopause;
    const double p11 = kSeaLevelPressure * std::pow(t11 / kSeaLevelTemperature, exponent);
    s.temperature = t11;
    s.pressure = p11 * std::exp(-kStandardGravity * (h - kTropopause) / (kGasConstant * t11));
  }
  s.density = s.pressure / (kGasConstant * s.temperature);
  s.speed_of_sound = std::sqrt(kHeatCapacityRatio * kGasConstant * s.temperature);
  return s;
}

}  // namespace fastsize
