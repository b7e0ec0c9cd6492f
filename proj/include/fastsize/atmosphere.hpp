#pragma once

namespace fastsize {

// International Standard Atmosphere, troposphere (-6.5 K/km) and the
// isothermal layer up to 20 km.
namespace isa {
inline constexpr double kSeaLevelTemperature = 288.15;  // K
inline constexpr double kSeaLevelPressure = 101325.0;   // Pa
inline constexpr double kLapseRate = 0.0065;            // K/m
inline constexpr double kTropopause = 11000.0;          // m
inline constexpr double kCeiling = 20000.0;             // m
inline constexpr double kGasConstant = 287.05287;       // J/(kg K)
inline constexpr double kHeatCapacityRatio = 1.4;
inline constexpr double kSeaLevelDensity =
    kSeaLevelPressure / (kGasConstant * kSeaLevelTemperature);  // 1.225 kg/m^3
}  // namespace isa

struct AtmosphereState {
  double altitude = 0.0;        // m
  double temperature = 0.0;     // K
  double pressure = 0.0;        // Pa
  double density = 0.0;         // kg/m^3
  double speed_of_sound = 0.0;  // m/s
};

// Throws MissionError outside 0..20,000 m.
AtmosphereState atmosphere(double altitude);

}  // namespace fastsize
