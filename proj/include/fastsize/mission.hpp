#pragma once
// Energy-based point-mass mission analysis.
//
// Each segment is marched with fixed forward-Euler steps of at most dt_max
// (the last step is shortened so the terminator is hit exactly). A step
// evaluates the atmosphere, resolves the speed schedule to true airspeed,
// computes the point-mass thrust and power demand, pulls that demand through
// the powertrain with the segment's operation, and depletes the sources:
// fuel and hydrogen lose P dt / e of mass (and so does the aircraft), batteries
// lose P dt of energy and keep their mass.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fastsize/atmosphere.hpp"
#include "fastsize/model.hpp"
#include "fastsize/powertrain.hpp"
#include "fastsize/units.hpp"

namespace fastsize {

struct AeroParameters {
  double wing_area = 0.0;                // m^2
  double cd0 = 0.0;
  double k = 0.0;                        // induced drag factor 1/(pi AR e)
  std::optional<double> max_lift_coefficient;  // stall check when set
};

struct Kinematics {
  double flight_path_angle = 0.0;  // rad
  double acceleration = 0.0;       // dV/dt, m/s^2
};

struct FlightState {
  double time = 0.0;           // s
  double distance = 0.0;       // m, ground track
  double altitude = 0.0;       // m
  double true_airspeed = 0.0;  // m/s
  double mass = 0.0;           // kg
  // Indexed like the architecture's components; only source entries are used.
  std::vector<double> fuel_mass_remaining;        // kg, consumable sources
  std::vector<double> battery_energy_remaining;   // J, battery sources
  std::vector<double> energy_drawn;               // J, cumulative per source
};

struct PointMassDemand {
  double lift_coefficient = 0.0;
  double drag = 0.0;               // N
  double thrust_required = 0.0;    // N, clamped at 0
  double sink_power_demand = 0.0;  // W, propulsor output power
  bool idle_clamped = false;       // thrust_required was negative
};

// q = rho V^2 / 2, C_L = m g cos(gamma) / (q S), D = q S (cd0 + k C_L^2),
// T = D + m g sin(gamma) + m dV/dt, P = T V. Throws MissionError on stall
// (C_L above aero.max_lift_coefficient).
PointMassDemand point_mass_demand(const FlightState& state, const AtmosphereState& air, const Kinematics& kinematics,
                                  const AeroParameters& aero, double g = kStandardGravity);

// True airspeed for a speed schedule at an altitude.
double true_airspeed(const SpeedTarget& speed, const AtmosphereState& air);

// Everything the integrator needs to know about the aircraft.
struct MissionAircraft {
  double takeoff_mass = 0.0;  // kg
  AeroParameters aero;
  std::optional<double> installed_thrust;  // N, thrust-rated designs
  std::optional<double> installed_power;   // W shaft into the propulsors, power-rated designs
  std::vector<EnergySourceSpec> sources;
  // Loaded fuel (kg) and battery mass (kg) per source id. Without them the
  // sources are unbounded, which is what the sizing loop wants.
  std::optional<std::map<std::string, double>> fuel_loaded;
  std::optional<std::map<std::string, double>> battery_mass;

  const EnergySourceSpec& source(const std::string& id) const;
};

struct MissionOptions {
  double dt_max = 10.0;  // s
};

struct HistorySample {
  double time = 0.0;
  double distance = 0.0;
  double altitude = 0.0;
  double tas = 0.0;
  double mass = 0.0;
  double lift_coefficient = 0.0;
  double drag = 0.0;
  double thrust = 0.0;
  double flight_path_angle = 0.0;
  int segment = 0;
  std::vector<double> power;          // W per component (sources: draw)
  std::vector<double> energy_drawn;   // J cumulative per component (sources only)
};

struct MissionHistory {
  std::vector<std::string> component_ids;
  std::vector<std::string> source_ids;
  std::vector<std::size_t> source_columns;  // component index of each source
  std::vector<HistorySample> samples;
};

struct SegmentResult {
  FlightState end;
  MissionHistory slice;
  std::vector<double> peak_power;  // per component: sizing power, sources: draw
  int idle_clamp_events = 0;
};

// Flies one segment from `start`. `segment_index` only annotates errors.
SegmentResult fly_segment(const FlightState& start, const Segment& segment, const MissionAircraft& aircraft,
                          const PropArchitecture& arch, const MissionOptions& options = {}, int segment_index = 0);

struct MissionResult {
  MissionHistory history;
  FlightState end;
  std::map<std::string, double> energy_per_source;  // J, design + reserve
  std::map<std::string, double> fuel_per_source;    // kg, consumable sources
  std::map<std::string, double> peak_power;         // W per component id
  double design_distance = 0.0;   // m, design segments only
  double reserve_distance = 0.0;  // m
  int idle_clamp_events = 0;
};

// Initial state at the first segment's start with full sources.
FlightState initial_state(const MissionProfile& profile, const MissionAircraft& aircraft, const PropArchitecture& arch);

// Flies design segments then reserves. Errors are MissionErrors carrying the
// overall segment index.
MissionResult fly_mission(const MissionAircraft& aircraft, const MissionProfile& profile, const PropArchitecture& arch,
                          const MissionOptions& options = {});

// Violations of: time strictly increasing, mass non-increasing, cumulative
// source energies non-decreasing. Empty when the history is consistent.
std::vector<std::string> check_history(const MissionHistory& history);

// Fixed column order: time_s,distance_m,altitude_m,tas_ms,mass_kg,cl,drag_n,
// thrust_n,gamma_rad, one p_<component>_w per component, one e_<source>_j per
// source. Values carry 9 significant digits.
void write_history_csv(std::ostream& out, const MissionHistory& history);
std::string history_csv(const MissionHistory& history);

// Checks that each segment's operation exists and each mission-active sink
// has somewhere to go; throws ValidationError.
void check_operations_exist(const MissionProfile& profile, const PropArchitecture& arch);

}  // namespace fastsize
