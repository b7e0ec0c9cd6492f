#pragma once
// Fixed-point sizing. One pass of the loop, at the current MTOW iterate:
//
//   wing area and installed rating from the iterate
//   fly the mission (sources unbounded) -> energies, fuel, peak powers
//   weight build-up: airframe and propulsion masses
//   energy-source sizing: fuel and battery masses
//   computed = payload + crew + airframe + propulsion + fuel + battery
//
// The residual |computed - mtow| / mtow is tested against the tolerance; the
// next iterate is w * computed + (1 - w) * mtow. The reported aircraft is the
// iterate every quantity was evaluated at, so re-flying it reproduces the
// sizing run exactly.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fastsize/database.hpp"
#include "fastsize/error.hpp"
#include "fastsize/mission.hpp"
#include "fastsize/model.hpp"
#include "fastsize/powertrain.hpp"
#include "fastsize/regression.hpp"

namespace fastsize {

struct SizingOptions {
  double tolerance = 1e-6;  // relative MTOW change
  int max_iterations = 100;
  double relaxation = 1.0;  // w in (0, 1]
  std::optional<double> initial_mtow_guess;  // kg
  MissionOptions mission;

  void validate() const;  // ValidationError
};

struct IterationRecord {
  int iteration = 0;
  double mtow = 0.0;      // kg, iterate the pass was evaluated at
  double computed = 0.0;  // kg, sum of the build-up
  double residual = 0.0;  // |computed - mtow| / mtow
};

struct WeightBuildup {
  double airframe_mass = 0.0;                        // kg
  std::map<std::string, double> propulsion_masses;   // kg per transmitter/sink id
  double wing_area = 0.0;                            // m^2
  std::optional<double> installed_thrust;            // N
  std::optional<double> installed_power;             // W

  double propulsion_total() const;
};

// Takeoff rating as sink output demands: P/W designs hand the rated shaft
// power to the active sinks in equal shares (times each sink's efficiency);
// T/W designs hand T * V. Returns per-component demands.
std::vector<double> takeoff_sink_demands(const PropArchitecture& arch, const OperationSplit& op,
                                         std::optional<double> installed_power,
                                         std::optional<double> installed_thrust, double speed);

// Wing area, installed rating, propulsion masses from max(peak power,
// takeoff rating) and the airframe mass. With the default basis the airframe
// is f_e * mtow minus the propulsion masses; a negative result throws
// SizingError (infeasible decomposition). The takeoff rating is propagated
// with `takeoff_operation` when it names an operation; T/W designs need
// `takeoff_speed` for that.
WeightBuildup weight_buildup(double mtow, const AircraftSpec& spec, const PropArchitecture& arch,
                             const std::map<std::string, double>& peak_powers,
                             const std::string& takeoff_operation = {},
                             std::optional<double> takeoff_speed = std::nullopt);

struct EnergyMasses {
  std::map<std::string, double> fuel;     // kg per consumable source
  std::map<std::string, double> battery;  // kg per battery source

  double total() const;
};

// Consumables carry what was burned (design + reserve). Batteries carry
// E / (e * DoD), or peak draw / max specific power when that is larger.
EnergyMasses energy_source_sizing(const std::map<std::string, double>& energy_per_source,
                                  const std::map<std::string, double>& fuel_per_source,
                                  const std::map<std::string, double>& peak_power,
                                  const std::vector<EnergySourceSpec>& sources);

// The mission view of an aircraft at a given MTOW (wing area, polar,
// installed rating). Sources are unbounded.
MissionAircraft mission_aircraft(const AircraftSpec& spec, double mtow);

struct SizedAircraft {
  AircraftSpec spec;        // with regressed fields filled in
  PropArchitecture arch;    // with regressed specific powers filled in
  double mtow = 0.0;        // kg
  double airframe_mass = 0.0;
  std::map<std::string, double> propulsion_masses;
  std::map<std::string, double> fuel_mass;
  std::map<std::string, double> battery_mass;
  double payload_and_crew = 0.0;
  double wing_area = 0.0;
  std::optional<double> installed_thrust;
  std::optional<double> installed_power;
  double initial_guess = 0.0;
  std::vector<IterationRecord> iteration_log;
  std::vector<FillEntry> regressed;
  std::vector<std::string> warnings;
  MissionResult mission;

  // |sum of the build-up - mtow| / mtow.
  double closure_error() const;
  double fuel_total() const;
  double battery_total() const;
  double propulsion_total() const;
  // The spec with a [weights] block, ready for `fly`.
  AircraftSpec loaded_spec() const;
};

enum class SizingFailure { non_convergence, divergence, infeasible_decomposition };

// Sizing stopped without an aircraft. Carries the log of the iterations run.
class SizingError : public Error {
 public:
  SizingError(const std::string& what, SizingFailure failure, std::vector<IterationRecord> log = {})
      : Error(what), failure_(failure), log_(std::move(log)) {}
  SizingFailure failure() const { return failure_; }
  const std::vector<IterationRecord>& log() const { return log_; }

 private:
  SizingFailure failure_;
  std::vector<IterationRecord> log_;
};

// `db` is only consulted when the spec or the architecture has unknowns.
SizedAircraft size_aircraft(const AircraftSpec& spec, const MissionProfile& profile, const PropArchitecture& arch,
                            const HistoricalDatabase* db, const SizingOptions& options = {});

// Stall speed at sea level for the spec's wing loading and max lift
// coefficient; empty without max_lift_coefficient.
std::optional<double> stall_speed(const AircraftSpec& spec);

}  // namespace fastsize
