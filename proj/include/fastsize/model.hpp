#pragma once
// Aircraft specifications and mission profiles: the shared vocabulary of the
// sizing engine. Everything is SI once parsed.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastsize/document.hpp"

namespace fastsize {

inline constexpr int kSchemaVersion = 1;

enum class SourceKind { jet_fuel, hydrogen, battery };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> source_kind_from(std::string_view token);

// Fuel and hydrogen are burned and leave the aircraft; batteries keep their
// mass for the whole flight.
inline bool is_consumable(SourceKind kind) { return kind != SourceKind::battery; }

struct EnergySourceSpec {
  std::string id;
  SourceKind kind = SourceKind::jet_fuel;
  double specific_energy = 0.0;  // J/kg
  // Present iff kind == battery.
  std::optional<double> usable_depth_of_discharge;
  std::optional<double> max_specific_power;  // W/kg

  bool operator==(const EnergySourceSpec&) const = default;
};

// How the empty-weight fraction is interpreted by the weight build-up.
enum class EmptyWeightBasis {
  airframe_plus_propulsion,  // historical OEW convention; propulsion carved out
  airframe_only,
};

// Weights of an already-sized aircraft. Present in sized reports and required
// by `fly`, which flies a fixed aircraft instead of sizing one.
struct LoadedWeights {
  double mtow = 0.0;                               // kg
  std::map<std::string, double> fuel;              // consumable source id -> kg loaded
  std::map<std::string, double> battery;           // battery source id -> kg
  std::optional<double> airframe;                  // informational
  std::map<std::string, double> propulsion;        // informational
  std::optional<double> wing_area;                 // informational
  std::vector<std::string> propulsors;             // sink ids, for geometry

  bool operator==(const LoadedWeights&) const = default;
};

struct AircraftSpec {
  std::string name;
  double payload_mass = 0.0;  // kg
  double crew_mass = 0.0;     // kg
  double design_range = 0.0;  // m
  std::optional<double> thrust_to_weight;  // N/N
  std::optional<double> power_to_weight;   // W/N
  double wing_loading = 0.0;               // N/m^2
  // Fields below may be omitted in the input; fill_unknowns() completes the
  // ones that have a regression and rejects the rest.
  std::optional<double> aspect_ratio;
  std::optional<double> oswald_efficiency;
  std::optional<double> cd0;
  std::optional<double> max_lift_coefficient;
  std::optional<double> empty_weight_fraction;
  EmptyWeightBasis empty_weight_basis = EmptyWeightBasis::airframe_plus_propulsion;
  std::string architecture_id;
  std::vector<EnergySourceSpec> energy_sources;
  std::optional<LoadedWeights> weights;

  const EnergySourceSpec* find_source(std::string_view id) const;
  // Names of optional fields that are still unknown, in schema order.
  std::vector<std::string> missing_fields() const;
  // Induced-drag factor k = 1/(pi AR e). Requires both fields.
  double induced_drag_factor() const;

  bool operator==(const AircraftSpec&) const = default;
};

// Throws ValidationError on the first broken invariant. Checks only fields
// that are present; missing optional fields are not an error here.
void validate_spec(const AircraftSpec& spec);

AircraftSpec parse_spec(std::string_view document);
AircraftSpec read_spec_file(const std::string& path);
Table spec_to_table(const AircraftSpec& spec);
// Normalized form: SI numbers, no unit strings. parse_spec(serialize_spec(s))
// reproduces s.
std::string serialize_spec(const AircraftSpec& spec);

enum class SegmentKind { takeoff, climb, cruise, descent, loiter };
enum class SpeedSchedule { constant_tas, constant_eas, constant_mach };
enum class Terminator { distance, duration, altitude_reached };

std::string_view to_string(SegmentKind kind);
std::string_view to_string(SpeedSchedule schedule);
std::string_view to_string(Terminator terminator);

struct SpeedTarget {
  SpeedSchedule schedule = SpeedSchedule::constant_tas;
  double value = 0.0;  // m/s for TAS/EAS, Mach number otherwise

  bool operator==(const SpeedTarget&) const = default;
};

struct Segment {
  SegmentKind kind = SegmentKind::cruise;
  double start_altitude = 0.0;  // m
  double end_altitude = 0.0;    // m
  SpeedTarget speed;
  Terminator terminator = Terminator::distance;
  double distance = 0.0;  // m, for distance terminators
  double duration = 0.0;  // s, for duration terminators
  std::string operation_id;
  std::optional<double> rate_of_climb;  // m/s magnitude; descent uses it as sink rate

  bool operator==(const Segment&) const = default;
};

struct MissionProfile {
  std::string name;
  std::vector<Segment> segments;
  // Flown after the design mission; their energy is carried but their
  // distance does not count toward the design range.
  std::vector<Segment> reserve_segments;

  std::size_t total_segments() const { return segments.size() + reserve_segments.size(); }
  // Design segments then reserves, by overall index.
  const Segment& segment_at(std::size_t index) const;

  bool operator==(const MissionProfile&) const = default;
};

struct MissionViolation {
  int segment_index;  // overall index; boundaries use the index of the later segment
  std::string message;
};

std::vector<MissionViolation> validate_mission(const MissionProfile& profile);

MissionProfile parse_mission(std::string_view document);
MissionProfile read_mission_file(const std::string& path);
std::string serialize_mission(const MissionProfile& profile);

// Validates the `schema_version = 1` key shared by every input document.
void check_schema_version(TableReader& reader);

}  // namespace fastsize
