#include "fastsize/model.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "fastsize/error.hpp"
#include "fastsize/units.hpp"

namespace fastsize {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::jet_fuel: return "jet_fuel";
    case SourceKind::hydrogen: return "hydrogen";
    case SourceKind::battery: return "battery";
  }
  return "?";
}

std::optional<SourceKind> source_kind_from(std::string_view token) {
  if (token == "jet_fuel") return SourceKind::jet_fuel;
  if (token == "hydrogen") return SourceKind::hydrogen;
  if (token == "battery") return SourceKind::battery;
  return std::nullopt;
}

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::takeoff: return "takeoff";
    case SegmentKind::climb: return "climb";
    case SegmentKind::cruise: return "cruise";
    case SegmentKind::descent: return "descent";
    case SegmentKind::loiter: return "loiter";
  }
  return "?";
}

std::string_view to_string(SpeedSchedule schedule) {
  switch (schedule) {
    case SpeedSchedule::constant_tas: return "constant_tas";
    case SpeedSchedule::constant_eas: return "constant_eas";
    case SpeedSchedule::constant_mach: return "constant_mach";
  }
  return "?";
}

std::string_view to_string(Terminator terminator) {
  switch (terminator) {
    case Terminator::distance: return "distance";
    case Terminator::duration: return "duration";
    case Terminator::altitude_reached: return "altitude_reached";
  }
  return "?";
}

const EnergySourceSpec* AircraftSpec::find_source(std::string_view id) const {
  for (const auto& s : energy_sources) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<std::string> AircraftSpec::missing_fields() const {
  std::vector<std::string> out;
  if (!aspect_ratio) out.emplace_back("aspect_ratio");
  if (!oswald_efficiency) out.emplace_back("oswald_efficiency");
  if (!cd0) out.emplace_back("cd0");
  if (!max_lift_coefficient) out.emplace_back("max_lift_coefficient");
  if (!empty_weight_fraction) out.emplace_back("empty_weight_fraction");
  return out;
}

double AircraftSpec::induced_drag_factor() const {
  if (!aspect_ratio || !oswald_efficiency) {
    throw ValidationError("aircraft '" + name + "': aspect_ratio and oswald_efficiency are required");
  }
  return 1.0 / (std::numbers::pi * *aspect_ratio * *oswald_efficiency);
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ValidationError("aircraft: " + what); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) invalid(std::string(name) + " must be > 0");
}

}  // namespace

void validate_spec(const AircraftSpec& spec) {
  if (spec.name.empty()) invalid("name must not be empty");
  if (spec.thrust_to_weight.has_value() == spec.power_to_weight.has_value()) {
    invalid("exactly one of thrust_to_weight / power_to_weight must be given");
  }
  if (spec.thrust_to_weight) require_positive(*spec.thrust_to_weight, "thrust_to_weight");
  if (spec.power_to_weight) require_positive(*spec.power_to_weight, "power_to_weight");
  require_positive(spec.wing_loading, "wing_loading");
  require_positive(spec.design_range, "design_range");
  if (!(spec.payload_mass >= 0.0)) invalid("payload_mass must be >= 0");
  if (!(spec.crew_mass >= 0.0)) invalid("crew_mass must be >= 0");
  if (spec.aspect_ratio) require_positive(*spec.aspect_ratio, "aspect_ratio");
  if (spec.cd0) require_positive(*spec.cd0, "cd0");
  if (spec.max_lift_coefficient) require_positive(*spec.max_lift_coefficient, "max_lift_coefficient");
  if (spec.oswald_efficiency && !(*spec.oswald_efficiency > 0.0 && *spec.oswald_efficiency <= 1.0)) {
    invalid("oswald_efficiency must be in (0, 1]");
  }
  if (spec.empty_weight_fraction &&
      !(*spec.empty_weight_fraction > 0.0 && *spec.empty_weight_fraction < 1.0)) {
    invalid("empty_weight_fraction must be in (0, 1)");
  }
  if (spec.architecture_id.empty()) invalid("architecture_id must not be empty");
  if (spec.energy_sources.empty()) invalid("at least one energy_source is required");

  std::set<std::string> ids;
  for (const auto& s : spec.energy_sources) {
    if (s.id.empty()) invalid("energy_source id must not be empty");
    if (!ids.insert(s.id).second) invalid("duplicate energy_source id '" + s.id + "'");
    if (!(s.specific_energy > 0.0)) invalid("energy_source '" + s.id + "': specific_energy must be > 0");
    bool battery = s.kind == SourceKind::battery;
    if (battery != s.usable_depth_of_discharge.has_value() || battery != s.max_specific_power.has_value()) {
      invalid("energy_source '" + s.id +
              "': usable_depth_of_discharge and max_specific_power are required for batteries and only for batteries");
    }
    if (battery) {
      double dod = *s.usable_depth_of_discharge;
      if (!(dod > 0.0 && dod <= 1.0)) invalid("energy_source '" + s.id + "': usable_depth_of_discharge must be in (0, 1]");
      if (!(*s.max_specific_power > 0.0)) invalid("energy_source '" + s.id + "': max_specific_power must be > 0");
    }
  }

  if (spec.weights) {
    const auto& w = *spec.weights;
    require_positive(w.mtow, "weights.mtow");
    for (const auto& [id, kg] : w.fuel) {
      const auto* s = spec.find_source(id);
      if (s == nullptr || !is_consumable(s->kind)) invalid("weights.fuel: '" + id + "' is not a fuel or hydrogen source");
      if (!(kg >= 0.0)) invalid("weights.fuel." + id + " must be >= 0");
    }
    for (const auto& [id, kg] : w.battery) {
      const auto* s = spec.find_source(id);
      if (s == nullptr || s->kind != SourceKind::battery) invalid("weights.battery: '" + id + "' is not a battery source");
      if (!(kg >= 0.0)) invalid("weights.battery." + id + " must be >= 0");
    }
  }
}

void check_schema_version(TableReader& reader) {
  const Value& v = reader.require("schema_version");
  if (!v.is_number() || std::get<double>(v.data) != kSchemaVersion) {
    reader.fail("schema_version", "unsupported schema version (expected 1)");
  }
}

namespace {

std::optional<double> optional_quantity(TableReader& r, std::string_view key, Dimension d) {
  if (!r.has(key)) return std::nullopt;
  return read_quantity(r, key, d);
}

std::map<std::string, double> read_mass_map(TableReader& parent, std::string_view key) {
  std::map<std::string, double> out;
  const Table* t = parent.optional_table(key);
  if (t == nullptr) return out;
  TableReader r(*t, parent.context() + "." + std::string(key));
  for (const auto& [id, value] : t->entries) out[id] = read_quantity(r, id, Dimension::mass);
  r.finish();
  return out;
}

LoadedWeights read_weights(const Table& table) {
  TableReader r(table, "weights");
  LoadedWeights w;
  w.mtow = read_quantity(r, "mtow", Dimension::mass);
  w.fuel = read_mass_map(r, "fuel");
  w.battery = read_mass_map(r, "battery");
  w.propulsion = read_mass_map(r, "propulsion");
  w.airframe = optional_quantity(r, "airframe", Dimension::mass);
  w.wing_area = r.has("wing_area") ? std::optional(r.require_number("wing_area")) : std::nullopt;
  if (const Value* p = r.get("propulsors")) {
    const auto* arr = std::get_if<Array>(&p->data);
    if (arr == nullptr) r.fail("propulsors", "expected an array of strings");
    for (const auto& e : *arr) {
      if (!e.is_string()) r.fail("propulsors", "expected an array of strings");
      w.propulsors.push_back(std::get<std::string>(e.data));
    }
  }
  r.finish();
  return w;
}

EnergySourceSpec read_energy_source(const Table& table, std::size_t index) {
  TableReader r(table, "energy_source " + std::to_string(index));
  EnergySourceSpec s;
  s.id = r.require_string("id");
  std::string kind = r.require_string("kind");
  auto parsed = source_kind_from(kind);
  if (!parsed) r.fail("kind", "expected one of jet_fuel, hydrogen, battery; got '" + kind + "'");
  s.kind = *parsed;
  s.specific_energy = read_quantity(r, "specific_energy", Dimension::specific_energy);
  if (r.has("usable_depth_of_discharge")) {
    s.usable_depth_of_discharge = read_quantity(r, "usable_depth_of_discharge", Dimension::dimensionless);
  }
  s.max_specific_power = optional_quantity(r, "max_specific_power", Dimension::specific_power);
  r.finish();
  return s;
}

}  // namespace

AircraftSpec parse_spec(std::string_view document) {
  Table root = parse_document(document);
  TableReader r(root, "aircraft");
  check_schema_version(r);

  AircraftSpec spec;
  spec.name = r.require_string("name");
  spec.payload_mass = read_quantity(r, "payload_mass", Dimension::mass);
  spec.crew_mass = r.has("crew_mass") ? read_quantity(r, "crew_mass", Dimension::mass) : 0.0;
  spec.design_range = read_quantity(r, "design_range", Dimension::length);
  spec.thrust_to_weight = optional_quantity(r, "thrust_to_weight", Dimension::dimensionless);
  spec.power_to_weight = optional_quantity(r, "power_to_weight", Dimension::power_to_weight);
  spec.wing_loading = read_quantity(r, "wing_loading", Dimension::pressure);
  spec.aspect_ratio = optional_quantity(r, "aspect_ratio", Dimension::dimensionless);
  spec.oswald_efficiency = optional_quantity(r, "oswald_efficiency", Dimension::dimensionless);
  spec.cd0 = optional_quantity(r, "cd0", Dimension::dimensionless);
  spec.max_lift_coefficient = optional_quantity(r, "max_lift_coefficient", Dimension::dimensionless);
  spec.empty_weight_fraction = optional_quantity(r, "empty_weight_fraction", Dimension::dimensionless);
  std::string basis = r.string_or("empty_weight_basis", "airframe_plus_propulsion");
  if (basis == "airframe_plus_propulsion") {
    spec.empty_weight_basis = EmptyWeightBasis::airframe_plus_propulsion;
  } else if (basis == "airframe_only") {
    spec.empty_weight_basis = EmptyWeightBasis::airframe_only;
  } else {
    r.fail("empty_weight_basis", "expected airframe_plus_propulsion or airframe_only");
  }
  spec.architecture_id = r.require_string("architecture_id");

  auto sources = r.table_array("energy_source");
  for (std::size_t i = 0; i < sources.size(); ++i) spec.energy_sources.push_back(read_energy_source(*sources[i], i));
  if (const Table* w = r.optional_table("weights")) spec.weights = read_weights(*w);

  // Report-only tables written by `size`; accepted so a sized report can be
  // flown again, but not interpreted.
  r.get("convergence");
  r.get("iteration");
  r.get("regressed");
  r.finish();

  validate_spec(spec);
  return spec;
}

AircraftSpec read_spec_file(const std::string& path) {
  try {
    return parse_spec(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

namespace {

Value mass_map_value(const std::map<std::string, double>& m) {
  Table t;
  for (const auto& [id, kg] : m) t.set(id, kg);
  return Value{std::move(t)};
}

}  // namespace

Table spec_to_table(const AircraftSpec& spec) {
  Table root;
  root.set("schema_version", kSchemaVersion);
  root.set("name", spec.name);
  root.set("payload_mass", spec.payload_mass);
  root.set("crew_mass", spec.crew_mass);
  root.set("design_range", spec.design_range);
  if (spec.thrust_to_weight) root.set("thrust_to_weight", *spec.thrust_to_weight);
  if (spec.power_to_weight) root.set("power_to_weight", *spec.power_to_weight);
  root.set("wing_loading", spec.wing_loading);
  if (spec.aspect_ratio) root.set("aspect_ratio", *spec.aspect_ratio);
  if (spec.oswald_efficiency) root.set("oswald_efficiency", *spec.oswald_efficiency);
  if (spec.cd0) root.set("cd0", *spec.cd0);
  if (spec.max_lift_coefficient) root.set("max_lift_coefficient", *spec.max_lift_coefficient);
  if (spec.empty_weight_fraction) root.set("empty_weight_fraction", *spec.empty_weight_fraction);
  root.set("empty_weight_basis", spec.empty_weight_basis == EmptyWeightBasis::airframe_only
                                     ? "airframe_only"
                                     : "airframe_plus_propulsion");
  root.set("architecture_id", spec.architecture_id);

  Array sources;
  for (const auto& s : spec.energy_sources) {
    Table t;
    t.set("id", s.id);
    t.set("kind", std::string(to_string(s.kind)));
    t.set("specific_energy", s.specific_energy);
    if (s.usable_depth_of_discharge) t.set("usable_depth_of_discharge", *s.usable_depth_of_discharge);
    if (s.max_specific_power) t.set("max_specific_power", *s.max_specific_power);
    sources.emplace_back(std::move(t));
  }
  root.set("energy_source", std::move(sources));

  if (spec.weights) {
    const auto& w = *spec.weights;
    Table t;
    t.set("mtow", w.mtow);
    if (w.airframe) t.set("airframe", *w.airframe);
    if (w.wing_area) t.set("wing_area", *w.wing_area);
    t.set("fuel", mass_map_value(w.fuel));
    t.set("battery", mass_map_value(w.battery));
    t.set("propulsion", mass_map_value(w.propulsion));
    Array propulsors;
    for (const auto& id : w.propulsors) propulsors.emplace_back(id);
    t.set("propulsors", std::move(propulsors));
    root.set("weights", std::move(t));
  }
  return root;
}

std::string serialize_spec(const AircraftSpec& spec) { return write_document(spec_to_table(spec)); }

const Segment& MissionProfile::segment_at(std::size_t index) const {
  return index < segments.size() ? segments[index] : reserve_segments.at(index - segments.size());
}

namespace {

Segment read_segment(const Table& table, const std::string& context) {
  TableReader r(table, context);
  Segment seg;
  std::string kind = r.require_string("kind");
  if (kind == "takeoff") {
    seg.kind = SegmentKind::takeoff;
  } else if (kind == "climb") {
    seg.kind = SegmentKind::climb;
  } else if (kind == "cruise") {
    seg.kind = SegmentKind::cruise;
  } else if (kind == "descent") {
    seg.kind = SegmentKind::descent;
  } else if (kind == "loiter") {
    seg.kind = SegmentKind::loiter;
  } else {
    r.fail("kind", "expected takeoff, climb, cruise, descent or loiter; got '" + kind + "'");
  }

  seg.start_altitude = read_quantity(r, "start_altitude", Dimension::length);
  seg.end_altitude = r.has("end_altitude") ? read_quantity(r, "end_altitude", Dimension::length) : seg.start_altitude;

  std::string schedule = r.require_string("speed_schedule");
  if (schedule == "constant_tas" || schedule == "tas") {
    seg.speed = {SpeedSchedule::constant_tas, read_quantity(r, "speed", Dimension::speed)};
  } else if (schedule == "constant_eas" || schedule == "eas") {
    seg.speed = {SpeedSchedule::constant_eas, read_quantity(r, "speed", Dimension::speed)};
  } else if (schedule == "constant_mach" || schedule == "mach") {
    seg.speed = {SpeedSchedule::constant_mach, read_quantity(r, "mach", Dimension::dimensionless)};
  } else {
    r.fail("speed_schedule", "expected constant_tas, constant_eas or constant_mach; got '" + schedule + "'");
  }

  std::string default_terminator;
  switch (seg.kind) {
    case SegmentKind::climb:
    case SegmentKind::descent: default_terminator = "altitude_reached"; break;
    case SegmentKind::cruise: default_terminator = "distance"; break;
    case SegmentKind::takeoff:
    case SegmentKind::loiter: default_terminator = "duration"; break;
  }
  std::string terminator = r.string_or("terminator", default_terminator);
  if (terminator == "distance") {
    seg.terminator = Terminator::distance;
    seg.distance = read_quantity(r, "distance", Dimension::length);
  } else if (terminator == "duration") {
    seg.terminator = Terminator::duration;
    // Takeoff is a fixed-length pseudo-segment; 60 s unless overridden.
    if (seg.kind == SegmentKind::takeoff && !r.has("duration")) {
      seg.duration = 60.0;
    } else {
      seg.duration = read_quantity(r, "duration", Dimension::time);
    }
  } else if (terminator == "altitude_reached") {
    seg.terminator = Terminator::altitude_reached;
  } else {
    r.fail("terminator", "expected distance, duration or altitude_reached; got '" + terminator + "'");
  }
  seg.operation_id = r.require_string("operation");
  if (r.has("rate_of_climb")) seg.rate_of_climb = read_quantity(r, "rate_of_climb", Dimension::speed);
  r.finish();
  return seg;
}

Table segment_table(const Segment& seg) {
  Table t;
  t.set("kind", std::string(to_string(seg.kind)));
  t.set("start_altitude", seg.start_altitude);
  t.set("end_altitude", seg.end_altitude);
  t.set("speed_schedule", std::string(to_string(seg.speed.schedule)));
  t.set(seg.speed.schedule == SpeedSchedule::constant_mach ? "mach" : "speed", seg.speed.value);
  t.set("terminator", std::string(to_string(seg.terminator)));
  if (seg.terminator == Terminator::distance) t.set("distance", seg.distance);
  if (seg.terminator == Terminator::duration) t.set("duration", seg.duration);
  t.set("operation", seg.operation_id);
  if (seg.rate_of_climb) t.set("rate_of_climb", *seg.rate_of_climb);
  return t;
}

}  // namespace

MissionProfile parse_mission(std::string_view document) {
  Table root = parse_document(document);
  TableReader r(root, "mission");
  check_schema_version(r);
  MissionProfile profile;
  profile.name = r.string_or("name", "mission");
  auto segments = r.table_array("segment");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    profile.segments.push_back(read_segment(*segments[i], "segment " + std::to_string(i)));
  }
  auto reserves = r.table_array("reserve");
  for (std::size_t i = 0; i < reserves.size(); ++i) {
    profile.reserve_segments.push_back(
        read_segment(*reserves[i], "reserve segment " + std::to_string(segments.size() + i)));
  }
  r.finish();
  return profile;
}

MissionProfile read_mission_file(const std::string& path) {
  try {
    return parse_mission(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string serialize_mission(const MissionProfile& profile) {
  Table root;
  root.set("schema_version", kSchemaVersion);
  root.set("name", profile.name);
  Array segments;
  for (const auto& s : profile.segments) segments.emplace_back(segment_table(s));
  root.set("segment", std::move(segments));
  Array reserves;
  for (const auto& s : profile.reserve_segments) reserves.emplace_back(segment_table(s));
  if (!reserves.empty()) root.set("reserve", std::move(reserves));
  return write_document(root);
}

std::vector<MissionViolation> validate_mission(const MissionProfile& profile) {
  constexpr double kAltitudeTolerance = 1e-6;  // m
  constexpr double kCeiling = 20000.0;          // m, atmosphere model limit
  std::vector<MissionViolation> out;
  auto add = [&out](std::size_t index, std::string message) {
    out.push_back({static_cast<int>(index), std::move(message)});
  };

  if (profile.segments.empty()) {
    add(0, "mission has no segments");
    return out;
  }
  if (std::abs(profile.segments.front().start_altitude) > kAltitudeTolerance) {
    add(0, "first segment must start at altitude 0");
  }
  bool has_cruise = false;
  for (const auto& s : profile.segments) has_cruise = has_cruise || s.kind == SegmentKind::cruise;
  if (!has_cruise) add(0, "missing cruise segment");

  for (std::size_t i = 0; i < profile.total_segments(); ++i) {
    const Segment& s = profile.segment_at(i);
    std::string where = "segment " + std::to_string(i) + " (" + std::string(to_string(s.kind)) + "): ";
    if (i > 0) {
      const Segment& prev = profile.segment_at(i - 1);
      if (std::abs(prev.end_altitude - s.start_altitude) > kAltitudeTolerance) {
        add(i, "altitude discontinuity at boundary " + std::to_string(i) + ": segment " + std::to_string(i - 1) +
                   " ends at " + std::to_string(prev.end_altitude) + " m, segment " + std::to_string(i) +
                   " starts at " + std::to_string(s.start_altitude) + " m");
      }
    }
    for (double h : {s.start_altitude, s.end_altitude}) {
      if (h < -kAltitudeTolerance || h > kCeiling) {
        add(i, where + "altitude " + std::to_string(h) + " m outside [0, 20000] m");
        break;
      }
    }
    if (!(s.speed.value > 0.0)) add(i, where + "speed must be > 0");
    if (s.operation_id.empty()) add(i, where + "operation must not be empty");

    Terminator expected = Terminator::distance;
    switch (s.kind) {
      case SegmentKind::takeoff:
        expected = Terminator::duration;
        if (std::abs(s.start_altitude) > kAltitudeTolerance || std::abs(s.end_altitude) > kAltitudeTolerance) {
          add(i, where + "takeoff is flown at sea level");
        }
        break;
      case SegmentKind::cruise:
      case SegmentKind::loiter:
        expected = s.kind == SegmentKind::cruise ? Terminator::distance : Terminator::duration;
        if (std::abs(s.end_altitude - s.start_altitude) > kAltitudeTolerance) {
          add(i, where + "start and end altitude must be equal");
        }
        break;
      case SegmentKind::climb:
      case SegmentKind::descent: {
        expected = Terminator::altitude_reached;
        bool climbing = s.kind == SegmentKind::climb;
        if (climbing ? !(s.end_altitude > s.start_altitude) : !(s.end_altitude < s.start_altitude)) {
          add(i, where + (climbing ? "end altitude must be above start altitude"
                                   : "end altitude must be below start altitude"));
        }
        if (!s.rate_of_climb || !(*s.rate_of_climb > 0.0)) {
          add(i, where + "rate_of_climb > 0 is required");
        }
        break;
      }
    }
    if (s.terminator != expected) {
      add(i, where + "terminator must be " + std::string(to_string(expected)) + ", got " +
                 std::string(to_string(s.terminator)));
    }
    if (s.terminator == Terminator::distance && !(s.distance >= 0.0)) add(i, where + "distance must be >= 0");
    if (s.terminator == Terminator::duration && !(s.duration >= 0.0)) add(i, where + "duration must be >= 0");
  }
  return out;
}

}  // namespace fastsize
