#include "fastsize/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fastsize/error.hpp"

namespace fastsize {

PointMassDemand point_mass_demand(const FlightState& state, const AtmosphereState& air, const Kinematics& kinematics,
                                  const AeroParameters& aero, double g) {
  const double v = state.true_airspeed;
  const double q = 0.5 * air.density * v * v;
  if (!(v > 0.0) || !(q * aero.wing_area > 0.0)) {
    throw MissionError("point-mass demand needs positive airspeed and wing area");
  }
  const double weight = state.mass * g;
  PointMassDemand d;
  d.lift_coefficient = weight * std::cos(kinematics.flight_path_angle) / (q * aero.wing_area);
  if (aero.max_lift_coefficient && d.lift_coefficient > *aero.max_lift_coefficient) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "stall: lift coefficient %.4f exceeds maximum %.4f at %.1f m/s, %.0f m",
                  d.lift_coefficient, *aero.max_lift_coefficient, v, state.altitude);
    throw MissionError(buf);
  }
  d.drag = q * aero.wing_area * (aero.cd0 + aero.k * d.lift_coefficient * d.lift_coefficient);
  double thrust = d.drag + weight * std::sin(kinematics.flight_path_angle) + state.mass * kinematics.acceleration;
  if (thrust < 0.0) {
    thrust = 0.0;
    d.idle_clamped = true;
  }
  d.thrust_required = thrust;
  d.sink_power_demand = thrust * v;
  return d;
}

double true_airspeed(const SpeedTarget& speed, const AtmosphereState& air) {
  switch (speed.schedule) {
    case SpeedSchedule::constant_tas: return speed.value;
    case SpeedSchedule::constant_eas: return speed.value * std::sqrt(isa::kSeaLevelDensity / air.density);
    case SpeedSchedule::constant_mach: return speed.value * air.speed_of_sound;
  }
  return speed.value;
}

const EnergySourceSpec& MissionAircraft::source(const std::string& id) const {
  for (const auto& s : sources) {
    if (s.id == id) return s;
  }
  throw ValidationError("energy source '" + id + "' is not declared on the aircraft");
}

namespace {

struct SourceSlot {
  std::size_t index;
  const EnergySourceSpec* spec;
  double fuel_loaded;       // kg, consumables
  double battery_capacity;  // J, batteries
  double battery_floor;     // J
};

std::vector<SourceSlot> source_slots(const MissionAircraft& aircraft, const PropArchitecture& arch) {
  std::vector<SourceSlot> out;
  constexpr double kUnbounded = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const Component& c = arch.component(i);
    if (c.role() != ComponentRole::source) continue;
    const EnergySourceSpec& spec = aircraft.source(c.id);
    SourceSlot slot{i, &spec, kUnbounded, kUnbounded, 0.0};
    if (is_consumable(spec.kind) && aircraft.fuel_loaded) {
      auto it = aircraft.fuel_loaded->find(c.id);
      slot.fuel_loaded = it != aircraft.fuel_loaded->end() ? it->second : 0.0;
    }
    if (spec.kind == SourceKind::battery && aircraft.battery_mass) {
      auto it = aircraft.battery_mass->find(c.id);
      double mass = it != aircraft.battery_mass->end() ? it->second : 0.0;
      slot.battery_capacity = mass * spec.specific_energy;
      slot.battery_floor = (1.0 - *spec.usable_depth_of_discharge) * slot.battery_capacity;
    }
    out.push_back(slot);
  }
  return out;
}

MissionHistory empty_history(const PropArchitecture& arch) {
  MissionHistory h;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    h.component_ids.push_back(arch.component(i).id);
    if (arch.component(i).role() == ComponentRole::source) {
      h.source_ids.push_back(arch.component(i).id);
      h.source_columns.push_back(i);
    }
  }
  return h;
}

std::string segment_label(int index, const Segment& seg) {
  return "segment " + std::to_string(index) + " (" + std::string(to_string(seg.kind)) + ")";
}

double segment_duration(const Segment& seg, double start_altitude) {
  switch (seg.kind) {
    case SegmentKind::takeoff:
    case SegmentKind::loiter: return seg.duration;
    case SegmentKind::cruise: {
      double v = true_airspeed(seg.speed, atmosphere(start_altitude));
      return seg.distance / v;
    }
    case SegmentKind::climb:
    case SegmentKind::descent: return std::abs(seg.end_altitude - seg.start_altitude) / *seg.rate_of_climb;
  }
  return 0.0;
}

// Vertical speed (m/s, signed) of a segment.
double vertical_speed(const Segment& seg) {
  if (seg.kind == SegmentKind::climb) return *seg.rate_of_climb;
  if (seg.kind == SegmentKind::descent) return -*seg.rate_of_climb;
  return 0.0;
}

struct StepDemand {
  double tas = 0.0;
  PointMassDemand forces;
  double flight_path_angle = 0.0;
  PowerTable table;
};

StepDemand evaluate_step(const FlightState& state, const Segment& seg, const MissionAircraft& aircraft,
                         const PropArchitecture& arch, const OperationSplit& op,
                         const std::vector<std::size_t>& active_sinks) {
  StepDemand out;
  const AtmosphereState air = atmosphere(state.altitude);
  out.tas = true_airspeed(seg.speed, air);
  FlightState at = state;
  at.true_airspeed = out.tas;

  const double climb_rate = vertical_speed(seg);
  if (climb_rate != 0.0 && std::abs(climb_rate) >= out.tas) {
    throw MissionError("vertical speed " + std::to_string(std::abs(climb_rate)) + " m/s exceeds airspeed " +
                       std::to_string(out.tas) + " m/s");
  }
  Kinematics kin;
  kin.flight_path_angle = std::asin(climb_rate / out.tas);
  if (climb_rate != 0.0 && seg.speed.schedule != SpeedSchedule::constant_tas) {
    constexpr double kDh = 0.5;
    double lo = std::max(0.0, state.altitude - kDh);
    double hi = std::min(isa::kCeiling, state.altitude + kDh);
    double dv_dh = (true_airspeed(seg.speed, atmosphere(hi)) - true_airspeed(seg.speed, atmosphere(lo))) / (hi - lo);
    kin.acceleration = dv_dh * climb_rate;
  }
  out.flight_path_angle = kin.flight_path_angle;

  std::vector<double> demands(arch.size(), 0.0);
  const double share = 1.0 / static_cast<double>(active_sinks.size());
  if (seg.kind == SegmentKind::takeoff) {
    // Constant rated power; the polar is still evaluated for the record.
    AeroParameters no_stall = aircraft.aero;
    no_stall.max_lift_coefficient.reset();
    out.forces = point_mass_demand(at, air, kin, no_stall);
    double total_output = 0.0;
    for (std::size_t s : active_sinks) {
      double d = aircraft.installed_power ? *aircraft.installed_power * share * arch.component(s).efficiency
                                          : *aircraft.installed_thrust * out.tas * share;
      demands[s] = d;
      total_output += d;
    }
    out.forces.idle_clamped = false;
    out.forces.sink_power_demand = total_output;
    out.forces.thrust_required = total_output / out.tas;
  } else {
    out.forces = point_mass_demand(at, air, kin, aircraft.aero);
    for (std::size_t s : active_sinks) demands[s] = out.forces.sink_power_demand * share;
  }
  out.table = propagate_power(arch, op, demands);
  return out;
}

void record(MissionHistory& history, const FlightState& state, const StepDemand& step, int segment_index) {
  HistorySample s;
  s.time = state.time;
  s.distance = state.distance;
  s.altitude = state.altitude;
  s.tas = step.tas;
  s.mass = state.mass;
  s.lift_coefficient = step.forces.lift_coefficient;
  s.drag = step.forces.drag;
  s.thrust = step.forces.thrust_required;
  s.flight_path_angle = step.flight_path_angle;
  s.segment = segment_index;
  s.power = step.table.output;
  s.energy_drawn = state.energy_drawn;
  history.samples.push_back(std::move(s));
}

}  // namespace

FlightState initial_state(const MissionProfile& profile, const MissionAircraft& aircraft,
                          const PropArchitecture& arch) {
  FlightState s;
  s.altitude = profile.segments.empty() ? 0.0 : profile.segments.front().start_altitude;
  s.true_airspeed =
      profile.segments.empty() ? 0.0 : true_airspeed(profile.segments.front().speed, atmosphere(s.altitude));
  s.mass = aircraft.takeoff_mass;
  s.fuel_mass_remaining.assign(arch.size(), 0.0);
  s.battery_energy_remaining.assign(arch.size(), 0.0);
  s.energy_drawn.assign(arch.size(), 0.0);
  for (const auto& slot : source_slots(aircraft, arch)) {
    if (is_consumable(slot.spec->kind)) {
      s.fuel_mass_remaining[slot.index] = slot.fuel_loaded;
    } else {
      s.battery_energy_remaining[slot.index] = slot.battery_capacity;
    }
  }
  return s;
}

SegmentResult fly_segment(const FlightState& start, const Segment& seg, const MissionAircraft& aircraft,
                          const PropArchitecture& arch, const MissionOptions& options, int segment_index) {
  if (!(options.dt_max > 0.0)) throw ValidationError("dt_max must be > 0");
  const OperationSplit& op = arch.operation(seg.operation_id);
  const auto active_sinks = arch.active_sinks(op);
  const auto slots = source_slots(aircraft, arch);
  const std::string label = segment_label(segment_index, seg);

  SegmentResult result;
  result.slice = empty_history(arch);
  result.peak_power.assign(arch.size(), 0.0);
  FlightState state = start;
  state.altitude = seg.start_altitude;

  try {
    const double duration = segment_duration(seg, seg.start_altitude);
    const double dt = options.dt_max;
    const double climb_rate = vertical_speed(seg);
    const double t0 = start.time;
    const double d0 = start.distance;

    for (long k = 0;; ++k) {
      const double elapsed = static_cast<double>(k) * dt;
      const double left = duration - elapsed;
      if (left <= 1e-9 * dt) break;
      const double step = std::min(dt, left);

      state.time = t0 + elapsed;
      state.altitude = seg.start_altitude + climb_rate * elapsed;
      StepDemand demand = evaluate_step(state, seg, aircraft, arch, op, active_sinks);
      state.true_airspeed = demand.tas;
      if (demand.forces.idle_clamped) ++result.idle_clamp_events;
      record(result.slice, state, demand, segment_index);

      for (std::size_t i = 0; i < arch.size(); ++i) {
        result.peak_power[i] = std::max(result.peak_power[i], sizing_power(arch, demand.table, i));
      }
      for (const auto& slot : slots) {
        const double energy = demand.table.draw(slot.index) * step;
        state.energy_drawn[slot.index] += energy;
        if (is_consumable(slot.spec->kind)) {
          const double burned = energy / slot.spec->specific_energy;
          state.fuel_mass_remaining[slot.index] -= burned;
          state.mass -= burned;
          if (state.fuel_mass_remaining[slot.index] < -1e-9 * slot.fuel_loaded) {
            throw MissionError("fuel exhausted: source '" + slot.spec->id + "' ran dry at t = " +
                               std::to_string(state.time + step) + " s");
          }
        } else {
          state.battery_energy_remaining[slot.index] -= energy;
          if (state.battery_energy_remaining[slot.index] < slot.battery_floor - 1e-9 * slot.battery_capacity) {
            throw MissionError("battery depleted: source '" + slot.spec->id +
                               "' fell below its usable depth of discharge at t = " +
                               std::to_string(state.time + step) + " s");
          }
        }
      }
      state.distance += demand.tas * std::cos(demand.flight_path_angle) * step;
    }

    state.time = t0 + duration;
    state.altitude = seg.end_altitude;
    if (seg.kind == SegmentKind::cruise) state.distance = d0 + seg.distance;
    state.true_airspeed = true_airspeed(seg.speed, atmosphere(state.altitude));
  } catch (const MissionError& e) {
    throw MissionError(label + ": " + e.what(), segment_index);
  } catch (const PowertrainError& e) {
    throw MissionError(label + ": " + e.what(), segment_index);
  }
  result.end = state;
  return result;
}

MissionResult fly_mission(const MissionAircraft& aircraft, const MissionProfile& profile, const PropArchitecture& arch,
                          const MissionOptions& options) {
  check_operations_exist(profile, arch);
  MissionResult result;
  result.history = empty_history(arch);
  std::vector<double> peaks(arch.size(), 0.0);
  FlightState state = initial_state(profile, aircraft, arch);

  for (std::size_t i = 0; i < profile.total_segments(); ++i) {
    const Segment& seg = profile.segment_at(i);
    const double distance_before = state.distance;
    SegmentResult part = fly_segment(state, seg, aircraft, arch, options, static_cast<int>(i));
    for (auto& s : part.slice.samples) result.history.samples.push_back(std::move(s));
    for (std::size_t c = 0; c < arch.size(); ++c) peaks[c] = std::max(peaks[c], part.peak_power[c]);
    result.idle_clamp_events += part.idle_clamp_events;
    state = std::move(part.end);
    (i < profile.segments.size() ? result.design_distance : result.reserve_distance) +=
        state.distance - distance_before;
  }

  // Closing sample at the end state, with the last segment's forces.
  if (profile.total_segments() > 0) {
    const Segment& last = profile.segment_at(profile.total_segments() - 1);
    const OperationSplit& op = arch.operation(last.operation_id);
    try {
      StepDemand demand = evaluate_step(state, last, aircraft, arch, op, arch.active_sinks(op));
      record(result.history, state, demand, static_cast<int>(profile.total_segments() - 1));
    } catch (const MissionError& e) {
      throw MissionError("end of mission: " + std::string(e.what()), static_cast<int>(profile.total_segments() - 1));
    }
  }

  for (std::size_t i = 0; i < arch.size(); ++i) {
    const Component& c = arch.component(i);
    result.peak_power[c.id] = peaks[i];
    if (c.role() != ComponentRole::source) continue;
    result.energy_per_source[c.id] = state.energy_drawn[i];
    const EnergySourceSpec& spec = aircraft.source(c.id);
    if (is_consumable(spec.kind)) result.fuel_per_source[c.id] = state.energy_drawn[i] / spec.specific_energy;
  }
  result.end = std::move(state);

  if (auto problems = check_history(result.history); !problems.empty()) {
    throw Error("internal: inconsistent mission history: " + problems.front());
  }
  return result;
}

std::vector<std::string> check_history(const MissionHistory& history) {
  std::vector<std::string> out;
  const auto& s = history.samples;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(s[k].time > s[k - 1].time)) out.push_back("time not strictly increasing at sample " + std::to_string(k));
    if (s[k].mass > s[k - 1].mass) out.push_back("mass increased at sample " + std::to_string(k));
    for (std::size_t c : history.source_columns) {
      if (s[k].energy_drawn[c] < s[k - 1].energy_drawn[c]) {
        out.push_back("cumulative energy of '" + history.component_ids[c] + "' decreased at sample " +
                      std::to_string(k));
      }
    }
  }
  return out;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out << buf;
}

}  // namespace

void write_history_csv(std::ostream& out, const MissionHistory& history) {
  out << "time_s,distance_m,altitude_m,tas_ms,mass_kg,cl,drag_n,thrust_n,gamma_rad";
  for (const auto& id : history.component_ids) out << ",p_" << id << "_w";
  for (const auto& id : history.source_ids) out << ",e_" << id << "_j";
  out << '\n';
  for (const auto& s : history.samples) {
    for (double v : {s.time, s.distance, s.altitude, s.tas, s.mass, s.lift_coefficient, s.drag, s.thrust,
                     s.flight_path_angle}) {
      put(out, v);
      out << ',';
    }
    for (std::size_t c = 0; c < s.power.size(); ++c) {
      put(out, s.power[c]);
      out << ',';
    }
    for (std::size_t k = 0; k < history.source_columns.size(); ++k) {
      put(out, s.energy_drawn[history.source_columns[k]]);
      out << (k + 1 < history.source_columns.size() ? "," : "");
    }
    out << '\n';
  }
}

std::string history_csv(const MissionHistory& history) {
  std::ostringstream ss;
  write_history_csv(ss, history);
  return ss.str();
}

void check_operations_exist(const MissionProfile& profile, const PropArchitecture& arch) {
  for (std::size_t i = 0; i < profile.total_segments(); ++i) {
    const Segment& seg = profile.segment_at(i);
    if (!arch.has_operation(seg.operation_id)) {
      throw ValidationError(segment_label(static_cast<int>(i), seg) + ": architecture '" + arch.name() +
                            "' has no operation '" + seg.operation_id + "'");
    }
  }
}

}  // namespace fastsize
