#include "fastsize/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace fastsize {

namespace {

double sum_values(const std::map<std::string, double>& m) {
  double total = 0.0;
  for (const auto& [id, v] : m) total += v;
  return total;
}

std::string format_kg(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g kg", v);
  return buf;
}

const Segment* takeoff_segment(const MissionProfile& profile) {
  for (const auto& seg : profile.segments) {
    if (seg.kind == SegmentKind::takeoff) return &seg;
  }
  return nullptr;
}

}  // namespace

void SizingOptions::validate() const {
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw ValidationError("relaxation must be in (0, 1]");
  if (initial_mtow_guess && !(*initial_mtow_guess > 0.0)) throw ValidationError("initial MTOW guess must be > 0");
  if (!(mission.dt_max > 0.0)) throw ValidationError("dt_max must be > 0");
}

double WeightBuildup::propulsion_total() const { return sum_values(propulsion_masses); }
double EnergyMasses::total() const { return sum_values(fuel) + sum_values(battery); }

std::vector<double> takeoff_sink_demands(const PropArchitecture& arch, const OperationSplit& op,
                                         std::optional<double> installed_power,
                                         std::optional<double> installed_thrust, double speed) {
  std::vector<double> demands(arch.size(), 0.0);
  const auto sinks = arch.active_sinks(op);
  if (sinks.empty()) return demands;
  const double share = 1.0 / static_cast<double>(sinks.size());
  for (std::size_t s : sinks) {
    if (installed_power) {
      demands[s] = *installed_power * share * arch.component(s).efficiency;
    } else if (installed_thrust) {
      demands[s] = *installed_thrust * speed * share;
    }
  }
  return demands;
}

WeightBuildup weight_buildup(double mtow, const AircraftSpec& spec, const PropArchitecture& arch,
                             const std::map<std::string, double>& peak_powers, const std::string& takeoff_operation,
                             std::optional<double> takeoff_speed) {
  if (!(mtow > 0.0)) throw ValidationError("weight build-up needs mtow > 0");
  if (!spec.empty_weight_fraction) throw ValidationError("weight build-up needs empty_weight_fraction");
  WeightBuildup out;
  const double weight = mtow * kStandardGravity;
  out.wing_area = weight / spec.wing_loading;
  if (spec.power_to_weight) out.installed_power = *spec.power_to_weight * weight;
  if (spec.thrust_to_weight) out.installed_thrust = *spec.thrust_to_weight * weight;

  std::map<std::string, double> design_power = peak_powers;
  const bool can_rate = !takeoff_operation.empty() && arch.has_operation(takeoff_operation) &&
                        (out.installed_power || takeoff_speed);
  if (can_rate) {
    const OperationSplit& op = arch.operation(takeoff_operation);
    PowerTable rated = propagate_power(
        arch, op, takeoff_sink_demands(arch, op, out.installed_power, out.installed_thrust, takeoff_speed.value_or(0.0)));
    for (std::size_t i = 0; i < arch.size(); ++i) {
      double& p = design_power[arch.component(i).id];
      p = std::max(p, sizing_power(arch, rated, i));
    }
  }
  out.propulsion_masses = size_components(arch, design_power);

  const double empty = *spec.empty_weight_fraction * mtow;
  out.airframe_mass = spec.empty_weight_basis == EmptyWeightBasis::airframe_plus_propulsion
                          ? empty - out.propulsion_total()
                          : empty;
  if (out.airframe_mass < 0.0) {
    throw SizingError("infeasible decomposition: propulsion masses (" + format_kg(out.propulsion_total()) +
                          ") exceed the empty-weight allowance (" + format_kg(empty) + ")",
                      SizingFailure::infeasible_decomposition);
  }
  return out;
}

EnergyMasses energy_source_sizing(const std::map<std::string, double>& energy_per_source,
                                  const std::map<std::string, double>& fuel_per_source,
                                  const std::map<std::string, double>& peak_power,
                                  const std::vector<EnergySourceSpec>& sources) {
  auto lookup = [](const std::map<std::string, double>& m, const std::string& id) {
    auto it = m.find(id);
    return it == m.end() ? 0.0 : it->second;
  };
  EnergyMasses out;
  for (const auto& s : sources) {
    if (is_consumable(s.kind)) {
      out.fuel[s.id] = lookup(fuel_per_source, s.id);
      continue;
    }
    double mass = lookup(energy_per_source, s.id) / (s.specific_energy * s.usable_depth_of_discharge.value_or(1.0));
    if (s.max_specific_power) mass = std::max(mass, lookup(peak_power, s.id) / *s.max_specific_power);
    out.battery[s.id] = mass;
  }
  return out;
}

MissionAircraft mission_aircraft(const AircraftSpec& spec, double mtow) {
  if (!spec.aspect_ratio || !spec.oswald_efficiency || !spec.cd0) {
    throw ValidationError("flying the mission needs aspect_ratio, oswald_efficiency and cd0");
  }
  MissionAircraft a;
  const double weight = mtow * kStandardGravity;
  a.takeoff_mass = mtow;
  a.aero.wing_area = weight / spec.wing_loading;
  a.aero.cd0 = *spec.cd0;
  a.aero.k = spec.induced_drag_factor();
  a.aero.max_lift_coefficient = spec.max_lift_coefficient;
  if (spec.power_to_weight) a.installed_power = *spec.power_to_weight * weight;
  if (spec.thrust_to_weight) a.installed_thrust = *spec.thrust_to_weight * weight;
  a.sources = spec.energy_sources;
  return a;
}

double SizedAircraft::fuel_total() const { return sum_values(fuel_mass); }
double SizedAircraft::battery_total() const { return sum_values(battery_mass); }
double SizedAircraft::propulsion_total() const { return sum_values(propulsion_masses); }

double SizedAircraft::closure_error() const {
  const double sum = payload_and_crew + airframe_mass + propulsion_total() + fuel_total() + battery_total();
  return std::abs(sum - mtow) / mtow;
}

AircraftSpec SizedAircraft::loaded_spec() const {
  AircraftSpec out = spec;
  LoadedWeights w;
  w.mtow = mtow;
  w.fuel = fuel_mass;
  w.battery = battery_mass;
  w.airframe = airframe_mass;
  w.propulsion = propulsion_masses;
  w.wing_area = wing_area;
  for (std::size_t s : arch.sinks()) w.propulsors.push_back(arch.component(s).id);
  out.weights = std::move(w);
  return out;
}

std::optional<double> stall_speed(const AircraftSpec& spec) {
  if (!spec.max_lift_coefficient) return std::nullopt;
  return std::sqrt(2.0 * spec.wing_loading / (isa::kSeaLevelDensity * *spec.max_lift_coefficient));
}

namespace {

// Fills missing gas-turbine specific powers from the engine table, rated at
// an equal share of the installed power at the first iterate.
PropArchitecture fill_turbines(const PropArchitecture& arch, const AircraftSpec& spec, double mtow0,
                               const HistoricalDatabase* db, std::vector<FillEntry>& report) {
  std::vector<std::size_t> turbines;
  bool any_missing = false;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    if (arch.component(i).kind != ComponentKind::gas_turbine) continue;
    turbines.push_back(i);
    any_missing = any_missing || !arch.component(i).specific_power;
  }
  if (!any_missing) return arch;
  if (!spec.power_to_weight) {
    throw RegressionError("no regression available for gas_turbine specific_power on a thrust-rated design");
  }
  if (!db) throw RegressionError("no database available to regress gas_turbine specific_power");
  const double rated = *spec.power_to_weight * mtow0 * kStandardGravity / static_cast<double>(turbines.size());
  FillEntry entry = regress_turbine_specific_power(*db, rated);
  PropArchitecture out = arch;
  for (std::size_t i : turbines) {
    const Component& c = arch.component(i);
    if (c.specific_power) continue;
    out = out.with_specific_power(c.id, entry.value);
    FillEntry e = entry;
    e.field = "specific_power." + c.id;
    report.push_back(std::move(e));
  }
  return out;
}

}  // namespace

SizedAircraft size_aircraft(const AircraftSpec& input, const MissionProfile& profile, const PropArchitecture& input_arch,
                            const HistoricalDatabase* db, const SizingOptions& options) {
  options.validate();
  validate_spec(input);
  if (auto violations = validate_mission(profile); !violations.empty()) {
    throw ValidationError("mission segment " + std::to_string(violations.front().segment_index) + ": " +
                          violations.front().message);
  }
  check_sources_declared(input_arch, input);
  check_operations_exist(profile, input_arch);

  SizedAircraft sized;
  if (input.missing_fields().empty()) {
    sized.spec = input;
  } else {
    if (!db) throw RegressionError("no database available to fill " + input.missing_fields().front());
    FillResult filled = fill_unknowns(input, *db);
    sized.spec = std::move(filled.spec);
    sized.regressed = std::move(filled.report);
  }
  const AircraftSpec& spec = sized.spec;
  sized.spec.weights.reset();
  sized.payload_and_crew = spec.payload_mass + spec.crew_mass;

  const double fe = *spec.empty_weight_fraction;
  sized.initial_guess =
      options.initial_mtow_guess.value_or(sized.payload_and_crew / std::max(0.1, 1.0 - fe - 0.25));
  sized.arch = fill_turbines(input_arch, spec, sized.initial_guess, db, sized.regressed);
  const PropArchitecture& arch = sized.arch;

  const Segment* takeoff = takeoff_segment(profile);
  const std::string takeoff_op = takeoff ? takeoff->operation_id : profile.segments.front().operation_id;
  std::optional<double> takeoff_speed;
  if (takeoff) takeoff_speed = true_airspeed(takeoff->speed, atmosphere(takeoff->start_altitude));

  if (auto vs = stall_speed(spec)) {
    const Segment& first = profile.segments.front();
    const double v1 = true_airspeed(first.speed, atmosphere(first.start_altitude));
    if (*vs > 1.1 * v1) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "stall speed %.1f m/s from the wing loading is above 1.1x the first segment speed %.1f m/s", *vs,
                    v1);
      sized.warnings.emplace_back(buf);
    }
  }

  double mtow = sized.initial_guess;
  for (int it = 1; it <= options.max_iterations; ++it) {
    MissionAircraft aircraft = mission_aircraft(spec, mtow);
    MissionResult flown;
    try {
      flown = fly_mission(aircraft, profile, arch, options.mission);
    } catch (const MissionError& e) {
      throw MissionError("iteration " + std::to_string(it) + ": " + e.what(), e.segment_index());
    }
    WeightBuildup build;
    try {
      build = weight_buildup(mtow, spec, arch, flown.peak_power, takeoff_op, takeoff_speed);
    } catch (const SizingError& e) {
      throw SizingError("iteration " + std::to_string(it) + ": " + e.what(), e.failure(), sized.iteration_log);
    }
    EnergyMasses energy =
        energy_source_sizing(flown.energy_per_source, flown.fuel_per_source, flown.peak_power, spec.energy_sources);

    const double computed =
        sized.payload_and_crew + build.airframe_mass + build.propulsion_total() + energy.total();
    const double residual = std::abs(computed - mtow) / mtow;
    sized.iteration_log.push_back({it, mtow, computed, residual});

    if (!std::isfinite(computed) || !std::isfinite(residual)) {
      throw SizingError("diverged: non-finite mass at iteration " + std::to_string(it), SizingFailure::divergence,
                        sized.iteration_log);
    }
    if (residual < options.tolerance) {
      sized.mtow = mtow;
      sized.airframe_mass = build.airframe_mass;
      sized.propulsion_masses = std::move(build.propulsion_masses);
      sized.fuel_mass = std::move(energy.fuel);
      sized.battery_mass = std::move(energy.battery);
      sized.wing_area = build.wing_area;
      sized.installed_thrust = build.installed_thrust;
      sized.installed_power = build.installed_power;
      sized.mission = std::move(flown);
      const double flown_range = sized.mission.design_distance;
      if (std::abs(flown_range - spec.design_range) > 0.05 * spec.design_range) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "design mission covers %.1f km but design_range is %.1f km",
                      flown_range / 1e3, spec.design_range / 1e3);
        sized.warnings.emplace_back(buf);
      }
      return sized;
    }

    const double next = options.relaxation * computed + (1.0 - options.relaxation) * mtow;
    if (!std::isfinite(next) || next <= 0.0 || next > 10.0 * sized.initial_guess) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "diverged at iteration %d: next MTOW %.6g kg (initial guess %.6g kg)", it, next,
                    sized.initial_guess);
      throw SizingError(buf, SizingFailure::divergence, sized.iteration_log);
    }
    mtow = next;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "did not converge in %d iterations (last residual %.3g, tolerance %.3g)",
                options.max_iterations, sized.iteration_log.back().residual, options.tolerance);
  throw SizingError(buf, SizingFailure::non_convergence, sized.iteration_log);
}

}  // namespace fastsize
