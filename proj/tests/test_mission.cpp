#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "fastsize/atmosphere.hpp"
#include "fastsize/mission.hpp"
#include "fastsize/plot.hpp"
#include "fastsize/sizing.hpp"
#include "support.hpp"

using namespace fastsize;

namespace {

// src -> conv -> prop with one operation "all".
PropArchitecture chain(ComponentKind source, double conv_eff, double prop_eff) {
  const ComponentKind conv = source == ComponentKind::battery ? ComponentKind::electric_motor
                                                              : ComponentKind::gas_turbine;
  PropArchitecture a = build_architecture(
      "chain", {{"src", source, 1.0, {}}, {"conv", conv, conv_eff, 5000.0}, {"prop", ComponentKind::propeller, prop_eff, {}}},
      {{"src", "conv"}, {"conv", "prop"}});
  return a.with_operation("all", make_operation(a, {}, "all"));
}

EnergySourceSpec fuel_source(const std::string& id = "src") { return {id, SourceKind::jet_fuel, 43e6, {}, {}}; }

EnergySourceSpec battery_source(const std::string& id = "src") {
  return {id, SourceKind::battery, 9e5, 0.8, 5000.0};
}

Segment level(SegmentKind kind, double altitude, double tas, double amount) {
  Segment s;
  s.kind = kind;
  s.start_altitude = s.end_altitude = altitude;
  s.speed = {SpeedSchedule::constant_tas, tas};
  s.operation_id = "all";
  if (kind == SegmentKind::cruise) {
    s.terminator = Terminator::distance;
    s.distance = amount;
  } else {
    s.terminator = Terminator::duration;
    s.duration = amount;
  }
  return s;
}

// Aircraft whose drag ignores mass (k = 0), tuned so the sink output demand
// at sea level and `tas` equals `power`.
MissionAircraft constant_power_aircraft(double power, double tas, double mass, EnergySourceSpec source) {
  MissionAircraft a;
  a.takeoff_mass = mass;
  a.aero.wing_area = 50.0;
  const double q = 0.5 * atmosphere(0.0).density * tas * tas;
  a.aero.cd0 = power / tas / (q * a.aero.wing_area);
  a.aero.k = 0.0;
  a.installed_power = 1e9;
  a.sources = {source};
  return a;
}

double burned_mass(const MissionResult& r) {
  double total = 0.0;
  for (const auto& [id, kg] : r.fuel_per_source) total += kg;
  return total;
}

}  // namespace

TEST_CASE("standard atmosphere reference values") {
  CHECK(std::abs(atmosphere(0.0).density - 1.2250) <= 1e-4);
  CHECK(std::abs(atmosphere(11000.0).temperature - 216.65) <= 0.01);
  CHECK(std::abs(atmosphere(0.0).speed_of_sound - 340.294) <= 1e-3);

  // Barometric formula evaluated independently.
  const double g0 = 9.80665, r = 287.05287, lapse = 0.0065, t0 = 288.15, p0 = 101325.0;
  const double p5 = p0 * std::pow(1.0 - lapse * 5000.0 / t0, g0 / (r * lapse));
  CHECK(testing::rel_diff(atmosphere(5000.0).pressure, p5) < 1e-12);
  CHECK(testing::rel_diff(atmosphere(5000.0).pressure, 54019.0) < 0.005);
  const double p11 = p0 * std::pow(216.65 / t0, g0 / (r * lapse));
  const double p15 = p11 * std::exp(-g0 * 4000.0 / (r * 216.65));
  CHECK(testing::rel_diff(atmosphere(15000.0).pressure, p15) < 1e-12);
  CHECK(std::abs(atmosphere(15000.0).temperature - 216.65) < 1e-9);
}

TEST_CASE("density decreases with altitude") {
  double prev = atmosphere(0.0).density;
  for (double h = 250.0; h <= 20000.0; h += 250.0) {
    const double rho = atmosphere(h).density;
    CHECK(rho < prev);
    prev = rho;
  }
}

TEST_CASE("atmosphere rejects altitudes outside the model") {
  CHECK_THROWS_AS(atmosphere(-1.0), MissionError);
  CHECK_THROWS_AS(atmosphere(20001.0), MissionError);
  CHECK_NOTHROW(atmosphere(20000.0));
}

TEST_CASE("speed schedules resolve to true airspeed") {
  const AtmosphereState air = atmosphere(6000.0);
  CHECK(true_airspeed({SpeedSchedule::constant_tas, 150.0}, air) == 150.0);
  CHECK(testing::rel_diff(true_airspeed({SpeedSchedule::constant_eas, 100.0}, air),
                          100.0 * std::sqrt(isa::kSeaLevelDensity / air.density)) < 1e-14);
  CHECK(testing::rel_diff(true_airspeed({SpeedSchedule::constant_mach, 0.5}, air), 0.5 * air.speed_of_sound) < 1e-14);
}

TEST_CASE("steady level point-mass demand") {
  FlightState s;
  s.mass = 50000.0;
  s.true_airspeed = 100.0;
  const AtmosphereState air = atmosphere(0.0);
  AeroParameters aero{100.0, 0.02, 0.05, {}};
  // The quoted reference figures use g = 9.81.
  PointMassDemand d = point_mass_demand(s, air, {}, aero, 9.81);
  const double q = 0.5 * air.density * 100.0 * 100.0;
  CHECK(std::abs(q - 6125.0) < 0.01);
  CHECK(std::abs(d.lift_coefficient - 0.8008) < 1e-4);
  CHECK(std::abs((0.02 + 0.05 * d.lift_coefficient * d.lift_coefficient) - 0.05206) < 1e-5);
  CHECK(testing::rel_diff(d.drag, 31887.0) < 5e-4);
  CHECK(d.thrust_required == d.drag);
  CHECK(testing::rel_diff(d.sink_power_demand, 3.189e6) < 5e-4);
  CHECK(d.sink_power_demand == d.thrust_required * 100.0);
  CHECK_FALSE(d.idle_clamped);

  // Hand polar evaluation at standard gravity.
  PointMassDemand g = point_mass_demand(s, air, {}, aero);
  const double cl = 50000.0 * kStandardGravity / (q * 100.0);
  CHECK(testing::rel_diff(g.lift_coefficient, cl) < 1e-14);
  CHECK(testing::rel_diff(g.drag, q * 100.0 * (0.02 + 0.05 * cl * cl)) < 1e-14);
}

TEST_CASE("flight path angle adds the weight component") {
  FlightState s;
  s.mass = 50000.0;
  s.true_airspeed = 100.0;
  const AtmosphereState air = atmosphere(0.0);
  AeroParameters aero{100.0, 0.02, 0.05, {}};
  Kinematics climb{0.05, 0.0};
  PointMassDemand d = point_mass_demand(s, air, climb, aero, 9.81);
  const double weight_term = 50000.0 * 9.81 * std::sin(0.05);
  CHECK(testing::rel_diff(d.thrust_required - d.drag, weight_term) < 1e-9);
  CHECK(testing::rel_diff(weight_term, 24512.0) < 1e-3);

  Kinematics accel{0.0, 0.2};
  PointMassDemand a = point_mass_demand(s, air, accel, aero);
  CHECK(testing::rel_diff(a.thrust_required - a.drag, 50000.0 * 0.2) < 1e-9);
}

TEST_CASE("stall and idle clamp") {
  FlightState s;
  s.mass = 50000.0;
  s.true_airspeed = 60.0;
  AeroParameters aero{100.0, 0.02, 0.05, 1.5};
  CHECK_THROWS_WITH_AS(point_mass_demand(s, atmosphere(0.0), {}, aero), doctest::Contains("stall"), MissionError);

  s.true_airspeed = 100.0;
  PointMassDemand d = point_mass_demand(s, atmosphere(0.0), {-0.2, 0.0}, aero);
  CHECK(d.idle_clamped);
  CHECK(d.thrust_required == 0.0);
  CHECK(d.sink_power_demand == 0.0);
}

TEST_CASE("cruise duration and distance are exact") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 0.3, 0.8);
  MissionAircraft ac = constant_power_aircraft(1e6, 100.0, 20000.0, fuel_source());
  MissionProfile p;
  p.segments = {level(SegmentKind::cruise, 0.0, 100.0, 100e3)};
  MissionResult r = fly_mission(ac, p, arch);
  CHECK(r.end.time == 1000.0);
  CHECK(r.end.distance == 100e3);
  CHECK(r.design_distance == 100e3);
}

TEST_CASE("battery cruise drains energy and keeps mass") {
  // Lossless chain so the source draw equals the 1 MW sink demand.
  PropArchitecture arch = chain(ComponentKind::battery, 1.0, 1.0);
  MissionAircraft ac = constant_power_aircraft(1e6, 100.0, 8000.0, battery_source());
  ac.battery_mass = std::map<std::string, double>{{"src", 3000.0}};
  MissionProfile p;
  p.segments = {level(SegmentKind::loiter, 0.0, 100.0, 600.0)};
  const std::size_t src = arch.require_index("src");
  FlightState start = initial_state(p, ac, arch);
  SegmentResult seg = fly_segment(start, p.segments[0], ac, arch);
  CHECK(testing::rel_diff(start.battery_energy_remaining[src] - seg.end.battery_energy_remaining[src], 6.0e8) < 1e-9);
  CHECK(testing::rel_diff(seg.end.energy_drawn[src], 6.0e8) < 1e-9);
  CHECK(seg.end.mass == 8000.0);
  for (const auto& s : seg.slice.samples) CHECK(s.mass == 8000.0);
}

TEST_CASE("fuel cruise burns P t / e") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 1.0, 1.0);
  MissionAircraft ac = constant_power_aircraft(2e6, 100.0, 8000.0, fuel_source());
  MissionProfile p;
  p.segments = {level(SegmentKind::loiter, 0.0, 100.0, 100.0)};
  SegmentResult seg = fly_segment(initial_state(p, ac, arch), p.segments[0], ac, arch);
  const double dm = 8000.0 - seg.end.mass;
  CHECK(testing::rel_diff(dm, 2e6 * 100.0 / 43e6) < 1e-9);
  CHECK(std::abs(dm - 4.651) < 5e-4);
}

TEST_CASE("a single-segment mission equals that segment") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 0.3, 0.8);
  MissionAircraft ac = mission_aircraft(testing::load_case("parallel_hybrid").spec, 6000.0);
  ac.sources = {fuel_source()};
  MissionProfile p;
  p.segments = {level(SegmentKind::cruise, 3000.0, 120.0, 200e3)};
  MissionResult whole = fly_mission(ac, p, arch);
  SegmentResult seg = fly_segment(initial_state(p, ac, arch), p.segments[0], ac, arch);
  const std::size_t src = arch.require_index("src");
  CHECK(whole.energy_per_source.at("src") == seg.end.energy_drawn[src]);
  CHECK(whole.end.mass == seg.end.mass);
  CHECK(whole.peak_power.at("conv") == seg.peak_power[arch.require_index("conv")]);
}

TEST_CASE("two half cruises equal one full cruise") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 0.3, 0.8);
  MissionAircraft ac = mission_aircraft(testing::load_case("parallel_hybrid").spec, 6000.0);
  ac.sources = {fuel_source()};
  MissionProfile one, two;
  one.segments = {level(SegmentKind::cruise, 3000.0, 100.0, 100e3)};
  two.segments = {level(SegmentKind::cruise, 3000.0, 100.0, 50e3), level(SegmentKind::cruise, 3000.0, 100.0, 50e3)};
  MissionResult a = fly_mission(ac, one, arch), b = fly_mission(ac, two, arch);
  CHECK(testing::rel_diff(a.end.mass, b.end.mass) < 1e-9);
  CHECK(testing::rel_diff(a.end.time, b.end.time) < 1e-9);
  CHECK(testing::rel_diff(a.end.distance, b.end.distance) < 1e-9);
  CHECK(testing::rel_diff(a.energy_per_source.at("src"), b.energy_per_source.at("src")) < 1e-9);
}

TEST_CASE("final partial step hits the terminator") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 0.3, 0.8);
  MissionAircraft ac = constant_power_aircraft(1e6, 100.0, 20000.0, fuel_source());
  MissionProfile p;
  p.segments = {level(SegmentKind::loiter, 0.0, 100.0, 47.0)};
  MissionResult r = fly_mission(ac, p, arch);
  CHECK(r.end.time == 47.0);
  // Steps at 0, 10, 20, 30, 40 plus the closing sample.
  CHECK(r.history.samples.size() == 6);
  const double draw = r.history.samples.front().power[arch.require_index("src")];
  CHECK(testing::rel_diff(r.energy_per_source.at("src"), draw * 47.0) < 1e-12);
}

TEST_CASE("bundled missions keep their bookkeeping") {
  for (const auto& name : testing::bundled_cases()) {
    CAPTURE(name);
    testing::Case c = testing::load_case(name);
    SizedAircraft sized = size_aircraft(c.spec, c.profile, c.arch, &testing::bundled_database());
    const MissionResult& r = sized.mission;
    CHECK(check_history(r.history).empty());

    // End mass equals takeoff mass minus every consumable burned.
    CHECK(testing::rel_diff(r.end.mass, sized.mtow - burned_mass(r)) <= 1e-12);

    const auto& samples = r.history.samples;
    REQUIRE(samples.size() > 2);
    for (std::size_t i = 1; i < samples.size(); ++i) {
      REQUIRE(samples[i].time > samples[i - 1].time);
      REQUIRE(samples[i].mass <= samples[i - 1].mass);
      for (std::size_t k = 0; k < samples[i].energy_drawn.size(); ++k) {
        REQUIRE(samples[i].energy_drawn[k] >= samples[i - 1].energy_drawn[k]);
      }
    }
    if (name == "battery_electric") {
      for (const auto& s : samples) REQUIRE(s.mass == sized.mtow);
    }
  }
}

TEST_CASE("halving the step barely changes the burn") {
  testing::Case c = testing::load_case("parallel_hybrid");
  SizedAircraft sized = size_aircraft(c.spec, c.profile, c.arch, nullptr);
  MissionAircraft ac = mission_aircraft(sized.spec, sized.mtow);
  MissionResult coarse = fly_mission(ac, c.profile, sized.arch, {10.0});
  MissionResult fine = fly_mission(ac, c.profile, sized.arch, {5.0});
  CHECK(testing::rel_diff(burned_mass(coarse), burned_mass(fine)) < 0.005);
  CHECK(testing::rel_diff(coarse.energy_per_source.at("battery"), fine.energy_per_source.at("battery")) < 0.005);
}

TEST_CASE("descent beyond the glide slope is idle clamped") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 0.3, 0.8);
  MissionAircraft ac = mission_aircraft(testing::load_case("parallel_hybrid").spec, 6000.0);
  ac.sources = {fuel_source()};
  Segment d;
  d.kind = SegmentKind::descent;
  d.start_altitude = 3000.0;
  d.end_altitude = 0.0;
  d.speed = {SpeedSchedule::constant_tas, 100.0};
  d.terminator = Terminator::altitude_reached;
  d.rate_of_climb = 15.0;
  d.operation_id = "all";
  FlightState start = initial_state(MissionProfile{"", {level(SegmentKind::cruise, 3000.0, 100.0, 1.0)}, {}}, ac, arch);
  SegmentResult r = fly_segment(start, d, ac, arch);
  CHECK(r.idle_clamp_events == static_cast<int>(r.slice.samples.size()));
  for (const auto& s : r.slice.samples) CHECK(s.thrust == 0.0);
  CHECK(r.end.energy_drawn[arch.require_index("src")] == 0.0);
  CHECK(r.end.time == 200.0);
}

TEST_CASE("fuel exhaustion is reported with its segment") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 0.3, 0.8);
  MissionAircraft ac = constant_power_aircraft(1e6, 100.0, 20000.0, fuel_source());
  ac.fuel_loaded = std::map<std::string, double>{{"src", 100.0}};
  MissionProfile p;
  p.segments = {level(SegmentKind::cruise, 0.0, 100.0, 10e3), level(SegmentKind::cruise, 0.0, 100.0, 500e3)};
  try {
    fly_mission(ac, p, arch);
    FAIL("expected fuel exhaustion");
  } catch (const MissionError& e) {
    CHECK(e.segment_index() == 1);
    CHECK(std::string(e.what()).find("fuel exhausted") != std::string::npos);
    CHECK(std::string(e.what()).find("segment 1") != std::string::npos);
  }
}

TEST_CASE("battery depletion names the source") {
  PropArchitecture a = build_architecture("b",
                                          {{"pack", ComponentKind::battery, 1.0, {}},
                                           {"motor", ComponentKind::electric_motor, 0.95, 5000.0},
                                           {"prop", ComponentKind::propeller, 0.85, {}}},
                                          {{"pack", "motor"}, {"motor", "prop"}});
  a = a.with_operation("all", make_operation(a, {}, "all"));
  MissionAircraft ac = constant_power_aircraft(5e5, 100.0, 5000.0, battery_source("pack"));
  ac.battery_mass = std::map<std::string, double>{{"pack", 200.0}};
  MissionProfile p;
  p.segments = {level(SegmentKind::cruise, 0.0, 100.0, 200e3)};
  CHECK_THROWS_WITH_AS(fly_mission(ac, p, a), doctest::Contains("pack"), MissionError);
  CHECK_THROWS_WITH_AS(fly_mission(ac, p, a), doctest::Contains("battery depleted"), MissionError);
}

TEST_CASE("history csv layout") {
  testing::Case c = testing::load_case("freighter_figure1");
  SizedAircraft sized = size_aircraft(c.spec, c.profile, c.arch, nullptr);
  std::string csv = history_csv(sized.mission.history);
  std::string header = csv.substr(0, csv.find('\n'));
  std::string expected = "time_s,distance_m,altitude_m,tas_ms,mass_kg,cl,drag_n,thrust_n,gamma_rad";
  for (const auto& comp : sized.arch.components()) expected += ",p_" + comp.id + "_w";
  for (const auto& comp : sized.arch.components()) {
    if (comp.role() == ComponentRole::source) expected += ",e_" + comp.id + "_j";
  }
  CHECK(header == expected);

  HistoryTable t = parse_history_csv(csv);
  CHECK(t.rows.size() == sized.mission.history.samples.size());
  // At most nine significant digits in every cell.
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::string mantissa = cell.substr(0, cell.find_first_of("eE"));
      int digits = 0;
      bool leading = true;
      for (char ch : mantissa) {
        if (ch < '0' || ch > '9') continue;
        if (leading && ch == '0') continue;
        leading = false;
        ++digits;
      }
      REQUIRE(digits <= 9);
    }
  }
}

TEST_CASE("unknown operation is a validation error") {
  PropArchitecture arch = chain(ComponentKind::jet_fuel, 0.3, 0.8);
  MissionProfile p;
  p.segments = {level(SegmentKind::cruise, 0.0, 100.0, 1e3)};
  p.segments[0].operation_id = "boost";
  CHECK_THROWS_WITH_AS(check_operations_exist(p, arch), doctest::Contains("boost"), ValidationError);
}
