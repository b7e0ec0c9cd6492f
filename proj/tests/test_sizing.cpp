#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fastsize/sizing.hpp"
#include "support.hpp"

using namespace fastsize;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

Segment takeoff_segment(double seconds) {
  Segment s;
  s.kind = SegmentKind::takeoff;
  s.speed = {SpeedSchedule::constant_tas, 50.0};
  s.terminator = Terminator::duration;
  s.duration = seconds;
  s.operation_id = "all";
  return s;
}

Segment zero_cruise() {
  Segment s;
  s.kind = SegmentKind::cruise;
  s.speed = {SpeedSchedule::constant_tas, 100.0};
  s.terminator = Terminator::distance;
  s.distance = 0.0;
  s.operation_id = "all";
  return s;
}

// fuel -> turbine -> propeller, every segment on operation "all".
PropArchitecture turbine_chain(double turbine_eff) {
  PropArchitecture a = build_architecture("chain",
                                          {{"fuel", ComponentKind::jet_fuel, 1.0, {}},
                                           {"turbine", ComponentKind::gas_turbine, turbine_eff, 5000.0},
                                           {"prop", ComponentKind::propeller, 0.8, 10000.0}},
                                          {{"fuel", "turbine"}, {"turbine", "prop"}});
  return a.with_operation("all", make_operation(a, {}, "all"));
}

AircraftSpec base_spec() {
  AircraftSpec s;
  s.name = "closed form";
  s.payload_mass = 10000.0;
  s.design_range = 1.0;
  s.power_to_weight = 10.0;
  s.wing_loading = 5000.0;
  s.aspect_ratio = 10.0;
  s.oswald_efficiency = 0.8;
  s.cd0 = 0.02;
  s.max_lift_coefficient = 3.0;
  s.empty_weight_fraction = 0.5;
  s.architecture_id = "chain";
  return s;
}

// A takeoff-only mission at rated power whose fuel is exactly f_f * mtow:
// fuel = P/W * mtow * g * t / (eta_turbine * e), so e = P/W g t / (eta f_f).
struct ClosedForm {
  AircraftSpec spec;
  MissionProfile profile;
  PropArchitecture arch;
};

ClosedForm closed_form(double fuel_fraction) {
  constexpr double eta = 0.5, seconds = 60.0;
  ClosedForm c{base_spec(), {}, turbine_chain(eta)};
  const double e = *c.spec.power_to_weight * kStandardGravity * seconds / (eta * fuel_fraction);
  c.spec.energy_sources = {{"fuel", SourceKind::jet_fuel, e, {}, {}}};
  c.profile.name = "takeoff only";
  c.profile.segments = {takeoff_segment(seconds), zero_cruise()};
  return c;
}

double sum_masses(const SizedAircraft& s) {
  return s.payload_and_crew + s.airframe_mass + s.propulsion_total() + s.fuel_total() + s.battery_total();
}

}  // namespace

TEST_CASE("weight build-up arithmetic") {
  AircraftSpec s = base_spec();
  s.power_to_weight.reset();
  s.thrust_to_weight = 0.3;
  PropArchitecture a = turbine_chain(0.3);
  WeightBuildup w = weight_buildup(50000.0, s, a, {});
  CHECK(w.wing_area == doctest::Approx(50000.0 * kStandardGravity / 5000.0).epsilon(1e-14));
  CHECK(std::abs(w.wing_area - 98.07) < 0.005);
  REQUIRE(w.installed_thrust.has_value());
  CHECK(*w.installed_thrust == doctest::Approx(0.3 * 50000.0 * kStandardGravity).epsilon(1e-14));
  CHECK(std::abs(*w.installed_thrust - 147100.0) < 1.0);
  CHECK_FALSE(w.installed_power.has_value());
}

TEST_CASE("zero peaks and zero rating give zero propulsion mass") {
  AircraftSpec s = base_spec();
  s.power_to_weight = 0.0;
  PropArchitecture a = turbine_chain(0.3);
  WeightBuildup w = weight_buildup(20000.0, s, a, {{"turbine", 0.0}, {"prop", 0.0}}, "all");
  for (const auto& [id, kg] : w.propulsion_masses) CHECK(kg == 0.0);
  CHECK(w.propulsion_total() == 0.0);
  CHECK(w.airframe_mass == doctest::Approx(0.5 * 20000.0).epsilon(1e-15));
}

TEST_CASE("takeoff rating sizes the propulsion") {
  AircraftSpec s = base_spec();
  PropArchitecture a = turbine_chain(0.3);
  WeightBuildup w = weight_buildup(20000.0, s, a, {}, "all");
  const double rated = 10.0 * 20000.0 * kStandardGravity;
  // Shaft power into the propeller; the propeller is rated on its output.
  CHECK(w.propulsion_masses.at("turbine") == doctest::Approx(rated / 5000.0).epsilon(1e-12));
  CHECK(w.propulsion_masses.at("prop") == doctest::Approx(0.8 * rated / 10000.0).epsilon(1e-12));
  CHECK(w.airframe_mass == doctest::Approx(0.5 * 20000.0 - w.propulsion_total()).epsilon(1e-12));

  // A mission peak above the rating wins.
  WeightBuildup peak = weight_buildup(20000.0, s, a, {{"turbine", 3.0 * rated}}, "all");
  CHECK(peak.propulsion_masses.at("turbine") == doctest::Approx(3.0 * rated / 5000.0).epsilon(1e-12));
}

TEST_CASE("heavy propulsion makes the decomposition infeasible") {
  AircraftSpec s = base_spec();
  s.empty_weight_fraction = 0.05;
  s.power_to_weight = 200.0;
  try {
    weight_buildup(20000.0, s, turbine_chain(0.3), {}, "all");
    FAIL("expected an infeasible decomposition");
  } catch (const SizingError& e) {
    CHECK(e.failure() == SizingFailure::infeasible_decomposition);
  }
  s.empty_weight_basis = EmptyWeightBasis::airframe_only;
  WeightBuildup w = weight_buildup(20000.0, s, turbine_chain(0.3), {}, "all");
  CHECK(w.airframe_mass == doctest::Approx(0.05 * 20000.0).epsilon(1e-15));
}

TEST_CASE("energy source sizing examples") {
  std::vector<EnergySourceSpec> sources{{"pack", SourceKind::battery, 9.0e5, 0.8, 1000.0},
                                        {"fuel", SourceKind::jet_fuel, 43e6, {}, {}}};
  EnergyMasses m = energy_source_sizing({{"pack", 7.2e9}, {"fuel", 4.3e9}}, {{"fuel", 100.0}}, {{"pack", 0.0}}, sources);
  CHECK(m.battery.at("pack") == doctest::Approx(10000.0).epsilon(1e-14));
  CHECK(m.fuel.at("fuel") == 100.0);

  EnergyMasses zero = energy_source_sizing({{"pack", 0.0}}, {}, {{"pack", 0.0}}, sources);
  CHECK(zero.battery.at("pack") == 0.0);

  EnergyMasses power_bound = energy_source_sizing({{"pack", 1.0e6}}, {}, {{"pack", 5.0e6}}, sources);
  CHECK(power_bound.battery.at("pack") == doctest::Approx(5000.0).epsilon(1e-14));
}

TEST_CASE("closed-form fixed point") {
  ClosedForm c = closed_form(0.3);
  SizingOptions o;
  SizedAircraft s = size_aircraft(c.spec, c.profile, c.arch, nullptr, o);
  CHECK(testing::rel_diff(s.mtow, 10000.0 / (1.0 - 0.5 - 0.3)) < 1e-5);
  CHECK(testing::rel_diff(s.fuel_total(), 0.3 * s.mtow) < 1e-9);

  o.tolerance = 1e-12;
  o.max_iterations = 400;
  SizedAircraft tight = size_aircraft(c.spec, c.profile, c.arch, nullptr, o);
  CHECK(testing::rel_diff(tight.mtow, 50000.0) < 1e-10);
}

TEST_CASE("sizing state invariants at convergence") {
  ClosedForm c = closed_form(0.3);
  SizedAircraft s = size_aircraft(c.spec, c.profile, c.arch, nullptr);
  CHECK(testing::rel_diff(sum_masses(s), s.mtow) <= 1e-6);
  CHECK(s.closure_error() == doctest::Approx(testing::rel_diff(sum_masses(s), s.mtow)).epsilon(1e-6));
  CHECK(s.wing_area == doctest::Approx(s.mtow * kStandardGravity / s.spec.wing_loading).epsilon(1e-14));
  CHECK(s.airframe_mass >= 0.0);
  CHECK(s.initial_guess == doctest::Approx(10000.0 / 0.25).epsilon(1e-14));
  REQUIRE_FALSE(s.iteration_log.empty());
  CHECK(s.iteration_log.back().residual < 1e-6);
  for (std::size_t i = 0; i < s.iteration_log.size(); ++i) {
    CHECK(s.iteration_log[i].iteration == static_cast<int>(i + 1));
    CHECK(std::isfinite(s.iteration_log[i].residual));
  }
  CHECK(s.mtow == s.iteration_log.back().mtow);
}

TEST_CASE("near-zero energy battery mission") {
  testing::Case c = testing::load_case("battery_electric");
  Segment hold;
  hold.kind = SegmentKind::loiter;
  hold.speed = {SpeedSchedule::constant_tas, 60.0};
  hold.terminator = Terminator::duration;
  hold.duration = 1.0;
  hold.operation_id = "all";
  MissionProfile p{"one second", {hold, zero_cruise()}, {}};
  const double fe = *c.spec.empty_weight_fraction;
  const EnergySourceSpec& pack = *c.spec.find_source("battery");

  SizedAircraft s = size_aircraft(c.spec, p, c.arch, nullptr);
  // The energy-limited battery mass is negligible; what remains is the
  // power floor, peak draw over max specific power.
  const double energy_mass =
      s.mission.energy_per_source.at("battery") / (pack.specific_energy * *pack.usable_depth_of_discharge);
  CHECK(energy_mass < 1e-3 * s.mtow);
  CHECK(s.battery_total() ==
        doctest::Approx(s.mission.peak_power.at("battery") / *pack.max_specific_power).epsilon(1e-12));

  // The map is mtow -> pc + (f_e + b) mtow with b the battery share, so from
  // the default seed the error contracts by about f_e + b per pass.
  const double rate = fe + 2.0 * s.battery_total() / s.mtow;
  const double seed_error = testing::rel_diff(s.initial_guess, s.mtow);
  const int bound = static_cast<int>(std::ceil(std::log(1e-6 / seed_error) / std::log(rate))) + 2;
  CHECK(static_cast<int>(s.iteration_log.size()) <= bound);

  // Seeded at its fixed point it is a near-identity map.
  SizingOptions o;
  o.initial_mtow_guess = s.mtow;
  SizedAircraft seeded = size_aircraft(c.spec, p, c.arch, nullptr, o);
  CHECK(seeded.iteration_log.size() <= 5);
  CHECK(testing::rel_diff(seeded.mtow, s.mtow) < 1e-5);
}

TEST_CASE("bundled conventional twin converges quickly") {
  testing::Case c = testing::load_case("conventional_twin");
  SizedAircraft s = size_aircraft(c.spec, c.profile, c.arch, &testing::bundled_database());
  CHECK(s.iteration_log.size() < 50);
  CHECK(s.closure_error() <= 1e-6);
  REQUIRE(s.regressed.size() >= 1);
  CHECK(s.spec.empty_weight_fraction.has_value());
  CHECK(s.arch.component(s.arch.require_index("turbine_left")).specific_power.has_value());
}

TEST_CASE("the conventional twin needs the database") {
  testing::Case c = testing::load_case("conventional_twin");
  CHECK_THROWS_AS(size_aircraft(c.spec, c.profile, c.arch, nullptr), Error);
}

TEST_CASE("bundled cases close their mass balance") {
  for (const auto& name : testing::bundled_cases()) {
    CAPTURE(name);
    testing::Case c = testing::load_case(name);
    SizedAircraft s = size_aircraft(c.spec, c.profile, c.arch, &testing::bundled_database());
    CHECK(testing::rel_diff(sum_masses(s), s.mtow) <= 1e-6);
    CHECK(s.iteration_log.back().residual < 1e-6);
    for (const auto& r : s.iteration_log) CHECK(std::isfinite(r.residual));
    CHECK(s.airframe_mass >= 0.0);
    for (const auto& [id, kg] : s.propulsion_masses) CHECK(kg >= 0.0);
    for (const auto& [id, kg] : s.fuel_mass) CHECK(kg >= 0.0);
    for (const auto& [id, kg] : s.battery_mass) CHECK(kg >= 0.0);
  }
}

TEST_CASE("sizing is deterministic") {
  testing::Case c = testing::load_case("freighter_figure1");
  SizedAircraft a = size_aircraft(c.spec, c.profile, c.arch, nullptr);
  SizedAircraft b = size_aircraft(c.spec, c.profile, c.arch, nullptr);
  CHECK(same_bits(a.mtow, b.mtow));
  REQUIRE(a.iteration_log.size() == b.iteration_log.size());
  for (std::size_t i = 0; i < a.iteration_log.size(); ++i) {
    CHECK(same_bits(a.iteration_log[i].computed, b.iteration_log[i].computed));
  }
  REQUIRE(a.mission.history.samples.size() == b.mission.history.samples.size());
  for (std::size_t i = 0; i < a.mission.history.samples.size(); ++i) {
    CHECK(same_bits(a.mission.history.samples[i].mass, b.mission.history.samples[i].mass));
  }
  CHECK(a.fuel_mass == b.fuel_mass);
  CHECK(a.battery_mass == b.battery_mass);
  CHECK(a.propulsion_masses == b.propulsion_masses);
}

TEST_CASE("relaxation does not move the fixed point") {
  for (const auto& name : testing::bundled_cases()) {
    CAPTURE(name);
    testing::Case c = testing::load_case(name);
    SizingOptions full, half;
    half.relaxation = 0.5;
    half.max_iterations = 400;
    SizedAircraft a = size_aircraft(c.spec, c.profile, c.arch, &testing::bundled_database(), full);
    SizedAircraft b = size_aircraft(c.spec, c.profile, c.arch, &testing::bundled_database(), half);
    CHECK(testing::rel_diff(a.mtow, b.mtow) <= 10.0 * full.tolerance);
  }
}

TEST_CASE("more cruise battery never lightens the hybrid") {
  testing::Case c = testing::load_case("parallel_hybrid");
  double previous = 0.0;
  for (const char* op : {"cruise_00", "cruise_10", "cruise_20", "cruise_30"}) {
    CAPTURE(op);
    MissionProfile p = c.profile;
    for (auto& s : p.segments) {
      if (s.kind == SegmentKind::cruise) s.operation_id = op;
    }
    SizedAircraft s = size_aircraft(c.spec, p, c.arch, nullptr);
    CHECK(s.mtow >= previous);
    previous = s.mtow;
  }
}

TEST_CASE("iteration limit raises non-convergence with the log") {
  ClosedForm c = closed_form(0.3);
  SizingOptions o;
  o.tolerance = 1e-12;
  o.max_iterations = 2;
  try {
    size_aircraft(c.spec, c.profile, c.arch, nullptr, o);
    FAIL("expected non-convergence");
  } catch (const SizingError& e) {
    CHECK(e.failure() == SizingFailure::non_convergence);
    CHECK(e.log().size() == 2);
  }
}

TEST_CASE("runaway weight is reported as divergence") {
  // f_e + f_f > 1 has no positive fixed point.
  ClosedForm c = closed_form(0.6);
  try {
    size_aircraft(c.spec, c.profile, c.arch, nullptr);
    FAIL("expected divergence");
  } catch (const SizingError& e) {
    CHECK(e.failure() == SizingFailure::divergence);
    REQUIRE_FALSE(e.log().empty());
    CHECK(e.log().back().computed > 10.0 * e.log().front().mtow);
  }
}

TEST_CASE("mission failures carry the iteration number") {
  ClosedForm c = closed_form(0.3);
  c.spec.max_lift_coefficient = 1.2;
  Segment slow = zero_cruise();
  slow.distance = 1000.0;
  slow.speed.value = 30.0;  // far below stall at 5000 N/m2
  c.profile.segments.back() = slow;
  try {
    size_aircraft(c.spec, c.profile, c.arch, nullptr);
    FAIL("expected a mission error");
  } catch (const MissionError& e) {
    CHECK(std::string(e.what()).find("iteration 1") != std::string::npos);
    CHECK(e.segment_index() == 1);
  }
}

TEST_CASE("stall and range warnings") {
  ClosedForm c = closed_form(0.3);
  c.spec.max_lift_coefficient = 1.6;
  SizedAircraft s = size_aircraft(c.spec, c.profile, c.arch, nullptr);
  // Stall speed sqrt(2 W/S / (rho0 CLmax)) = 60.4 m/s against a 50 m/s takeoff.
  REQUIRE(stall_speed(c.spec).has_value());
  CHECK(*stall_speed(c.spec) == doctest::Approx(std::sqrt(2.0 * 5000.0 / (isa::kSeaLevelDensity * 1.6))));
  bool stall = false, range = false;
  for (const auto& w : s.warnings) {
    stall = stall || w.find("stall") != std::string::npos;
    range = range || w.find("range") != std::string::npos;
  }
  CHECK(stall);
  CHECK(range);
}

TEST_CASE("options are validated") {
  ClosedForm c = closed_form(0.3);
  SizingOptions o;
  o.relaxation = 0.0;
  CHECK_THROWS_AS(size_aircraft(c.spec, c.profile, c.arch, nullptr, o), ValidationError);
  o.relaxation = 1.5;
  CHECK_THROWS_AS(size_aircraft(c.spec, c.profile, c.arch, nullptr, o), ValidationError);
  o = {};
  o.tolerance = 0.0;
  CHECK_THROWS_AS(size_aircraft(c.spec, c.profile, c.arch, nullptr, o), ValidationError);
}

TEST_CASE("the loaded spec re-flies to the same fuel") {
  testing::Case c = testing::load_case("conventional_twin");
  SizedAircraft s = size_aircraft(c.spec, c.profile, c.arch, &testing::bundled_database());
  AircraftSpec loaded = parse_spec(serialize_spec(s.loaded_spec()));
  REQUIRE(loaded.weights.has_value());
  MissionAircraft ac = mission_aircraft(loaded, loaded.weights->mtow);
  ac.fuel_loaded = loaded.weights->fuel;
  MissionResult r = fly_mission(ac, c.profile, s.arch);
  CHECK(testing::rel_diff(r.fuel_per_source.at("fuel"), s.fuel_mass.at("fuel")) <= 1e-9);
}
