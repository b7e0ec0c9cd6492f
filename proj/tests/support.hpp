#pragma once
// Shared fixtures for the test executables and the acceptance runner:
// bundled-case loading, scratch directories and the independent powertrain
// oracles used by the conservation properties.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fastsize/database.hpp"
#include "fastsize/model.hpp"
#include "fastsize/powertrain.hpp"
#include "fastsize/sizing.hpp"

namespace fastsize::testing {

inline const std::vector<std::string>& bundled_cases() {
  static const std::vector<std::string> names{"battery_electric", "conventional_twin", "freighter_figure1",
                                              "parallel_hybrid"};
  return names;
}

inline std::string case_path(const std::string& name, const std::string& file) {
  return std::string(FASTSIZE_CASES_DIR) + "/" + name + "/" + file;
}

struct Case {
  AircraftSpec spec;
  MissionProfile profile;
  PropArchitecture arch;
};

inline Case load_case(const std::string& name) {
  return {read_spec_file(case_path(name, "aircraft.toml")), read_mission_file(case_path(name, "mission.toml")),
          read_architecture_file(case_path(name, "architecture.toml"))};
}

inline const HistoricalDatabase& bundled_database() {
  static const HistoricalDatabase db = load_database(FASTSIZE_DATA_DIR);
  return db;
}

// A fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("fastsize_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// ---------------------------------------------------------------------------
// Random valid powertrains.

struct RandomInstance {
  PropArchitecture arch;
  OperationSplit op;
  std::vector<double> demands;  // indexed like the components
};

// Layered DAG: sources, one to three transmitter layers, sinks. Every
// non-source gets at least one feeder from an earlier layer and every
// non-sink at least one consumer in a later layer, so all invariants hold by
// construction. Splits are random (with occasional zero entries) and every
// component is active.
inline RandomInstance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> layers_d(1, 3), width_d(1, 3), sinks_d(1, 4);
  std::uniform_real_distribution<double> eff_d(0.3, 1.0), unit(0.0, 1.0);

  std::vector<std::vector<std::size_t>> layers;
  std::vector<Component> comps;
  auto add_layer = [&](int count, auto kind_for) {
    std::vector<std::size_t> layer;
    for (int i = 0; i < count; ++i) {
      Component c;
      c.id = "c" + std::to_string(comps.size());
      c.kind = kind_for(i);
      c.efficiency = role_of(c.kind) == ComponentRole::source ? 1.0 : eff_d(rng);
      c.specific_power = 5000.0;
      layer.push_back(comps.size());
      comps.push_back(c);
    }
    layers.push_back(layer);
  };
  add_layer(width_d(rng), [&](int) { return unit(rng) < 0.5 ? ComponentKind::jet_fuel : ComponentKind::battery; });
  const int mid = layers_d(rng);
  const ComponentKind transmitters[] = {ComponentKind::gas_turbine, ComponentKind::electric_motor,
                                        ComponentKind::generator, ComponentKind::gearbox,
                                        ComponentKind::electrical_bus};
  for (int l = 0; l < mid; ++l) {
    add_layer(width_d(rng), [&](int) { return transmitters[rng() % 5]; });
  }
  add_layer(sinks_d(rng), [&](int) { return unit(rng) < 0.5 ? ComponentKind::propeller : ComponentKind::fan; });

  std::vector<std::vector<bool>> adj(comps.size(), std::vector<bool>(comps.size(), false));
  auto pick = [&](const std::vector<std::size_t>& v) { return v[rng() % v.size()]; };
  for (std::size_t l = 1; l < layers.size(); ++l) {
    for (std::size_t j : layers[l]) {
      // Mandatory feeder from the previous layer, extras from any earlier one.
      adj[pick(layers[l - 1])][j] = true;
      for (std::size_t e = 0; e < l; ++e) {
        for (std::size_t i : layers[e]) {
          if (unit(rng) < 0.25) adj[i][j] = true;
        }
      }
    }
  }
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    for (std::size_t i : layers[l]) {
      bool has_out = false;
      for (std::size_t j = 0; j < comps.size(); ++j) has_out = has_out || adj[i][j];
      if (!has_out) adj[i][pick(layers[l + 1])] = true;
    }
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (adj[i][j]) edges.push_back({comps[i].id, comps[j].id});
    }
  }
  PropArchitecture arch = build_architecture("random", comps, edges);

  std::map<std::string, std::map<std::string, double>> rows;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    std::vector<std::size_t> feeders;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (adj[i][j]) feeders.push_back(i);
    }
    if (feeders.empty()) continue;
    std::vector<double> w(feeders.size());
    double total = 0.0;
    for (double& x : w) {
      x = unit(rng) < 0.15 ? 0.0 : unit(rng) + 0.01;
      total += x;
    }
    if (total == 0.0) {
      w[0] = 1.0;
      total = 1.0;
    }
    auto& row = rows[comps[j].id];
    for (std::size_t k = 0; k < feeders.size(); ++k) row[comps[feeders[k]].id] = w[k] / total;
  }
  OperationSplit op = make_operation(arch, rows, "random");

  std::vector<double> demands(arch.size(), 0.0);
  for (std::size_t s : arch.sinks()) demands[s] = 5e6 * unit(rng);
  return {arch, op, demands};
}

// Independent oracle: solves the pull equations as one dense linear system
// instead of a topological sweep. With x the input power of every non-source
// component and y the draw of every source,
//   x_j = (d_j + sum_k S(k, j) x_k) / eta_j    (d_j = sink demand)
//   y_i = sum_k S(k, i) x_k.
struct DenseSolution {
  std::vector<double> input;
  std::vector<double> output;
};

inline DenseSolution dense_solve(const PropArchitecture& arch, const OperationSplit& op,
                                 const std::vector<double>& demands) {
  const auto n = static_cast<Eigen::Index>(arch.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Component& c = arch.component(static_cast<std::size_t>(j));
    if (c.role() == ComponentRole::source) continue;
    b(j) = (c.role() == ComponentRole::sink ? demands[static_cast<std::size_t>(j)] : 0.0) / c.efficiency;
    for (Eigen::Index k = 0; k < n; ++k) {
      a(j, k) -= op.fraction(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) / c.efficiency;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const Component& c = arch.component(static_cast<std::size_t>(j));
    if (c.role() != ComponentRole::source) continue;
    a.row(j).setZero();
    a(j, j) = 1.0;
    b(j) = 0.0;
  }
  Eigen::VectorXd x = a.fullPivLu().solve(b);

  DenseSolution out;
  out.input.assign(arch.size(), 0.0);
  out.output.assign(arch.size(), 0.0);
  for (std::size_t j = 0; j < arch.size(); ++j) {
    const Component& c = arch.component(j);
    if (c.role() == ComponentRole::source) {
      double draw = 0.0;
      for (std::size_t k = 0; k < arch.size(); ++k) draw += op.fraction(k, j) * x(static_cast<Eigen::Index>(k));
      out.output[j] = draw;
    } else {
      out.input[j] = x(static_cast<Eigen::Index>(j));
      out.output[j] = c.efficiency * out.input[j];
    }
  }
  return out;
}

// Forward reconstruction: starting from the source draws only, push power
// downstream. Each component hands its output to its consumers in proportion
// to the power those consumers requested from it (S(k, j) * input_k), and
// each consumer converts what it received with its efficiency. Returns the
// reconstructed sink outputs, indexed like the components.
inline std::vector<double> forward_sink_outputs(const PropArchitecture& arch, const OperationSplit& op,
                                                const PowerTable& table) {
  const std::size_t n = arch.size();
  std::vector<double> received(n, 0.0), out(n, 0.0);
  for (std::size_t j : arch.topological_order()) {
    const Component& c = arch.component(j);
    const double available = c.role() == ComponentRole::source ? table.draw(j) : c.efficiency * received[j];
    out[j] = available;
    double requested = 0.0;
    for (std::size_t k : arch.downstream(j)) requested += op.fraction(k, j) * table.input[k];
    if (requested <= 0.0) continue;
    for (std::size_t k : arch.downstream(j)) {
      received[k] += available * (op.fraction(k, j) * table.input[k]) / requested;
    }
  }
  std::vector<double> sinks(n, 0.0);
  for (std::size_t s : arch.sinks()) sinks[s] = out[s];
  return sinks;
}

}  // namespace fastsize::testing
