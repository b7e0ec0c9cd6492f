#include "fastsize/powertrain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>

#include "fastsize/error.hpp"
#include "fastsize/units.hpp"

namespace fastsize {

namespace {

struct KindEntry {
  std::string_view token;
  ComponentKind kind;
  ComponentRole role;
};

constexpr KindEntry kKinds[] = {
    {"jet_fuel", ComponentKind::jet_fuel, ComponentRole::source},
    {"hydrogen", ComponentKind::hydrogen, ComponentRole::source},
    {"battery", ComponentKind::battery, ComponentRole::source},
    {"gas_turbine", ComponentKind::gas_turbine, ComponentRole::transmitter},
    {"electric_motor", ComponentKind::electric_motor, ComponentRole::transmitter},
    {"generator", ComponentKind::generator, ComponentRole::transmitter},
    {"gearbox", ComponentKind::gearbox, ComponentRole::transmitter},
    {"electrical_bus", ComponentKind::electrical_bus, ComponentRole::transmitter},
    {"fuel_cell", ComponentKind::fuel_cell, ComponentRole::transmitter},
    {"propeller", ComponentKind::propeller, ComponentRole::sink},
    {"fan", ComponentKind::fan, ComponentRole::sink},
};

constexpr double kSplitTolerance = 1e-12;

}  // namespace

std::string_view to_string(ComponentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.token;
  }
  return "?";
}

std::optional<ComponentKind> component_kind_from(std::string_view token) {
  for (const auto& k : kKinds) {
    if (k.token == token) return k.kind;
  }
  return std::nullopt;
}

ComponentRole role_of(ComponentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.role;
  }
  return ComponentRole::transmitter;
}

std::optional<std::size_t> PropArchitecture::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t PropArchitecture::require_index(std::string_view id) const {
  auto i = index_of(id);
  if (!i) throw PowertrainError("architecture '" + name_ + "': unknown component '" + std::string(id) + "'");
  return *i;
}

std::vector<std::size_t> PropArchitecture::sources() const {
  std::vector<std::size_t> out;
  for (std::size_t i : order_) {
    if (components_[i].role() == ComponentRole::source) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> PropArchitecture::sinks() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].role() == ComponentRole::sink) out.push_back(i);
  }
  return out;
}

const OperationSplit& PropArchitecture::operation(std::string_view id) const {
  auto it = operations_.find(std::string(id));
  if (it == operations_.end()) {
    throw PowertrainError("architecture '" + name_ + "' has no operation '" + std::string(id) + "'");
  }
  return it->second;
}

bool PropArchitecture::is_active(const OperationSplit& op, std::size_t i) const {
  if (components_[i].role() == ComponentRole::source) return true;
  return op.row_sum(i) > 0.0;
}

std::vector<std::size_t> PropArchitecture::active_sinks(const OperationSplit& op) const {
  std::vector<std::size_t> out;
  for (std::size_t i : sinks()) {
    if (is_active(op, i)) out.push_back(i);
  }
  return out;
}

void PropArchitecture::check_operation(const OperationSplit& op, std::string_view op_id) const {
  const std::size_t n = components_.size();
  auto where = [&](std::size_t j) {
    return "operation '" + std::string(op_id) + "', component '" + components_[j].id + "': ";
  };
  if (static_cast<std::size_t>(op.matrix().rows()) != n || static_cast<std::size_t>(op.matrix().cols()) != n) {
    throw PowertrainError("operation '" + std::string(op_id) + "': split matrix size does not match architecture");
  }
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double f = op.fraction(j, i);
      if (!(f >= 0.0) || !std::isfinite(f)) throw PowertrainError(where(j) + "split fractions must be >= 0");
      if (f > 0.0 && !connected(i, j)) {
        throw PowertrainError(where(j) + "split from '" + components_[i].id + "' without a connecting edge");
      }
      sum += f;
    }
    if (sum == 0.0) continue;
    if (std::abs(sum - 1.0) > kSplitTolerance) {
      throw PowertrainError(where(j) + "split fractions sum to " + std::to_string(sum) + ", expected 1");
    }
    for (std::size_t i : upstream_[j]) {
      if (op.fraction(j, i) > 0.0 && !is_active(op, i)) {
        throw PowertrainError(where(j) + "draws from inactive component '" + components_[i].id + "'");
      }
    }
  }
  bool any_sink = false;
  for (std::size_t s : sinks()) any_sink = any_sink || is_active(op, s);
  if (!any_sink) throw PowertrainError("operation '" + std::string(op_id) + "' has no active sink");
}

PropArchitecture PropArchitecture::with_operation(const std::string& id, OperationSplit op) const {
  check_operation(op, id);
  PropArchitecture copy = *this;
  copy.operations_[id] = std::move(op);
  return copy;
}

PropArchitecture PropArchitecture::with_specific_power(std::string_view id, double specific_power) const {
  if (!(specific_power > 0.0)) throw PowertrainError("specific_power must be > 0");
  PropArchitecture copy = *this;
  copy.components_[require_index(id)].specific_power = specific_power;
  return copy;
}

namespace {

std::vector<std::size_t> find_cycle(std::size_t n, const std::vector<std::vector<std::size_t>>& downstream,
                                    const std::vector<bool>& candidates) {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;
  std::function<bool(std::size_t)> visit = [&](std::size_t u) {
    state[u] = 1;
    stack.push_back(u);
    for (std::size_t v : downstream[u]) {
      if (!candidates[v]) continue;
      if (state[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        cycle.push_back(v);
        return true;
      }
      if (state[v] == 0 && visit(v)) return true;
    }
    stack.pop_back();
    state[u] = 2;
    return false;
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (candidates[u] && state[u] == 0 && visit(u)) break;
  }
  return cycle;
}

}  // namespace

PropArchitecture build_architecture(std::string name, std::vector<Component> components,
                                    const std::vector<Edge>& edges) {
  auto fail = [&name](const std::string& what) -> void {
    throw PowertrainError("architecture '" + name + "': " + what);
  };
  const std::size_t n = components.size();
  if (n == 0) fail("no components");

  PropArchitecture arch;
  arch.name_ = name;
  std::set<std::string> ids;
  for (const auto& c : components) {
    if (c.id.empty()) fail("component id must not be empty");
    if (!ids.insert(c.id).second) fail("duplicate component id '" + c.id + "'");
    if (c.role() != ComponentRole::source && !(c.efficiency > 0.0 && c.efficiency <= 1.0)) {
      fail("component '" + c.id + "': efficiency must be in (0, 1]");
    }
    if (c.specific_power && !(*c.specific_power > 0.0)) fail("component '" + c.id + "': specific_power must be > 0");
  }
  arch.components_ = std::move(components);
  arch.connections_ = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), false);
  arch.upstream_.assign(n, {});
  arch.downstream_.assign(n, {});

  for (const auto& e : edges) {
    auto from = arch.index_of(e.from);
    auto to = arch.index_of(e.to);
    if (!from) fail("edge references unknown component '" + e.from + "'");
    if (!to) fail("edge references unknown component '" + e.to + "'");
    if (arch.connected(*from, *to)) fail("duplicate edge " + e.from + " -> " + e.to);
    arch.connections_(static_cast<Eigen::Index>(*from), static_cast<Eigen::Index>(*to)) = true;
    arch.downstream_[*from].push_back(*to);
    arch.upstream_[*to].push_back(*from);
  }
  auto by_id = [&arch](std::size_t a, std::size_t b) { return arch.components_[a].id < arch.components_[b].id; };
  for (auto& v : arch.upstream_) std::sort(v.begin(), v.end(), by_id);
  for (auto& v : arch.downstream_) std::sort(v.begin(), v.end(), by_id);

  // Kahn's algorithm with an id-ordered frontier.
  auto later = [&arch](std::size_t a, std::size_t b) { return arch.components_[a].id > arch.components_[b].id; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> frontier(later);
  std::vector<std::size_t> indegree(n);
  for (std::size_t i = 0; i < n; ++i) {
    indegree[i] = arch.upstream_[i].size();
    if (indegree[i] == 0) frontier.push(i);
  }
  while (!frontier.empty()) {
    std::size_t u = frontier.top();
    frontier.pop();
    arch.order_.push_back(u);
    for (std::size_t v : arch.downstream_[u]) {
      if (--indegree[v] == 0) frontier.push(v);
    }
  }
  if (arch.order_.size() != n) {
    std::vector<bool> remaining(n);
    for (std::size_t i = 0; i < n; ++i) remaining[i] = indegree[i] > 0;
    auto cycle = find_cycle(n, arch.downstream_, remaining);
    std::string path;
    for (std::size_t k = 0; k < cycle.size(); ++k) path += (k ? " -> " : "") + arch.components_[cycle[k]].id;
    fail("cycle detected: " + path);
  }

  bool has_source = false;
  bool has_sink = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = arch.components_[i];
    switch (c.role()) {
      case ComponentRole::source:
        has_source = true;
        if (!arch.upstream_[i].empty()) {
          fail("source '" + c.id + "' has an inbound edge from '" + arch.components_[arch.upstream_[i][0]].id + "'");
        }
        break;
      case ComponentRole::sink:
        has_sink = true;
        if (!arch.downstream_[i].empty()) {
          fail("sink '" + c.id + "' has an outbound edge to '" + arch.components_[arch.downstream_[i][0]].id + "'");
        }
        [[fallthrough]];
      case ComponentRole::transmitter:
        if (arch.upstream_[i].empty()) fail("component '" + c.id + "' has no inbound edge");
        break;
    }
  }
  if (!has_source) fail("no energy source");
  if (!has_sink) fail("no sink");

  std::vector<bool> reached(n, false);
  for (std::size_t u : arch.order_) {
    if (arch.components_[u].role() == ComponentRole::source) reached[u] = true;
    if (!reached[u]) continue;
    for (std::size_t v : arch.downstream_[u]) reached[v] = true;
  }
  for (std::size_t s : arch.sinks()) {
    if (!reached[s]) fail("sink '" + arch.components_[s].id + "' is not reachable from any source");
  }
  return arch;
}

OperationSplit make_operation(const PropArchitecture& arch,
                              const std::map<std::string, std::map<std::string, double>>& rows,
                              std::string_view op_id) {
  OperationSplit op(arch.size());
  for (const auto& [downstream, fractions] : rows) {
    auto j = arch.index_of(downstream);
    if (!j) throw PowertrainError("operation '" + std::string(op_id) + "': unknown component '" + downstream + "'");
    if (arch.component(*j).role() == ComponentRole::source) {
      throw PowertrainError("operation '" + std::string(op_id) + "': source '" + downstream + "' takes no split");
    }
    for (const auto& [upstream, f] : fractions) {
      auto i = arch.index_of(upstream);
      if (!i) throw PowertrainError("operation '" + std::string(op_id) + "': unknown component '" + upstream + "'");
      if (!arch.connected(*i, *j)) {
        throw PowertrainError("operation '" + std::string(op_id) + "': no edge " + upstream + " -> " + downstream);
      }
      op.set_fraction(*j, *i, f);
    }
  }
  for (std::size_t j = 0; j < arch.size(); ++j) {
    const auto& c = arch.component(j);
    if (c.role() == ComponentRole::source || rows.count(c.id) > 0) continue;
    if (arch.upstream(j).size() != 1) {
      throw PowertrainError("operation '" + std::string(op_id) + "': component '" + c.id +
                            "' has several feeders and needs explicit split fractions");
    }
    op.set_fraction(j, arch.upstream(j).front(), 1.0);
  }
  arch.check_operation(op, op_id);
  return op;
}

PowerTable propagate_power(const PropArchitecture& arch, const OperationSplit& op,
                           const std::vector<double>& sink_demands) {
  const std::size_t n = arch.size();
  PowerTable table{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> requested(n, 0.0);
  const auto& order = arch.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t j = *it;
    const Component& c = arch.component(j);
    double output = requested[j];
    if (c.role() == ComponentRole::sink) {
      output = sink_demands.at(j);
      if (!(output >= 0.0) || !std::isfinite(output)) {
        throw PowertrainError("demand on sink '" + c.id + "' must be finite and >= 0");
      }
    }
    table.output[j] = output;
    if (c.role() == ComponentRole::source || output == 0.0) continue;

    double row = 0.0;
    for (std::size_t i : arch.upstream(j)) row += op.fraction(j, i);
    if (row == 0.0) throw PowertrainError("demand on inactive component '" + c.id + "'");
    if (std::abs(row - 1.0) > kSplitTolerance) {
      throw PowertrainError("split fractions of '" + c.id + "' sum to " + std::to_string(row) + ", expected 1");
    }
    const double input = output / c.efficiency;
    table.input[j] = input;
    for (std::size_t i : arch.upstream(j)) requested[i] += op.fraction(j, i) * input;
  }
  return table;
}

PowerTable propagate_power(const PropArchitecture& arch, const OperationSplit& op,
                           const std::map<std::string, double>& sink_demands) {
  std::vector<double> demands(arch.size(), 0.0);
  for (const auto& [id, w] : sink_demands) {
    std::size_t i = arch.require_index(id);
    if (arch.component(i).role() != ComponentRole::sink) {
      throw PowertrainError("demand given for '" + id + "', which is not a sink");
    }
    demands[i] = w;
  }
  return propagate_power(arch, op, demands);
}

double sizing_power(const PropArchitecture& arch, const PowerTable& table, std::size_t i) {
  switch (arch.component(i).kind) {
    case ComponentKind::gas_turbine:
    case ComponentKind::fuel_cell:
    case ComponentKind::propeller:
    case ComponentKind::fan: return table.output[i];
    case ComponentKind::jet_fuel:
    case ComponentKind::hydrogen:
    case ComponentKind::battery: return table.output[i];
    default: return table.input[i];
  }
}

std::map<std::string, double> size_components(const PropArchitecture& arch,
                                              const std::map<std::string, double>& peak_power) {
  std::map<std::string, double> masses;
  for (const auto& c : arch.components()) {
    if (c.role() == ComponentRole::source) continue;
    auto it = peak_power.find(c.id);
    double peak = it != peak_power.end() ? it->second : 0.0;
    if (!(peak >= 0.0)) throw PowertrainError("peak power of '" + c.id + "' must be >= 0");
    if (peak == 0.0) {
      masses[c.id] = 0.0;
      continue;
    }
    if (!c.specific_power) {
      if (c.role() == ComponentRole::sink) {
        masses[c.id] = 0.0;
        continue;
      }
      throw PowertrainError("component '" + c.id + "' has nonzero peak power but no specific_power");
    }
    masses[c.id] = peak / *c.specific_power;
  }
  return masses;
}

PropArchitecture parse_architecture(std::string_view document) {
  Table root = parse_document(document);
  TableReader r(root, "architecture");
  check_schema_version(r);
  std::string name = r.require_string("name");

  std::vector<Component> components;
  auto tables = r.table_array("component");
  for (std::size_t k = 0; k < tables.size(); ++k) {
    TableReader cr(*tables[k], "component " + std::to_string(k));
    Component c;
    c.id = cr.require_string("id");
    std::string kind = cr.require_string("kind");
    auto parsed = component_kind_from(kind);
    if (!parsed) cr.fail("kind", "unknown component kind '" + kind + "'");
    c.kind = *parsed;
    if (c.role() == ComponentRole::source) {
      if (cr.has("efficiency")) cr.fail("efficiency", "sources carry no efficiency; losses live in the converter");
    } else {
      c.efficiency = read_quantity(cr, "efficiency", Dimension::dimensionless);
    }
    if (cr.has("specific_power")) c.specific_power = read_quantity(cr, "specific_power", Dimension::specific_power);
    cr.finish();
    components.push_back(std::move(c));
  }

  std::vector<Edge> edges;
  const Value& edge_list = r.require("edges");
  const auto* arr = std::get_if<Array>(&edge_list.data);
  if (arr == nullptr) r.fail("edges", "expected an array of \"from -> to\" strings");
  for (const auto& e : *arr) {
    if (!e.is_string()) r.fail("edges", "expected an array of \"from -> to\" strings");
    const auto& s = std::get<std::string>(e.data);
    auto arrow = s.find("->");
    if (arrow == std::string::npos) r.fail("edges", "edge '" + s + "' is not of the form \"from -> to\"");
    auto strip = [](std::string t) {
      t.erase(0, t.find_first_not_of(" \t"));
      t.erase(t.find_last_not_of(" \t") + 1);
      return t;
    };
    edges.push_back({strip(s.substr(0, arrow)), strip(s.substr(arrow + 2))});
  }

  std::map<std::string, std::map<std::string, std::map<std::string, double>>> op_rows;
  if (const Table* ops = r.optional_table("operations")) {
    for (const auto& [op_id, value] : ops->entries) {
      const auto* op_table = std::get_if<Table>(&value.data);
      if (op_table == nullptr) r.fail("operations", "operation '" + op_id + "' must be a table");
      auto& rows = op_rows[op_id];
      for (const auto& [downstream, row] : op_table->entries) {
        const auto* row_table = std::get_if<Table>(&row.data);
        if (row_table == nullptr) {
          throw ParseError("architecture (line " + std::to_string(row.line) + "): operation '" + op_id +
                           "', component '" + downstream + "': expected { upstream = fraction, ... }");
        }
        auto& fractions = rows[downstream];
        for (const auto& [upstream, f] : row_table->entries) {
          if (!f.is_number()) {
            throw ParseError("architecture (line " + std::to_string(f.line) + "): split fraction must be a number");
          }
          fractions[upstream] = std::get<double>(f.data);
        }
      }
    }
  }
  r.finish();

  PropArchitecture arch = build_architecture(name, std::move(components), edges);
  if (op_rows.empty()) throw PowertrainError("architecture '" + name + "' defines no operations");
  for (const auto& [op_id, rows] : op_rows) arch = arch.with_operation(op_id, make_operation(arch, rows, op_id));
  return arch;
}

PropArchitecture read_architecture_file(const std::string& path) {
  try {
    return parse_architecture(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const PowertrainError& e) {
    throw PowertrainError(path + ": " + e.what());
  }
}

void check_sources_declared(const PropArchitecture& arch, const AircraftSpec& spec) {
  for (std::size_t i : arch.sources()) {
    const Component& c = arch.component(i);
    const EnergySourceSpec* s = spec.find_source(c.id);
    if (s == nullptr) {
      throw ValidationError("architecture source '" + c.id + "' is not declared as an energy_source of aircraft '" +
                            spec.name + "'");
    }
    if (to_string(s->kind) != to_string(c.kind)) {
      throw ValidationError("energy_source '" + c.id + "' is " + std::string(to_string(s->kind)) +
                            " but the architecture declares " + std::string(to_string(c.kind)));
    }
  }
}

}  // namespace fastsize
