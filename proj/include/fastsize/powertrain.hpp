#pragma once
// Propulsion architectures as directed graphs.
//
// Components are energy sources, transmitters and sinks. The connection
// matrix B has B(i, j) = true when component i feeds power to component j.
// An operation (one per mission segment) is a split matrix S with the
// sparsity of B^T: S(j, i) is the fraction of component j's required input
// power that j requests from upstream component i. Rows of active components
// sum to one; a component whose row is all zero is inactive.
//
// Power flows are computed by pulling: starting from the sink output demands,
// a reverse topological sweep turns each component's output into its input
// (output / efficiency) and hands S(j, i) * input_j to every upstream i.
// Sources end up with the total power drawn from them.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fastsize/model.hpp"

namespace fastsize {

enum class ComponentRole { source, transmitter, sink };

enum class ComponentKind {
  // sources
  jet_fuel,
  hydrogen,
  battery,
  // transmitters
  gas_turbine,
  electric_motor,
  generator,
  gearbox,
  electrical_bus,
  fuel_cell,
  // sinks
  propeller,
  fan,
};

std::string_view to_string(ComponentKind kind);
std::optional<ComponentKind> component_kind_from(std::string_view token);
ComponentRole role_of(ComponentKind kind);

struct Component {
  std::string id;
  ComponentKind kind = ComponentKind::propeller;
  double efficiency = 1.0;                // output / input; unused for sources
  std::optional<double> specific_power;   // W/kg

  ComponentRole role() const { return role_of(kind); }
};

struct Edge {
  std::string from;
  std::string to;
};

class PropArchitecture;

class OperationSplit {
 public:
  OperationSplit() = default;
  explicit OperationSplit(std::size_t component_count)
      : fractions_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(component_count),
                                         static_cast<Eigen::Index>(component_count))) {}

  // Fraction of `downstream`'s input requested from `upstream`.
  double fraction(std::size_t downstream, std::size_t upstream) const {
    return fractions_(static_cast<Eigen::Index>(downstream), static_cast<Eigen::Index>(upstream));
  }
  void set_fraction(std::size_t downstream, std::size_t upstream, double value) {
    fractions_(static_cast<Eigen::Index>(downstream), static_cast<Eigen::Index>(upstream)) = value;
  }
  double row_sum(std::size_t downstream) const {
    return fractions_.row(static_cast<Eigen::Index>(downstream)).sum();
  }
  const Eigen::MatrixXd& matrix() const { return fractions_; }

 private:
  Eigen::MatrixXd fractions_;
};

// Per-component power at one flight instant, indexed like the architecture's
// components. Sources have input = 0 and output = draw.
struct PowerTable {
  std::vector<double> input;
  std::vector<double> output;

  double draw(std::size_t source_index) const { return output[source_index]; }
};

class PropArchitecture {
 public:
  const std::string& name() const { return name_; }
  const std::vector<Component>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  const Component& component(std::size_t i) const { return components_[i]; }
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::size_t require_index(std::string_view id) const;

  bool connected(std::size_t from, std::size_t to) const {
    return connections_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
  }
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& connection_matrix() const { return connections_; }
  const std::vector<std::size_t>& upstream(std::size_t i) const { return upstream_[i]; }
  const std::vector<std::size_t>& downstream(std::size_t i) const { return downstream_[i]; }

  // Deterministic topological order (ties broken by component id), so flows
  // do not depend on the order components were declared in.
  const std::vector<std::size_t>& topological_order() const { return order_; }
  std::vector<std::size_t> sources() const;
  std::vector<std::size_t> sinks() const;

  const std::map<std::string, OperationSplit>& operations() const { return operations_; }
  const OperationSplit& operation(std::string_view id) const;
  bool has_operation(std::string_view id) const { return operations_.count(std::string(id)) > 0; }

  bool is_active(const OperationSplit& op, std::size_t i) const;
  std::vector<std::size_t> active_sinks(const OperationSplit& op) const;

  // Throws PowertrainError naming the component and operation when a split
  // row is invalid.
  void check_operation(const OperationSplit& op, std::string_view op_id) const;

  // Copy with one operation added or replaced (validated).
  PropArchitecture with_operation(const std::string& id, OperationSplit op) const;
  // Copy with a component's specific power replaced.
  PropArchitecture with_specific_power(std::string_view id, double specific_power) const;

 private:
  friend PropArchitecture build_architecture(std::string name, std::vector<Component> components,
                                             const std::vector<Edge>& edges);

  std::string name_;
  std::vector<Component> components_;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> connections_;
  std::vector<std::vector<std::size_t>> upstream_;
  std::vector<std::vector<std::size_t>> downstream_;
  std::vector<std::size_t> order_;
  std::map<std::string, OperationSplit> operations_;
};

// Assembles and validates the graph: unique ids, known edge endpoints, no
// cycles (reported with the cycle's nodes), sources without inbound edges,
// sinks without outbound edges, every non-source fed, every sink reachable
// from a source.
PropArchitecture build_architecture(std::string name, std::vector<Component> components,
                                    const std::vector<Edge>& edges);

// Builds a split from (downstream id -> {upstream id -> fraction}). Entries
// for components not mentioned default to 1.0 on the single inbound edge of
// single-fed components; multi-fed components must be listed.
OperationSplit make_operation(const PropArchitecture& arch,
                              const std::map<std::string, std::map<std::string, double>>& rows,
                              std::string_view op_id = "operation");

// Sink demands are output powers (W) keyed by sink id; missing sinks demand 0.
PowerTable propagate_power(const PropArchitecture& arch, const OperationSplit& op,
                           const std::map<std::string, double>& sink_demands);
// Same, with demands indexed like the components (non-sink entries ignored).
PowerTable propagate_power(const PropArchitecture& arch, const OperationSplit& op,
                           const std::vector<double>& sink_demands);

// The power a component is rated for: sinks and converters fed by a source
// (gas turbine, fuel cell) on their output side; other transmitters on their
// electric/shaft input side.
double sizing_power(const PropArchitecture& arch, const PowerTable& table, std::size_t i);

// Mass = peak power / specific power for transmitters and sinks. Sinks
// without a specific power are carried by the airframe (0 kg). Sources are
// sized by the energy module and are not in the result.
std::map<std::string, double> size_components(const PropArchitecture& arch,
                                              const std::map<std::string, double>& peak_power);

PropArchitecture parse_architecture(std::string_view document);
PropArchitecture read_architecture_file(const std::string& path);

// Every source component must be declared as an energy source of the same
// kind in the aircraft spec.
void check_sources_declared(const PropArchitecture& arch, const AircraftSpec& spec);

}  // namespace fastsize
