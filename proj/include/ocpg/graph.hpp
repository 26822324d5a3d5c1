#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ocpg {

/// A named value attached to an object or explicit connector. Properties nest:
/// a property carries a value, child properties, or both.
struct PropertyNode {
  std::string name;
  std::optional<std::string> value;
  std::vector<PropertyNode> children;

  static PropertyNode leaf(std::string name, std::string value) {
    return PropertyNode{std::move(name), std::move(value), {}};
  }
  static PropertyNode nested(std::string name, std::vector<PropertyNode> children) {
    return PropertyNode{std::move(name), std::nullopt, std::move(children)};
  }
};

/// Order-insensitive comparison of property forests.
bool equivalent(std::span<const PropertyNode> a, std::span<const PropertyNode> b);
bool equivalent(const PropertyNode& a, const PropertyNode& b);

/// Looks up a top-level property by exact name.
const PropertyNode* find_property(std::span<const PropertyNode> props, std::string_view name);

enum class NodeKind { Object, Connector };
enum class Orientation { Original, Opposite };
enum class EdgeRole { Hierarchical, Reference, ForeignKey, RdfLink };

std::string_view to_string(NodeKind kind);
std::string_view to_string(Orientation orientation);
std::string_view to_string(EdgeRole role);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<Orientation> parse_orientation(std::string_view text);
std::optional<EdgeRole> parse_edge_role(std::string_view text);

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::Object;
  std::string type;
  std::optional<std::string> name;  // always empty for connectors
  std::vector<PropertyNode> properties;
  std::optional<std::string> provenance;

  bool is_connector() const { return kind == NodeKind::Connector; }
};

struct Edge {
  std::string from;
  std::string to;
  Orientation orientation = Orientation::Original;
  EdgeRole role = EdgeRole::Reference;
  double weight = 1.0;

  bool is_original() const { return orientation == Orientation::Original; }
};

/// Edge weights by orientation, with optional per-role overrides. Opposite
/// edges must never be cheaper than original ones.
struct WeightPolicy {
  double original_weight = 1.0;
  double opposite_weight = 2.0;
  std::map<EdgeRole, std::pair<double, double>> overrides;  // role -> (original, opposite)

  double original(EdgeRole role) const;
  double opposite(EdgeRole role) const;
  /// Empty when the policy is usable; otherwise the reason it is not.
  std::optional<std::string> check() const;

  friend bool operator==(const WeightPolicy&, const WeightPolicy&) = default;
};

/// Immutable OCP data graph. Build one with GraphBuilder or deserialize().
class DataGraph {
 public:
  DataGraph() = default;
  /// Throws Error(InvalidGraph) on duplicate node ids. Dangling endpoints
  /// are allowed here and reported by validate().
  DataGraph(std::vector<GraphNode> nodes, std::vector<Edge> edges, WeightPolicy policy = {});

  std::span<const GraphNode> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  const WeightPolicy& weight_policy() const { return policy_; }

  const GraphNode* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool empty() const { return nodes_.empty() && edges_.empty(); }

 private:
  std::vector<GraphNode> nodes_;
  std::vector<Edge> edges_;
  WeightPolicy policy_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Mutable staging area used by the transforms.
class GraphBuilder {
 public:
  explicit GraphBuilder(WeightPolicy policy = {}) : policy_(std::move(policy)) {}

  /// Adds a node; returns false (and changes nothing) if the id is taken.
  bool add_node(GraphNode node);
  GraphNode* node(std::string_view id);
  bool contains(std::string_view id) const { return index_.contains(std::string(id)); }

  /// Adds an Original edge weighted by the policy.
  void connect(std::string from, std::string to, EdgeRole role);
  void add_edge(Edge edge) { edges_.push_back(std::move(edge)); }

  std::size_t node_count() const { return nodes_.size(); }
  const WeightPolicy& weight_policy() const { return policy_; }

  DataGraph build() &&;

 private:
  WeightPolicy policy_;
  std::vector<GraphNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
};

using RoleSelector = std::function<bool(EdgeRole)>;

inline bool any_role(EdgeRole) { return true; }

/// Completes the graph with Opposite edges. For every selected Original edge
/// (u,v) with no Original (v,u) of the same role, an Opposite (v,u) is added,
/// weighted by the graph's policy. Edges of a connector whose relationship is
/// already stored in reverse (a same-type connector from each target back to
/// the source) are left alone. Idempotent.
DataGraph add_opposite_edges(const DataGraph& graph, const RoleSelector& selector = any_role);

struct Violation {
  std::string subject;  // node id or "edge #i (from->to)"
  std::string rule;     // short invariant name
  std::string message;
};

/// Checks every structural invariant of the model. Violations are data.
std::vector<Violation> validate(const DataGraph& graph);

/// Same ids, kinds, types, names, provenance, property trees
/// (order-insensitive), edge multiset and weight policy.
bool structurally_equal(const DataGraph& a, const DataGraph& b);

struct GraphStats {
  std::size_t objects = 0;
  std::size_t connectors = 0;
  std::size_t original_edges = 0;
  std::size_t opposite_edges = 0;
  std::map<EdgeRole, std::size_t> edges_by_role;
  std::map<std::size_t, std::size_t> out_degree_histogram;  // original edges only
  std::map<std::size_t, std::size_t> in_degree_histogram;

  std::size_t nodes() const { return objects + connectors; }
  std::size_t edges() const { return original_edges + opposite_edges; }
};

GraphStats compute_stats(const DataGraph& graph);

/// "nodes: 7 (objects 5, connectors 2); edges: 12 (original 6, opposite 6)"
std::string summary_line(const GraphStats& stats);

}  // namespace ocpg
