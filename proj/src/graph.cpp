#include "ocpg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "ocpg/error.hpp"

namespace ocpg {

namespace {

void append_canonical(const PropertyNode& p, std::string& out) {
  // Length-prefixed fields keep the encoding injective.
  auto field = [&out](std::string_view s) {
    out += std::to_string(s.size());
    out += ':';
    out += s;
  };
  out += '(';
  field(p.name);
  if (p.value) {
    out += 'v';
    field(*p.value);
  } else {
    out += '-';
  }
  std::vector<std::string> kids;
  kids.reserve(p.children.size());
  for (const auto& c : p.children) {
    std::string k;
    append_canonical(c, k);
    kids.push_back(std::move(k));
  }
  std::sort(kids.begin(), kids.end());
  for (const auto& k : kids) out += k;
  out += ')';
}

std::vector<std::string> canonical_forest(std::span<const PropertyNode> props) {
  std::vector<std::string> out;
  out.reserve(props.size());
  for (const auto& p : props) {
    std::string s;
    append_canonical(p, s);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

int role_family(EdgeRole role) {
  switch (role) {
    case EdgeRole::Hierarchical:
    case EdgeRole::Reference: return 0;
    case EdgeRole::ForeignKey: return 1;
    case EdgeRole::RdfLink: return 2;
  }
  return -1;
}

void check_property(const PropertyNode& p, const std::string& owner, std::vector<Violation>& out) {
  if (p.name.empty()) {
    out.push_back({owner, "property-name", "property with empty name"});
  }
  if (!p.value && p.children.empty()) {
    out.push_back({owner, "property-content",
                   "property '" + p.name + "' has neither a value nor nested properties"});
  }
  for (const auto& c : p.children) check_property(c, owner, out);
}

std::string edge_label(std::size_t i, const Edge& e) {
  return "edge #" + std::to_string(i) + " (" + e.from + "->" + e.to + ")";
}

using EdgeKey = std::tuple<std::string, std::string, EdgeRole>;

}  // namespace

bool equivalent(const PropertyNode& a, const PropertyNode& b) {
  std::string ca, cb;
  append_canonical(a, ca);
  append_canonical(b, cb);
  return ca == cb;
}

bool equivalent(std::span<const PropertyNode> a, std::span<const PropertyNode> b) {
  return a.size() == b.size() && canonical_forest(a) == canonical_forest(b);
}

const PropertyNode* find_property(std::span<const PropertyNode> props, std::string_view name) {
  for (const auto& p : props) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::Object ? "object" : "connector";
}

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::Original ? "original" : "opposite";
}

std::string_view to_string(EdgeRole role) {
  switch (role) {
    case EdgeRole::Hierarchical: return "hierarchical";
    case EdgeRole::Reference: return "reference";
    case EdgeRole::ForeignKey: return "foreign_key";
    case EdgeRole::RdfLink: return "rdf_link";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  if (text == "object") return NodeKind::Object;
  if (text == "connector") return NodeKind::Connector;
  return std::nullopt;
}

std::optional<Orientation> parse_orientation(std::string_view text) {
  if (text == "original") return Orientation::Original;
  if (text == "opposite") return Orientation::Opposite;
  return std::nullopt;
}

std::optional<EdgeRole> parse_edge_role(std::string_view text) {
  for (auto r : {EdgeRole::Hierarchical, EdgeRole::Reference, EdgeRole::ForeignKey, EdgeRole::RdfLink}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// WeightPolicy

double WeightPolicy::original(EdgeRole role) const {
  auto it = overrides.find(role);
  return it == overrides.end() ? original_weight : it->second.first;
}

double WeightPolicy::opposite(EdgeRole role) const {
  auto it = overrides.find(role);
  return it == overrides.end() ? opposite_weight : it->second.second;
}

std::optional<std::string> WeightPolicy::check() const {
  auto pair_ok = [](double orig, double opp) -> std::optional<std::string> {
    if (!std::isfinite(orig) || !std::isfinite(opp) || orig <= 0 || opp <= 0) {
      return "weights must be positive and finite";
    }
    if (opp < orig) return "opposite weight must not be lower than original weight";
    return std::nullopt;
  };
  if (auto err = pair_ok(original_weight, opposite_weight)) return err;
  for (const auto& [role, w] : overrides) {
    if (auto err = pair_ok(w.first, w.second)) {
      return std::string(to_string(role)) + ": " + *err;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DataGraph / GraphBuilder

DataGraph::DataGraph(std::vector<GraphNode> nodes, std::vector<Edge> edges, WeightPolicy policy)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), policy_(std::move(policy)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw Error(Errc::InvalidGraph, "duplicate node id '" + nodes_[i].id + "'");
    }
  }
}

const GraphNode* DataGraph::find(std::string_view id) const {
  auto i = index_of(id);
  return i ? &nodes_[*i] : nullptr;
}

std::optional<std::size_t> DataGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool GraphBuilder::add_node(GraphNode node) {
  auto [it, inserted] = index_.emplace(node.id, nodes_.size());
  if (!inserted) return false;
  nodes_.push_back(std::move(node));
  return true;
}

GraphNode* GraphBuilder::node(std::string_view id) {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

void GraphBuilder::connect(std::string from, std::string to, EdgeRole role) {
  double w = policy_.original(role);
  edges_.push_back(Edge{std::move(from), std::move(to), Orientation::Original, role, w});
}

DataGraph GraphBuilder::build() && {
  index_.clear();
  return DataGraph(std::move(nodes_), std::move(edges_), std::move(policy_));
}

// ---------------------------------------------------------------------------
// Opposite edges

DataGraph add_opposite_edges(const DataGraph& graph, const RoleSelector& selector) {
  std::set<EdgeKey> originals;
  std::set<EdgeKey> opposites;
  for (const auto& e : graph.edges()) {
    (e.is_original() ? originals : opposites).emplace(e.from, e.to, e.role);
  }

  // A connector is mirrored when, for each of its targets t, some other
  // connector of the same type runs from t back to its source.
  std::map<std::string, std::string> source_of;                // connector -> source
  std::map<std::string, std::set<std::string>> targets_of;     // connector -> targets
  std::map<std::string, int> incoming_count;
  for (const auto& e : graph.edges()) {
    if (!e.is_original()) continue;
    const GraphNode* from = graph.find(e.from);
    const GraphNode* to = graph.find(e.to);
    if (to && to->is_connector()) {
      source_of[e.to] = e.from;
      ++incoming_count[e.to];
    }
    if (from && from->is_connector()) targets_of[e.from].insert(e.to);
  }
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> by_type_and_source;
  for (const auto& [conn, src] : source_of) {
    if (incoming_count[conn] != 1) continue;
    by_type_and_source[{graph.find(conn)->type, src}].push_back(conn);
  }
  std::set<std::string> mirrored;
  for (const auto& [conn, src] : source_of) {
    if (incoming_count[conn] != 1) continue;
    const auto& targets = targets_of[conn];
    if (targets.empty()) continue;
    const std::string& type = graph.find(conn)->type;
    bool all = true;
    for (const auto& t : targets) {
      auto it = by_type_and_source.find({type, t});
      bool found = false;
      if (it != by_type_and_source.end()) {
        for (const auto& other : it->second) {
          if (other != conn && targets_of[other].contains(src)) {
            found = true;
            break;
          }
        }
      }
      if (!found) {
        all = false;
        break;
      }
    }
    if (all) mirrored.insert(conn);
  }

  std::vector<Edge> edges(graph.edges().begin(), graph.edges().end());
  const auto& policy = graph.weight_policy();
  for (const auto& e : graph.edges()) {
    if (!e.is_original() || !selector(e.role)) continue;
    if (mirrored.contains(e.from) || mirrored.contains(e.to)) continue;
    EdgeKey reverse{e.to, e.from, e.role};
    if (originals.contains(reverse) || opposites.contains(reverse)) continue;
    opposites.insert(reverse);
    edges.push_back(Edge{e.to, e.from, Orientation::Opposite, e.role, policy.opposite(e.role)});
  }
  std::vector<GraphNode> nodes(graph.nodes().begin(), graph.nodes().end());
  return DataGraph(std::move(nodes), std::move(edges), policy);
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate(const DataGraph& graph) {
  std::vector<Violation> out;

  if (auto err = graph.weight_policy().check()) {
    out.push_back({"weight_policy", "weight-policy", *err});
  }

  for (const auto& n : graph.nodes()) {
    if (n.id.empty()) out.push_back({"<empty id>", "node-id", "node with empty id"});
    if (n.type.empty()) out.push_back({n.id, "node-type", "node type is empty"});
    if (n.is_connector() && n.name) {
      out.push_back({n.id, "connector-name", "explicit connector carries a name"});
    }
    for (const auto& p : n.properties) check_property(p, n.id, out);
  }

  std::set<EdgeKey> originals;
  std::map<EdgeKey, double> original_weight;
  for (const auto& e : graph.edges()) {
    if (e.is_original()) {
      originals.emplace(e.from, e.to, e.role);
      auto [it, inserted] = original_weight.emplace(EdgeKey{e.from, e.to, e.role}, e.weight);
      if (!inserted) it->second = std::max(it->second, e.weight);
    }
  }

  std::map<std::string, std::vector<std::string>> incoming;  // connector -> sources
  std::map<std::string, std::size_t> outgoing;
  std::set<int> families;
  const auto edges = graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    const std::string label = edge_label(i, e);
    families.insert(role_family(e.role));
    const GraphNode* from = graph.find(e.from);
    const GraphNode* to = graph.find(e.to);
    if (!from) out.push_back({label, "edge-endpoint", "source '" + e.from + "' does not exist"});
    if (!to) out.push_back({label, "edge-endpoint", "target '" + e.to + "' does not exist"});
    if (e.from == e.to) out.push_back({label, "self-loop", "edge connects a node to itself"});
    if (!std::isfinite(e.weight) || e.weight < 0) {
      out.push_back({label, "edge-weight", "weight must be a nonnegative number"});
    }
    if (e.orientation == Orientation::Opposite) {
      EdgeKey mirror{e.to, e.from, e.role};
      if (!originals.contains(mirror)) {
        out.push_back({label, "opposite-mirror", "opposite edge has no original mirror"});
      } else if (e.weight < original_weight[mirror]) {
        out.push_back({label, "opposite-weight", "opposite edge is cheaper than its original mirror"});
      }
    }
    if (e.is_original() && from && to) {
      if (from->is_connector() && to->is_connector()) {
        out.push_back({label, "adjacent-connectors", "original edge joins two explicit connectors"});
      }
      if (to->is_connector()) incoming[to->id].push_back(from->id);
      if (from->is_connector()) ++outgoing[from->id];
    }
  }
  if (families.size() > 1) {
    out.push_back({"edges", "role-family",
                   "edge roles from different transforms are mixed in one graph"});
  }

  for (const auto& n : graph.nodes()) {
    if (!n.is_connector()) continue;
    const auto& in = incoming[n.id];
    std::size_t outs = outgoing[n.id];
    if (in.size() > 1) {
      out.push_back({n.id, "connector-incoming",
                     "explicit connector has " + std::to_string(in.size()) + " incoming original edges"});
    }
    for (const auto& src : in) {
      const GraphNode* s = graph.find(src);
      if (s && s->is_connector()) {
        out.push_back({n.id, "connector-source", "incoming edge does not come from an object"});
      }
    }
    if (outs == 0) {
      out.push_back({n.id, "connector-outgoing", "explicit connector has no outgoing original edge"});
    } else if (in.empty() && outs < 2) {
      out.push_back({n.id, "connector-between-objects",
                     "connector without an incoming edge must reach at least two objects"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

bool structurally_equal(const DataGraph& a, const DataGraph& b) {
  if (a.nodes().size() != b.nodes().size() || a.edges().size() != b.edges().size()) return false;
  if (!(a.weight_policy() == b.weight_policy())) return false;
  for (const auto& na : a.nodes()) {
    const GraphNode* nb = b.find(na.id);
    if (!nb) return false;
    if (na.kind != nb->kind || na.type != nb->type || na.name != nb->name ||
        na.provenance != nb->provenance || !equivalent(na.properties, nb->properties)) {
      return false;
    }
  }
  auto edge_keys = [](const DataGraph& g) {
    std::vector<std::tuple<std::string, std::string, Orientation, EdgeRole, double>> keys;
    for (const auto& e : g.edges()) keys.emplace_back(e.from, e.to, e.orientation, e.role, e.weight);
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  return edge_keys(a) == edge_keys(b);
}

GraphStats compute_stats(const DataGraph& graph) {
  GraphStats s;
  for (const auto& n : graph.nodes()) (n.is_connector() ? s.connectors : s.objects)++;
  std::map<std::string, std::size_t> out_deg, in_deg;
  for (const auto& e : graph.edges()) {
    (e.is_original() ? s.original_edges : s.opposite_edges)++;
    ++s.edges_by_role[e.role];
    if (e.is_original()) {
      ++out_deg[e.from];
      ++in_deg[e.to];
    }
  }
  for (const auto& n : graph.nodes()) {
    ++s.out_degree_histogram[out_deg[n.id]];
    ++s.in_degree_histogram[in_deg[n.id]];
  }
  return s;
}

std::string summary_line(const GraphStats& s) {
  std::ostringstream os;
  os << "nodes: " << s.nodes() << " (objects " << s.objects << ", connectors " << s.connectors
     << "); edges: " << s.edges() << " (original " << s.original_edges << ", opposite "
     << s.opposite_edges << ")";
  return os.str();
}

}  // namespace ocpg
