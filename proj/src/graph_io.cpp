#include "ocpg/graph_io.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ocpg/error.hpp"

namespace ocpg {

using nlohmann::json;

namespace {

json property_to_json(const PropertyNode& p) {
  json j = {{"name", p.name}};
  if (p.value) j["value"] = *p.value;
  if (!p.children.empty()) {
    json kids = json::array();
    for (const auto& c : p.children) kids.push_back(property_to_json(c));
    j["children"] = std::move(kids);
  }
  return j;
}

json policy_to_json(const WeightPolicy& w) {
  json j = {{"original_weight", w.original_weight}, {"opposite_weight", w.opposite_weight}};
  if (!w.overrides.empty()) {
    json o = json::object();
    for (const auto& [role, pair] : w.overrides) {
      o[std::string(to_string(role))] = {{"original", pair.first}, {"opposite", pair.second}};
    }
    j["overrides"] = std::move(o);
  }
  return j;
}

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::BadDocument, msg); }

void only_fields(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      bad("unknown field '" + key + "' in " + std::string(where));
    }
  }
}

std::string req_string(const json& j, const char* key, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    bad(std::string(where) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

double req_number(const json& j, const char* key, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    bad(std::string(where) + ": field '" + key + "' must be a number");
  }
  return it->get<double>();
}

PropertyNode property_from_json(const json& j) {
  only_fields(j, {"name", "value", "children"}, "property");
  PropertyNode p;
  p.name = req_string(j, "name", "property");
  if (j.contains("value")) p.value = req_string(j, "value", "property");
  if (j.contains("children")) {
    if (!j["children"].is_array()) bad("property children must be an array");
    for (const auto& c : j["children"]) p.children.push_back(property_from_json(c));
  }
  if (p.name.empty()) bad("property with empty name");
  if (!p.value && p.children.empty()) bad("property '" + p.name + "' has no value and no children");
  return p;
}

WeightPolicy policy_from_json(const json& j) {
  only_fields(j, {"original_weight", "opposite_weight", "overrides"}, "weight_policy");
  WeightPolicy w;
  w.original_weight = req_number(j, "original_weight", "weight_policy");
  w.opposite_weight = req_number(j, "opposite_weight", "weight_policy");
  if (j.contains("overrides")) {
    const json& o = j["overrides"];
    if (!o.is_object()) bad("weight_policy.overrides must be an object");
    for (const auto& [key, val] : o.items()) {
      auto role = parse_edge_role(key);
      if (!role) bad("unknown edge role '" + key + "' in weight_policy.overrides");
      only_fields(val, {"original", "opposite"}, "weight_policy override");
      w.overrides[*role] = {req_number(val, "original", "override"), req_number(val, "opposite", "override")};
    }
  }
  if (auto err = w.check()) bad("weight_policy: " + *err);
  return w;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

void property_lines(const PropertyNode& p, int depth, std::string& out) {
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
  out += dot_escape(p.name);
  if (p.value) {
    out += ": ";
    out += dot_escape(*p.value);
  }
  out += "\\l";
  for (const auto& c : p.children) property_lines(c, depth + 1, out);
}

}  // namespace

std::string serialize(const DataGraph& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes()) {
    json j = {{"id", n.id}, {"kind", to_string(n.kind)}, {"type", n.type}};
    if (n.name) j["name"] = *n.name;
    json props = json::array();
    for (const auto& p : n.properties) props.push_back(property_to_json(p));
    j["properties"] = std::move(props);
    if (n.provenance) j["provenance"] = *n.provenance;
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"orientation", to_string(e.orientation)},
                     {"role", to_string(e.role)},
                     {"weight", e.weight}});
  }
  json doc = {{"nodes", std::move(nodes)},
              {"edges", std::move(edges)},
              {"weight_policy", policy_to_json(graph.weight_policy())}};
  return doc.dump(2) + "\n";
}

DataGraph deserialize(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  only_fields(doc, {"nodes", "edges", "weight_policy"}, "graph document");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) bad("'nodes' must be an array");
  if (!doc.contains("edges") || !doc["edges"].is_array()) bad("'edges' must be an array");

  WeightPolicy policy;
  if (doc.contains("weight_policy")) policy = policy_from_json(doc["weight_policy"]);

  std::vector<GraphNode> nodes;
  std::set<std::string> ids;
  for (const auto& j : doc["nodes"]) {
    only_fields(j, {"id", "kind", "type", "name", "properties", "provenance"}, "node");
    GraphNode n;
    n.id = req_string(j, "id", "node");
    auto kind = parse_node_kind(req_string(j, "kind", "node " + n.id));
    if (!kind) bad("node '" + n.id + "': unknown kind '" + j["kind"].get<std::string>() + "'");
    n.kind = *kind;
    n.type = req_string(j, "type", "node " + n.id);
    if (j.contains("name")) n.name = req_string(j, "name", "node " + n.id);
    if (j.contains("properties")) {
      if (!j["properties"].is_array()) bad("node '" + n.id + "': properties must be an array");
      for (const auto& p : j["properties"]) n.properties.push_back(property_from_json(p));
    }
    if (j.contains("provenance")) n.provenance = req_string(j, "provenance", "node " + n.id);
    if (!ids.insert(n.id).second) bad("duplicate node id '" + n.id + "'");
    nodes.push_back(std::move(n));
  }

  std::vector<Edge> edges;
  for (const auto& j : doc["edges"]) {
    only_fields(j, {"from", "to", "orientation", "role", "weight"}, "edge");
    Edge e;
    e.from = req_string(j, "from", "edge");
    e.to = req_string(j, "to", "edge");
    const std::string where = "edge " + e.from + "->" + e.to;
    auto orientation = parse_orientation(req_string(j, "orientation", where));
    if (!orientation) bad(where + ": unknown orientation");
    e.orientation = *orientation;
    auto role = parse_edge_role(req_string(j, "role", where));
    if (!role) bad(where + ": unknown role '" + j["role"].get<std::string>() + "'");
    e.role = *role;
    e.weight = req_number(j, "weight", where);
    if (!(e.weight >= 0)) bad(where + ": negative weight");
    if (!ids.contains(e.from) || !ids.contains(e.to)) bad(where + ": dangling endpoint");
    edges.push_back(std::move(e));
  }
  return DataGraph(std::move(nodes), std::move(edges), std::move(policy));
}

std::string to_dot(const DataGraph& graph, const DotOptions& options) {
  std::vector<const GraphNode*> nodes;
  for (const auto& n : graph.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<std::size_t> order(graph.edges().size());
  std::iota(order.begin(), order.end(), 0);
  const auto edges = graph.edges();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Edge& x = edges[a];
    const Edge& y = edges[b];
    return std::tie(x.from, x.to, x.orientation, x.role) < std::tie(y.from, y.to, y.orientation, y.role);
  });

  std::ostringstream os;
  os << "digraph \"" << dot_escape(options.graph_name) << "\" {\n";
  for (const GraphNode* n : nodes) {
    std::string label;
    if (n->is_connector()) {
      label = n->type;
    } else {
      label = n->name ? *n->name + " (" + n->type + ")" : "(" + n->type + ")";
    }
    label = dot_escape(label);
    if (options.show_properties && !n->properties.empty()) {
      std::string lines;
      for (const auto& p : n->properties) property_lines(p, 1, lines);
      label += "\\l" + lines;
    }
    os << "  \"" << dot_escape(n->id) << "\" [shape=box"
       << (n->is_connector() ? ", style=rounded" : "") << ", label=\"" << label << "\"];\n";
  }
  for (std::size_t i : order) {
    const Edge& e = edges[i];
    os << "  \"" << dot_escape(e.from) << "\" -> \"" << dot_escape(e.to) << "\" [";
    if (e.orientation == Orientation::Opposite) os << "style=dashed, ";
    os << "label=\"" << to_string(e.role) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ocpg
