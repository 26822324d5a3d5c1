#pragma once

#include <string>
#include <string_view>

#include "ocpg/graph.hpp"

namespace ocpg {

/// Graph document: {"nodes": [...], "edges": [...], "weight_policy": {...}}.
/// Output is deterministic (pretty-printed, input order preserved).
std::string serialize(const DataGraph& graph);

/// Parses a graph document. Rejects unknown fields, unknown kinds or roles,
/// duplicate ids, dangling endpoints and negative weights with
/// Error(BadDocument).
DataGraph deserialize(std::string_view text);

struct DotOptions {
  std::string graph_name = "data_graph";
  bool show_properties = false;  // list top-level properties under the label
};

/// Graphviz rendering. Objects are boxes, explicit connectors rounded boxes,
/// opposite edges dashed; nodes and edges are emitted in id order.
std::string to_dot(const DataGraph& graph, const DotOptions& options = {});

}  // namespace ocpg
