#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ocpg/graph_io.hpp"

namespace ocpg::testing {

std::filesystem::path fixture(const std::string& relative) { return std::filesystem::path(OCPG_FIXTURES) / relative; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DataGraph load_graph_fixture(const std::string& relative) { return deserialize(read_text(fixture(relative))); }

rdb::BuildResult build_rdb_fixture(const std::string& schema, const std::string& data,
                                   const rdb::BuildConfig& config) {
  auto db = rdb::load_database(rdb::parse_schema(read_text(fixture(schema))), fixture(data));
  return rdb::build_graph(db, config);
}

xml::TransformResult build_xml_fixture(const std::string& doc, const std::string& overrides, bool omit_root) {
  const auto doc_path = fixture(doc);
  auto document = xml::parse_document(read_text(doc_path));
  if (!document.system_id) throw std::runtime_error(doc + " has no SYSTEM id");
  auto dtd = xml::parse_dtd(read_text(doc_path.parent_path() / *document.system_id));
  std::vector<xml::SignificanceOverride> ov;
  if (!overrides.empty()) ov = xml::parse_overrides(read_text(fixture(overrides)));
  xml::BuildConfig config;
  config.omit_root = omit_root;
  return xml::transform(document, dtd, ov, config);
}

DataGraph originals_only(const DataGraph& graph) {
  std::vector<GraphNode> nodes(graph.nodes().begin(), graph.nodes().end());
  std::vector<Edge> edges;
  for (const auto& e : graph.edges()) {
    if (e.is_original()) edges.push_back(e);
  }
  return DataGraph(std::move(nodes), std::move(edges), graph.weight_policy());
}

}  // namespace ocpg::testing
