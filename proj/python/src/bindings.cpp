#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ocpg/error.hpp"
#include "ocpg/graph.hpp"
#include "ocpg/graph_io.hpp"
#include "ocpg/rdb.hpp"
#include "ocpg/rdf.hpp"
#include "ocpg/search.hpp"
#include "ocpg/xml.hpp"

namespace py = pybind11;
using namespace ocpg;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DanglingPolicy dangling_policy(bool skip) { return skip ? DanglingPolicy::WarnSkip : DanglingPolicy::Fail; }

py::dict stats_dict(const DataGraph& g) {
  auto st = compute_stats(g);
  py::dict d;
  d["objects"] = st.objects;
  d["connectors"] = st.connectors;
  d["original_edges"] = st.original_edges;
  d["opposite_edges"] = st.opposite_edges;
  d["summary"] = summary_line(st);
  return d;
}

py::list run_search(const DataGraph& g, const std::vector<std::string>& keywords, std::size_t limit,
                const std::string& dedup, const std::map<std::string, std::string>& inverse, std::size_t budget) {
  search::SearchOptions opts;
  opts.limit = limit;
  opts.budget = budget;
  if (dedup == "edges") {
    opts.dedup.mode = search::DedupMode::ByEdgeSet;
  } else if (dedup != "types") {
    throw Error(Errc::InvalidConfig, "dedup must be 'edges' or 'types'");
  }
  for (const auto& [a, b] : inverse) opts.dedup.add_inverse(a, b);
  auto answers = search::enumerate_answers(g, search::Query(keywords), opts);
  auto loads = py::module_::import("json").attr("loads");
  py::list out;
  for (std::size_t i = 0; i < answers.size(); ++i) out.append(loads(search::answer_json(answers[i], i + 1, g)));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OCP data graph core";

  py::register_exception<Error>(m, "Error");

  py::class_<DataGraph>(m, "Graph")
      .def_static("from_json", [](const std::string& text) { return deserialize(text); })
      .def_static("load", [](const std::string& path) { return deserialize(slurp(path)); })
      .def("to_json", [](const DataGraph& g) { return serialize(g); })
      .def("to_dot", [](const DataGraph& g) { return to_dot(g); })
      .def("stats", &stats_dict)
      .def("validate",
           [](const DataGraph& g) {
             std::vector<std::tuple<std::string, std::string, std::string>> out;
             for (const auto& v : validate(g)) out.emplace_back(v.subject, v.rule, v.message);
             return out;
           })
      .def("with_opposite_edges", [](const DataGraph& g) { return add_opposite_edges(g); })
      .def("node_ids",
           [](const DataGraph& g) {
             std::vector<std::string> ids;
             for (const auto& n : g.nodes()) ids.push_back(n.id);
             return ids;
           })
      .def("__len__", [](const DataGraph& g) { return g.nodes().size(); })
      .def("__eq__", [](const DataGraph& a, const DataGraph& b) { return structurally_equal(a, b); })
      .def("search", &run_search, py::arg("keywords"), py::arg("limit") = 10, py::arg("dedup") = "types",
           py::arg("inverse") = std::map<std::string, std::string>{}, py::arg("budget") = 2'000'000);

  m.def(
      "build_rdb",
      [](const std::string& schema, const std::string& data, bool synthesize_names, bool skip_dangling) {
        rdb::BuildConfig cfg;
        cfg.synthesize_names = synthesize_names;
        cfg.dangling = dangling_policy(skip_dangling);
        auto result = rdb::build_graph(rdb::load_database(rdb::parse_schema(slurp(schema)), data), cfg);
        return py::make_tuple(std::move(result.graph), result.warnings);
      },
      py::arg("schema"), py::arg("data"), py::arg("synthesize_names") = false, py::arg("skip_dangling") = false,
      "Builds a graph from a schema file and a data directory or file. Returns (graph, warnings).");

  m.def(
      "build_xml",
      [](const std::string& document, const std::string& dtd, const std::string& overrides, bool omit_root,
         bool skip_dangling) {
        xml::BuildConfig cfg;
        cfg.omit_root = omit_root;
        cfg.dangling = dangling_policy(skip_dangling);
        auto ov = overrides.empty() ? std::vector<xml::SignificanceOverride>{} : xml::parse_overrides(overrides);
        auto result = xml::transform(xml::parse_document(document), xml::parse_dtd(dtd), ov, cfg);
        return py::make_tuple(std::move(result.graph), result.warnings);
      },
      py::arg("document"), py::arg("dtd"), py::arg("overrides") = "", py::arg("omit_root") = false,
      py::arg("skip_dangling") = false,
      "Builds a graph from XML and DTD text (overrides as JSON text). Returns (graph, warnings).");

  m.def(
      "build_rdf",
      [](const std::string& text) {
        std::vector<rdf::LineIssue> issues;
        auto triples = rdf::parse_ntriples(text, &issues);
        std::vector<std::string> warnings;
        for (const auto& i : issues) warnings.push_back("line " + std::to_string(i.line) + ": " + i.message);
        auto g = rdf::fold_triples(std::move(triples), {}, &warnings);
        return py::make_tuple(std::move(g), warnings);
      },
      py::arg("ntriples"), "Folds N-Triples text into a graph. Returns (graph, warnings).");
}
