#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ocpg/error.hpp"
#include "ocpg/graph.hpp"
#include "ocpg/graph_io.hpp"
#include "ocpg/rdb.hpp"
#include "ocpg/rdf.hpp"
#include "ocpg/search.hpp"
#include "ocpg/xml.hpp"

namespace ocpg::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_artifact(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(Errc::Io, "error writing '" + path + "'");
}

// Values from the optional --config file. Command-line flags take precedence.
struct FileConfig {
  json j = json::object();

  static FileConfig load(const std::string& path) {
    FileConfig c;
    if (path.empty()) return c;
    try {
      c.j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw Error(Errc::InvalidConfig, path + ": " + e.what());
    }
    if (!c.j.is_object()) throw Error(Errc::InvalidConfig, path + ": config must be a JSON object");
    static const std::vector<std::string> known{
        "original_weight", "opposite_weight", "name_attributes", "synthesize_names", "dangling",
        "pcdata_attribute", "overrides",      "omit_root",       "dedup",            "inverse",
        "top",              "budget",         "name_predicates", "type_predicates"};
    for (const auto& [key, _] : c.j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw Error(Errc::InvalidConfig, path + ": unknown setting '" + key + "'");
      }
    }
    return c;
  }

  template <typename T>
  std::optional<T> get(const char* key) const {
    if (!j.contains(key)) return std::nullopt;
    try {
      return j.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(Errc::InvalidConfig, std::string("setting '") + key + "' has the wrong type");
    }
  }
};

template <typename T>
T pick(const CLI::Option* flag, const T& flag_value, const FileConfig& file, const char* key, T fallback) {
  if (flag && flag->count() > 0) return flag_value;
  if (auto v = file.get<T>(key)) return *v;
  return fallback;
}

DanglingPolicy parse_dangling(const std::string& s) {
  if (s == "fail") return DanglingPolicy::Fail;
  if (s == "skip" || s == "warn-skip") return DanglingPolicy::WarnSkip;
  throw Error(Errc::InvalidConfig, "dangling policy must be 'fail' or 'skip', got '" + s + "'");
}

struct BuildOptions {
  std::string out;
  std::string config;
  double original_weight = 1.0;
  double opposite_weight = 2.0;
  std::string dangling = "fail";
  CLI::Option* original_opt = nullptr;
  CLI::Option* opposite_opt = nullptr;
  CLI::Option* dangling_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out,-o", out, "Graph document path (default: standard output)");
    cmd->add_option("--config", config, "JSON settings file; flags win");
    original_opt = cmd->add_option("--original-weight", original_weight, "Weight of original edges");
    opposite_opt = cmd->add_option("--opposite-weight", opposite_weight, "Weight of opposite edges");
    dangling_opt = cmd->add_option("--dangling", dangling, "Dangling references: fail or skip")
                       ->check(CLI::IsMember({"fail", "skip"}));
  }

  WeightPolicy weights(const FileConfig& file) const {
    WeightPolicy w;
    w.original_weight = pick(original_opt, original_weight, file, "original_weight", 1.0);
    w.opposite_weight = pick(opposite_opt, opposite_weight, file, "opposite_weight", 2.0);
    if (auto err = w.check()) throw Error(Errc::InvalidConfig, *err);
    return w;
  }

  DanglingPolicy dangling_policy(const FileConfig& file) const {
    return parse_dangling(pick(dangling_opt, dangling, file, "dangling", std::string("fail")));
  }
};

NamingConfig naming(const FileConfig& file) {
  NamingConfig n;
  if (auto names = file.get<std::vector<std::string>>("name_attributes")) n.name_attributes = *names;
  return n;
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  err << "warnings: " << warnings.size() << "\n";
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

// Validates, writes and summarizes a freshly built graph.
int finish_build(const DataGraph& graph, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto violations = validate(graph);
  if (!violations.empty()) {
    err << "built graph violates " << violations.size() << " invariant(s):\n";
    for (const auto& v : violations) err << "  " << v.subject << ": " << v.rule << ": " << v.message << "\n";
    return kInvalidGraph;
  }
  write_artifact(out_path, serialize(graph), out);
  err << summary_line(compute_stats(graph)) << "\n";
  return kOk;
}

DataGraph load_graph(const std::string& path) { return deserialize(read_file(path)); }

int check_graph(const DataGraph& graph, std::ostream& err) {
  const auto violations = validate(graph);
  if (violations.empty()) return kOk;
  err << "graph violates " << violations.size() << " invariant(s):\n";
  for (const auto& v : violations) err << "  " << v.subject << ": " << v.rule << ": " << v.message << "\n";
  return kInvalidGraph;
}

std::string stats_table(const DataGraph& graph) {
  const GraphStats s = compute_stats(graph);
  std::ostringstream os;
  auto row = [&](const std::string& label, std::size_t n) {
    os << label << std::string(label.size() < 24 ? 24 - label.size() : 1, ' ') << n << "\n";
  };
  row("nodes", s.nodes());
  row("  objects", s.objects);
  row("  connectors", s.connectors);
  row("edges", s.edges());
  row("  original", s.original_edges);
  row("  opposite", s.opposite_edges);
  for (EdgeRole r : {EdgeRole::Hierarchical, EdgeRole::Reference, EdgeRole::ForeignKey, EdgeRole::RdfLink}) {
    auto it = s.edges_by_role.find(r);
    row("  role " + std::string(to_string(r)), it == s.edges_by_role.end() ? 0 : it->second);
  }
  os << "out-degree (original edges)\n";
  for (const auto& [degree, count] : s.out_degree_histogram) row("  " + std::to_string(degree), count);
  os << "in-degree (original edges)\n";
  for (const auto& [degree, count] : s.in_degree_histogram) row("  " + std::to_string(degree), count);
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Object-connector-property data graphs from relational, XML and RDF sources", "ocpg"};
  app.require_subcommand(1);

  // build-rdb
  auto* rdb_cmd = app.add_subcommand("build-rdb", "Build a data graph from a relational database");
  BuildOptions rdb_opts;
  std::string schema_path, data_path;
  bool synthesize = false;
  rdb_cmd->add_option("--schema", schema_path, "Schema descriptor (JSON)")->required();
  rdb_cmd->add_option("--data", data_path, "Directory of <relation>.csv files, or a JSON rows file")->required();
  auto* synth_opt = rdb_cmd->add_flag("--synthesize-names", synthesize, "Name unnamed objects from what they reference");
  rdb_opts.attach(rdb_cmd);

  // build-xml
  auto* xml_cmd = app.add_subcommand("build-xml", "Build a data graph from an XML document and its DTD");
  BuildOptions xml_opts;
  std::string doc_path, dtd_path, overrides_path, report_path, pcdata_attr = "text";
  bool omit_root = false;
  xml_cmd->add_option("--doc", doc_path, "XML document")->required();
  xml_cmd->add_option("--dtd", dtd_path, "External DTD (default: internal subset or SYSTEM id)");
  auto* overrides_opt = xml_cmd->add_option("--overrides", overrides_path, "Significance overrides (JSON)");
  auto* pcdata_opt = xml_cmd->add_option("--pcdata-attribute", pcdata_attr, "Attribute name for lifted text");
  auto* omit_opt = xml_cmd->add_flag("--omit-root", omit_root, "Drop a bare container root element");
  xml_cmd->add_option("--report", report_path, "Write the significance report here instead of standard error");
  xml_opts.attach(xml_cmd);

  // build-rdf
  auto* rdf_cmd = app.add_subcommand("build-rdf", "Build a data graph from N-Triples");
  BuildOptions rdf_opts;
  std::string triples_path;
  rdf_cmd->add_option("--triples", triples_path, "N-Triples file")->required();
  rdf_opts.attach(rdf_cmd);

  // query
  auto* query_cmd = app.add_subcommand("query", "Keyword search over a graph document");
  std::string graph_path, keywords, dedup = "types", query_out, query_config;
  std::size_t top = 10, budget = 2'000'000;
  std::vector<std::string> inverse;
  query_cmd->add_option("graph", graph_path, "Graph document")->required();
  query_cmd->add_option("--keywords,-k", keywords, "Comma-separated keywords")->required();
  auto* top_opt = query_cmd->add_option("--top", top, "Maximum number of answers (0 = all)");
  auto* dedup_opt = query_cmd->add_option("--dedup", dedup, "Duplicate elimination: edges or types")
                        ->check(CLI::IsMember({"edges", "types"}));
  auto* inverse_opt = query_cmd->add_option("--inverse", inverse, "Inverse connector types, a=b");
  auto* budget_opt = query_cmd->add_option("--budget", budget, "Partial trees explored before giving up");
  query_cmd->add_option("--out,-o", query_out, "Answer file (default: standard output)");
  query_cmd->add_option("--config", query_config, "JSON settings file; flags win");

  // export-dot / validate / stats
  auto* dot_cmd = app.add_subcommand("export-dot", "Render a graph document as Graphviz DOT");
  std::string dot_graph, dot_out;
  bool show_props = false;
  dot_cmd->add_option("graph", dot_graph, "Graph document")->required();
  dot_cmd->add_option("--out,-o", dot_out, "DOT file (default: standard output)");
  dot_cmd->add_flag("--show-properties", show_props, "List top-level properties in node labels");

  auto* validate_cmd = app.add_subcommand("validate", "Check a graph document against the model invariants");
  std::string validate_graph;
  validate_cmd->add_option("graph", validate_graph, "Graph document")->required();

  auto* stats_cmd = app.add_subcommand("stats", "Counts by kind, role and orientation, and degree histograms");
  std::string stats_graph;
  stats_cmd->add_option("graph", stats_graph, "Graph document")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (rdb_cmd->parsed()) {
      const FileConfig file = FileConfig::load(rdb_opts.config);
      rdb::BuildConfig cfg;
      cfg.naming = naming(file);
      cfg.weights = rdb_opts.weights(file);
      cfg.dangling = rdb_opts.dangling_policy(file);
      cfg.synthesize_names = pick(synth_opt, synthesize, file, "synthesize_names", false);
      rdb::Schema schema;
      try {
        schema = rdb::parse_schema(read_file(schema_path));
      } catch (const Error& e) {
        if (e.code() == Errc::Io) throw;
        throw Error(e.code(), schema_path + ": " + e.detail());
      }
      const rdb::Database db = rdb::load_database(std::move(schema), data_path);
      const rdb::BuildResult result = rdb::build_graph(db, cfg);
      const int code = finish_build(result.graph, rdb_opts.out, out, err);
      if (code != kOk) return code;
      err << "relations:";
      for (const auto& [rel, c] : result.cases) err << " " << rel << "=" << rdb::to_string(c);
      err << "\n";
      report_warnings(result.warnings, err);
      return kOk;
    }

    if (xml_cmd->parsed()) {
      const FileConfig file = FileConfig::load(xml_opts.config);
      xml::BuildConfig cfg;
      cfg.naming = naming(file);
      cfg.weights = xml_opts.weights(file);
      cfg.dangling = xml_opts.dangling_policy(file);
      cfg.pcdata_attribute = pick(pcdata_opt, pcdata_attr, file, "pcdata_attribute", std::string("text"));
      cfg.omit_root = pick(omit_opt, omit_root, file, "omit_root", false);

      const xml::Document doc = xml::parse_document(read_file(doc_path));
      std::string dtd_text;
      if (!dtd_path.empty()) {
        dtd_text = read_file(dtd_path);
      } else if (doc.internal_subset) {
        dtd_text = *doc.internal_subset;
      } else if (doc.system_id) {
        dtd_text = read_file((fs::path(doc_path).parent_path() / *doc.system_id).string());
      } else {
        throw Error(Errc::Io, "'" + doc_path + "' names no DTD; pass --dtd");
      }
      const xml::Dtd dtd = xml::parse_dtd(dtd_text);

      std::vector<xml::SignificanceOverride> overrides;
      const std::string ov_path = pick(overrides_opt, overrides_path, file, "overrides", std::string());
      if (!ov_path.empty()) overrides = xml::parse_overrides(read_file(ov_path));

      const xml::TransformResult result = xml::transform(doc, dtd, overrides, cfg);
      const int code = finish_build(result.graph, xml_opts.out, out, err);
      if (code != kOk) return code;
      const std::string report = xml::significance_report(result.significance);
      if (report_path.empty()) {
        err << report;
      } else {
        write_artifact(report_path, report, out);
      }
      report_warnings(result.warnings, err);
      return kOk;
    }

    if (rdf_cmd->parsed()) {
      const FileConfig file = FileConfig::load(rdf_opts.config);
      rdf::FoldConfig cfg;
      cfg.weights = rdf_opts.weights(file);
      if (auto p = file.get<std::vector<std::string>>("name_predicates")) cfg.name_predicates = *p;
      if (auto p = file.get<std::vector<std::string>>("type_predicates")) cfg.type_predicates = *p;
      std::vector<rdf::LineIssue> issues;
      auto triples = rdf::parse_ntriples(read_file(triples_path), &issues);
      if (!issues.empty()) {
        for (const auto& i : issues) err << triples_path << ":" << i.line << ": " << i.message << "\n";
        err << issues.size() << " line(s) could not be parsed\n";
        return kInputError;
      }
      std::vector<std::string> warnings;
      const DataGraph graph = rdf::fold_triples(std::move(triples), cfg, &warnings);
      const int code = finish_build(graph, rdf_opts.out, out, err);
      if (code != kOk) return code;
      report_warnings(warnings, err);
      return kOk;
    }

    if (query_cmd->parsed()) {
      const FileConfig file = FileConfig::load(query_config);
      const DataGraph graph = load_graph(graph_path);
      if (int code = check_graph(graph, err); code != kOk) return code;
      search::SearchOptions opts;
      opts.limit = pick(top_opt, top, file, "top", std::size_t{10});
      opts.budget = pick(budget_opt, budget, file, "budget", std::size_t{2'000'000});
      const std::string mode = pick(dedup_opt, dedup, file, "dedup", std::string("types"));
      if (mode != "edges" && mode != "types") throw Error(Errc::InvalidConfig, "dedup must be 'edges' or 'types'");
      opts.dedup.mode = mode == "edges" ? search::DedupMode::ByEdgeSet : search::DedupMode::ByConnectorType;
      for (const auto& pair : pick(inverse_opt, inverse, file, "inverse", std::vector<std::string>{})) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) throw Error(Errc::InvalidConfig, "inverse pair '" + pair + "' must look like a=b");
        opts.dedup.add_inverse(pair.substr(0, eq), pair.substr(eq + 1));
      }
      const search::Query query = search::Query::parse(keywords);
      search::AnswerStream stream(graph, query, opts);
      std::string lines;
      std::size_t rank = 0;
      while (auto answer = stream.next()) lines += search::answer_json(*answer, ++rank, graph) + "\n";
      write_artifact(query_out, lines, out);
      err << "answers: " << rank << " (explored " << stream.explored() << " partial trees)\n";
      return kOk;
    }

    if (dot_cmd->parsed()) {
      DotOptions opts;
      opts.show_properties = show_props;
      write_artifact(dot_out, to_dot(load_graph(dot_graph), opts), out);
      return kOk;
    }

    if (validate_cmd->parsed()) {
      const DataGraph graph = load_graph(validate_graph);
      const auto violations = validate(graph);
      for (const auto& v : violations) out << v.subject << "\t" << v.rule << "\t" << v.message << "\n";
      err << (violations.empty() ? "valid" : std::to_string(violations.size()) + " violation(s)") << "\n";
      return violations.empty() ? kOk : kInvalidGraph;
    }

    if (stats_cmd->parsed()) {
      out << stats_table(load_graph(stats_graph));
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::GraphTooLarge ? kBudgetExceeded : kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace ocpg::cli
