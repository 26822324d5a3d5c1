#include "ocpg/rdb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ocpg/error.hpp"

namespace ocpg::rdb {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Key values joined with '|'; '|' and '\' inside values are escaped.
std::string key_string(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += '|';
    for (char c : values[i]) {
      if (c == '|' || c == '\\') out += '\\';
      out += c;
    }
  }
  return out;
}

std::vector<std::string> string_list(const json& j, std::string_view where) {
  if (!j.is_array()) throw Error(Errc::InvalidSchema, std::string(where) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(Errc::InvalidSchema, std::string(where) + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw Error(Errc::InvalidSchema, std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(Errc::InvalidSchema, "unknown field '" + key + "' in " + std::string(where));
    }
  }
}

std::string cell_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema

bool Relation::has_attribute(std::string_view a) const {
  return std::find(attributes.begin(), attributes.end(), a) != attributes.end();
}

bool Relation::in_foreign_key(std::string_view a) const {
  for (const auto& fk : foreign_keys) {
    if (std::find(fk.attrs.begin(), fk.attrs.end(), a) != fk.attrs.end()) return true;
  }
  return false;
}

Schema::Schema(std::vector<Relation> relations) : relations_(std::move(relations)) {
  std::set<std::string> names;
  for (const auto& r : relations_) {
    if (r.name.empty()) throw Error(Errc::InvalidSchema, "relation with empty name");
    if (!names.insert(r.name).second) throw Error(Errc::InvalidSchema, "duplicate relation '" + r.name + "'");
  }
  for (auto& r : relations_) {
    std::set<std::string> attrs(r.attributes.begin(), r.attributes.end());
    if (attrs.size() != r.attributes.size()) {
      throw Error(Errc::InvalidSchema, r.name + ": duplicate attribute names");
    }
    if (r.primary_key.empty()) throw Error(Errc::InvalidSchema, r.name + ": empty primary key");
    for (const auto& a : r.primary_key) {
      if (!attrs.contains(a)) {
        throw Error(Errc::InvalidSchema, r.name + ": primary-key attribute '" + a + "' is not an attribute");
      }
    }
    std::set<std::set<std::string>> seen;
    for (auto& fk : r.foreign_keys) {
      if (fk.attrs.empty()) throw Error(Errc::InvalidSchema, r.name + ": foreign key without attributes");
      for (const auto& a : fk.attrs) {
        if (!attrs.contains(a)) {
          throw Error(Errc::InvalidSchema, r.name + ": foreign-key attribute '" + a + "' is not an attribute");
        }
      }
      if (!seen.insert(std::set<std::string>(fk.attrs.begin(), fk.attrs.end())).second) {
        throw Error(Errc::InvalidSchema, r.name + ": two foreign keys over the same attributes");
      }
      const Relation* target = find(fk.target);
      if (!target) {
        throw Error(Errc::UnknownTarget,
                    "relation '" + r.name + "' has a foreign key (" + join(fk.attrs, ",") +
                        ") to undeclared relation '" + fk.target + "'");
      }
      if (fk.target_key.empty()) fk.target_key = target->primary_key;
      std::vector<std::string> a = fk.target_key, b = target->primary_key;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (fk.target_key.size() != fk.attrs.size() || a != b) {
        throw Error(Errc::InvalidSchema, r.name + ": foreign key (" + join(fk.attrs, ",") +
                                             ") must reference the full primary key of '" + fk.target + "'");
      }
    }
  }
}

const Relation* Schema::find(std::string_view name) const {
  for (const auto& r : relations_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

Schema parse_schema(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadDocument, std::string("schema descriptor: ") + e.what());
  }
  reject_unknown(doc, {"relations"}, "schema descriptor");
  if (!doc.contains("relations")) throw Error(Errc::InvalidSchema, "schema descriptor lacks 'relations'");
  if (!doc["relations"].is_array()) throw Error(Errc::InvalidSchema, "'relations' must be an array");
  std::vector<Relation> relations;
  for (const auto& jr : doc["relations"]) {
    reject_unknown(jr, {"name", "attributes", "primary_key", "foreign_keys"}, "relation");
    Relation r;
    if (!jr.contains("name") || !jr["name"].is_string()) throw Error(Errc::InvalidSchema, "relation without a name");
    r.name = jr["name"].get<std::string>();
    r.attributes = string_list(jr.value("attributes", json::array()), r.name + ".attributes");
    r.primary_key = string_list(jr.value("primary_key", json::array()), r.name + ".primary_key");
    for (const auto& jf : jr.value("foreign_keys", json::array())) {
      reject_unknown(jf, {"attrs", "target", "target_key"}, r.name + " foreign key");
      ForeignKey fk;
      fk.attrs = string_list(jf.value("attrs", json::array()), r.name + " foreign key attrs");
      if (!jf.contains("target") || !jf["target"].is_string()) {
        throw Error(Errc::InvalidSchema, r.name + ": foreign key without target");
      }
      fk.target = jf["target"].get<std::string>();
      if (jf.contains("target_key")) fk.target_key = string_list(jf["target_key"], r.name + " target_key");
      r.foreign_keys.push_back(std::move(fk));
    }
    relations.push_back(std::move(r));
  }
  return Schema(std::move(relations));
}

// ---------------------------------------------------------------------------
// Row data

CsvTable parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw Error(Errc::BadDocument, "CSV line " + std::to_string(line) + ": stray quote");
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw Error(Errc::BadDocument, "CSV: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  CsvTable table;
  if (rows.empty()) return table;
  table.header = std::move(rows.front());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != table.header.size()) {
      throw Error(Errc::BadDocument, "CSV record " + std::to_string(i) + " has " +
                                         std::to_string(rows[i].size()) + " fields, header has " +
                                         std::to_string(table.header.size()));
    }
    table.records.push_back(std::move(rows[i]));
  }
  return table;
}

Database database_from_json(Schema schema, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadDocument, std::string("row data: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::BadDocument, "row data must be an object keyed by relation");
  Database db{std::move(schema), {}};
  for (const auto& [rel, rows] : doc.items()) {
    if (!db.schema.find(rel)) throw Error(Errc::UnknownRelation, "rows given for undeclared relation '" + rel + "'");
    if (!rows.is_array()) throw Error(Errc::BadDocument, "rows of '" + rel + "' must be an array");
    auto& out = db.rows[rel];
    for (const auto& jrow : rows) {
      if (!jrow.is_object()) throw Error(Errc::BadDocument, "row of '" + rel + "' must be an object");
      Row row;
      for (const auto& [attr, value] : jrow.items()) row[attr] = cell_to_string(value);
      out.push_back(std::move(row));
    }
  }
  return db;
}

Database load_database(Schema schema, const std::filesystem::path& data) {
  namespace fs = std::filesystem;
  if (!fs::exists(data)) throw Error(Errc::Io, "data path '" + data.string() + "' does not exist");
  if (!fs::is_directory(data)) return database_from_json(std::move(schema), read_file(data));

  Database db{std::move(schema), {}};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(data)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const std::string rel = file.stem().string();
    if (!db.schema.find(rel)) {
      throw Error(Errc::UnknownRelation, "'" + file.string() + "' has no relation '" + rel + "' in the schema");
    }
    CsvTable table;
    try {
      table = parse_csv(read_file(file));
    } catch (const Error& e) {
      throw Error(e.code(), file.string() + ": " + e.detail());
    }
    auto& out = db.rows[rel];
    for (const auto& rec : table.records) {
      Row row;
      for (std::size_t i = 0; i < rec.size(); ++i) row[table.header[i]] = rec[i];
      out.push_back(std::move(row));
    }
  }
  return db;
}

// ---------------------------------------------------------------------------
// Classification

std::string_view to_string(RelationCase c) {
  switch (c) {
    case RelationCase::Entity: return "entity";
    case RelationCase::WeakEntity: return "weak-entity";
    case RelationCase::Relationship: return "relationship";
    case RelationCase::Auxiliary: return "auxiliary";
  }
  return "?";
}

Significance fk_significance(const ForeignKey& fk, const Schema& schema) {
  const Relation* target = schema.find(fk.target);
  if (!target) throw Error(Errc::UnknownTarget, "foreign key to undeclared relation '" + fk.target + "'");
  std::set<std::string> p;
  for (const auto& a : target->primary_key) p.insert(normalize_attr_name(a));
  p.insert(normalize_attr_name(target->name));
  for (const auto& a : fk.attrs) {
    if (!p.contains(normalize_attr_name(a))) return Significance::Significant;
  }
  return Significance::Insignificant;
}

RelationCase classify_relation(const Relation& relation, const Schema& schema) {
  const std::set<std::string> pk(relation.primary_key.begin(), relation.primary_key.end());
  std::vector<const ForeignKey*> in_key;
  for (const auto& fk : relation.foreign_keys) {
    if (std::all_of(fk.attrs.begin(), fk.attrs.end(), [&](const auto& a) { return pk.contains(a); })) {
      in_key.push_back(&fk);
    }
  }
  if (in_key.empty()) return RelationCase::Entity;
  if (in_key.size() >= 2) return RelationCase::Relationship;
  const ForeignKey& f = *in_key.front();
  const bool equals_key = std::set<std::string>(f.attrs.begin(), f.attrs.end()) == pk;
  if (relation.foreign_keys.size() == 1 && equals_key &&
      fk_significance(f, schema) == Significance::Insignificant) {
    return RelationCase::Auxiliary;
  }
  return RelationCase::WeakEntity;
}

// ---------------------------------------------------------------------------
// Graph construction

namespace {

struct RowRef {
  const Relation* relation;
  const Row* row;
  std::size_t index;  // 1-based position in the relation's rows
  std::string node_id;
};

class Builder {
 public:
  Builder(const Database& db, const BuildConfig& config)
      : db_(db), config_(config), graph_(config.weights) {}

  BuildResult run() {
    check_rows();
    classify();
    index_rows();
    create_nodes();
    fold_auxiliary_rows();
    create_edges();
    if (config_.synthesize_names) synthesize_names();
    BuildResult result{add_opposite_edges(std::move(graph_).build()), std::move(cases_),
                       std::move(warnings_)};
    return result;
  }

 private:
  void check_rows() {
    for (const auto& [rel, rows] : db_.rows) {
      const Relation* r = db_.schema.find(rel);
      if (!r) throw Error(Errc::UnknownRelation, "rows given for undeclared relation '" + rel + "'");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& row = rows[i];
        for (const auto& a : r->attributes) {
          if (!row.contains(a)) {
            throw Error(Errc::InvalidRow, rel + " row " + std::to_string(i + 1) + ": missing attribute '" + a + "'");
          }
        }
        for (const auto& [a, _] : row) {
          if (!r->has_attribute(a)) {
            throw Error(Errc::InvalidRow, rel + " row " + std::to_string(i + 1) + ": unknown attribute '" + a + "'");
          }
        }
      }
    }
  }

  void classify() {
    std::set<std::string> referenced;
    for (const auto& r : db_.schema.relations()) {
      for (const auto& fk : r.foreign_keys) {
        if (fk.target != r.name) referenced.insert(fk.target);
      }
    }
    for (const auto& r : db_.schema.relations()) {
      RelationCase c = classify_relation(r, db_.schema);
      cases_[r.name] = c;
      if (c == RelationCase::Auxiliary && referenced.contains(r.name)) {
        warnings_.push_back(r.name + ": auxiliary relation is referenced by another relation; kept as objects");
        as_object_.insert(r.name);
      }
      if (c == RelationCase::Relationship) {
        bool all_insignificant = std::all_of(r.foreign_keys.begin(), r.foreign_keys.end(), [&](const auto& fk) {
          return fk_significance(fk, db_.schema) == Significance::Insignificant;
        });
        if (all_insignificant && !referenced.contains(r.name)) connector_relations_.insert(r.name);
      }
    }
  }

  bool makes_nodes(const Relation& r) const {
    return cases_.at(r.name) != RelationCase::Auxiliary || as_object_.contains(r.name);
  }

  void index_rows() {
    for (const auto& r : db_.schema.relations()) {
      auto it = db_.rows.find(r.name);
      if (it == db_.rows.end()) continue;
      auto& index = keys_[r.name];
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        const Row& row = it->second[i];
        std::vector<std::string> key;
        for (const auto& a : r.primary_key) key.push_back(row.at(a));
        std::string ks = key_string(key);
        if (!index.emplace(ks, i).second) {
          throw Error(Errc::DuplicateKey, r.name + " row " + std::to_string(i + 1) +
                                              ": duplicate primary key (" + ks + ")");
        }
        refs_.push_back(RowRef{&r, &row, i + 1, r.name + "/" + ks});
      }
    }
  }

  void create_nodes() {
    for (const auto& ref : refs_) {
      const Relation& r = *ref.relation;
      if (!makes_nodes(r)) continue;
      GraphNode node;
      node.id = ref.node_id;
      node.type = r.name;
      node.kind = connector_relations_.contains(r.name) ? NodeKind::Connector : NodeKind::Object;
      node.properties = plain_properties(r, *ref.row);
      node.provenance = r.name + " row " + std::to_string(ref.index);
      if (node.kind == NodeKind::Object) node.name = choose_object_name(node.properties, config_.naming);
      graph_.add_node(std::move(node));
    }
  }

  std::vector<PropertyNode> plain_properties(const Relation& r, const Row& row) const {
    std::vector<PropertyNode> props;
    for (const auto& a : r.attributes) {
      if (r.in_foreign_key(a)) continue;
      const std::string& v = row.at(a);
      if (v.empty()) continue;
      props.push_back(PropertyNode::leaf(a, v));
    }
    return props;
  }

  // Resolves t[F] to the referenced node id; nullopt for NULL or dangling.
  std::optional<std::string> resolve(const RowRef& ref, const ForeignKey& fk) {
    const Relation& target = *db_.schema.find(fk.target);
    std::vector<std::string> key;
    for (const auto& pk_attr : target.primary_key) {
      auto pos = std::find(fk.target_key.begin(), fk.target_key.end(), pk_attr) - fk.target_key.begin();
      key.push_back(ref.row->at(fk.attrs[static_cast<std::size_t>(pos)]));
    }
    const std::string where = ref.relation->name + " row " + std::to_string(ref.index) + " foreign key (" +
                              join(fk.attrs, ",") + ")";
    if (std::any_of(key.begin(), key.end(), [](const auto& v) { return v.empty(); })) {
      warnings_.push_back(where + ": NULL value, no edge created");
      return std::nullopt;
    }
    const std::string ks = key_string(key);
    auto& index = keys_[target.name];
    if (!index.contains(ks)) {
      std::string msg = where + " -> " + target.name + "(" + ks + ") matches no row";
      if (config_.dangling == DanglingPolicy::Fail) throw Error(Errc::DanglingReference, msg);
      warnings_.push_back(msg + "; skipped");
      return std::nullopt;
    }
    return target.name + "/" + ks;
  }

  void fold_auxiliary_rows() {
    for (const auto& ref : refs_) {
      const Relation& r = *ref.relation;
      if (makes_nodes(r)) continue;
      const ForeignKey& fk = r.foreign_keys.front();
      auto target = resolve(ref, fk);
      if (!target) continue;
      GraphNode* owner = graph_.node(*target);
      PropertyNode prop;
      prop.name = r.name;
      prop.children = plain_properties(r, *ref.row);
      if (prop.children.empty()) prop.value = "";
      owner->properties.push_back(std::move(prop));
    }
  }

  void create_edges() {
    for (const auto& ref : refs_) {
      const Relation& r = *ref.relation;
      if (!makes_nodes(r)) continue;
      for (const auto& fk : r.foreign_keys) {
        auto target = resolve(ref, fk);
        if (!target) continue;
        referenced_by_[ref.node_id].push_back(*target);
        if (fk_significance(fk, db_.schema) == Significance::Insignificant) {
          graph_.connect(ref.node_id, *target, EdgeRole::ForeignKey);
          continue;
        }
        GraphNode conn;
        conn.id = ref.node_id + "#" + join(fk.attrs, ",");
        conn.kind = NodeKind::Connector;
        conn.type = join(fk.attrs, "_");
        conn.provenance = r.name + " row " + std::to_string(ref.index) + " foreign key (" + join(fk.attrs, ",") + ")";
        graph_.add_node(std::move(conn));
        graph_.connect(ref.node_id, ref.node_id + "#" + join(fk.attrs, ","), EdgeRole::ForeignKey);
        graph_.connect(ref.node_id + "#" + join(fk.attrs, ","), *target, EdgeRole::ForeignKey);
      }
    }
  }

  void synthesize_names() {
    for (const auto& ref : refs_) {
      if (cases_.at(ref.relation->name) != RelationCase::Relationship) continue;
      GraphNode* node = graph_.node(ref.node_id);
      if (!node || node->is_connector() || node->name) continue;
      std::vector<std::string> parts;
      for (const auto& target : referenced_by_[ref.node_id]) {
        const GraphNode* t = graph_.node(target);
        parts.push_back(t && t->name ? *t->name : target.substr(target.find('/') + 1));
      }
      if (!parts.empty()) node->name = join(parts, "/");
    }
  }

  const Database& db_;
  const BuildConfig& config_;
  GraphBuilder graph_;
  std::map<std::string, RelationCase> cases_;
  std::set<std::string> as_object_;
  std::set<std::string> connector_relations_;
  std::map<std::string, std::map<std::string, std::size_t>> keys_;
  std::vector<RowRef> refs_;
  std::map<std::string, std::vector<std::string>> referenced_by_;
  std::vector<std::string> warnings_;
};

}  // namespace

BuildResult build_graph(const Database& db, const BuildConfig& config) {
  if (auto err = config.weights.check()) throw Error(Errc::InvalidConfig, *err);
  return Builder(db, config).run();
}

}  // namespace ocpg::rdb
