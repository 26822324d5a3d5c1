#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocpg/graph.hpp"
#include "ocpg/naming.hpp"

// Relational database -> OCP data graph.
//
// Relations fall into four cases by how their primary key relates to their
// foreign keys:
//   Entity        - the key contains no foreign key
//   WeakEntity    - the key contains one foreign key plus more (or that key
//                   is significantly named)
//   Relationship  - the key combines two or more foreign keys
//   Auxiliary     - the single, insignificantly named foreign key is the key;
//                   rows fold into the referenced object as nested properties
namespace ocpg::rdb {

struct ForeignKey {
  std::vector<std::string> attrs;
  std::string target;
  // Target attributes matched positionally against attrs; empty means the
  // target's primary key in declared order.
  std::vector<std::string> target_key;
};

struct Relation {
  std::string name;
  std::vector<std::string> attributes;
  std::vector<std::string> primary_key;
  std::vector<ForeignKey> foreign_keys;

  bool has_attribute(std::string_view a) const;
  bool in_foreign_key(std::string_view a) const;
};

class Schema {
 public:
  Schema() = default;
  /// Checks the schema invariants; throws Error(UnknownTarget) or
  /// Error(InvalidSchema).
  explicit Schema(std::vector<Relation> relations);

  const std::vector<Relation>& relations() const { return relations_; }
  const Relation* find(std::string_view name) const;

 private:
  std::vector<Relation> relations_;
};

/// Schema descriptor JSON: {"relations": [{name, attributes, primary_key,
/// foreign_keys: [{attrs, target, target_key?}]}]}.
Schema parse_schema(std::string_view json_text);

using Row = std::map<std::string, std::string>;

struct Database {
  Schema schema;
  std::map<std::string, std::vector<Row>> rows;  // relation -> rows in source order
};

/// Parses RFC 4180 CSV (header row first). Returns header + records.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;
};
CsvTable parse_csv(std::string_view text);

/// Loads <relation>.csv files from a directory, or a JSON object
/// {relation: [{attr: value}]} from a file. CSV files naming undeclared
/// relations raise Error(UnknownRelation).
Database load_database(Schema schema, const std::filesystem::path& data);

/// Inline JSON rows, same shape as the JSON data file.
Database database_from_json(Schema schema, std::string_view json_text);

enum class RelationCase { Entity, WeakEntity, Relationship, Auxiliary };

std::string_view to_string(RelationCase c);

/// Throws Error(UnknownTarget) when the target relation is not declared.
Significance fk_significance(const ForeignKey& fk, const Schema& schema);

RelationCase classify_relation(const Relation& relation, const Schema& schema);

struct BuildConfig {
  NamingConfig naming;
  WeightPolicy weights;
  bool synthesize_names = false;
  DanglingPolicy dangling = DanglingPolicy::Fail;
};

struct BuildResult {
  DataGraph graph;
  std::map<std::string, RelationCase> cases;
  std::vector<std::string> warnings;
};

BuildResult build_graph(const Database& db, const BuildConfig& config = {});

}  // namespace ocpg::rdb
