#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "ocpg/error.hpp"
#include "ocpg/graph_io.hpp"
#include "ocpg/rdb.hpp"

using namespace ocpg;
using namespace ocpg::rdb;

namespace {

Schema student_schema() {
  return Schema({
      {"student", {"id", "name"}, {"id"}, {}},
      {"exam", {"student", "grader", "course", "grade"}, {"student", "course"},
       {{{"student"}, "student", {}}, {{"grader"}, "student", {}}}},
  });
}

template <class F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return Errc::Io;
}

std::size_t count_edges(const DataGraph& g, Orientation o) {
  return static_cast<std::size_t>(
      std::count_if(g.edges().begin(), g.edges().end(), [&](const Edge& e) { return e.orientation == o; }));
}

bool has_original(const DataGraph& g, const std::string& from, const std::string& to) {
  return std::any_of(g.edges().begin(), g.edges().end(),
                     [&](const Edge& e) { return e.is_original() && e.from == from && e.to == to; });
}

}  // namespace

TEST_CASE("fk_significance") {
  auto s = student_schema();
  CHECK(fk_significance({{"student"}, "student", {}}, s) == Significance::Insignificant);
  CHECK(fk_significance({{"grader"}, "student", {}}, s) == Significance::Significant);
  CHECK(fk_significance({{"student_id"}, "student", {}}, s) == Significance::Insignificant);
  CHECK(fk_significance({{"Student-ID"}, "student", {}}, s) == Significance::Insignificant);
  CHECK(error_code([&] { (void)fk_significance({{"x"}, "nobody", {}}, s); }) == Errc::UnknownTarget);

  Schema river({{"river", {"name", "length"}, {"name"}, {}}});
  CHECK(fk_significance({{"river1"}, "river", {}}, river) == Significance::Significant);
  CHECK(fk_significance({{"name"}, "river", {}}, river) == Significance::Insignificant);
}

TEST_CASE("classify_relation on the Mondial schema") {
  auto schema = parse_schema(testing::read_text(testing::fixture("mondial_rdb/schema.json")));
  CHECK(classify_relation(*schema.find("country"), schema) == RelationCase::Entity);
  CHECK(classify_relation(*schema.find("river"), schema) == RelationCase::Entity);
  CHECK(classify_relation(*schema.find("province"), schema) == RelationCase::WeakEntity);
  CHECK(classify_relation(*schema.find("confluence"), schema) == RelationCase::Relationship);
  CHECK(classify_relation(*schema.find("economy"), schema) == RelationCase::Auxiliary);
}

TEST_CASE("classify_relation edge cases") {
  Schema s({
      {"a", {"id"}, {"id"}, {}},
      {"b", {"id"}, {"id"}, {}},
      // Key is a single significant foreign key: weak entity, not auxiliary.
      {"sig", {"owner"}, {"owner"}, {{{"owner"}, "a", {}}}},
      // Key is an insignificant foreign key but another foreign key exists.
      {"degenerate", {"a", "b"}, {"a"}, {{{"a"}, "a", {}}, {{"b"}, "b", {}}}},
      // Foreign key overlapping the key only partially does not count.
      {"partial", {"k", "a", "x"}, {"k", "a"}, {{{"a", "x"}, "pair", {"p", "q"}}}},
      {"pair", {"p", "q"}, {"p", "q"}, {}},
  });
  CHECK(classify_relation(*s.find("sig"), s) == RelationCase::WeakEntity);
  CHECK(classify_relation(*s.find("degenerate"), s) == RelationCase::WeakEntity);
  CHECK(classify_relation(*s.find("partial"), s) == RelationCase::Entity);
}

TEST_CASE("schema invariants") {
  CHECK(error_code([] { Schema({{"r", {"a"}, {"a"}, {{{"a"}, "ghost", {}}}}}); }) == Errc::UnknownTarget);
  CHECK(error_code([] { Schema({{"r", {"a"}, {}, {}}}); }) == Errc::InvalidSchema);
  CHECK(error_code([] { Schema({{"r", {"a"}, {"b"}, {}}}); }) == Errc::InvalidSchema);
  CHECK(error_code([] { Schema({{"r", {"a"}, {"a"}, {{{"z"}, "r", {}}}}}); }) == Errc::InvalidSchema);
  CHECK(error_code([] { Schema({{"r", {"a"}, {"a"}, {}}, {"r", {"a"}, {"a"}, {}}}); }) == Errc::InvalidSchema);
  CHECK(error_code([] { Schema({{"r", {"a", "b"}, {"a"}, {{{"b"}, "r", {}}, {{"b"}, "r", {}}}}}); }) ==
        Errc::InvalidSchema);
  CHECK(error_code([] { parse_schema("{\"relations\": 3}"); }) == Errc::InvalidSchema);
  CHECK(error_code([] { parse_schema("{"); }) == Errc::BadDocument);
  CHECK(error_code([] { parse_schema(R"({"relations": [{"name": "r", "attributes": ["a"], "primary_key": ["a"], "colour": 1}]})"); }) ==
        Errc::InvalidSchema);
}

TEST_CASE("CSV parsing") {
  auto t = parse_csv("a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\n2,,\"multi\nline\"\n");
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.records.size() == 2);
  CHECK(t.records[0][1] == "x, y");
  CHECK(t.records[0][2] == "say \"hi\"");
  CHECK(t.records[1][1].empty());
  CHECK(t.records[1][2] == "multi\nline");
  CHECK(error_code([] { parse_csv("a,b\n1\n"); }) == Errc::BadDocument);
  CHECK(error_code([] { parse_csv("a\n\"open\n"); }) == Errc::BadDocument);
}

TEST_CASE("Mondial RDB build") {
  auto r = testing::build_rdb_fixture("mondial_rdb/schema.json", "mondial_rdb/data");
  const auto& g = r.graph;
  auto st = compute_stats(g);
  CHECK(st.objects == 5);
  CHECK(st.connectors == 2);
  CHECK(count_edges(g, Orientation::Original) == 6);
  CHECK(count_edges(g, Orientation::Opposite) == 6);

  const GraphNode* france = g.find("country/F");
  REQUIRE(france);
  CHECK(france->name == "France");
  const auto* economy = find_property(france->properties, "economy");
  REQUIRE(economy);
  CHECK(equivalent(*economy, PropertyNode::nested("economy", {PropertyNode::leaf("gdp", "$37,728"),
                                                              PropertyNode::leaf("inflation", "1.7%")})));
  CHECK(find_property(france->properties, "code"));

  const GraphNode* province = g.find("province/Rhône Alpes|F");
  REQUIRE(province);
  CHECK_FALSE(find_property(province->properties, "country"));
  CHECK(find_property(province->properties, "area"));
  CHECK(has_original(g, "province/Rhône Alpes|F", "country/F"));

  const std::string conf = "confluence/Rhône|Saône|Rhône Alpes|F";
  const GraphNode* c = g.find(conf);
  REQUIRE(c);
  CHECK_FALSE(c->is_connector());
  CHECK_FALSE(c->name);
  CHECK(find_property(c->properties, "lng"));
  CHECK(find_property(c->properties, "lat"));
  CHECK(has_original(g, conf, "province/Rhône Alpes|F"));
  CHECK(has_original(g, conf, conf + "#river1"));
  CHECK(has_original(g, conf + "#river1", "river/Rhône"));
  CHECK(has_original(g, conf + "#river2", "river/Saône"));
  CHECK(g.find(conf + "#river1")->type == "river1");
  CHECK(g.find(conf + "#river1")->properties.empty());

  CHECK(r.cases.at("economy") == RelationCase::Auxiliary);
  CHECK(validate(g).empty());
}

TEST_CASE("synthesized names for relationship objects") {
  BuildConfig cfg;
  cfg.synthesize_names = true;
  auto r = testing::build_rdb_fixture("mondial_rdb/schema.json", "mondial_rdb/data", cfg);
  const GraphNode* c = r.graph.find("confluence/Rhône|Saône|Rhône Alpes|F");
  REQUIRE(c);
  REQUIRE(c->name);
  CHECK(*c->name == "Rhône/Saône/Rhône Alpes");
}

TEST_CASE("ternary relationship with insignificant keys becomes one connector") {
  auto r = testing::build_rdb_fixture("university/ternary_schema.json", "university/ternary_data.json");
  const auto& g = r.graph;
  const GraphNode* e = g.find("enrolled/s1|c1|l1");
  REQUIRE(e);
  CHECK(e->is_connector());
  CHECK(e->properties.size() == 1);
  CHECK(*find_property(e->properties, "grade")->value == "90");
  CHECK(has_original(g, e->id, "student/s1"));
  CHECK(has_original(g, e->id, "course/c1"));
  CHECK(has_original(g, e->id, "lecturer/l1"));
  CHECK(compute_stats(g).nodes() == 4);
  CHECK(validate(g).empty());
}

TEST_CASE("empty database gives an empty graph") {
  Database db;
  CHECK(build_graph(db).graph.empty());
}

TEST_CASE("dangling foreign keys") {
  auto schema = student_schema();
  auto db = database_from_json(schema, R"({"student": [{"id": "1", "name": "A"}],
    "exam": [{"student": "1", "grader": "9", "course": "db", "grade": "1"}]})");
  CHECK(error_code([&] { build_graph(db); }) == Errc::DanglingReference);
  BuildConfig cfg;
  cfg.dangling = DanglingPolicy::WarnSkip;
  auto r = build_graph(db, cfg);
  CHECK(r.warnings.size() == 1);
  CHECK(validate(r.graph).empty());
  // exam is an object (significant grader) with one edge to the student.
  CHECK(compute_stats(r.graph).original_edges == 1);
}

TEST_CASE("NULL foreign key values produce a warning and no edge") {
  auto db = database_from_json(student_schema(), R"({"student": [{"id": "1", "name": "A"}],
    "exam": [{"student": "1", "grader": "", "course": "db", "grade": "1"}]})");
  auto r = build_graph(db);
  CHECK(r.warnings.size() == 1);
  CHECK(compute_stats(r.graph).connectors == 0);
}

TEST_CASE("row checks") {
  auto schema = student_schema();
  CHECK(error_code([&] { build_graph(database_from_json(schema, R"({"student": [{"id": "1"}]})")); }) ==
        Errc::InvalidRow);
  CHECK(error_code([&] {
          build_graph(database_from_json(schema, R"({"student": [{"id": "1", "name": "a", "x": "2"}]})"));
        }) == Errc::InvalidRow);
  CHECK(error_code([&] {
          build_graph(database_from_json(schema, R"({"student": [{"id": "1", "name": "a"}, {"id": "1", "name": "b"}]})"));
        }) == Errc::DuplicateKey);
  CHECK(error_code([&] { database_from_json(schema, R"({"teacher": []})"); }) == Errc::UnknownRelation);
  Database db;
  db.schema = schema;
  db.rows["ghost"] = {};
  CHECK(error_code([&] { build_graph(db); }) == Errc::UnknownRelation);
}

TEST_CASE("an auxiliary row becomes one nested property named after its relation") {
  Schema s({{"country", {"code"}, {"code"}, {}},
            {"economy", {"country", "gdp"}, {"country"}, {{{"country"}, "country", {}}}}});
  auto db = database_from_json(s, R"({"country": [{"code": "F"}],
    "economy": [{"country": "F", "gdp": "1"}]})");
  auto g = build_graph(db).graph;
  const auto& props = g.find("country/F")->properties;
  CHECK(std::count_if(props.begin(), props.end(), [](const PropertyNode& p) { return p.name == "economy"; }) == 1);
}

TEST_CASE("auxiliary relation referenced by another relation stays an object") {
  Schema s({{"country", {"code"}, {"code"}, {}},
            {"economy", {"country", "gdp"}, {"country"}, {{{"country"}, "country", {}}}},
            {"report", {"rid", "economy"}, {"rid"}, {{{"economy"}, "economy", {}}}}});
  auto db = database_from_json(s, R"({"country": [{"code": "F"}], "economy": [{"country": "F", "gdp": "1"}],
    "report": [{"rid": "r1", "economy": "F"}]})");
  auto r = build_graph(db);
  CHECK(r.graph.find("economy/F"));
  CHECK(validate(r.graph).empty());
}

TEST_CASE("multi-attribute significant foreign key joins the attribute names") {
  Schema s({{"section", {"course", "sec"}, {"course", "sec"}, {}},
            {"exam", {"eid", "c", "s"}, {"eid"}, {{{"c", "s"}, "section", {}}}}});
  auto db = database_from_json(s, R"({"section": [{"course": "db", "sec": "1"}],
    "exam": [{"eid": "x", "c": "db", "s": "1"}]})");
  auto g = build_graph(db).graph;
  const GraphNode* conn = g.find("exam/x#c,s");
  REQUIRE(conn);
  CHECK(conn->type == "c_s");
  CHECK(has_original(g, "exam/x#c,s", "section/db|1"));
}

TEST_CASE("node count bookkeeping on random databases") {
  testing::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    auto db = testing::random_database(rng);
    BuildConfig cfg;
    auto r = build_graph(db, cfg);
    std::size_t expected = 0;
    for (const auto& rel : db.schema.relations()) {
      auto it = db.rows.find(rel.name);
      if (it == db.rows.end()) continue;
      if (r.cases.at(rel.name) == RelationCase::Auxiliary) continue;
      for (const auto& row : it->second) {
        ++expected;
        for (const auto& fk : rel.foreign_keys) {
          if (fk_significance(fk, db.schema) != Significance::Significant) continue;
          bool null = std::any_of(fk.attrs.begin(), fk.attrs.end(), [&](const auto& a) { return row.at(a).empty(); });
          if (!null) ++expected;
        }
      }
    }
    CHECK(compute_stats(r.graph).nodes() == expected);
    for (const auto& n : r.graph.nodes()) {
      const Relation* rel = db.schema.find(n.type);
      if (!rel) continue;
      for (const auto& p : n.properties) CHECK_FALSE(rel->in_foreign_key(p.name));
    }
    CHECK(structurally_equal(r.graph, build_graph(db, cfg).graph));
  }
}
