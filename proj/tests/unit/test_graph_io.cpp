#include "doctest.h"
#include "generators.hpp"
#include "ocpg/error.hpp"
#include "ocpg/graph_io.hpp"

using namespace ocpg;

namespace {

Errc code_of(const std::string& text) {
  try {
    deserialize(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("document was accepted: " << text);
  return Errc::Io;
}

const char* kNodeA = R"({"id":"a","kind":"object","type":"t","properties":[]})";
const char* kNodeB = R"({"id":"b","kind":"object","type":"t","properties":[]})";

std::string doc(const std::string& nodes, const std::string& edges, const std::string& extra = "") {
  return "{\"nodes\":[" + nodes + "],\"edges\":[" + edges + "]" + extra + "}";
}

}  // namespace

TEST_CASE("empty graph round trips") {
  DataGraph g;
  auto back = deserialize(serialize(g));
  CHECK(back.empty());
  CHECK(structurally_equal(g, back));
}

TEST_CASE("nested economy property survives a round trip") {
  GraphNode france;
  france.id = "country:F";
  france.type = "country";
  france.name = "France";
  france.properties = {PropertyNode::leaf("code", "F"),
                       PropertyNode::nested("economy", {PropertyNode::leaf("gdp", "$37,728"),
                                                        PropertyNode::leaf("inflation", "1.7%")})};
  france.provenance = "country(code=F)";
  DataGraph g({france}, {});
  auto back = deserialize(serialize(g));
  REQUIRE(back.nodes().size() == 1);
  const auto* economy = find_property(back.nodes()[0].properties, "economy");
  REQUIRE(economy != nullptr);
  CHECK_FALSE(economy->value);
  REQUIRE(economy->children.size() == 2);
  CHECK(economy->children[0].name == "gdp");
  CHECK(*economy->children[0].value == "$37,728");
  CHECK(back.nodes()[0].provenance == france.provenance);
  CHECK(structurally_equal(g, back));
}

TEST_CASE("random graphs round trip and re-serialize byte for byte") {
  testing::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    auto g = testing::random_graph(rng, 100);
    const auto text = serialize(g);
    auto back = deserialize(text);
    CHECK(structurally_equal(g, back));
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("weight policy overrides round trip") {
  WeightPolicy p;
  p.original_weight = 1.5;
  p.opposite_weight = 4;
  p.overrides[EdgeRole::Hierarchical] = {1, 1};
  DataGraph g({}, {}, p);
  CHECK(deserialize(serialize(g)).weight_policy() == p);
}

TEST_CASE("deserialize rejects bad documents") {
  CHECK(code_of("not json") == Errc::BadDocument);
  CHECK(code_of("[]") == Errc::BadDocument);
  CHECK(code_of(doc(kNodeA, "", R"(,"colour":1)")) == Errc::BadDocument);
  CHECK(code_of(doc(R"({"id":"a","kind":"thing","type":"t","properties":[]})", "")) == Errc::BadDocument);
  CHECK(code_of(doc(std::string(kNodeA) + "," + kNodeA, "")) == Errc::BadDocument);
  CHECK(code_of(doc(kNodeA, R"({"from":"a","to":"zz","orientation":"original","role":"reference","weight":1})")) ==
        Errc::BadDocument);
  CHECK(code_of(doc(std::string(kNodeA) + "," + kNodeB,
                    R"({"from":"a","to":"b","orientation":"original","role":"sideways","weight":1})")) ==
        Errc::BadDocument);
  CHECK(code_of(doc(std::string(kNodeA) + "," + kNodeB,
                    R"({"from":"a","to":"b","orientation":"original","role":"reference","weight":-1})")) ==
        Errc::BadDocument);
  CHECK(code_of(doc(R"({"id":"a","kind":"object","type":"t","properties":[],"shoe":1})", "")) == Errc::BadDocument);
  CHECK(code_of(doc(R"({"id":"a","kind":"object","type":"t","properties":[{"name":"p","value":"1","x":2}]})", "")) ==
        Errc::BadDocument);
}

TEST_CASE("deserialize accepts a minimal document") {
  auto g = deserialize(doc(std::string(kNodeA) + "," + kNodeB,
                           R"({"from":"a","to":"b","orientation":"original","role":"foreign_key","weight":1})"));
  CHECK(g.nodes().size() == 2);
  CHECK(g.edges()[0].role == EdgeRole::ForeignKey);
  CHECK(g.weight_policy() == WeightPolicy{});
}
