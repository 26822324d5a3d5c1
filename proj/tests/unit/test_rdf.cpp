#include <algorithm>
#include <functional>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "ocpg/error.hpp"
#include "ocpg/rdf.hpp"

using namespace ocpg;
using namespace ocpg::rdf;

namespace {

Triple lit(std::string s, std::string p, std::string o) { return {std::move(s), std::move(p), Term::literal(std::move(o))}; }
Triple link(std::string s, std::string p, std::string o) { return {std::move(s), std::move(p), Term::iri(std::move(o))}; }

std::size_t count(const DataGraph& g, Orientation o) {
  return static_cast<std::size_t>(
      std::count_if(g.edges().begin(), g.edges().end(), [&](const Edge& e) { return e.orientation == o; }));
}

}  // namespace

TEST_CASE("label_of") {
  CHECK(label_of("http://www.w3.org/2000/10/swap/pim/contact#fullName") == "full name");
  CHECK(label_of("http://x.org/name") == "name");
  CHECK(label_of("http://x.org/onto/hasCapitalCity") == "has capital city");
  CHECK(label_of("http://x.org/onto/street_name") == "street name");
  CHECK(label_of("http://x.org/onto/HTMLParser") == "html parser");
  CHECK(label_of("http://x.org/things/") == "things");
  CHECK(label_of("_:b0") == "b0");
  CHECK(label_of("urn:isbn") == "isbn");
  CHECK_THROWS_AS(label_of(""), Error);
}

TEST_CASE("N-Triples parsing") {
  auto ts = parse_ntriples(R"(# comment
<http://a> <http://p> "x \"q\" é\n" .
<http://a> <http://p> "chat"@fr .
_:b <http://p> "1"^^<http://www.w3.org/2001/XMLSchema#int> .
<http://a> <http://q> _:b .

<http://a> <http://q> <http://c> . # trailing
)");
  REQUIRE(ts.size() == 5);
  CHECK(ts[0].object.is_literal());
  CHECK(ts[0].object.text == "x \"q\" \xc3\xa9\n");
  CHECK(ts[1].object.text == "chat");
  CHECK(ts[2].subject == "_:b");
  CHECK(ts[2].object.text == "1");
  CHECK_FALSE(ts[3].object.is_literal());
  CHECK(ts[3].object.text == "_:b");
}

TEST_CASE("N-Triples problems are reported per line") {
  const char* text = "<http://a> <http://p> \"ok\" .\n<http://a> <http://p> \"open .\n<http://a> \"lit\" <http://b> .\n"
                     "<http://a> <http://p> <http://b>\n";
  std::vector<LineIssue> issues;
  auto ts = parse_ntriples(text, &issues);
  CHECK(ts.size() == 1);
  REQUIRE(issues.size() == 3);
  CHECK(issues[0].line == 2);
  CHECK(issues[1].line == 3);
  CHECK(issues[2].line == 4);
  try {
    parse_ntriples(text);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("two-triple chain folds into one node") {
  auto g = fold_triples({link("http://e/s1", "http://e/p1", "http://e/s2"), lit("http://e/s2", "http://e/p2", "lit")});
  REQUIRE(g.nodes().size() == 1);
  const auto& n = g.nodes()[0];
  CHECK(n.id == "http://e/s1");
  REQUIRE(n.properties.size() == 1);
  CHECK(equivalent(n.properties[0], PropertyNode::nested("p1", {PropertyNode::leaf("p2", "lit")})));
  CHECK(g.edges().empty());
}

TEST_CASE("empty triple set") { CHECK(fold_triples({}).empty()); }

TEST_CASE("a subject referenced by two subjects stays a node") {
  auto g = fold_triples({link("http://e/a", "http://e/knows", "http://e/s"), link("http://e/b", "http://e/knows", "http://e/s"),
                         lit("http://e/s", "http://e/v", "1"), lit("http://e/a", "http://e/v", "2"),
                         lit("http://e/b", "http://e/v", "3")});
  CHECK(g.nodes().size() == 3);
  CHECK(count(g, Orientation::Original) == 2);
  CHECK(count(g, Orientation::Opposite) == 2);
  CHECK(validate(g).empty());
}

TEST_CASE("nesting reaches a fixpoint bottom-up") {
  auto g = fold_triples({link("http://e/a", "http://e/p", "http://e/b"), link("http://e/b", "http://e/q", "http://e/c"),
                         lit("http://e/c", "http://e/r", "deep")});
  REQUIRE(g.nodes().size() == 1);
  CHECK(equivalent(g.nodes()[0].properties[0],
                   PropertyNode::nested("p", {PropertyNode::nested("q", {PropertyNode::leaf("r", "deep")})})));
}

TEST_CASE("cycles and typed subjects do not fold") {
  auto cycle = fold_triples({link("http://e/a", "http://e/p", "http://e/b"), link("http://e/b", "http://e/p", "http://e/a")});
  CHECK(cycle.nodes().size() == 2);
  auto typed = fold_triples({link("http://e/a", "http://e/p", "http://e/b"),
                             link("http://e/b", std::string(kRdfType), "http://e/T"), lit("http://e/b", "http://e/v", "1")});
  CHECK(typed.nodes().size() == 2);
  CHECK(typed.find("http://e/b")->type == "t");
}

TEST_CASE("types, names, bare resources, self links") {
  std::vector<std::string> warnings;
  auto g = fold_triples({link("http://e/a", std::string(kRdfType), "http://e/onto#Person"),
                         link("http://e/a", std::string(kRdfType), "http://e/onto#Agent"),
                         lit("http://e/a", std::string(kFoafName), "Alice"),
                         link("http://e/a", "http://e/p#livesIn", "http://e/places/Wonder_Land"),
                         link("http://e/a", "http://e/p#self", "http://e/a")},
                        {}, &warnings);
  const GraphNode* a = g.find("http://e/a");
  REQUIRE(a);
  CHECK(a->type == "agent");
  CHECK(a->name == "Alice");
  CHECK(find_property(a->properties, "name"));
  const GraphNode* place = g.find("http://e/places/Wonder_Land");
  REQUIRE(place);
  CHECK(place->type == "resource");
  CHECK(place->name == "wonder land");
  CHECK(warnings.size() == 2);
  CHECK(validate(g).empty());
}

TEST_CASE("people fixture") {
  std::vector<std::string> warnings;
  auto g = fold_triples(parse_ntriples(testing::read_text(testing::fixture("rdf/people.nt"))), {}, &warnings);
  const GraphNode* alice = g.find("http://example.org/people/alice");
  REQUIRE(alice);
  CHECK(alice->type == "person");
  CHECK(alice->name == "Alice");
  CHECK(*find_property(alice->properties, "full name")->value == "Alice Liddell");
  const auto* home = find_property(alice->properties, "home address");
  REQUIRE(home);
  CHECK(equivalent(*home, PropertyNode::nested("home address", {PropertyNode::leaf("street name", "Rabbit Hole 1"),
                                                                 PropertyNode::leaf("city", "Oxford")})));
  CHECK_FALSE(g.find("_:addr1"));
  CHECK(g.find("http://example.org/places/Wonderland"));
  CHECK(compute_stats(g).nodes() == 4);
  CHECK(count(g, Orientation::Original) == 3);
  CHECK(validate(g).empty());
}

TEST_CASE("empty IRIs are rejected") {
  CHECK_THROWS_AS(fold_triples({lit("", "http://e/p", "x")}), Error);
  CHECK_THROWS_AS(fold_triples({link("http://e/a", "http://e/p", "")}), Error);
}

TEST_CASE("random triple sets: literal conservation and order independence") {
  testing::Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    auto ts = testing::random_triples(rng);
    auto g = fold_triples(ts);
    std::multiset<std::string> want;
    std::set<Triple> distinct(ts.begin(), ts.end());
    for (const auto& t : distinct) {
      if (t.object.is_literal()) want.insert(t.object.text);
    }
    std::multiset<std::string> got;
    std::function<void(const PropertyNode&)> walk = [&](const PropertyNode& p) {
      if (p.value) got.insert(*p.value);
      for (const auto& c : p.children) walk(c);
    };
    for (const auto& n : g.nodes()) {
      for (const auto& p : n.properties) walk(p);
    }
    CHECK(got == want);
    std::shuffle(ts.begin(), ts.end(), rng);
    CHECK(structurally_equal(g, fold_triples(ts)));
    CHECK(validate(g).empty());
  }
}
