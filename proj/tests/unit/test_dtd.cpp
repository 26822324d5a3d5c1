#include "doctest.h"
#include "fixtures.hpp"
#include "ocpg/error.hpp"
#include "ocpg/xml.hpp"

using namespace ocpg;
using namespace ocpg::xml;

namespace {

Errc dtd_error(const std::string& text, std::string* message = nullptr) {
  try {
    parse_dtd(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("DTD accepted: " << text);
  return Errc::Io;
}

}  // namespace

TEST_CASE("PCDATA element with ID and CDATA attributes") {
  auto dtd = parse_dtd("<!ELEMENT river (#PCDATA)>\n<!ATTLIST river id ID #REQUIRED length CDATA #IMPLIED>");
  const ElementDecl* river = dtd.find("river");
  REQUIRE(river);
  CHECK(river->has_pcdata);
  CHECK(river->child_types.empty());
  REQUIRE(river->attributes.size() == 2);
  CHECK(river->attributes[0].name == "id");
  CHECK(river->attributes[0].kind == AttrKind::Id);
  CHECK(river->attributes[1].kind == AttrKind::Plain);
  CHECK(river->has_id());
  CHECK_FALSE(river->has_reference());
}

TEST_CASE("IDREFS attribute") {
  auto dtd = parse_dtd("<!ELEMENT confluence EMPTY>\n<!ATTLIST confluence rivers IDREFS #REQUIRED>");
  CHECK(dtd.find("confluence")->attribute("rivers")->kind == AttrKind::IdRefs);
  CHECK(is_reference(AttrKind::IdRefs));
  CHECK(is_reference(AttrKind::IdRef));
  CHECK_FALSE(is_reference(AttrKind::Id));
}

TEST_CASE("content models flatten to the mentioned names") {
  auto dtd = parse_dtd(
      "<!ELEMENT country (province*, economy?)>\n"
      "<!ELEMENT a ((b | c)+, (d, e?)*)>\n"
      "<!ELEMENT m (#PCDATA | b | c)*>\n"
      "<!ELEMENT any ANY>\n"
      "<!ELEMENT province EMPTY><!ELEMENT economy EMPTY><!ELEMENT b EMPTY><!ELEMENT c EMPTY>"
      "<!ELEMENT d EMPTY><!ELEMENT e EMPTY>");
  CHECK(dtd.find("country")->child_types == std::set<std::string>{"province", "economy"});
  CHECK(dtd.find("a")->child_types == std::set<std::string>{"b", "c", "d", "e"});
  CHECK_FALSE(dtd.find("a")->has_pcdata);
  CHECK(dtd.find("m")->child_types == std::set<std::string>{"b", "c"});
  CHECK(dtd.find("m")->has_pcdata);
}

TEST_CASE("enumerated and other attribute types are plain") {
  auto dtd = parse_dtd(
      "<!ELEMENT x EMPTY>\n"
      "<!ATTLIST x kind (big|small) \"big\" n NMTOKEN #IMPLIED f CDATA #FIXED \"1\" r IDREF #IMPLIED>");
  const ElementDecl* x = dtd.find("x");
  CHECK(x->attribute("kind")->kind == AttrKind::Plain);
  CHECK(x->attribute("n")->kind == AttrKind::Plain);
  CHECK(x->attribute("f")->kind == AttrKind::Plain);
  CHECK(x->attribute("r")->kind == AttrKind::IdRef);
}

TEST_CASE("entity and notation declarations are skipped with warnings") {
  auto dtd = parse_dtd(
      "<!-- comment <!ELEMENT fake EMPTY> -->\n"
      "<!ENTITY copy \"(c)\">\n<!NOTATION gif SYSTEM \"image/gif\">\n<?pi stuff?>\n<!ELEMENT a EMPTY>");
  CHECK(dtd.decls.size() == 1);
  CHECK(dtd.warnings.size() == 2);
}

TEST_CASE("undeclared child types and attlist-only types are flagged") {
  auto dtd = parse_dtd("<!ELEMENT a (b)>\n<!ATTLIST c x CDATA #IMPLIED>");
  CHECK_FALSE(dtd.warnings.empty());
  REQUIRE(dtd.find("c"));
  CHECK_FALSE(dtd.find("c")->declared);
}

TEST_CASE("syntax errors carry line and column") {
  std::string msg;
  CHECK(dtd_error("<!ELEMENT a EMPTY>\n<!ELEMENT b (c", &msg) == Errc::SyntaxError);
  CHECK(msg.find("2:") != std::string::npos);
  CHECK(dtd_error("<!ELEMENT >") == Errc::SyntaxError);
  CHECK(dtd_error("<!ATTLIST a x BOGUS #IMPLIED>") == Errc::SyntaxError);
  CHECK(dtd_error("garbage") == Errc::SyntaxError);
}

TEST_CASE("two ID attributes on one type") {
  CHECK(dtd_error("<!ELEMENT a EMPTY><!ATTLIST a x ID #REQUIRED y ID #IMPLIED>") == Errc::DuplicateIdAttr);
  CHECK(dtd_error("<!ELEMENT a EMPTY><!ATTLIST a x ID #REQUIRED>\n<!ATTLIST a y ID #IMPLIED>") ==
        Errc::DuplicateIdAttr);
}

TEST_CASE("the Mondial DTD fixture") {
  auto dtd = parse_dtd(testing::read_text(testing::fixture("mondial_xml/mondial.dtd")));
  CHECK(dtd.decls.size() == 14);
  CHECK(dtd.find("country")->child_types == std::set<std::string>{"name", "population", "economy", "province"});
  CHECK(dtd.find("confluence")->attribute("province")->kind == AttrKind::IdRef);
  CHECK(dtd.warnings.empty());
}
