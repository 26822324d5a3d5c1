#include <algorithm>
#include <cctype>

#include "ocpg/error.hpp"
#include "ocpg/xml.hpp"

namespace ocpg::xml {

std::string_view to_string(AttrKind kind) {
  switch (kind) {
    case AttrKind::Plain: return "plain";
    case AttrKind::Id: return "ID";
    case AttrKind::IdRef: return "IDREF";
    case AttrKind::IdRefs: return "IDREFS";
  }
  return "?";
}

const AttributeDecl* ElementDecl::attribute(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool ElementDecl::has_id() const {
  return std::any_of(attributes.begin(), attributes.end(), [](const auto& a) { return a.kind == AttrKind::Id; });
}

bool ElementDecl::has_reference() const {
  return std::any_of(attributes.begin(), attributes.end(), [](const auto& a) { return is_reference(a.kind); });
}

const ElementDecl* Dtd::find(std::string_view type) const {
  auto it = decls.find(std::string(type));
  return it == decls.end() ? nullptr : &it->second;
}

namespace {

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == ':' || c >= 0x80; }
bool is_name_char(unsigned char c) { return is_name_start(c) || std::isdigit(c) || c == '-' || c == '.'; }

class DtdParser {
 public:
  explicit DtdParser(std::string_view text) : text_(text) {}

  Dtd run() {
    while (true) {
      skip_space();
      if (eof()) break;
      if (starts_with("<!--")) {
        skip_past("-->", "unterminated comment");
      } else if (starts_with("<?")) {
        skip_past("?>", "unterminated processing instruction");
      } else if (starts_with("<!ELEMENT")) {
        advance(9);
        element_decl();
      } else if (starts_with("<!ATTLIST")) {
        advance(9);
        attlist_decl();
      } else if (starts_with("<!ENTITY") || starts_with("<!NOTATION")) {
        std::size_t line = line_;
        skip_declaration();
        dtd_.warnings.push_back("line " + std::to_string(line) + ": ENTITY/NOTATION declaration ignored");
      } else if (peek() == '%') {
        std::size_t line = line_;
        advance(1);
        name();
        expect(';');
        dtd_.warnings.push_back("line " + std::to_string(line) + ": parameter-entity reference ignored");
      } else if (starts_with("<![")) {
        fail("conditional sections are not supported");
      } else {
        fail("expected a markup declaration");
      }
    }
    finish();
    return std::move(dtd_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::SyntaxError, "DTD " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && !eof(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance(1);
  }

  // Whitespace and comments inside declarations.
  void skip_space_required() {
    if (eof() || !std::isspace(static_cast<unsigned char>(peek()))) fail("whitespace expected");
    skip_space();
  }

  void skip_past(std::string_view terminator, const char* error) {
    auto at = text_.find(terminator, pos_);
    if (at == std::string_view::npos) fail(error);
    advance(at + terminator.size() - pos_);
  }

  void skip_declaration() {
    char quote = 0;
    while (!eof()) {
      char c = peek();
      advance(1);
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        return;
      }
    }
    fail("unterminated declaration");
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance(1);
  }

  std::string name() {
    if (eof() || !is_name_start(static_cast<unsigned char>(peek()))) fail("name expected");
    std::size_t start = pos_;
    while (!eof() && is_name_char(static_cast<unsigned char>(peek()))) advance(1);
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string nmtoken() {
    std::size_t start = pos_;
    while (!eof() && is_name_char(static_cast<unsigned char>(peek()))) advance(1);
    if (start == pos_) fail("name token expected");
    return std::string(text_.substr(start, pos_ - start));
  }

  void quoted_literal() {
    char q = peek();
    if (q != '"' && q != '\'') fail("quoted literal expected");
    advance(1);
    while (!eof() && peek() != q) advance(1);
    if (eof()) fail("unterminated literal");
    advance(1);
  }

  ElementDecl& decl_for(const std::string& type) {
    auto [it, inserted] = dtd_.decls.try_emplace(type);
    if (inserted) {
      it->second.type = type;
      it->second.declared = false;
    }
    return it->second;
  }

  void element_decl() {
    skip_space_required();
    std::size_t line = line_;
    std::string type = name();
    skip_space_required();
    ElementDecl& decl = decl_for(type);
    const bool duplicate = decl.declared && element_seen_.contains(type);
    ElementDecl parsed;
    if (starts_with("EMPTY")) {
      advance(5);
    } else if (starts_with("ANY")) {
      advance(3);
      parsed.has_pcdata = true;
      any_.push_back(type);
    } else if (peek() == '(') {
      group(parsed);
      if (peek() == '*' || peek() == '?' || peek() == '+') advance(1);
    } else {
      fail("content specification expected for '" + type + "'");
    }
    skip_space();
    expect('>');
    if (duplicate) {
      dtd_.warnings.push_back("line " + std::to_string(line) + ": element '" + type + "' declared twice; first wins");
      return;
    }
    element_seen_.insert(type);
    decl.declared = true;
    decl.child_types = std::move(parsed.child_types);
    decl.has_pcdata = parsed.has_pcdata;
  }

  // '(' item (sep item)* ')' where item is #PCDATA, a name or a nested group.
  void group(ElementDecl& out) {
    expect('(');
    while (true) {
      skip_space();
      if (peek() == '(') {
        group(out);
      } else if (starts_with("#PCDATA")) {
        advance(7);
        out.has_pcdata = true;
      } else {
        out.child_types.insert(name());
      }
      if (peek() == '*' || peek() == '?' || peek() == '+') advance(1);
      skip_space();
      if (peek() == ',' || peek() == '|') {
        advance(1);
        continue;
      }
      if (peek() == ')') {
        advance(1);
        return;
      }
      fail("expected ',', '|' or ')' in content model");
    }
  }

  void attlist_decl() {
    skip_space_required();
    std::string type = name();
    ElementDecl& decl = decl_for(type);
    while (true) {
      skip_space();
      if (peek() == '>') {
        advance(1);
        return;
      }
      std::size_t line = line_;
      std::string attr = name();
      skip_space_required();
      AttrKind kind = attribute_type();
      skip_space_required();
      default_decl();
      if (decl.attribute(attr)) {
        dtd_.warnings.push_back("line " + std::to_string(line) + ": attribute '" + attr + "' of '" + type +
                                "' declared twice; first wins");
        continue;
      }
      if (kind == AttrKind::Id && decl.has_id()) {
        throw Error(Errc::DuplicateIdAttr, "DTD line " + std::to_string(line) + ": element type '" + type +
                                               "' declares a second ID attribute '" + attr + "'");
      }
      decl.attributes.push_back({attr, kind});
    }
  }

  AttrKind attribute_type() {
    if (peek() == '(') {
      enumeration();
      return AttrKind::Plain;
    }
    std::string t = name();
    if (t == "ID") return AttrKind::Id;
    if (t == "IDREF") return AttrKind::IdRef;
    if (t == "IDREFS") return AttrKind::IdRefs;
    if (t == "NOTATION") {
      skip_space_required();
      enumeration();
      return AttrKind::Plain;
    }
    if (t == "CDATA" || t == "ENTITY" || t == "ENTITIES" || t == "NMTOKEN" || t == "NMTOKENS") {
      return AttrKind::Plain;
    }
    fail("unknown attribute type '" + t + "'");
  }

  void enumeration() {
    expect('(');
    while (true) {
      skip_space();
      nmtoken();
      skip_space();
      if (peek() == '|') {
        advance(1);
        continue;
      }
      expect(')');
      return;
    }
  }

  void default_decl() {
    if (starts_with("#REQUIRED")) {
      advance(9);
    } else if (starts_with("#IMPLIED")) {
      advance(8);
    } else if (starts_with("#FIXED")) {
      advance(6);
      skip_space_required();
      quoted_literal();
    } else {
      quoted_literal();
    }
  }

  void finish() {
    for (const auto& type : any_) {
      auto& decl = dtd_.decls.at(type);
      for (const auto& [other, _] : dtd_.decls) decl.child_types.insert(other);
    }
    std::set<std::string> missing;
    for (const auto& [type, decl] : dtd_.decls) {
      if (!decl.declared) {
        dtd_.warnings.push_back("element type '" + type + "' has an ATTLIST but no ELEMENT declaration");
      }
      for (const auto& child : decl.child_types) {
        if (!dtd_.decls.contains(child) && missing.insert(child).second) {
          dtd_.warnings.push_back("child type '" + child + "' of '" + type + "' is not declared");
        }
      }
    }
    // Undeclared children get an empty stand-in declaration so that every
    // mentioned type can be classified.
    for (const auto& child : missing) {
      ElementDecl& d = decl_for(child);
      d.has_pcdata = true;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Dtd dtd_;
  std::set<std::string> element_seen_;
  std::vector<std::string> any_;
};

}  // namespace

Dtd parse_dtd(std::string_view text) { return DtdParser(text).run(); }

}  // namespace ocpg::xml
