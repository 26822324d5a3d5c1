#include <expat.h>

#include <memory>

#include "ocpg/error.hpp"
#include "ocpg/xml.hpp"

namespace ocpg::xml {

const std::string* Element::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return &v;
  }
  return nullptr;
}

namespace {

struct ParseState {
  XML_Parser parser = nullptr;
  std::string_view text;
  std::vector<Element> stack;
  std::optional<Element> root;
  Document doc;
};

// Returns the raw internal subset that follows the '[' of a DOCTYPE
// declaration starting at `from`, or nullopt when there is none.
std::optional<std::string> internal_subset(std::string_view text, std::size_t from) {
  std::size_t i = from;
  char quote = 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[') {
      break;
    } else if (c == '>') {
      return std::nullopt;
    }
  }
  if (i >= text.size()) return std::nullopt;
  const std::size_t begin = ++i;
  quote = 0;
  while (i < text.size()) {
    std::string_view rest = text.substr(i);
    if (quote) {
      if (text[i] == quote) quote = 0;
      ++i;
    } else if (rest.starts_with("<!--")) {
      auto end = text.find("-->", i + 4);
      if (end == std::string_view::npos) return std::nullopt;
      i = end + 3;
    } else if (rest.starts_with("<?")) {
      auto end = text.find("?>", i + 2);
      if (end == std::string_view::npos) return std::nullopt;
      i = end + 2;
    } else if (text[i] == '"' || text[i] == '\'') {
      quote = text[i];
      ++i;
    } else if (text[i] == ']') {
      return std::string(text.substr(begin, i - begin));
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(data);
  Element e;
  e.type = name;
  e.line = XML_GetCurrentLineNumber(st->parser);
  for (std::size_t i = 0; attrs[i]; i += 2) e.attributes.emplace_back(attrs[i], attrs[i + 1]);
  st->stack.push_back(std::move(e));
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto* st = static_cast<ParseState*>(data);
  Element e = std::move(st->stack.back());
  st->stack.pop_back();
  if (st->stack.empty()) {
    st->root = std::move(e);
  } else {
    st->stack.back().children.push_back(std::move(e));
  }
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(data);
  if (!st->stack.empty()) st->stack.back().pcdata.append(s, static_cast<std::size_t>(len));
}

void XMLCALL on_doctype(void* data, const XML_Char* name, const XML_Char* sysid, const XML_Char*,
                        int has_internal_subset) {
  auto* st = static_cast<ParseState*>(data);
  st->doc.doctype_name = name;
  if (sysid) st->doc.system_id = sysid;
  if (has_internal_subset) {
    auto at = XML_GetCurrentByteIndex(st->parser);
    if (at >= 0) st->doc.internal_subset = internal_subset(st->text, static_cast<std::size_t>(at));
  }
}

}  // namespace

Document parse_document(std::string_view text) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw Error(Errc::Io, "cannot create XML parser");
  ParseState st;
  st.parser = parser.get();
  st.text = text;
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  XML_SetStartDoctypeDeclHandler(parser.get(), on_doctype);
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) == XML_STATUS_ERROR) {
    throw Error(Errc::SyntaxError, "XML " + std::to_string(XML_GetCurrentLineNumber(parser.get())) + ":" +
                                       std::to_string(XML_GetCurrentColumnNumber(parser.get()) + 1) + ": " +
                                       XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!st.root) throw Error(Errc::SyntaxError, "XML document has no root element");
  st.doc.root = std::move(*st.root);
  return std::move(st.doc);
}

}  // namespace ocpg::xml
