#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "ocpg/error.hpp"
#include "ocpg/rdf.hpp"

namespace ocpg::rdf {

namespace {

struct LineError {
  std::string message;
};

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class LineParser {
 public:
  explicit LineParser(std::string_view line) : s_(line) {}

  Triple triple() {
    Triple t;
    t.subject = resource("subject");
    t.predicate = resource("predicate");
    if (t.predicate.starts_with("_:")) fail("predicate must be an IRI");
    skip_space();
    if (peek() == '"') {
      t.object = Term::literal(literal());
    } else {
      t.object = Term::iri(resource("object"));
    }
    skip_space();
    if (peek() != '.') fail("expected '.' after object");
    ++i_;
    skip_space();
    if (i_ < s_.size() && s_[i_] != '#') fail("unexpected text after '.'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw LineError{"column " + std::to_string(i_ + 1) + ": " + msg};
  }
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void skip_space() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }

  std::string resource(const char* what) {
    skip_space();
    if (peek() == '<') {
      auto end = s_.find('>', i_);
      if (end == std::string_view::npos) fail(std::string("unterminated IRI in ") + what);
      std::string iri(s_.substr(i_ + 1, end - i_ - 1));
      if (iri.empty()) fail(std::string("empty IRI in ") + what);
      i_ = end + 1;
      return iri;
    }
    if (s_.substr(i_).starts_with("_:")) {
      std::size_t start = i_;
      i_ += 2;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' ||
                                s_[i_] == '-' || s_[i_] == '.' || static_cast<unsigned char>(s_[i_]) >= 0x80)) {
        ++i_;
      }
      // A label cannot end with '.'; that dot terminates the statement.
      while (i_ > start + 2 && s_[i_ - 1] == '.') --i_;
      if (i_ == start + 2) fail("empty blank node label");
      return std::string(s_.substr(start, i_ - start));
    }
    fail(std::string("expected IRI or blank node as ") + what);
  }

  std::string literal() {
    ++i_;
    std::string out;
    while (true) {
      if (i_ >= s_.size()) fail("unterminated literal");
      char c = s_[i_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i_ >= s_.size()) fail("unterminated escape");
      char e = s_[i_++];
      switch (e) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
          std::size_t n = e == 'u' ? 4 : 8;
          if (i_ + n > s_.size()) fail("short unicode escape");
          unsigned long cp = 0;
          for (std::size_t k = 0; k < n; ++k) {
            char h = s_[i_ + k];
            if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad unicode escape");
            cp = cp * 16 + static_cast<unsigned long>(std::isdigit(static_cast<unsigned char>(h))
                                                           ? h - '0'
                                                           : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
          }
          if (cp > 0x10FFFF) fail("unicode escape out of range");
          i_ += n;
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    if (peek() == '@') {
      ++i_;
      std::size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-')) ++i_;
      if (i_ == start) fail("empty language tag");
    } else if (s_.substr(i_).starts_with("^^")) {
      i_ += 2;
      if (peek() != '<') fail("datatype IRI expected");
      resource("datatype");
    }
    return out;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

bool word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
bool upper(char c) { return c >= 'A' && c <= 'Z'; }
bool lower_or_digit(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

}  // namespace

std::vector<Triple> parse_ntriples(std::string_view text, std::vector<LineIssue>* issues) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    try {
      out.push_back(LineParser(line.substr(first)).triple());
    } catch (const LineError& e) {
      if (!issues) throw Error(Errc::SyntaxError, "triples line " + std::to_string(line_no) + ", " + e.message);
      issues->push_back({line_no, e.message});
    }
  }
  return out;
}

std::string label_of(std::string_view iri) {
  if (iri.empty()) throw Error(Errc::EmptyIri, "cannot label an empty IRI");
  std::string_view seg;
  auto hash = iri.rfind('#');
  if (hash != std::string_view::npos && hash + 1 < iri.size()) {
    seg = iri.substr(hash + 1);
  } else {
    std::string_view trimmed = iri;
    while (!trimmed.empty() && (trimmed.back() == '/' || trimmed.back() == '#')) trimmed.remove_suffix(1);
    auto cut = trimmed.find_last_of("/:");
    seg = cut == std::string_view::npos ? trimmed : trimmed.substr(cut + 1);
  }

  std::vector<std::string> words;
  std::string cur;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    char c = seg[i];
    if (!word_char(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    if (upper(c) && !cur.empty()) {
      const char prev = seg[i - 1];
      const bool next_lower = i + 1 < seg.size() && seg[i + 1] >= 'a' && seg[i + 1] <= 'z';
      if (lower_or_digit(prev) || (upper(prev) && next_lower)) {
        words.push_back(std::move(cur));
        cur.clear();
      }
    }
    cur += upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  if (words.empty()) return std::string(seg.empty() ? iri : seg);

  std::string label = words.front();
  for (std::size_t i = 1; i < words.size(); ++i) label += " " + words[i];
  return label;
}

namespace {

class Folder {
 public:
  Folder(std::vector<Triple> triples, const FoldConfig& config, std::vector<std::string>* warnings)
      : triples_(std::move(triples)), config_(config), warnings_(warnings) {
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
  }

  DataGraph run() {
    for (const auto& t : triples_) by_subject_[t.subject].push_back(&t);
    for (const auto& t : triples_) {
      if (is_link(t) && by_subject_.contains(t.object.text)) incoming_[t.object.text].push_back(&t);
    }
    find_folded();

    GraphBuilder g(config_.weights);
    std::set<std::pair<std::string, std::string>> links;
    std::set<std::string> bare;
    for (const auto& [subject, own] : by_subject_) {
      if (folded_.contains(subject)) continue;
      GraphNode node;
      node.id = subject;
      node.kind = NodeKind::Object;
      node.type = type_of(subject, own);
      node.name = name_of(own);
      node.properties = properties_of(own);
      node.provenance = subject;
      g.add_node(std::move(node));
      for (const Triple* t : own) {
        if (!is_link(*t) || folded_.contains(t->object.text)) continue;
        if (t->object.text == subject) {
          warn("self link <" + subject + "> " + t->predicate + " dropped");
          continue;
        }
        links.emplace(subject, t->object.text);
        if (!by_subject_.contains(t->object.text)) bare.insert(t->object.text);
      }
    }
    for (const auto& iri : bare) {
      GraphNode node;
      node.id = iri;
      node.kind = NodeKind::Object;
      node.type = "resource";
      node.name = label_of(iri);
      node.provenance = iri;
      g.add_node(std::move(node));
    }
    for (const auto& [from, to] : links) g.connect(from, to, EdgeRole::RdfLink);
    DataGraph graph = std::move(g).build();
    return add_opposite_edges(graph, [](EdgeRole r) { return r == EdgeRole::RdfLink; });
  }

 private:
  void warn(std::string msg) {
    if (warnings_) warnings_->push_back(std::move(msg));
  }

  bool is_type(const Triple& t) const {
    return !t.object.is_literal() && std::find(config_.type_predicates.begin(), config_.type_predicates.end(),
                                               t.predicate) != config_.type_predicates.end();
  }
  bool is_link(const Triple& t) const { return !t.object.is_literal() && !is_type(t); }

  // Least fixpoint: a subject folds into its single referrer once every IRI
  // it points at has folded into it.
  void find_folded() {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [subject, own] : by_subject_) {
        if (folded_.contains(subject)) continue;
        auto in = incoming_.find(subject);
        if (in == incoming_.end() || in->second.size() != 1 || in->second.front()->subject == subject) continue;
        bool only_literals = std::all_of(own.begin(), own.end(), [&](const Triple* t) {
          return t->object.is_literal() || (is_link(*t) && folded_.contains(t->object.text));
        });
        if (only_literals) {
          folded_.insert(subject);
          changed = true;
        }
      }
    }
  }

  std::string type_of(const std::string& subject, const std::vector<const Triple*>& own) {
    std::set<std::string> labels;
    for (const Triple* t : own) {
      if (is_type(*t)) labels.insert(label_of(t->object.text));
    }
    if (labels.empty()) return "resource";
    if (labels.size() > 1) {
      warn("<" + subject + "> has " + std::to_string(labels.size()) + " types; using '" + *labels.begin() + "'");
    }
    return *labels.begin();
  }

  std::optional<std::string> name_of(const std::vector<const Triple*>& own) const {
    for (const auto& pred : config_.name_predicates) {
      for (const Triple* t : own) {
        if (t->predicate != pred || t->object.text.empty()) continue;
        return t->object.is_literal() ? t->object.text : label_of(t->object.text);
      }
    }
    return std::nullopt;
  }

  std::vector<PropertyNode> properties_of(const std::vector<const Triple*>& own) const {
    std::vector<PropertyNode> props;
    for (const Triple* t : own) {
      if (t->object.is_literal()) {
        props.push_back(PropertyNode::leaf(label_of(t->predicate), t->object.text));
      } else if (is_link(*t) && folded_.contains(t->object.text)) {
        props.push_back(PropertyNode::nested(label_of(t->predicate), properties_of(by_subject_.at(t->object.text))));
      }
    }
    return props;
  }

  std::vector<Triple> triples_;
  const FoldConfig& config_;
  std::vector<std::string>* warnings_;
  std::map<std::string, std::vector<const Triple*>> by_subject_;
  std::map<std::string, std::vector<const Triple*>> incoming_;
  std::set<std::string> folded_;
};

}  // namespace

DataGraph fold_triples(std::vector<Triple> triples, const FoldConfig& config, std::vector<std::string>* warnings) {
  if (auto err = config.weights.check()) throw Error(Errc::InvalidConfig, *err);
  for (const auto& t : triples) {
    if (t.subject.empty() || t.predicate.empty() || (!t.object.is_literal() && t.object.text.empty())) {
      throw Error(Errc::EmptyIri, "triple with an empty IRI");
    }
  }
  return Folder(std::move(triples), config, warnings).run();
}

}  // namespace ocpg::rdf
