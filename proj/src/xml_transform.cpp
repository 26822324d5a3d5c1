#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ocpg/error.hpp"
#include "ocpg/xml.hpp"

namespace ocpg::xml {

namespace {

bool is_xml_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_xml_space(s[b])) ++b;
  while (e > b && is_xml_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ids(std::string_view value) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < value.size()) {
    while (i < value.size() && is_xml_space(value[i])) ++i;
    std::size_t start = i;
    while (i < value.size() && !is_xml_space(value[i])) ++i;
    if (i > start) {
      std::string id(value.substr(start, i - start));
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(std::move(id));
    }
  }
  return out;
}

// Synthetic text attribute value for an element, if the PCDATA rule fires.
std::optional<std::string> lifted_text(const Element& e, std::string_view attribute_name) {
  if (e.attributes.empty() && e.children.empty()) return std::nullopt;
  std::string text = trim(e.pcdata);
  if (text.empty()) return std::nullopt;
  if (e.attribute(attribute_name)) {
    throw Error(Errc::NameClash, "element '" + e.type + "' (line " + std::to_string(e.line) +
                                     ") already has an attribute '" + std::string(attribute_name) +
                                     "'; choose another name for PCDATA");
  }
  return text;
}

AttrKind kind_of(const Dtd& dtd, const std::string& type, const std::string& attr) {
  const ElementDecl* d = dtd.find(type);
  if (!d) return AttrKind::Plain;
  const AttributeDecl* a = d->attribute(attr);
  return a ? a->kind : AttrKind::Plain;
}

void for_each_element(const Element& e, const std::function<void(const Element&)>& fn) {
  fn(e);
  for (const auto& c : e.children) for_each_element(c, fn);
}

// ID value -> element, document-wide.
std::unordered_map<std::string, const Element*> index_ids(const Dtd& dtd, const Document& doc) {
  std::unordered_map<std::string, const Element*> ids;
  for_each_element(doc.root, [&](const Element& e) {
    for (const auto& [name, value] : e.attributes) {
      if (kind_of(dtd, e.type, name) != AttrKind::Id) continue;
      std::string id = trim(value);
      if (!ids.emplace(id, &e).second) {
        throw Error(Errc::DuplicateId, "ID '" + id + "' is used twice (second on '" + e.type + "', line " +
                                           std::to_string(e.line) + ")");
      }
    }
  });
  return ids;
}

}  // namespace

std::string_view to_string(DecisionSource source) {
  switch (source) {
    case DecisionSource::AutoSafe: return "auto-safe";
    case DecisionSource::AutoScan: return "auto-scan";
    case DecisionSource::HumanOverride: return "override";
  }
  return "?";
}

std::string_view to_string(ElementClass c) {
  switch (c) {
    case ElementClass::Object: return "object";
    case ElementClass::Connector: return "connector";
    case ElementClass::Property: return "property";
  }
  return "?";
}

Element pcdata_lift(const Element& element, std::string_view attribute_name) {
  Element out = element;
  if (auto text = lifted_text(element, attribute_name)) {
    out.attributes.emplace_back(std::string(attribute_name), std::move(*text));
    out.pcdata.clear();
  }
  return out;
}

std::vector<SignificanceOverride> parse_overrides(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadDocument, std::string("override file: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::BadDocument, "override file must be a JSON array");
  std::vector<SignificanceOverride> out;
  for (const auto& j : doc) {
    if (!j.is_object()) throw Error(Errc::BadDocument, "override entries must be objects");
    for (const auto& [key, _] : j.items()) {
      if (key != "element" && key != "attribute" && key != "verdict") {
        throw Error(Errc::BadDocument, "unknown field '" + key + "' in override entry");
      }
    }
    if (!j.contains("element") || !j.contains("attribute") || !j.contains("verdict") ||
        !j["element"].is_string() || !j["attribute"].is_string() || !j["verdict"].is_string()) {
      throw Error(Errc::BadDocument, "override entries need string fields element, attribute, verdict");
    }
    const std::string v = j["verdict"].get<std::string>();
    Significance s;
    if (v == "significant") {
      s = Significance::Significant;
    } else if (v == "insignificant") {
      s = Significance::Insignificant;
    } else {
      throw Error(Errc::BadDocument, "override verdict must be 'significant' or 'insignificant', got '" + v + "'");
    }
    out.push_back({j["element"].get<std::string>(), j["attribute"].get<std::string>(), s});
  }
  return out;
}

Dtd reconcile(const Dtd& dtd, const Document& doc) {
  Dtd out = dtd;
  std::set<std::string> synthesized;
  for_each_element(doc.root, [&](const Element& e) {
    auto it = out.decls.find(e.type);
    if (it == out.decls.end()) {
      ElementDecl d;
      d.type = e.type;
      d.declared = false;
      it = out.decls.emplace(e.type, std::move(d)).first;
      synthesized.insert(e.type);
      out.warnings.push_back("line " + std::to_string(e.line) + ": element type '" + e.type +
                             "' is not declared; treating all its attributes as plain");
    }
    ElementDecl& d = it->second;
    const bool quiet = synthesized.contains(e.type);
    if (!trim(e.pcdata).empty()) d.has_pcdata = true;
    for (const auto& [name, _] : e.attributes) {
      if (d.attribute(name)) continue;
      d.attributes.push_back({name, AttrKind::Plain});
      if (!quiet) {
        out.warnings.push_back("line " + std::to_string(e.line) + ": attribute '" + name + "' of '" + e.type +
                               "' is not declared; treated as plain");
      }
    }
    for (const auto& c : e.children) {
      if (d.child_types.insert(c.type).second && !quiet) {
        out.warnings.push_back("line " + std::to_string(c.line) + ": '" + c.type +
                               "' is not allowed in '" + e.type + "' by the DTD; added to its child types");
      }
    }
  });
  if (!out.root) out.root = doc.doctype_name ? *doc.doctype_name : doc.root.type;
  return out;
}

SignificanceTable ref_attr_significance(const Dtd& dtd, const Document& doc,
                                        std::span<const SignificanceOverride> overrides,
                                        DanglingPolicy dangling) {
  const auto ids = index_ids(dtd, doc);
  SignificanceTable table;
  for (const auto& [type, decl] : dtd.decls) {
    for (const auto& attr : decl.attributes) {
      if (!is_reference(attr.kind)) continue;
      auto ov = std::find_if(overrides.begin(), overrides.end(), [&](const auto& o) {
        return o.element == type && o.attribute == attr.name;
      });
      if (ov != overrides.end()) {
        table[{type, attr.name}] = {ov->verdict, DecisionSource::HumanOverride, false};
        continue;
      }
      if (!dtd.decls.contains(attr.name)) {
        table[{type, attr.name}] = {Significance::Significant, DecisionSource::AutoSafe, false};
        continue;
      }
      bool all_same = true;
      for_each_element(doc.root, [&](const Element& e) {
        if (e.type != type) return;
        const std::string* value = e.attribute(attr.name);
        if (!value) return;
        for (const auto& id : split_ids(*value)) {
          auto it = ids.find(id);
          if (it == ids.end()) {
            if (dangling == DanglingPolicy::Fail) {
              throw Error(Errc::DanglingIdRef, "element '" + type + "' (line " + std::to_string(e.line) +
                                                   ") attribute '" + attr.name + "' refers to unknown ID '" +
                                                   id + "'");
            }
            continue;
          }
          if (it->second->type != attr.name) all_same = false;
        }
      });
      table[{type, attr.name}] = {all_same ? Significance::Insignificant : Significance::Significant,
                                  DecisionSource::AutoScan, true};
    }
  }
  return table;
}

Classification classify_element_types(const Dtd& dtd, const SignificanceTable& significance) {
  auto verdict = [&](const std::string& type, const std::string& attr) {
    auto it = significance.find({type, attr});
    if (it == significance.end()) {
      throw Error(Errc::UnclassifiedType, "no significance verdict for attribute '" + attr + "' of '" + type + "'");
    }
    return it->second.verdict;
  };
  auto all_plain = [](const ElementDecl& d) {
    return std::all_of(d.attributes.begin(), d.attributes.end(),
                       [](const auto& a) { return a.kind == AttrKind::Plain; });
  };
  auto refs_all_insignificant = [&](const ElementDecl& d) {
    bool any = false;
    for (const auto& a : d.attributes) {
      if (!is_reference(a.kind)) continue;
      any = true;
      if (verdict(d.type, a.name) != Significance::Insignificant) return false;
    }
    return any;
  };

  Classification cls;
  for (const auto& [type, d] : dtd.decls) {
    bool has_significant = false;
    for (const auto& a : d.attributes) {
      if (is_reference(a.kind) && verdict(type, a.name) == Significance::Significant) has_significant = true;
    }
    const bool rule1 = d.child_types.empty() && all_plain(d);
    const bool rule2 = d.has_id() || has_significant;
    const bool rule3 = d.child_types.empty() && !d.has_id() && refs_all_insignificant(d);
    if (rule2 && rule3) throw Error(Errc::ConflictingRules, "element type '" + type + "' is both object and connector");
    if (rule1) cls[type] = ElementClass::Property;
    if (rule2) cls[type] = ElementClass::Object;
    if (rule3) cls[type] = ElementClass::Connector;
  }

  auto children_are_properties = [&](const ElementDecl& d) {
    return std::all_of(d.child_types.begin(), d.child_types.end(), [&](const std::string& c) {
      auto it = cls.find(c);
      return it != cls.end() && it->second == ElementClass::Property;
    });
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [type, d] : dtd.decls) {
      if (cls.contains(type)) continue;
      if (all_plain(d) && children_are_properties(d)) {
        cls[type] = ElementClass::Property;
        changed = true;
      }
    }
  }

  for (const auto& [type, d] : dtd.decls) {
    if (cls.contains(type)) continue;
    if (!d.has_id() && children_are_properties(d) && refs_all_insignificant(d)) {
      cls[type] = ElementClass::Connector;
    }
  }
  for (const auto& [type, _] : dtd.decls) cls.try_emplace(type, ElementClass::Object);
  return cls;
}

// ---------------------------------------------------------------------------

namespace {

class GraphConstruction {
 public:
  GraphConstruction(const Document& doc, const Dtd& dtd, const Classification& classes,
                    const SignificanceTable& significance, const BuildConfig& config,
                    std::vector<std::string>* warnings)
      : doc_(doc), dtd_(dtd), classes_(classes), significance_(significance), config_(config),
        warnings_(warnings), graph_(config.weights) {}

  DataGraph run() {
    number(doc_.root);
    ids_ = index_ids(dtd_, doc_);
    const bool drop_root = config_.omit_root && root_is_container();
    if (config_.omit_root && !drop_root) warn("document root '" + doc_.root.type + "' is not a bare container; kept");
    if (drop_root) {
      std::map<std::string, int> seen;
      for (const auto& c : doc_.root.children) {
        visit(c, "/" + doc_.root.type + "/" + c.type + "[" + std::to_string(++seen[c.type]) + "]");
      }
    } else {
      visit(doc_.root, "/" + doc_.root.type);
    }
    DataGraph g = std::move(graph_).build();
    return add_opposite_edges(g, [](EdgeRole r) { return r == EdgeRole::Reference; });
  }

 private:
  void warn(std::string msg) {
    if (warnings_) warnings_->push_back(std::move(msg));
  }

  ElementClass class_of(const Element& e) const {
    auto it = classes_.find(e.type);
    if (it == classes_.end()) {
      throw Error(Errc::UnclassifiedType, "element type '" + e.type + "' (line " + std::to_string(e.line) +
                                              ") has no classification");
    }
    return it->second;
  }

  void number(const Element& e) {
    order_[&e] = order_.size();
    for (const auto& c : e.children) number(c);
  }

  std::string node_id(const Element& e) const { return "e" + std::to_string(order_.at(&e)); }

  bool root_is_container() const {
    const Element& r = doc_.root;
    if (!r.attributes.empty() || !trim(r.pcdata).empty()) return false;
    if (class_of(r) != ElementClass::Object) return false;
    return std::all_of(r.children.begin(), r.children.end(),
                       [&](const Element& c) { return class_of(c) == ElementClass::Object; });
  }

  PropertyNode property_of(const Element& p) {
    auto text = lifted_text(p, config_.pcdata_attribute);
    if (p.attributes.empty() && p.children.empty()) return PropertyNode::leaf(p.type, trim(p.pcdata));
    PropertyNode prop;
    prop.name = p.type;
    for (const auto& [name, value] : p.attributes) prop.children.push_back(PropertyNode::leaf(name, value));
    if (text) prop.children.push_back(PropertyNode::leaf(config_.pcdata_attribute, *text));
    for (const auto& c : p.children) prop.children.push_back(property_of(c));
    return prop;
  }

  void visit(const Element& e, const std::string& path) {
    const ElementClass cls = class_of(e);
    const std::string id = node_id(e);
    GraphNode node;
    node.id = id;
    node.type = e.type;
    node.kind = cls == ElementClass::Connector ? NodeKind::Connector : NodeKind::Object;
    node.provenance = path;

    // Rule 1: plain attributes (including lifted PCDATA).
    for (const auto& [name, value] : e.attributes) {
      if (kind_of(dtd_, e.type, name) == AttrKind::Plain) node.properties.push_back(PropertyNode::leaf(name, value));
    }
    if (auto text = lifted_text(e, config_.pcdata_attribute)) {
      node.properties.push_back(PropertyNode::leaf(config_.pcdata_attribute, *text));
    }
    // Rule 2: property children become (possibly nested) properties.
    for (const auto& c : e.children) {
      if (class_of(c) == ElementClass::Property) node.properties.push_back(property_of(c));
    }
    if (node.kind == NodeKind::Object) node.name = choose_object_name(node.properties, config_.naming);
    graph_.add_node(std::move(node));

    // Rules 3 and 4: object children via hierarchical edges, connector
    // children via reference edges.
    std::map<std::string, int> seen;
    for (const auto& c : e.children) {
      const ElementClass child_cls = class_of(c);
      if (child_cls == ElementClass::Property) continue;
      const std::string child_path = path + "/" + c.type + "[" + std::to_string(++seen[c.type]) + "]";
      graph_.connect(id, node_id(c),
                     child_cls == ElementClass::Object ? EdgeRole::Hierarchical : EdgeRole::Reference);
      visit(c, child_path);
    }

    // Rule 5: reference attributes.
    for (const auto& [name, value] : e.attributes) {
      if (!is_reference(kind_of(dtd_, e.type, name))) continue;
      auto sig = significance_.find({e.type, name});
      if (sig == significance_.end()) {
        throw Error(Errc::UnclassifiedType, "no significance verdict for attribute '" + name + "' of '" + e.type + "'");
      }
      std::vector<std::string> targets = resolve(e, name, value);
      if (sig->second.verdict == Significance::Insignificant) {
        for (const auto& t : targets) graph_.connect(id, t, EdgeRole::Reference);
        continue;
      }
      if (targets.empty()) {
        warn("element '" + e.type + "' (line " + std::to_string(e.line) + ") attribute '" + name +
             "' refers to nothing; no connector created");
        continue;
      }
      GraphNode conn;
      conn.id = id + "@" + name;
      conn.kind = NodeKind::Connector;
      conn.type = name;
      conn.provenance = path + "/@" + name;
      graph_.add_node(std::move(conn));
      graph_.connect(id, id + "@" + name, EdgeRole::Reference);
      for (const auto& t : targets) graph_.connect(id + "@" + name, t, EdgeRole::Reference);
    }
  }

  std::vector<std::string> resolve(const Element& e, const std::string& attr, const std::string& value) {
    std::vector<std::string> out;
    for (const auto& ref : split_ids(value)) {
      auto it = ids_.find(ref);
      const std::string where = "element '" + e.type + "' (line " + std::to_string(e.line) + ") attribute '" +
                                attr + "' refers to ";
      if (it == ids_.end()) {
        if (config_.dangling == DanglingPolicy::Fail) throw Error(Errc::DanglingIdRef, where + "unknown ID '" + ref + "'");
        warn(where + "unknown ID '" + ref + "'; skipped");
        continue;
      }
      const Element& target = *it->second;
      if (class_of(target) != ElementClass::Object) {
        throw Error(Errc::TargetIsProperty, where + "'" + ref + "' of type '" + target.type + "', classified as " +
                                                std::string(to_string(class_of(target))));
      }
      out.push_back(node_id(target));
    }
    return out;
  }

  const Document& doc_;
  const Dtd& dtd_;
  const Classification& classes_;
  const SignificanceTable& significance_;
  const BuildConfig& config_;
  std::vector<std::string>* warnings_;
  GraphBuilder graph_;
  std::unordered_map<const Element*, std::size_t> order_;
  std::unordered_map<std::string, const Element*> ids_;
};

}  // namespace

DataGraph build_graph(const Document& doc, const Dtd& dtd, const Classification& classes,
                      const SignificanceTable& significance, const BuildConfig& config,
                      std::vector<std::string>* warnings) {
  if (auto err = config.weights.check()) throw Error(Errc::InvalidConfig, *err);
  if (config.pcdata_attribute.empty()) throw Error(Errc::InvalidConfig, "PCDATA attribute name is empty");
  return GraphConstruction(doc, dtd, classes, significance, config, warnings).run();
}

TransformResult transform(const Document& doc, const Dtd& dtd, std::span<const SignificanceOverride> overrides,
                          const BuildConfig& config) {
  TransformResult r;
  r.dtd = reconcile(dtd, doc);
  r.warnings = r.dtd.warnings;
  r.significance = ref_attr_significance(r.dtd, doc, overrides, config.dangling);
  r.classes = classify_element_types(r.dtd, r.significance);
  r.graph = build_graph(doc, r.dtd, r.classes, r.significance, config, &r.warnings);
  return r;
}

std::string significance_report(const SignificanceTable& table) {
  std::ostringstream os;
  std::size_t pending = 0;
  for (const auto& [_, v] : table) pending += v.needs_confirmation ? 1 : 0;
  os << "reference attributes: " << table.size() << ", awaiting confirmation: " << pending << "\n";
  for (const auto& [key, v] : table) {
    os << key.first << "/@" << key.second << "\t" << to_string(v.verdict) << "\t" << to_string(v.source);
    if (v.needs_confirmation) os << "\tneeds confirmation";
    os << "\n";
  }
  return os.str();
}

}  // namespace ocpg::xml
