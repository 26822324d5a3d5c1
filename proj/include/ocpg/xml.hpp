#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ocpg/graph.hpp"
#include "ocpg/naming.hpp"

namespace ocpg::xml {

// ---------------------------------------------------------------------------
// DTD

enum class AttrKind { Plain, Id, IdRef, IdRefs };

std::string_view to_string(AttrKind kind);

inline bool is_reference(AttrKind kind) { return kind == AttrKind::IdRef || kind == AttrKind::IdRefs; }

struct AttributeDecl {
  std::string name;
  AttrKind kind = AttrKind::Plain;
};

struct ElementDecl {
  std::string type;
  std::set<std::string> child_types;
  bool has_pcdata = false;
  std::vector<AttributeDecl> attributes;
  bool declared = true;  // false when only an ATTLIST (or the document) introduced it

  const AttributeDecl* attribute(std::string_view name) const;
  bool has_id() const;
  bool has_reference() const;
};

struct Dtd {
  std::map<std::string, ElementDecl> decls;
  std::optional<std::string> root;
  std::vector<std::string> warnings;

  const ElementDecl* find(std::string_view type) const;
};

/// Parses ELEMENT and ATTLIST declarations. Content models are flattened to
/// the set of mentioned element types; ENTITY and NOTATION declarations are
/// skipped with a warning. Throws Error(SyntaxError) with line:column, or
/// Error(DuplicateIdAttr).
Dtd parse_dtd(std::string_view text);

// ---------------------------------------------------------------------------
// Documents

struct Element {
  std::string type;
  std::vector<std::pair<std::string, std::string>> attributes;  // document order
  std::vector<Element> children;
  std::string pcdata;  // concatenated character data directly inside this element
  std::size_t line = 0;

  const std::string* attribute(std::string_view name) const;
};

struct Document {
  Element root;
  std::optional<std::string> doctype_name;
  std::optional<std::string> system_id;
  std::optional<std::string> internal_subset;
};

/// Well-formedness is checked by expat. The internal DTD subset, if any, is
/// returned verbatim for parse_dtd.
Document parse_document(std::string_view text);

/// Moves non-blank PCDATA of an element that also has attributes or
/// sub-elements into a synthetic attribute. Non-recursive. Throws
/// Error(NameClash) when the attribute already exists.
Element pcdata_lift(const Element& element, std::string_view attribute_name = "text");

// ---------------------------------------------------------------------------
// Stage 1: significance and classification

enum class DecisionSource { AutoSafe, AutoScan, HumanOverride };

std::string_view to_string(DecisionSource source);

struct RefVerdict {
  Significance verdict = Significance::Significant;
  DecisionSource source = DecisionSource::AutoSafe;
  bool needs_confirmation = false;
};

/// Keyed by (element type, attribute name).
using SignificanceTable = std::map<std::pair<std::string, std::string>, RefVerdict>;

struct SignificanceOverride {
  std::string element;
  std::string attribute;
  Significance verdict;
};

/// [{element, attribute, verdict: "significant"|"insignificant"}]
std::vector<SignificanceOverride> parse_overrides(std::string_view json_text);

/// Adds declarations for element types and attributes that occur in the
/// document but not in the DTD (all attributes Plain), recording warnings.
Dtd reconcile(const Dtd& dtd, const Document& doc);

/// Decides significance for every reference attribute of the DTD. An
/// attribute named differently from every element type is significant
/// outright; otherwise the document is scanned and the verdict is flagged
/// for human confirmation. Dangling IDREFs met while scanning throw
/// Error(DanglingIdRef) under DanglingPolicy::Fail and are ignored otherwise.
SignificanceTable ref_attr_significance(const Dtd& dtd, const Document& doc,
                                        std::span<const SignificanceOverride> overrides = {},
                                        DanglingPolicy dangling = DanglingPolicy::Fail);

enum class ElementClass { Object, Connector, Property };

std::string_view to_string(ElementClass c);

using Classification = std::map<std::string, ElementClass>;

/// Classifies every declared element type: base rules, the recursive
/// property rule to fixpoint, the generalized connector rule, and objects
/// for the remainder.
Classification classify_element_types(const Dtd& dtd, const SignificanceTable& significance);

// ---------------------------------------------------------------------------
// Stage 2: graph construction

struct BuildConfig {
  NamingConfig naming;
  WeightPolicy weights;
  DanglingPolicy dangling = DanglingPolicy::Fail;
  std::string pcdata_attribute = "text";
  // Drop the document root when it is a bare container (no attributes, no
  // text, only object children).
  bool omit_root = false;
};

/// Builds the data graph from a classified document. Node ids are "e<n>"
/// with n the element's preorder index (root = 0); connectors created for a
/// significant reference attribute are "e<n>@<attribute>".
DataGraph build_graph(const Document& doc, const Dtd& dtd, const Classification& classes,
                      const SignificanceTable& significance, const BuildConfig& config = {},
                      std::vector<std::string>* warnings = nullptr);

struct TransformResult {
  DataGraph graph;
  Dtd dtd;  // reconciled
  SignificanceTable significance;
  Classification classes;
  std::vector<std::string> warnings;
};

/// reconcile -> significance -> classification -> build.
TransformResult transform(const Document& doc, const Dtd& dtd,
                          std::span<const SignificanceOverride> overrides = {},
                          const BuildConfig& config = {});

/// Plain-text report of every significance decision; automatic scan verdicts
/// carry a "needs confirmation" marker.
std::string significance_report(const SignificanceTable& table);

}  // namespace ocpg::xml
