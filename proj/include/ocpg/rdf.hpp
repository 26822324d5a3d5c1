#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ocpg/graph.hpp"

// RDF triple set -> OCP data graph: one node per subject, literal objects as
// properties, humanized IRI labels, and chain nesting of subjects that are
// referenced once and carry only literals.
namespace ocpg::rdf {

struct Term {
  enum class Kind { Iri, Literal };
  Kind kind = Kind::Iri;
  std::string text;  // IRI, blank node label ("_:b0") or literal lexical form

  bool is_literal() const { return kind == Kind::Literal; }
  static Term iri(std::string s) { return {Kind::Iri, std::move(s)}; }
  static Term literal(std::string s) { return {Kind::Literal, std::move(s)}; }

  auto operator<=>(const Term&) const = default;
};

struct Triple {
  std::string subject;
  std::string predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
};

struct LineIssue {
  std::size_t line = 0;
  std::string message;
};

/// N-Triples-style input: one triple per line, IRIs in angle brackets, blank
/// nodes as _:label, literals in double quotes (language tags and datatypes
/// are accepted and dropped), a terminating period, '#' comments. Bad lines
/// are appended to `issues` and skipped; with issues == nullptr the first
/// bad line throws Error(SyntaxError).
std::vector<Triple> parse_ntriples(std::string_view text, std::vector<LineIssue>* issues = nullptr);

/// "http://www.w3.org/2000/10/swap/pim/contact#fullName" -> "full name".
/// Throws Error(EmptyIri).
std::string label_of(std::string_view iri);

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kFoafName = "http://xmlns.com/foaf/0.1/name";

struct FoldConfig {
  std::vector<std::string> type_predicates{std::string(kRdfType)};
  std::vector<std::string> name_predicates{std::string(kRdfsLabel), std::string(kFoafName)};
  WeightPolicy weights;
};

/// Node ids are subject IRIs. Types come from type-predicate triples (first
/// by label; extras are reported as warnings), names from name-predicate
/// objects. Result does not depend on triple order or duplicates.
DataGraph fold_triples(std::vector<Triple> triples, const FoldConfig& config = {},
                       std::vector<std::string>* warnings = nullptr);

}  // namespace ocpg::rdf
