#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ocpg {

// Every recoverable failure in the library is reported as an ocpg::Error.
// The code identifies the failure; callers (the CLI in particular) map codes
// to exit statuses.
enum class Errc {
  Io,
  BadDocument,         // malformed JSON / CSV / graph document
  SyntaxError,         // DTD or XML syntax
  UnknownTarget,       // foreign key to an undeclared relation
  UnknownRelation,     // rows for an undeclared relation
  InvalidSchema,
  InvalidRow,
  DuplicateKey,
  DanglingReference,   // FK value with no matching row
  DuplicateIdAttr,     // two ID attributes on one element type
  DuplicateId,         // two elements share an ID value
  DanglingIdRef,
  NameClash,           // synthetic PCDATA attribute collides
  UnclassifiedType,
  TargetIsProperty,
  ConflictingRules,
  NotASubtree,
  InvalidQuery,
  GraphTooLarge,
  EmptyIri,
  InvalidConfig,
  InvalidGraph,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), detail_(message) {}

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace ocpg
