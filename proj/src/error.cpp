#include "ocpg/error.hpp"

namespace ocpg {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::Io: return "IoError";
    case Errc::BadDocument: return "BadDocument";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::UnknownRelation: return "UnknownRelation";
    case Errc::InvalidSchema: return "InvalidSchema";
    case Errc::InvalidRow: return "InvalidRow";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::DuplicateIdAttr: return "DuplicateIdAttr";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::DanglingIdRef: return "DanglingIdRef";
    case Errc::NameClash: return "NameClash";
    case Errc::UnclassifiedType: return "UnclassifiedType";
    case Errc::TargetIsProperty: return "TargetIsProperty";
    case Errc::ConflictingRules: return "ConflictingRules";
    case Errc::NotASubtree: return "NotASubtree";
    case Errc::InvalidQuery: return "InvalidQuery";
    case Errc::GraphTooLarge: return "GraphTooLarge";
    case Errc::EmptyIri: return "EmptyIri";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidGraph: return "InvalidGraph";
  }
  return "Error";
}

}  // namespace ocpg
