#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocpg/graph.hpp"

namespace ocpg {

/// Whether a foreign key / reference attribute name says more than "points at
/// the referenced entity". Significant references become explicit connectors.
enum class Significance { Significant, Insignificant };

std::string_view to_string(Significance s);

/// What to do when a reference resolves to nothing.
enum class DanglingPolicy { Fail, WarnSkip };

/// Lowercases, drops '_' and '-', and strips a trailing "id" when something is
/// left: "student_id" -> "student", "Country" -> "country".
std::string normalize_attr_name(std::string_view name);

struct NamingConfig {
  // Checked in this order; compared after normalize_attr_name.
  std::vector<std::string> name_attributes{"name", "title", "label", "caption"};
};

/// Picks an object name from its top-level leaf properties, preferring the
/// earliest entry of the configured list.
std::optional<std::string> choose_object_name(std::span<const PropertyNode> properties,
                                              const NamingConfig& config = {});

}  // namespace ocpg
