#include "ocpg/naming.hpp"

namespace ocpg {

std::string_view to_string(Significance s) {
  return s == Significance::Significant ? "significant" : "insignificant";
}

std::string normalize_attr_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '_' || c == '-') continue;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out += c;
  }
  if (out.size() > 2 && out.ends_with("id")) out.resize(out.size() - 2);
  return out;
}

std::optional<std::string> choose_object_name(std::span<const PropertyNode> properties,
                                              const NamingConfig& config) {
  for (const auto& wanted : config.name_attributes) {
    const std::string key = normalize_attr_name(wanted);
    for (const auto& p : properties) {
      if (p.value && !p.value->empty() && normalize_attr_name(p.name) == key) return *p.value;
    }
  }
  return std::nullopt;
}

}  // namespace ocpg
