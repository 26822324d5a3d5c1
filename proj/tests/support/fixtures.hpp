#pragma once

#include <filesystem>
#include <string>

#include "ocpg/graph.hpp"
#include "ocpg/rdb.hpp"
#include "ocpg/xml.hpp"

namespace ocpg::testing {

std::filesystem::path fixture(const std::string& relative);
std::string read_text(const std::filesystem::path& path);

DataGraph load_graph_fixture(const std::string& relative);

rdb::BuildResult build_rdb_fixture(const std::string& schema, const std::string& data,
                                   const rdb::BuildConfig& config = {});

/// Reads the document, its DTD (SYSTEM id next to it) and optional overrides.
xml::TransformResult build_xml_fixture(const std::string& doc, const std::string& overrides = "",
                                       bool omit_root = true);

/// Drops every Opposite edge.
DataGraph originals_only(const DataGraph& graph);

}  // namespace ocpg::testing
