#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocpg/graph.hpp"

namespace ocpg::search {

/// Lowercased ASCII-alphanumeric runs; bytes >= 0x80 count as letters.
std::vector<std::string> tokenize(std::string_view text);

/// A set of keywords. Each keyword is matched by all of its tokens.
class Query {
 public:
  /// Throws Error(InvalidQuery) for an empty set, a blank keyword, or more
  /// than 64 keywords. Case-insensitive duplicates are dropped.
  explicit Query(std::vector<std::string> keywords);
  /// "Dnepr, Russia,Ukraine"
  static Query parse(std::string_view comma_separated);

  const std::vector<std::string>& keywords() const { return keywords_; }

 private:
  std::vector<std::string> keywords_;
};

/// Whole-token, case-insensitive match against the node type, name, and
/// property names and values at any depth.
bool node_matches(const GraphNode& node, std::string_view keyword);

enum class DedupMode { ByEdgeSet, ByConnectorType };

struct DedupConfig {
  DedupMode mode = DedupMode::ByConnectorType;
  std::map<std::string, std::string> inverse_types;  // symmetric

  /// Records a <-> b. Throws Error(InvalidConfig) if either side already has
  /// a different inverse.
  void add_inverse(const std::string& a, const std::string& b);
};

struct AnswerTree {
  std::string root;
  std::vector<std::size_t> edges;                          // sorted indices into graph.edges()
  std::vector<std::string> nodes;                          // root first, then by id
  std::map<std::string, std::vector<std::string>> cover;   // keyword -> matching tree nodes
  double total_weight = 0.0;
};

/// Sorted undirected edges with connectors rendered by id (ByEdgeSet) or by
/// type, an inverse pair collapsing to its smaller member (ByConnectorType).
std::string canonical_form(const AnswerTree& tree, const DedupConfig& dedup, const DataGraph& graph);

/// True iff the tree covers every keyword, no leaf can be dropped, and the
/// root cannot be dropped when it has a single child. Throws
/// Error(NotASubtree) when the edges do not form a tree rooted at tree.root.
bool is_nonredundant(const AnswerTree& tree, const Query& query, const DataGraph& graph);

struct SearchOptions {
  std::size_t limit = 10;  // 0 = unlimited
  DedupConfig dedup;
  std::size_t budget = 2'000'000;  // partial trees explored before GraphTooLarge
};

/// Answers in nondecreasing weight, ties by sorted edge ids; later
/// duplicates (equal canonical form) are suppressed.
class AnswerStream {
 public:
  AnswerStream(const DataGraph& graph, const Query& query, SearchOptions options = {});
  ~AnswerStream();
  AnswerStream(AnswerStream&&) noexcept;
  AnswerStream& operator=(AnswerStream&&) noexcept;

  /// Throws Error(GraphTooLarge) when the budget runs out.
  std::optional<AnswerTree> next();
  std::size_t explored() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<AnswerTree> enumerate_answers(const DataGraph& graph, const Query& query,
                                          const SearchOptions& options = {});

/// One JSON line: {rank, total_weight, root, nodes, edges, matches}.
std::string answer_json(const AnswerTree& tree, std::size_t rank, const DataGraph& graph);

}  // namespace ocpg::search
