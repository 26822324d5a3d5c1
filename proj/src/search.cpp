#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "ocpg/error.hpp"
#include "ocpg/search.hpp"

namespace ocpg::search {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

void collect_tokens(const PropertyNode& p, std::vector<std::string>& out) {
  for (auto& t : tokenize(p.name)) out.push_back(std::move(t));
  if (p.value) {
    for (auto& t : tokenize(*p.value)) out.push_back(std::move(t));
  }
  for (const auto& c : p.children) collect_tokens(c, out);
}

std::vector<std::string> node_tokens(const GraphNode& node) {
  std::vector<std::string> out = tokenize(node.type);
  if (node.name) {
    for (auto& t : tokenize(*node.name)) out.push_back(std::move(t));
  }
  for (const auto& p : node.properties) collect_tokens(p, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool contains_all(const std::vector<std::string>& bag, const std::vector<std::string>& wanted) {
  return std::all_of(wanted.begin(), wanted.end(),
                     [&](const std::string& t) { return std::binary_search(bag.begin(), bag.end(), t); });
}

std::string render(const GraphNode& n, const DedupConfig& dedup) {
  std::string tag;
  if (!n.is_connector()) {
    tag = "o:" + n.id;
  } else if (dedup.mode == DedupMode::ByEdgeSet) {
    tag = "c:" + n.id;
  } else {
    std::string type = n.type;
    auto inv = dedup.inverse_types.find(type);
    if (inv != dedup.inverse_types.end() && inv->second < type) type = inv->second;
    tag = "t:" + type;
  }
  return std::to_string(tag.size()) + ":" + tag;
}

// Checks the tree shape; returns node ids with the root first.
std::vector<std::string> tree_nodes(const AnswerTree& tree, const DataGraph& graph) {
  if (!graph.find(tree.root)) throw Error(Errc::NotASubtree, "root '" + tree.root + "' is not in the graph");
  std::set<std::string> seen{tree.root};
  std::map<std::string, std::vector<std::string>> children;
  std::set<std::size_t> used;
  for (std::size_t e : tree.edges) {
    if (e >= graph.edges().size()) throw Error(Errc::NotASubtree, "edge #" + std::to_string(e) + " does not exist");
    if (!used.insert(e).second) throw Error(Errc::NotASubtree, "edge #" + std::to_string(e) + " listed twice");
    const Edge& edge = graph.edges()[e];
    if (edge.to == tree.root) throw Error(Errc::NotASubtree, "an edge enters the root '" + tree.root + "'");
    if (!seen.insert(edge.to).second) {
      throw Error(Errc::NotASubtree, "node '" + edge.to + "' has more than one incoming tree edge");
    }
    children[edge.from].push_back(edge.to);
  }
  std::vector<std::string> order{tree.root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& c : children[order[i]]) order.push_back(c);
  }
  if (order.size() != seen.size()) throw Error(Errc::NotASubtree, "tree edges are not all reachable from the root");
  return order;
}

struct VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Query::Query(std::vector<std::string> keywords) {
  std::set<std::string> seen;
  for (auto& k : keywords) {
    std::string t = trim(k);
    if (t.empty()) throw Error(Errc::InvalidQuery, "empty keyword");
    if (tokenize(t).empty()) throw Error(Errc::InvalidQuery, "keyword '" + t + "' has no letters or digits");
    if (seen.insert(lower(t)).second) keywords_.push_back(std::move(t));
  }
  if (keywords_.empty()) throw Error(Errc::InvalidQuery, "a query needs at least one keyword");
  if (keywords_.size() > 64) throw Error(Errc::InvalidQuery, "at most 64 keywords are supported");
}

Query Query::parse(std::string_view comma_separated) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    auto comma = comma_separated.find(',', pos);
    parts.emplace_back(comma_separated.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return Query(std::move(parts));
}

bool node_matches(const GraphNode& node, std::string_view keyword) {
  const auto wanted = tokenize(keyword);
  return !wanted.empty() && contains_all(node_tokens(node), wanted);
}

void DedupConfig::add_inverse(const std::string& a, const std::string& b) {
  auto clash = [&](const std::string& x, const std::string& y) {
    auto it = inverse_types.find(x);
    return it != inverse_types.end() && it->second != y;
  };
  if (a.empty() || b.empty()) throw Error(Errc::InvalidConfig, "inverse types must be nonempty");
  if (clash(a, b) || clash(b, a)) {
    throw Error(Errc::InvalidConfig, "conflicting inverse declarations for '" + a + "' / '" + b + "'");
  }
  inverse_types[a] = b;
  inverse_types[b] = a;
}

std::string canonical_form(const AnswerTree& tree, const DedupConfig& dedup, const DataGraph& graph) {
  if (tree.edges.empty()) {
    const GraphNode* n = graph.find(tree.root);
    return n ? render(*n, dedup) : std::string();
  }
  std::vector<std::string> parts;
  for (std::size_t e : tree.edges) {
    const Edge& edge = graph.edges()[e];
    std::string a = render(*graph.find(edge.from), dedup);
    std::string b = render(*graph.find(edge.to), dedup);
    if (b < a) std::swap(a, b);
    parts.push_back(a + "~" + b);
  }
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) key += p + ";";
  return key;
}

bool is_nonredundant(const AnswerTree& tree, const Query& query, const DataGraph& graph) {
  const auto order = tree_nodes(tree, graph);
  std::vector<std::vector<std::string>> wanted;
  for (const auto& k : query.keywords()) wanted.push_back(tokenize(k));
  auto covers = [&](const std::string& skip) {
    for (const auto& w : wanted) {
      bool hit = false;
      for (const auto& id : order) {
        if (id != skip && contains_all(node_tokens(*graph.find(id)), w)) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
    return true;
  };
  if (!covers({})) return false;
  std::map<std::string, std::size_t> out_degree;
  for (std::size_t e : tree.edges) ++out_degree[graph.edges()[e].from];
  for (const auto& id : order) {
    if (id != tree.root && out_degree[id] == 0 && covers(id)) return false;
  }
  if (out_degree[tree.root] == 1 && covers(tree.root)) return false;
  return true;
}

// ---------------------------------------------------------------------------

struct AnswerStream::Impl {
  struct State {
    double f = 0;
    double g = 0;
    std::vector<std::uint32_t> edges;  // sorted
    std::vector<std::uint32_t> nodes;  // sorted
    std::uint32_t root = 0;
    std::uint64_t mask = 0;
  };
  struct Later {
    bool operator()(const State& a, const State& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.g != b.g) return a.g > b.g;
      if (a.edges != b.edges) return a.edges > b.edges;
      return a.root > b.root;
    }
  };

  const DataGraph& graph;
  Query query;
  SearchOptions options;
  std::uint64_t full = 0;
  std::vector<std::uint64_t> node_mask;
  std::vector<std::uint32_t> edge_from, edge_to;
  std::vector<std::vector<std::uint32_t>> out_edges, in_edges;
  std::vector<std::vector<double>> dist;  // keyword -> node -> undirected distance to a match
  std::priority_queue<State, std::vector<State>, Later> heap;
  std::unordered_set<std::vector<std::uint32_t>, VecHash> visited;
  std::vector<State> pending;
  double pending_weight = 0;
  std::deque<AnswerTree> ready;
  std::unordered_set<std::string> emitted_keys;
  std::size_t emitted = 0;
  std::size_t explored = 0;

  Impl(const DataGraph& g, const Query& q, SearchOptions opts) : graph(g), query(q), options(std::move(opts)) {
    const auto nodes = graph.nodes();
    const auto edges = graph.edges();
    const std::size_t k = query.keywords().size();
    full = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;

    node_mask.assign(nodes.size(), 0);
    std::vector<std::vector<std::string>> wanted;
    for (const auto& kw : query.keywords()) wanted.push_back(tokenize(kw));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto bag = node_tokens(nodes[i]);
      for (std::size_t j = 0; j < k; ++j) {
        if (contains_all(bag, wanted[j])) node_mask[i] |= std::uint64_t{1} << j;
      }
    }

    out_edges.resize(nodes.size());
    in_edges.resize(nodes.size());
    std::vector<std::vector<std::pair<std::uint32_t, double>>> undirected(nodes.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto from = graph.index_of(edges[e].from);
      auto to = graph.index_of(edges[e].to);
      if (!from || !to) throw Error(Errc::InvalidGraph, "edge #" + std::to_string(e) + " has a dangling endpoint");
      edge_from.push_back(static_cast<std::uint32_t>(*from));
      edge_to.push_back(static_cast<std::uint32_t>(*to));
      out_edges[*from].push_back(static_cast<std::uint32_t>(e));
      in_edges[*to].push_back(static_cast<std::uint32_t>(e));
      undirected[*from].emplace_back(static_cast<std::uint32_t>(*to), edges[e].weight);
      undirected[*to].emplace_back(static_cast<std::uint32_t>(*from), edges[e].weight);
    }

    // Lower bounds for the search: distance from every node to the nearest
    // match of each keyword, ignoring direction.
    dist.assign(k, std::vector<double>(nodes.size(), kInf));
    for (std::size_t j = 0; j < k; ++j) {
      using Item = std::pair<double, std::uint32_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      for (std::uint32_t i = 0; i < nodes.size(); ++i) {
        if (node_mask[i] >> j & 1) {
          dist[j][i] = 0;
          pq.emplace(0.0, i);
        }
      }
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[j][u]) continue;
        for (auto [v, w] : undirected[u]) {
          if (d + w < dist[j][v]) {
            dist[j][v] = d + w;
            pq.emplace(d + w, v);
          }
        }
      }
    }

    // Every answer contains a match of the rarest keyword.
    std::size_t rarest = 0, best = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t count = 0;
      for (auto m : node_mask) count += m >> j & 1;
      if (count < best) {
        best = count;
        rarest = j;
      }
    }
    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
      if (!(node_mask[i] >> rarest & 1)) continue;
      State s;
      s.nodes = {i};
      s.root = i;
      s.mask = node_mask[i];
      s.f = heuristic(s);
      if (s.f == kInf) continue;
      ++explored;
      heap.push(std::move(s));
    }
  }

  double heuristic(const State& s) const {
    double h = 0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
      if (s.mask >> j & 1) continue;
      double best = kInf;
      for (auto n : s.nodes) best = std::min(best, dist[j][n]);
      h = std::max(h, best);
    }
    return h;
  }

  bool nonredundant(const State& s) const {
    if (s.edges.empty()) return true;
    std::vector<std::uint32_t> out_degree(s.nodes.size(), 0);
    auto pos = [&](std::uint32_t n) {
      return static_cast<std::size_t>(std::lower_bound(s.nodes.begin(), s.nodes.end(), n) - s.nodes.begin());
    };
    for (auto e : s.edges) ++out_degree[pos(edge_from[e])];
    auto covers_without = [&](std::size_t skip) {
      std::uint64_t m = 0;
      for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        if (i != skip) m |= node_mask[s.nodes[i]];
      }
      return m == full;
    };
    const std::size_t root = pos(s.root);
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      if (i != root && out_degree[i] == 0 && covers_without(i)) return false;
    }
    return !(out_degree[root] == 1 && covers_without(root));
  }

  void push_child(const State& s, std::uint32_t edge, std::uint32_t added, std::uint32_t new_root) {
    State c;
    c.edges = s.edges;
    c.edges.insert(std::upper_bound(c.edges.begin(), c.edges.end(), edge), edge);
    if (visited.contains(c.edges)) return;
    c.nodes = s.nodes;
    c.nodes.insert(std::upper_bound(c.nodes.begin(), c.nodes.end(), added), added);
    c.root = new_root;
    c.mask = s.mask | node_mask[added];
    for (auto e : c.edges) c.g += graph.edges()[e].weight;
    const double h = heuristic(c);
    if (h == kInf) return;
    c.f = c.g + h;
    visited.insert(c.edges);
    if (++explored > options.budget) {
      throw Error(Errc::GraphTooLarge, "search explored more than " + std::to_string(options.budget) +
                                           " partial trees; raise the budget or narrow the query");
    }
    heap.push(std::move(c));
  }

  void expand(const State& s) {
    auto in_tree = [&](std::uint32_t n) { return std::binary_search(s.nodes.begin(), s.nodes.end(), n); };
    for (auto u : s.nodes) {
      for (auto e : out_edges[u]) {
        if (!in_tree(edge_to[e])) push_child(s, e, edge_to[e], s.root);
      }
    }
    for (auto e : in_edges[s.root]) {
      if (!in_tree(edge_from[e])) push_child(s, e, edge_from[e], edge_from[e]);
    }
  }

  AnswerTree to_answer(const State& s) const {
    AnswerTree t;
    const auto nodes = graph.nodes();
    t.root = nodes[s.root].id;
    t.edges.assign(s.edges.begin(), s.edges.end());
    t.total_weight = s.g;
    t.nodes.push_back(t.root);
    std::vector<std::string> rest;
    for (auto n : s.nodes) {
      if (n != s.root) rest.push_back(nodes[n].id);
    }
    std::sort(rest.begin(), rest.end());
    t.nodes.insert(t.nodes.end(), rest.begin(), rest.end());
    for (std::size_t j = 0; j < query.keywords().size(); ++j) {
      auto& ids = t.cover[query.keywords()[j]];
      for (const auto& id : t.nodes) {
        if (node_mask[*graph.index_of(id)] >> j & 1) ids.push_back(id);
      }
      std::sort(ids.begin(), ids.end());
    }
    return t;
  }

  void flush() {
    std::sort(pending.begin(), pending.end(), [](const State& a, const State& b) {
      return a.edges != b.edges ? a.edges < b.edges : a.root < b.root;
    });
    for (const auto& s : pending) {
      AnswerTree t = to_answer(s);
      if (emitted_keys.insert(canonical_form(t, options.dedup, graph)).second) ready.push_back(std::move(t));
    }
    pending.clear();
  }

  std::optional<AnswerTree> next() {
    while (true) {
      if (options.limit != 0 && emitted >= options.limit) return std::nullopt;
      if (!ready.empty()) {
        AnswerTree t = std::move(ready.front());
        ready.pop_front();
        ++emitted;
        return t;
      }
      if (heap.empty()) {
        if (pending.empty()) return std::nullopt;
        flush();
        continue;
      }
      if (!pending.empty() && heap.top().f > pending_weight + kEps) {
        flush();
        continue;
      }
      State s = heap.top();
      heap.pop();
      if (s.mask == full) {
        if (nonredundant(s)) {
          if (pending.empty()) pending_weight = s.g;
          pending.push_back(std::move(s));
        }
        continue;
      }
      expand(s);
    }
  }
};

AnswerStream::AnswerStream(const DataGraph& graph, const Query& query, SearchOptions options)
    : impl_(std::make_unique<Impl>(graph, query, std::move(options))) {}
AnswerStream::~AnswerStream() = default;
AnswerStream::AnswerStream(AnswerStream&&) noexcept = default;
AnswerStream& AnswerStream::operator=(AnswerStream&&) noexcept = default;

std::optional<AnswerTree> AnswerStream::next() { return impl_->next(); }
std::size_t AnswerStream::explored() const { return impl_->explored; }

std::vector<AnswerTree> enumerate_answers(const DataGraph& graph, const Query& query, const SearchOptions& options) {
  AnswerStream stream(graph, query, options);
  std::vector<AnswerTree> out;
  while (auto t = stream.next()) out.push_back(std::move(*t));
  return out;
}

std::string answer_json(const AnswerTree& tree, std::size_t rank, const DataGraph& graph) {
  using nlohmann::json;
  json j;
  j["rank"] = rank;
  j["total_weight"] = tree.total_weight;
  j["root"] = tree.root;
  json nodes = json::array();
  for (const auto& id : tree.nodes) {
    const GraphNode* n = graph.find(id);
    json jn{{"id", id}, {"type", n ? n->type : std::string()}};
    if (n && n->name) jn["name"] = *n->name;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (std::size_t e : tree.edges) {
    const Edge& edge = graph.edges()[e];
    edges.push_back({{"from", edge.from}, {"to", edge.to}, {"orientation", to_string(edge.orientation)}});
  }
  j["edges"] = std::move(edges);
  j["matches"] = tree.cover;
  return j.dump();
}

}  // namespace ocpg::search
