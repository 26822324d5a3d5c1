#pragma once

#include <random>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "ocpg/graph.hpp"
#include "ocpg/rdb.hpp"
#include "ocpg/rdf.hpp"

namespace ocpg::testing {

using Rng = std::mt19937_64;

struct SearchCase {
  DataGraph graph;
  OracleQuery query;
};

/// A valid graph of at most `max_nodes` nodes and `max_edges` edges (opposites
/// included) whose names and types are single tokens, plus 1-3 keywords.
SearchCase random_search_case(Rng& rng, std::size_t max_nodes = 12, std::size_t max_edges = 16);

/// Entities, optionally a weak entity, a relationship, an auxiliary relation
/// and a relation with a composite foreign key, with random rows.
rdb::Database random_database(Rng& rng);

struct XmlCase {
  std::string dtd;
  std::string document;
  bool omit_root = false;
};
XmlCase random_xml(Rng& rng);

std::vector<rdf::Triple> random_triples(Rng& rng);

/// Random valid graph with nested properties (no search constraints).
DataGraph random_graph(Rng& rng, std::size_t max_nodes = 100);

}  // namespace ocpg::testing
