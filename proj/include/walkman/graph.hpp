#ifndef WALKMAN_GRAPH_HPP_
#define WALKMAN_GRAPH_HPP_

#include <iosfwd>
#include <utility>
#include <vector>

#include "walkman/common.hpp"

namespace walkman {

//! Undirected simple graph over agents 0..n-1.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // each pair once, first < second
  // Sampled positions for the geometric family; empty otherwise.
  std::vector<std::pair<double, double>> coordinates;

  int num_edges() const { return static_cast<int>(edges.size()); }
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;
};

enum class GraphFamily { Complete, Cycle, Gilbert, Geometric };

struct GraphSpec {
  GraphFamily family = GraphFamily::Complete;
  int n = 0;
  double p = 0.5;        // gilbert: edge probability in (0,1]
  double side = 30.0;    // geometric: square side
  double radius = 15.0;  // geometric: connection radius (closed ball)
  std::uint64_t seed = 0;
};

//! Build a graph for the given family. Deterministic in (spec, seed).
//! Random families are resampled until connected, up to `max_retries`
//! attempts, then a TopologyError is raised.
Graph generate(const GraphSpec& spec, int max_retries = 100);

//! Single draw without the connectivity retry loop.
Graph generate_once(const GraphSpec& spec, Rng& rng);

//! True iff a breadth-first traversal from node 0 reaches all n nodes.
bool is_connected(const Graph& g);

// Edge-list text format: first line "n m", then one "i j" pair per line.
void save_edge_list(const Graph& g, std::ostream& out);
Graph load_edge_list(std::istream& in);
void save_edge_list_file(const Graph& g, const std::string& path);
Graph load_edge_list_file(const std::string& path);

}  // namespace walkman

#endif  // WALKMAN_GRAPH_HPP_
