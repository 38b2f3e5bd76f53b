#include "walkman/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace walkman {

std::vector<int> Graph::degrees() const {
  std::vector<int> d(n, 0);
  for (const auto& [i, j] : edges) {
    ++d[i];
    ++d[j];
  }
  return d;
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

namespace {

void validate(const GraphSpec& spec) {
  if (spec.n <= 0) throw ParameterError("graph: n must be positive");
  switch (spec.family) {
    case GraphFamily::Gilbert:
      if (!(spec.p > 0.0 && spec.p <= 1.0))
        throw ParameterError("graph: gilbert p must be in (0,1]");
      break;
    case GraphFamily::Geometric:
      if (!(spec.side > 0.0)) throw ParameterError("graph: geometric side must be > 0");
      if (!(spec.radius > 0.0)) throw ParameterError("graph: geometric radius must be > 0");
      break;
    default:
      break;
  }
}

Graph complete_graph(int n) {
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  return g;
}

Graph cycle_graph(int n) {
  Graph g;
  g.n = n;
  if (n == 1) return g;
  if (n == 2) {
    g.edges.emplace_back(0, 1);
    return g;
  }
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    g.edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

Graph gilbert_graph(int n, double p, Rng& rng) {
  Graph g;
  g.n = n;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unif(rng) <= p) g.edges.emplace_back(i, j);
  return g;
}

Graph geometric_graph(int n, double side, double radius, Rng& rng) {
  Graph g;
  g.n = n;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  g.coordinates.reserve(n);
  for (int i = 0; i < n; ++i) {
    double x = unif(rng) * side;
    double y = unif(rng) * side;
    g.coordinates.emplace_back(x, y);
  }
  double r2 = radius * radius;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dx = g.coordinates[i].first - g.coordinates[j].first;
      double dy = g.coordinates[i].second - g.coordinates[j].second;
      // ties at exactly radius distance are connected
      if (dx * dx + dy * dy <= r2) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

}  // namespace

Graph generate_once(const GraphSpec& spec, Rng& rng) {
  validate(spec);
  switch (spec.family) {
    case GraphFamily::Complete:
      return complete_graph(spec.n);
    case GraphFamily::Cycle:
      return cycle_graph(spec.n);
    case GraphFamily::Gilbert:
      return gilbert_graph(spec.n, spec.p, rng);
    case GraphFamily::Geometric:
      return geometric_graph(spec.n, spec.side, spec.radius, rng);
  }
  throw ParameterError("graph: unknown family");
}

Graph generate(const GraphSpec& spec, int max_retries) {
  validate(spec);
  Rng rng(spec.seed);
  bool random_family = spec.family == GraphFamily::Gilbert ||
                       spec.family == GraphFamily::Geometric;
  if (!random_family) return generate_once(spec, rng);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Graph g = generate_once(spec, rng);
    if (is_connected(g)) return g;
  }
  throw TopologyError("graph: no connected sample within retry budget");
}

bool is_connected(const Graph& g) {
  if (g.n == 0) return false;
  auto adj = g.adjacency();
  std::vector<char> seen(g.n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == g.n;
}

void save_edge_list(const Graph& g, std::ostream& out) {
  out << g.n << ' ' << g.num_edges() << '\n';
  for (const auto& [i, j] : g.edges) out << i << ' ' << j << '\n';
}

Graph load_edge_list(std::istream& in) {
  Graph g;
  long m = 0;
  if (!(in >> g.n >> m)) throw ParseError("edge list: missing header");
  if (g.n <= 0 || m < 0) throw ParseError("edge list: bad header");
  std::set<std::pair<int, int>> seen;
  for (long e = 0; e < m; ++e) {
    int i, j;
    if (!(in >> i >> j)) throw ParseError("edge list: truncated");
    if (i == j) throw ParseError("edge list: self-loop");
    if (i < 0 || j < 0 || i >= g.n || j >= g.n)
      throw ParseError("edge list: endpoint out of range");
    auto edge = std::make_pair(std::min(i, j), std::max(i, j));
    if (!seen.insert(edge).second) throw ParseError("edge list: duplicate edge");
    g.edges.push_back(edge);
  }
  return g;
}

void save_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  save_edge_list(g, out);
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  return load_edge_list(in);
}

}  // namespace walkman
