#include "consflow/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "consflow/errors.hpp"
#include "consflow/rng.hpp"
#include "consflow/tolerances.hpp"

namespace consflow {

NetworkGraph::NetworkGraph(std::size_t vertex_count,
                           std::vector<std::pair<std::size_t, std::size_t>> edges)
    : vertex_count_(vertex_count) {
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a == b) {
      throw Error(ErrorCode::bad_param,
                  "self-loop at vertex " + std::to_string(a));
    }
    if (a >= vertex_count_ || b >= vertex_count_) {
      throw Error(ErrorCode::bad_param, "edge endpoint out of range");
    }
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error(ErrorCode::bad_param, "duplicate edge");
  }
  adjacency_.assign(vertex_count_, {});
  for (auto [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

std::size_t NetworkGraph::max_degree() const {
  std::size_t d = 0;
  for (const auto& nbrs : adjacency_) d = std::max(d, nbrs.size());
  return d;
}

Topology topology_from_string(const std::string& name) {
  if (name == "path") return Topology::path;
  if (name == "cycle") return Topology::cycle;
  if (name == "complete") return Topology::complete;
  if (name == "star") return Topology::star;
  if (name == "random" || name == "random_connected") {
    return Topology::random_connected;
  }
  throw Error(ErrorCode::bad_param, "unknown topology '" + name + "'");
}

const char* to_string(Topology t) noexcept {
  switch (t) {
    case Topology::path: return "path";
    case Topology::cycle: return "cycle";
    case Topology::complete: return "complete";
    case Topology::star: return "star";
    case Topology::random_connected: return "random_connected";
  }
  return "?";
}

DenseMatrix laplacian(const NetworkGraph& g) {
  const std::size_t n = g.vertex_count();
  DenseMatrix l(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    l(v, v) = static_cast<double>(g.degree(v));
  }
  for (auto [a, b] : g.edges()) {
    l(a, b) = -1.0;
    l(b, a) = -1.0;
  }
  return l;
}

namespace {

// Single-source BFS distances; unreachable vertices get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const NetworkGraph& g, std::size_t source) {
  constexpr std::size_t unreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.vertex_count(), unreached);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : g.neighbors(v)) {
      if (dist[w] == unreached) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

bool is_connected(const NetworkGraph& g) {
  if (g.vertex_count() == 0) return false;
  const auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](std::size_t d) {
    return d == std::numeric_limits<std::size_t>::max();
  });
}

std::size_t diameter(const NetworkGraph& g) {
  if (!is_connected(g)) {
    throw Error(ErrorCode::disconnected, "diameter needs a connected graph");
  }
  std::size_t best = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto dist = bfs_distances(g, v);
    for (std::size_t d : dist) best = std::max(best, d);
  }
  return best;
}

double lambda2(const NetworkGraph& g) {
  if (!is_connected(g)) {
    throw Error(ErrorCode::disconnected, "lambda2 needs a connected graph");
  }
  if (g.vertex_count() < 2) {
    throw Error(ErrorCode::bad_param, "lambda2 needs at least 2 vertices");
  }
  return sym_eigenvalues(laplacian(g))[1];
}

GraphReport graph_report(const NetworkGraph& g) {
  GraphReport report;
  report.connected = is_connected(g);
  if (!report.connected) return report;
  report.diameter = diameter(g);
  const std::size_t n = g.vertex_count();
  if (n >= 2) {
    report.lambda2 = lambda2(g);
    report.lower_bound =
        4.0 / (static_cast<double>(n) * static_cast<double>(*report.diameter));
    report.upper_bound = static_cast<double>(n);
    report.paper_upper_bound =
        static_cast<double>(n) / static_cast<double>(n - 1);
  }
  return report;
}

namespace {

// Decode a Pruefer sequence into the edge set of the labeled tree it names.
std::vector<std::pair<std::size_t, std::size_t>> pruefer_decode(
    const std::vector<std::size_t>& seq, std::size_t n) {
  std::vector<std::size_t> remaining_degree(n, 1);
  for (std::size_t v : seq) remaining_degree[v] += 1;

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(n - 1);
  for (std::size_t v : seq) {
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
      if (remaining_degree[leaf] == 1) {
        edges.emplace_back(leaf, v);
        remaining_degree[leaf] -= 1;
        remaining_degree[v] -= 1;
        break;
      }
    }
  }
  std::size_t u = n, w = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (remaining_degree[v] == 1) {
      if (u == n) {
        u = v;
      } else {
        w = v;
      }
    }
  }
  edges.emplace_back(u, w);
  return edges;
}

}  // namespace

NetworkGraph generate(Topology topology, std::size_t n, std::uint64_t seed,
                      double extra_edge_prob) {
  if (n == 0) {
    throw Error(ErrorCode::bad_param, "graph needs at least one vertex");
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  switch (topology) {
    case Topology::path:
      for (std::size_t v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
      break;
    case Topology::cycle:
      for (std::size_t v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
      if (n >= 3) edges.emplace_back(0, n - 1);
      break;
    case Topology::complete:
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) edges.emplace_back(a, b);
      }
      break;
    case Topology::star:
      for (std::size_t v = 1; v < n; ++v) edges.emplace_back(0, v);
      break;
    case Topology::random_connected: {
      if (n < 2) {
        throw Error(ErrorCode::bad_param,
                    "random_connected needs at least 2 vertices");
      }
      Rng rng(seed);
      if (n == 2) {
        edges.emplace_back(0, 1);
        break;
      }
      std::vector<std::size_t> pruefer(n - 2);
      for (auto& v : pruefer) v = rng.below(n);
      edges = pruefer_decode(pruefer, n);
      for (auto& [a, b] : edges) {
        if (a > b) std::swap(a, b);
      }
      std::sort(edges.begin(), edges.end());
      const auto tree = edges;
      // Each non-tree pair joins with fixed probability, scanned in a fixed
      // order so the result is a pure function of (n, seed).
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          const bool add = rng.bernoulli(extra_edge_prob);
          const bool in_tree = std::binary_search(tree.begin(), tree.end(),
                                                  std::make_pair(a, b));
          if (!in_tree && add) edges.emplace_back(a, b);
        }
      }
      break;
    }
  }
  return NetworkGraph(n, std::move(edges));
}

}  // namespace consflow
