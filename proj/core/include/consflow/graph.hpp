#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "consflow/linalg.hpp"

namespace consflow {

/// Undirected simple graph on vertices 0..vertex_count-1. No self-loops,
/// no duplicate edges; edges stored canonically as (min,max), sorted.
class NetworkGraph {
 public:
  explicit NetworkGraph(std::size_t vertex_count,
                        std::vector<std::pair<std::size_t, std::size_t>> edges = {});

  std::size_t vertex_count() const { return vertex_count_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const {
    return edges_;
  }
  std::size_t edge_count() const { return edges_.size(); }

  /// Neighbor lists are sorted ascending; summation order over neighbors
  /// is part of the determinism contract.
  const std::vector<std::size_t>& neighbors(std::size_t v) const {
    return adjacency_[v];
  }
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
  std::size_t max_degree() const;

  bool operator==(const NetworkGraph& other) const {
    return vertex_count_ == other.vertex_count_ && edges_ == other.edges_;
  }

 private:
  std::size_t vertex_count_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

enum class Topology { path, cycle, complete, star, random_connected };

Topology topology_from_string(const std::string& name);
const char* to_string(Topology t) noexcept;

/// Combinatorial Laplacian L = D - Adj.
DenseMatrix laplacian(const NetworkGraph& g);

/// Breadth-first reachability from vertex 0 covers all vertices.
bool is_connected(const NetworkGraph& g);

/// Longest shortest path (all-pairs BFS). Throws if disconnected.
std::size_t diameter(const NetworkGraph& g);

/// Algebraic connectivity: second-smallest Laplacian eigenvalue.
/// Requires a connected graph with at least 2 vertices.
double lambda2(const NetworkGraph& g);

struct GraphReport {
  bool connected = false;
  std::optional<std::size_t> diameter;
  std::optional<double> lambda2;
  /// 4 / (n * diameter); valid lower bound on lambda2 for connected graphs.
  std::optional<double> lower_bound;
  /// n; lambda2 <= n with equality exactly on complete graphs.
  std::optional<double> upper_bound;
  /// n/(n-1): the bound stated for the normalized Laplacian. Reported for
  /// reference only, never asserted against the combinatorial lambda2.
  std::optional<double> paper_upper_bound;
};

/// Connectivity, diameter, lambda2 and its bounds in one pass. Disconnected
/// graphs get connected=false and no spectral fields. Single-vertex graphs
/// are connected with diameter 0 and no lambda2.
GraphReport graph_report(const NetworkGraph& g);

/// Deterministic topology generator. random_connected draws a uniform
/// spanning tree from a random Pruefer sequence, then adds each remaining
/// edge with probability extra_edge_prob.
NetworkGraph generate(Topology topology, std::size_t n, std::uint64_t seed,
                      double extra_edge_prob = 0.3);

}  // namespace consflow
