#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rcd {

/// Undirected simple graph on nodes [0, n). Edges are stored with first < second
/// and sorted; construction validates the invariants but not connectivity.
class Network {
 public:
  using Edge = std::pair<int, int>;

  Network(int n_nodes, std::vector<Edge> edges);

  int n_nodes() const { return n_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int node) const { return adjacency_.at(node); }
  int degree(int node) const { return static_cast<int>(adjacency_.at(node).size()); }
  bool has_edge(int a, int b) const;
  bool is_complete() const;

 private:
  int n_nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

enum class TopologyKind { complete, ring, star, random_connected };

struct TopologySpec {
  TopologyKind kind = TopologyKind::complete;
  int n_nodes = 2;
  double edge_prob = 0.5;     // random_connected only
  std::uint64_t seed = 0;     // random_connected only
};

Network make_topology(const TopologySpec& spec);

bool is_connected(const Network& g);

/// Simple paths of tau vertices, one per reversal class. Each stored path is in
/// canonical orientation (front() < back()), which is also its canonical key.
struct PathSet {
  int n_nodes = 0;
  int tau = 0;
  std::vector<std::vector<int>> paths;

  std::size_t size() const { return paths.size(); }
};

/// Depth-first enumeration of all tau-vertex simple paths up to reversal. When
/// `cap` is given and exceeded, returns a seeded subsample of `cap` paths that
/// still covers every node. Output is sorted lexicographically.
PathSet enumerate_paths(const Network& g, int tau,
                        std::optional<std::size_t> cap = std::nullopt,
                        std::uint64_t seed = 0);

/// Checks the PathSet invariants against `g` (adjacency, simplicity,
/// orientation, uniqueness, coverage). Returns an empty string when valid,
/// otherwise a description of the first violation.
std::string validate_path_set(const Network& g, const PathSet& ps);

/// Number of tau-vertex paths (up to reversal) in the complete graph K_n.
double complete_graph_path_count(int n_nodes, int tau);

}  // namespace rcd
