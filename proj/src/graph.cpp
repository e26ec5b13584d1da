#include "rcd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "rcd/error.hpp"

namespace rcd {

Network::Network(int n_nodes, std::vector<Edge> edges) : n_nodes_(n_nodes) {
  if (n_nodes < 1) fail(ErrorKind::invalid_size, "network needs at least one node");
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes)
      fail(ErrorKind::index_out_of_range,
           "edge (" + std::to_string(a) + "," + std::to_string(b) + ") outside [0, " +
               std::to_string(n_nodes) + ")");
    if (a == b) fail(ErrorKind::invalid_argument, "self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    fail(ErrorKind::invalid_argument, "duplicate edge");
  edges_ = std::move(edges);

  adjacency_.assign(n_nodes_, {});
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool Network::has_edge(int a, int b) const {
  if (a < 0 || b < 0 || a >= n_nodes_ || b >= n_nodes_) return false;
  const auto& nbrs = adjacency_[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

bool Network::is_complete() const {
  const auto n = static_cast<std::size_t>(n_nodes_);
  return edges_.size() == n * (n - 1) / 2;
}

Network make_topology(const TopologySpec& spec) {
  const int n = spec.n_nodes;
  if (n < 2) fail(ErrorKind::invalid_size, "topology needs N >= 2, got " + std::to_string(n));

  std::vector<Network::Edge> edges;
  switch (spec.kind) {
    case TopologyKind::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::ring:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      if (n > 2) edges.emplace_back(0, n - 1);
      break;
    case TopologyKind::star:
      for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case TopologyKind::random_connected: {
      if (!(spec.edge_prob > 0.0 && spec.edge_prob <= 1.0))
        fail(ErrorKind::invalid_argument, "edge_prob must lie in (0, 1]");
      std::mt19937_64 rng(spec.seed);
      std::bernoulli_distribution coin(spec.edge_prob);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (coin(rng)) edges.emplace_back(i, j);

      // Join components with random bridges until connected.
      std::vector<int> parent(n);
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
      };
      for (const auto& [a, b] : edges) parent[find(a)] = find(b);
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int v = 1; v < n; ++v) {
        if (find(v) == find(0)) continue;
        int u = pick(rng);
        while (find(u) != find(0)) u = pick(rng);
        edges.emplace_back(std::min(u, v), std::max(u, v));
        parent[find(v)] = find(0);
      }
      break;
    }
  }
  return Network(n, std::move(edges));
}

bool is_connected(const Network& g) {
  const int n = g.n_nodes();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

namespace {

class PathEnumerator {
 public:
  PathEnumerator(const Network& g, int tau, std::optional<std::size_t> cap, std::uint64_t seed)
      : g_(g), tau_(tau), cap_(cap), rng_(seed), on_path_(g.n_nodes(), 0),
        witness_(g.n_nodes()) {}

  void run() {
    for (int start = 0; start < g_.n_nodes(); ++start) {
      current_.assign(1, start);
      on_path_[start] = 1;
      extend();
      on_path_[start] = 0;
    }
  }

  std::uint64_t seen() const { return seen_; }
  std::vector<std::vector<int>>& kept() { return kept_; }
  const std::vector<std::vector<int>>& witnesses() const { return witness_; }

 private:
  void extend() {
    if (static_cast<int>(current_.size()) == tau_) {
      if (current_.front() < current_.back()) record();
      return;
    }
    for (int w : g_.neighbors(current_.back())) {
      if (on_path_[w]) continue;
      on_path_[w] = 1;
      current_.push_back(w);
      extend();
      current_.pop_back();
      on_path_[w] = 0;
    }
  }

  void record() {
    ++seen_;
    for (int v : current_)
      if (witness_[v].empty()) witness_[v] = current_;
    if (!cap_ || kept_.size() < *cap_) {
      kept_.push_back(current_);
      return;
    }
    // Reservoir sampling keeps a uniform subsample of everything seen so far.
    std::uniform_int_distribution<std::uint64_t> slot(0, seen_ - 1);
    const std::uint64_t j = slot(rng_);
    if (j < *cap_) kept_[j] = current_;
  }

  const Network& g_;
  int tau_;
  std::optional<std::size_t> cap_;
  std::mt19937_64 rng_;
  std::vector<char> on_path_;
  std::vector<int> current_;
  std::vector<std::vector<int>> kept_;
  std::vector<std::vector<int>> witness_;
  std::uint64_t seen_ = 0;
};

}  // namespace

PathSet enumerate_paths(const Network& g, int tau, std::optional<std::size_t> cap,
                        std::uint64_t seed) {
  const int n = g.n_nodes();
  if (tau < 2 || tau > n)
    fail(ErrorKind::invalid_tau,
         "tau must lie in [2, " + std::to_string(n) + "], got " + std::to_string(tau));
  if (cap && *cap + 1 < static_cast<std::size_t>(n))
    fail(ErrorKind::infeasible_cap, "path cap " + std::to_string(*cap) +
                                        " cannot cover " + std::to_string(n) + " nodes");

  PathEnumerator en(g, tau, cap, seed);
  en.run();

  for (int v = 0; v < n; ++v)
    if (en.witnesses()[v].empty())
      fail(ErrorKind::uncovered_node,
           "node " + std::to_string(v) + " lies on no path of " + std::to_string(tau) + " vertices");

  PathSet ps{n, tau, std::move(en.kept())};
  if (cap && en.seen() > *cap) {
    // Coverage repair: add a witness path for every node the reservoir missed,
    // then drop redundant reservoir paths from the back until within the cap.
    auto& paths = ps.paths;
    std::vector<int> cover_count(n, 0);
    for (const auto& p : paths)
      for (int v : p) ++cover_count[v];
    for (int v = 0; v < n; ++v) {
      if (cover_count[v] > 0) continue;
      paths.push_back(en.witnesses()[v]);
      for (int u : paths.back()) ++cover_count[u];
    }
    std::vector<char> drop(paths.size(), 0);
    std::size_t size = paths.size();
    for (std::size_t idx = paths.size(); idx-- > 0 && size > *cap;) {
      const auto& p = paths[idx];
      if (std::all_of(p.begin(), p.end(), [&](int v) { return cover_count[v] >= 2; })) {
        for (int v : p) --cover_count[v];
        drop[idx] = 1;
        --size;
      }
    }
    if (size > *cap)
      fail(ErrorKind::infeasible_cap, "path cap " + std::to_string(*cap) +
                                          " too small to cover every node with " +
                                          std::to_string(tau) + "-vertex paths");
    std::vector<std::vector<int>> trimmed;
    trimmed.reserve(size);
    for (std::size_t idx = 0; idx < paths.size(); ++idx)
      if (!drop[idx]) trimmed.push_back(std::move(paths[idx]));
    paths = std::move(trimmed);
  }
  std::sort(ps.paths.begin(), ps.paths.end());
  return ps;
}

std::string validate_path_set(const Network& g, const PathSet& ps) {
  if (ps.n_nodes != g.n_nodes()) return "node count mismatch";
  std::vector<char> covered(g.n_nodes(), 0);
  std::set<std::vector<int>> keys;
  for (std::size_t idx = 0; idx < ps.paths.size(); ++idx) {
    const auto& p = ps.paths[idx];
    const std::string where = "path " + std::to_string(idx);
    if (static_cast<int>(p.size()) != ps.tau) return where + " has wrong length";
    std::set<int> distinct(p.begin(), p.end());
    if (static_cast<int>(distinct.size()) != ps.tau) return where + " repeats a vertex";
    for (std::size_t r = 0; r + 1 < p.size(); ++r)
      if (!g.has_edge(p[r], p[r + 1])) return where + " uses a non-edge";
    if (p.front() > p.back()) return where + " is not in canonical orientation";
    if (!keys.insert(p).second) return where + " duplicates another path";
    for (int v : p) covered[v] = 1;
  }
  for (int v = 0; v < g.n_nodes(); ++v)
    if (!covered[v]) return "node " + std::to_string(v) + " is not covered";
  return {};
}

double complete_graph_path_count(int n_nodes, int tau) {
  // N! / (N - tau)! / 2
  double count = 0.5;
  for (int r = 0; r < tau; ++r) count *= static_cast<double>(n_nodes - r);
  return count;
}

}  // namespace rcd
