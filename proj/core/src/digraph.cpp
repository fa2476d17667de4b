#include "absaga/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absaga/errors.hpp"
#include "absaga/rng.hpp"

namespace absaga {

long long DirectedGraph::edge_count() const {
  long long total = 0;
  for (const auto& nbrs : out_edges) total += static_cast<long long>(nbrs.size());
  return total;
}

void DirectedGraph::validate() const {
  require(n >= 1, errc::invalid_argument, "graph must have at least one node");
  require(static_cast<int>(out_edges.size()) == n, errc::invalid_argument,
          "out_edges size does not match node count");
  bool all_self = true;
  for (int i = 0; i < n; ++i) {
    const auto& nbrs = out_edges[i];
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      require(nbrs[k] >= 0 && nbrs[k] < n, errc::invalid_argument,
              "neighbor index out of range at node " + std::to_string(i));
      require(k == 0 || nbrs[k] > nbrs[k - 1], errc::invalid_argument,
              "duplicate or unsorted edge at node " + std::to_string(i));
    }
    if (!std::binary_search(nbrs.begin(), nbrs.end(), i)) all_self = false;
  }
  require(self_loops == all_self, errc::invalid_argument, "self_loops flag is inconsistent");
}

namespace {

bool has_all_self_loops(const std::vector<std::vector<int>>& out_edges) {
  for (std::size_t i = 0; i < out_edges.size(); ++i) {
    if (!std::binary_search(out_edges[i].begin(), out_edges[i].end(), static_cast<int>(i)))
      return false;
  }
  return true;
}

}  // namespace

DirectedGraph make_graph(int n, std::vector<std::vector<int>> out_edges) {
  DirectedGraph g;
  g.n = n;
  g.out_edges = std::move(out_edges);
  for (auto& nbrs : g.out_edges) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  g.self_loops = has_all_self_loops(g.out_edges);
  g.validate();
  return g;
}

DirectedGraph exponential_graph(int n) {
  require(n >= 2, errc::invalid_argument, "exponential_graph requires n >= 2");
  int hops = static_cast<int>(std::floor(std::log2(static_cast<double>(n - 1))));
  std::vector<std::vector<int>> edges(n);
  for (int i = 0; i < n; ++i) {
    edges[i].push_back(i);
    for (int j = 0; j <= hops; ++j) edges[i].push_back((i + (1 << j)) % n);
  }
  return make_graph(n, std::move(edges));
}

DirectedGraph ring_digraph(int n) {
  require(n >= 1, errc::invalid_argument, "ring_digraph requires n >= 1");
  std::vector<std::vector<int>> edges(n);
  for (int i = 0; i < n; ++i) {
    edges[i].push_back(i);
    edges[i].push_back((i + 1) % n);
  }
  return make_graph(n, std::move(edges));
}

DirectedGraph complete_digraph(int n) {
  require(n >= 1, errc::invalid_argument, "complete_digraph requires n >= 1");
  std::vector<std::vector<int>> edges(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edges[i].push_back(j);
  return make_graph(n, std::move(edges));
}

DirectedGraph geometric_digraph(int n, double radius, double reverse_drop, std::uint64_t seed) {
  require(n >= 1, errc::invalid_argument, "geometric_digraph requires n >= 1");
  require(radius > 0.0 && radius <= std::sqrt(2.0) + 1e-15, errc::invalid_argument,
          "radius must lie in (0, sqrt(2)]");
  require(reverse_drop >= 0.0 && reverse_drop < 1.0, errc::invalid_argument,
          "reverse_drop must lie in [0, 1)");

  Rng rng(seed);
  const int max_attempts = 100;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<double> px(n), py(n);
    for (int i = 0; i < n; ++i) {
      px[i] = rng.next_unit();
      py[i] = rng.next_unit();
    }
    std::vector<std::vector<int>> edges(n);
    for (int i = 0; i < n; ++i) edges[i].push_back(i);
    const double r2 = radius * radius;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        double dx = px[u] - px[v];
        double dy = py[u] - py[v];
        if (dx * dx + dy * dy > r2) continue;
        // Two independent keep/drop draws, one per direction.
        if (!rng.next_bernoulli(reverse_drop)) edges[u].push_back(v);
        if (!rng.next_bernoulli(reverse_drop)) edges[v].push_back(u);
      }
    }
    DirectedGraph g = make_graph(n, std::move(edges));
    if (is_strongly_connected(g)) return g;
  }
  fail(errc::generation_failure,
       "geometric_digraph: no strongly connected placement in 100 attempts");
}

namespace {

// Nodes reachable from `start` along the given adjacency.
int reach_count(const std::vector<std::vector<int>>& adj, int n, int start) {
  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count;
}

}  // namespace

std::vector<std::vector<int>> in_neighbors(const DirectedGraph& g) {
  std::vector<std::vector<int>> rev(g.n);
  for (int u = 0; u < g.n; ++u)
    for (int v : g.out_edges[u]) rev[v].push_back(u);
  for (auto& nbrs : rev) std::sort(nbrs.begin(), nbrs.end());
  return rev;
}

bool is_strongly_connected(const DirectedGraph& g) {
  if (g.n == 0) return false;
  if (reach_count(g.out_edges, g.n, 0) != g.n) return false;
  return reach_count(in_neighbors(g), g.n, 0) == g.n;
}

Degrees degrees(const DirectedGraph& g) {
  Degrees d;
  d.in.assign(g.n, 0);
  d.out.assign(g.n, 0);
  for (int u = 0; u < g.n; ++u) {
    d.out[u] = static_cast<int>(g.out_edges[u].size());
    for (int v : g.out_edges[u]) ++d.in[v];
  }
  return d;
}

void save_edge_list(const DirectedGraph& g, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::io, "cannot open for writing: " + path);
  out << g.n << "\n";
  for (int u = 0; u < g.n; ++u)
    for (int v : g.out_edges[u]) out << u << " " << v << "\n";
  out.flush();
  require(out.good(), errc::io, "write failed: " + path);
}

DirectedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot open for reading: " + path);
  std::string line;
  int line_no = 0;
  int n = -1;
  std::vector<std::vector<int>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    if (line.empty()) continue;
    if (n < 0) {
      if (!(ss >> n) || n < 1)
        fail(errc::data_format, path + ":" + std::to_string(line_no) + ": expected node count");
      edges.resize(n);
      continue;
    }
    int u, v;
    if (!(ss >> u >> v))
      fail(errc::data_format, path + ":" + std::to_string(line_no) + ": expected 'src dst'");
    if (u < 0 || u >= n || v < 0 || v >= n)
      fail(errc::data_format, path + ":" + std::to_string(line_no) + ": node index out of range");
    edges[u].push_back(v);
  }
  require(n >= 1, errc::data_format, path + ": empty edge-list file");
  return make_graph(n, std::move(edges));
}

}  // namespace absaga
