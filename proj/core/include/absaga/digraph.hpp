#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace absaga {

/// Directed communication graph. Immutable after construction; neighbor lists
/// are kept sorted so equal graphs compare equal.
struct DirectedGraph {
  int n = 0;
  std::vector<std::vector<int>> out_edges;  // out_edges[i]: sorted out-neighbors of i
  bool self_loops = false;                  // true iff every node has a self-edge

  long long edge_count() const;
  // Throws invalid_argument when an index is out of range, a list has
  // duplicates, or the self_loops flag does not match the edges.
  void validate() const;
};

DirectedGraph make_graph(int n, std::vector<std::vector<int>> out_edges);

// Node i links to (i + 2^j) mod n for j = 0..floor(log2(n-1)), plus a
// self-loop. Deterministic, regular, strongly connected.
DirectedGraph exponential_graph(int n);

// Uniform placements in the unit square; disc edges within `radius`; each
// direction of each disc edge is removed independently with probability
// `reverse_drop`; self-loops added. Placement is resampled until the result is
// strongly connected (at most 100 attempts, then generation_failure).
DirectedGraph geometric_digraph(int n, double radius, double reverse_drop, std::uint64_t seed);

// One-way ring i -> i+1 mod n with self-loops.
DirectedGraph ring_digraph(int n);

// All ordered pairs plus self-loops.
DirectedGraph complete_digraph(int n);

bool is_strongly_connected(const DirectedGraph& g);

struct Degrees {
  std::vector<int> in;
  std::vector<int> out;
};
Degrees degrees(const DirectedGraph& g);

std::vector<std::vector<int>> in_neighbors(const DirectedGraph& g);

// Edge-list text format: first line `n`, then one `src dst` pair per line.
void save_edge_list(const DirectedGraph& g, const std::string& path);
DirectedGraph load_edge_list(const std::string& path);

}  // namespace absaga
