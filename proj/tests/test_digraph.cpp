#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "absaga/digraph.hpp"
#include "absaga/errors.hpp"
#include "absaga/rng.hpp"

using namespace absaga;

namespace {

// Independent reachability oracle: Floyd-Warshall transitive closure.
bool strongly_connected_oracle(const DirectedGraph& g) {
  int n = g.n;
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int u = 0; u < n; ++u) {
    reach[u][u] = 1;
    for (int v : g.out_edges[u]) reach[u][v] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!reach[i][j]) return false;
  return true;
}

DirectedGraph random_digraph(Rng& rng, int n, double edge_prob, bool self_loops) {
  std::vector<std::vector<int>> edges(n);
  for (int u = 0; u < n; ++u) {
    if (self_loops) edges[u].push_back(u);
    for (int v = 0; v < n; ++v)
      if (u != v && rng.next_bernoulli(edge_prob)) edges[u].push_back(v);
  }
  return make_graph(n, std::move(edges));
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("exponential graph: smallest instance") {
  auto g = exponential_graph(2);
  CHECK(g.n == 2);
  CHECK(g.out_edges[0] == std::vector<int>{0, 1});
  CHECK(g.out_edges[1] == std::vector<int>{0, 1});
  CHECK(g.self_loops);
}

TEST_CASE("exponential graph: n=4 hop structure") {
  auto g = exponential_graph(4);
  CHECK(g.out_edges[0] == std::vector<int>{0, 1, 2});
  CHECK(g.out_edges[3] == std::vector<int>{0, 1, 3});
}

TEST_CASE("exponential graph: n=16 is 5-regular and strongly connected") {
  auto g = exponential_graph(16);
  for (int i = 0; i < 16; ++i) CHECK(g.out_edges[i].size() == 5);
  CHECK(is_strongly_connected(g));
  CHECK(strongly_connected_oracle(g));
}

TEST_CASE("exponential graph: out-degree formula and determinism") {
  for (int n = 3; n <= 33; ++n) {
    auto g = exponential_graph(n);
    int expected = static_cast<int>(std::floor(std::log2(n - 1))) + 1;
    for (int i = 0; i < n; ++i)
      CHECK(static_cast<int>(g.out_edges[i].size()) == expected + 1);  // plus self
    CHECK(is_strongly_connected(g));
  }
  auto a = exponential_graph(16);
  auto b = exponential_graph(16);
  CHECK(a.out_edges == b.out_edges);
}

TEST_CASE("exponential graph rejects n < 2") {
  CHECK_THROWS_AS(exponential_graph(1), Error);
  try {
    exponential_graph(0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_argument);
  }
}

TEST_CASE("strong connectivity basics") {
  auto ring3 = make_graph(3, {{1}, {2}, {0}});
  CHECK(is_strongly_connected(ring3));

  auto isolated = make_graph(2, {{0}, {1}});
  CHECK_FALSE(is_strongly_connected(isolated));
}

TEST_CASE("strong connectivity matches the closure oracle on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + rng.next_below(7);
    double p = 0.05 + 0.4 * rng.next_unit();
    auto g = random_digraph(rng, n, p, rng.next_bernoulli(0.5));
    CHECK(is_strongly_connected(g) == strongly_connected_oracle(g));
  }
}

TEST_CASE("geometric graph: max radius gives the complete digraph") {
  auto g = geometric_digraph(2, std::sqrt(2.0), 0.0, 123);
  CHECK(g.edge_count() == 4);
  CHECK(g.self_loops);
  CHECK(is_strongly_connected(g));
}

TEST_CASE("geometric graph: reproducible strongly connected sample") {
  auto g = geometric_digraph(50, 0.3, 0.3, 7);
  CHECK(is_strongly_connected(g));
  CHECK(g.self_loops);
  CHECK(g.edge_count() == 408);  // pinned from the seeded generator
  auto again = geometric_digraph(50, 0.3, 0.3, 7);
  CHECK(g.out_edges == again.out_edges);
}

TEST_CASE("geometric graph: vanishing radius exhausts retries") {
  try {
    geometric_digraph(3, 0.0001, 0.0, 99);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::generation_failure);
  }
}

TEST_CASE("geometric graph argument validation") {
  CHECK_THROWS_AS(geometric_digraph(3, 0.0, 0.0, 1), Error);
  CHECK_THROWS_AS(geometric_digraph(3, 2.0, 0.0, 1), Error);
  CHECK_THROWS_AS(geometric_digraph(3, 0.3, 1.0, 1), Error);
  CHECK_THROWS_AS(geometric_digraph(3, 0.3, -0.1, 1), Error);
}

TEST_CASE("degrees on reference graphs") {
  auto complete3 = complete_digraph(3);
  auto d3 = degrees(complete3);
  CHECK(d3.in == std::vector<int>{3, 3, 3});
  CHECK(d3.out == std::vector<int>{3, 3, 3});

  auto ring2 = make_graph(2, {{0, 1}, {0, 1}});
  auto d2 = degrees(ring2);
  CHECK(d2.in == std::vector<int>{2, 2});
  CHECK(d2.out == std::vector<int>{2, 2});

  auto exp8 = exponential_graph(8);
  auto d8 = degrees(exp8);
  CHECK(d8.out == std::vector<int>(8, 4));
  CHECK(d8.in == std::vector<int>(8, 4));
}

TEST_CASE("degree sums balance on random graphs") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + rng.next_below(10);
    auto g = random_digraph(rng, n, 0.3, true);
    auto d = degrees(g);
    long long in_sum = 0, out_sum = 0;
    for (int i = 0; i < n; ++i) {
      in_sum += d.in[i];
      out_sum += d.out[i];
    }
    CHECK(in_sum == out_sum);
    CHECK(in_sum == g.edge_count());
  }
}

TEST_CASE("ring and complete generators") {
  auto r1 = ring_digraph(1);
  CHECK(r1.edge_count() == 1);
  CHECK(is_strongly_connected(r1));
  auto r5 = ring_digraph(5);
  CHECK(is_strongly_connected(r5));
  CHECK(r5.edge_count() == 10);
  auto c4 = complete_digraph(4);
  CHECK(c4.edge_count() == 16);
  CHECK(is_strongly_connected(c4));
}

TEST_CASE("edge list round trip") {
  Rng rng(11);
  std::string path = temp_path("absaga_digraph_roundtrip.edges");
  for (int trial = 0; trial < 10; ++trial) {
    int n = 2 + rng.next_below(12);
    auto g = random_digraph(rng, n, 0.25, true);
    save_edge_list(g, path);
    auto loaded = load_edge_list(path);
    CHECK(loaded.n == g.n);
    CHECK(loaded.out_edges == g.out_edges);
    CHECK(loaded.self_loops == g.self_loops);
  }
  std::filesystem::remove(path);
}

TEST_CASE("edge list parse errors carry line numbers") {
  std::string path = temp_path("absaga_digraph_bad.edges");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("3\n0 1\nbogus\n", f);
    std::fclose(f);
  }
  try {
    load_edge_list(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::data_format);
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("2\n0 5\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_edge_list(path), Error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_edge_list(path), Error);  // missing file -> io
}
