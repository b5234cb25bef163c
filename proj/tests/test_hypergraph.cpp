#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "golden.hpp"
#include "xratio/hypergraph.hpp"
#include "xratio/prng.hpp"

using namespace xratio;

namespace {

std::vector<Edge> sorted_edges(const Hypergraph& h) {
  std::vector<Edge> es = h.edges();
  std::sort(es.begin(), es.end());
  return es;
}

}  // namespace

TEST_CASE("splitmix64 matches the published reference sequence", "[hypergraph]") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next() == 0x06C45D188009454Full);
}

TEST_CASE("next_below is in range and unbiased against exact counts", "[hypergraph]") {
  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t x = rng.next_below(210);
    CHECK(x < 210);
  }
  CHECK(SplitMix64(7).next_below(1) == 0);
}

TEST_CASE("mix_seed separates counters deterministically", "[hypergraph]") {
  CHECK(mix_seed(1, 0) == mix_seed(1, 0));
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("vertex triple sorts and rejects repeats", "[hypergraph]") {
  VertexTriple t(3, 1, 2);
  CHECK(t.v == std::array<int, 3>{1, 2, 3});
  CHECK(t.contains(2));
  CHECK_FALSE(t.contains(4));
  CHECK_THROWS_AS(VertexTriple(1, 1, 2), std::invalid_argument);
  CHECK(VertexTriple(1, 2, 3) < VertexTriple(1, 2, 4));
}

TEST_CASE("hypergraph constructor validates and sorts edges", "[hypergraph]") {
  Hypergraph h(6, {make_edge(4, 3, 2, 1)});
  CHECK(h.edges()[0] == Edge{1, 2, 3, 4});
  CHECK_FALSE(h.balanced());
  CHECK(golden::pair_triangle().balanced());
  CHECK_THROWS_AS(Hypergraph(6, {Edge{1, 2, 3, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Hypergraph(6, {Edge{0, 2, 3, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(Hypergraph(6, {Edge{1, 2, 3, 7}}), std::invalid_argument);
}

TEST_CASE("star sizes and isolated vertices", "[hypergraph]") {
  auto s = golden::pair_triangle().star_sizes();
  CHECK(s == std::vector<int>{2, 2, 2, 2, 2, 2});
  auto r = golden::repeated_edge().star_sizes();
  CHECK(r == std::vector<int>{2, 2, 2, 2, 0});
  CHECK(golden::repeated_edge().has_isolated_vertex());
  CHECK_FALSE(golden::pair_triangle().has_isolated_vertex());
}

TEST_CASE("json parsing accepts the documented shape", "[hypergraph]") {
  auto h = parse_hypergraph(
      R"({"n": 6, "edges": [[1,2,3,4],[1,2,5,6],[3,4,5,6]]})", Format::json);
  CHECK(h == golden::pair_triangle());

  // input edge order is preserved, only vertices inside an edge are sorted
  auto g = parse_hypergraph(R"({"n": 6, "edges": [[6,5,4,3],[1,2,3,4]]})",
                            Format::json);
  CHECK(g.edges()[0] == Edge{3, 4, 5, 6});
  CHECK(g.edges()[1] == Edge{1, 2, 3, 4});
}

TEST_CASE("json parsing rejects malformed input", "[hypergraph]") {
  CHECK_THROWS_AS(parse_hypergraph("{", Format::json), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("[1,2]", Format::json), ParseError);
  CHECK_THROWS_AS(parse_hypergraph(R"({"edges": []})", Format::json), ParseError);
  CHECK_THROWS_AS(parse_hypergraph(R"({"n": 6})", Format::json), ParseError);
  CHECK_THROWS_AS(parse_hypergraph(R"({"n": 3, "edges": []})", Format::json),
                  ParseError);
  CHECK_THROWS_AS(
      parse_hypergraph(R"({"n": 6, "edges": [[1,2,3]]})", Format::json),
      ParseError);
  CHECK_THROWS_AS(
      parse_hypergraph(R"({"n": 6, "edges": [[1,2,3,4,5]]})", Format::json),
      ParseError);
  CHECK_THROWS_AS(
      parse_hypergraph(R"({"n": 6, "edges": [[1,2,3,3]]})", Format::json),
      ParseError);
  CHECK_THROWS_AS(
      parse_hypergraph(R"({"n": 6, "edges": [[1,2,3,9]]})", Format::json),
      ParseError);
  CHECK_THROWS_AS(
      parse_hypergraph(R"({"n": 6, "edges": [], "extra": 1})", Format::json),
      ParseError);
}

TEST_CASE("plain parsing accepts comments and blank lines", "[hypergraph]") {
  auto h = parse_hypergraph(
      "# three coupled pairs\nn 6\n\n1 2 3 4\n1 2 5 6\n# middle note\n3 4 5 6\n",
      Format::plain);
  CHECK(h == golden::pair_triangle());
}

TEST_CASE("plain parsing rejects malformed input", "[hypergraph]") {
  CHECK_THROWS_AS(parse_hypergraph("", Format::plain), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("m 6\n1 2 3 4\n", Format::plain), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("n 6 9\n", Format::plain), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("n 3\n", Format::plain), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("n 6\n1 2 3\n", Format::plain), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("n 6\n1 2 3 4 5\n", Format::plain), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("n 6\n1 2 3 four\n", Format::plain), ParseError);
  CHECK_THROWS_AS(parse_hypergraph("n 6\n1 2 3 9\n", Format::plain), ParseError);
}

TEST_CASE("serialization is canonical", "[hypergraph]") {
  Hypergraph shuffled(6, {make_edge(6, 5, 4, 3), make_edge(2, 1, 6, 5),
                          make_edge(4, 3, 2, 1)});
  CHECK(serialize_hypergraph(shuffled, Format::json) ==
        R"({"n":6,"edges":[[1,2,3,4],[1,2,5,6],[3,4,5,6]]})");
  CHECK(serialize_hypergraph(shuffled, Format::plain) ==
        "n 6\n1 2 3 4\n1 2 5 6\n3 4 5 6\n");
}

TEST_CASE("parse after serialize is the identity on canonical form", "[hypergraph]") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    int n = 5 + static_cast<int>(i % 8);
    Hypergraph h = random_hypergraph(n, mix_seed(1001, i));
    for (Format f : {Format::json, Format::plain}) {
      Hypergraph back = parse_hypergraph(serialize_hypergraph(h, f), f);
      REQUIRE(back.vertex_count() == h.vertex_count());
      REQUIRE(sorted_edges(back) == sorted_edges(h));
    }
  }
}

TEST_CASE("incidence matrix rows follow edge order", "[hypergraph]") {
  auto m = incidence_matrix(golden::pair_triangle());
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 6);
  CHECK(m.col_vertices() == std::vector<int>{1, 2, 3, 4, 5, 6});
  auto row = [&](std::size_t r) {
    std::vector<int> out;
    for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(m.entry(r, c));
    return out;
  };
  CHECK(row(0) == std::vector<int>{1, 1, 1, 1, 0, 0});
  CHECK(row(1) == std::vector<int>{1, 1, 0, 0, 1, 1});
  CHECK(row(2) == std::vector<int>{0, 0, 1, 1, 1, 1});
}

TEST_CASE("incidence row sums are 4 and column sums are star sizes", "[hypergraph]") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    Hypergraph h = random_hypergraph(5 + static_cast<int>(i % 7), mix_seed(2002, i));
    auto m = incidence_matrix(h);
    auto stars = h.star_sizes();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      int sum = 0;
      for (std::size_t c = 0; c < m.cols(); ++c) sum += m.entry(r, c);
      REQUIRE(sum == 4);
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      int sum = 0;
      for (std::size_t r = 0; r < m.rows(); ++r) sum += m.entry(r, c);
      REQUIRE(sum == stars[c]);
    }
  }
}

TEST_CASE("deleting a triple keeps labels on the surviving columns", "[hypergraph]") {
  auto reduced = delete_vertices(incidence_matrix(golden::pair_triangle()),
                                 VertexTriple(1, 2, 3));
  REQUIRE(reduced.cols() == 3);
  CHECK(reduced.col_vertices() == std::vector<int>{4, 5, 6});
  CHECK(reduced.row_mask(0) == 0b001ull);  // {1,2,3,4} keeps only column 4
  CHECK(reduced.row_mask(1) == 0b110ull);  // {1,2,5,6} keeps 5 and 6
  CHECK(reduced.row_mask(2) == 0b111ull);  // {3,4,5,6} keeps 4, 5, 6

  auto k22 = delete_vertices(incidence_matrix(golden::repeated_edge()),
                             VertexTriple(3, 4, 5));
  REQUIRE(k22.cols() == 2);
  CHECK(k22.col_vertices() == std::vector<int>{1, 2});
  CHECK(k22.row_mask(0) == 0b11ull);
  CHECK(k22.row_mask(1) == 0b11ull);

  CHECK_THROWS_AS(delete_vertices(k22, VertexTriple(1, 2, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(delete_vertices(reduced, VertexTriple(1, 2, 3)),
                  std::invalid_argument);
}

TEST_CASE("add edge transform appends a fresh vertex", "[hypergraph]") {
  Hypergraph h = add_edge_transform(golden::single_edge(), VertexTriple(1, 2, 3));
  CHECK(h.vertex_count() == 5);
  REQUIRE(h.edge_count() == 2);
  CHECK(h.edges()[1] == Edge{1, 2, 3, 5});
  CHECK(h.balanced());
  CHECK_THROWS_AS(add_edge_transform(golden::single_edge(), VertexTriple(1, 2, 5)),
                  std::invalid_argument);
}

TEST_CASE("relabel is a group action", "[hypergraph]") {
  Hypergraph h = golden::pair_triangle();
  std::vector<int> identity{1, 2, 3, 4, 5, 6};
  CHECK(relabel(h, identity) == h);

  std::vector<int> perm{3, 4, 1, 2, 6, 5};
  std::vector<int> inv(6);
  for (int v = 1; v <= 6; ++v) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(v - 1)] - 1)] = v;
  Hypergraph round = relabel(relabel(h, perm), inv);
  CHECK(sorted_edges(round) == sorted_edges(h));

  CHECK_THROWS_AS(relabel(h, std::vector<int>{1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(relabel(h, std::vector<int>{1, 1, 3, 4, 5, 6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(relabel(h, std::vector<int>{0, 2, 3, 4, 5, 7}),
                  std::invalid_argument);
}

TEST_CASE("combination unranking is a lex-ordered bijection", "[hypergraph]") {
  for (int n = 5; n <= 9; ++n) {
    const std::uint64_t total = detail::binomial(n, 4);
    std::vector<Edge> all;
    for (std::uint64_t r = 0; r < total; ++r)
      all.push_back(detail::unrank_combination4(n, r));
    CHECK(all.size() == total);
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    CHECK(all.front() == Edge{1, 2, 3, 4});
    CHECK(all.back() == Edge{n - 3, n - 2, n - 1, n});
  }
}

TEST_CASE("random hypergraphs are reproducible and well formed", "[hypergraph]") {
  Hypergraph a = random_hypergraph(10, 99);
  Hypergraph b = random_hypergraph(10, 99);
  CHECK(a == b);
  CHECK(a.vertex_count() == 10);
  CHECK(a.edge_count() == 7);
  CHECK(a.balanced());
  CHECK(random_hypergraph(10, mix_seed(5, 0)) != random_hypergraph(10, mix_seed(5, 1)));
  CHECK_THROWS_AS(random_hypergraph(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_hypergraph(40, 1), std::invalid_argument);
}

TEST_CASE("edge draws are uniform for a fixed 4-subset", "[hypergraph]") {
  // 1e5 edges at n = 10; expected hit rate 1/C(10,4) = 1/210
  const Edge probe{1, 2, 3, 4};
  const std::uint64_t graphs = 14286;  // 7 edges each ~= 1e5 edges
  std::uint64_t draws = 0, hits = 0;
  for (std::uint64_t i = 0; i < graphs; ++i) {
    Hypergraph h = random_hypergraph(10, mix_seed(31337, i));
    for (const Edge& e : h.edges()) {
      ++draws;
      if (e == probe) ++hits;
    }
  }
  const double p = 1.0 / 210.0;
  const double mean = static_cast<double>(draws) * p;
  const double sd = std::sqrt(static_cast<double>(draws) * p * (1 - p));
  CHECK(std::abs(static_cast<double>(hits) - mean) < 3 * sd);
}
