#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xratio/core.hpp"
#include "xratio/prng.hpp"

namespace xratio {

// a hyperedge: exactly four distinct vertex labels, kept sorted ascending
using Edge = std::array<int, 4>;

inline Edge make_edge(int a, int b, int c, int d) {
  Edge e{a, b, c, d};
  std::sort(e.begin(), e.end());
  return e;
}

// three distinct labels, kept sorted; the vertices sent to 0, 1, infinity
struct VertexTriple {
  std::array<int, 3> v{};

  VertexTriple(int a, int b, int c) : v{a, b, c} {
    std::sort(v.begin(), v.end());
    if (v[0] == v[1] || v[1] == v[2])
      throw std::invalid_argument("vertex triple must have distinct labels");
  }

  bool contains(int x) const { return v[0] == x || v[1] == x || v[2] == x; }
  auto operator<=>(const VertexTriple&) const = default;
};

inline std::string to_string(const VertexTriple& t) {
  std::ostringstream os;
  os << '(' << t.v[0] << ',' << t.v[1] << ',' << t.v[2] << ')';
  return os.str();
}

// 4-uniform hypergraph on labels 1..n; edge multiset, input order preserved.
// "Balanced" means |E| = n-3, the shape that defines a cross-ratio map.
class Hypergraph {
 public:
  Hypergraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 0) throw std::invalid_argument("vertex count must be nonnegative");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      Edge& e = edges_[i];
      std::sort(e.begin(), e.end());
      std::string where = "edge " + std::to_string(i + 1) + ": ";
      if (e[0] == e[1] || e[1] == e[2] || e[2] == e[3])
        throw std::invalid_argument(where + "repeated vertex label");
      if (e[0] < 1 || e[3] > n_)
        throw std::invalid_argument(where + "vertex label out of range [1," +
                                    std::to_string(n_) + "]");
    }
  }

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool balanced() const { return static_cast<int>(edges_.size()) == n_ - 3; }

  // |E_v| for v = 1..n (index v-1); counts multiplicity
  std::vector<int> star_sizes() const {
    std::vector<int> s(static_cast<std::size_t>(n_), 0);
    for (const Edge& e : edges_)
      for (int v : e) ++s[static_cast<std::size_t>(v - 1)];
    return s;
  }

  bool has_isolated_vertex() const {
    auto s = star_sizes();
    return std::find(s.begin(), s.end(), 0) != s.end();
  }

  // vertex-set bitmask of edge i, bit v-1; needs n <= 32
  std::uint32_t edge_mask(std::size_t i) const {
    if (n_ > 32) throw std::invalid_argument("bitmask form requires n <= 32");
    std::uint32_t m = 0;
    for (int v : edges_[i]) m |= 1u << (v - 1);
    return m;
  }

  std::vector<std::uint32_t> edge_masks() const {
    std::vector<std::uint32_t> ms(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) ms[i] = edge_mask(i);
    return ms;
  }

  bool operator==(const Hypergraph&) const = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

enum class Format { json, plain };

// 0/1 incidence matrix; rows are edge indices of the source hypergraph, columns
// carry vertex labels so deletions keep their identity
class BiadjacencyMatrix {
 public:
  BiadjacencyMatrix(std::vector<int> row_edges, std::vector<int> col_vertices,
                    std::vector<std::uint64_t> row_bits)
      : row_edges_(std::move(row_edges)),
        col_vertices_(std::move(col_vertices)),
        row_bits_(std::move(row_bits)) {
    if (row_bits_.size() != row_edges_.size())
      throw std::invalid_argument("row mask count mismatch");
    if (col_vertices_.size() > 64)
      throw std::invalid_argument("at most 64 columns supported");
    const std::uint64_t valid =
        col_vertices_.empty() ? 0 : (~0ull >> (64 - col_vertices_.size()));
    for (std::uint64_t bits : row_bits_)
      if (bits & ~valid) throw std::invalid_argument("row mask exceeds columns");
  }

  std::size_t rows() const { return row_edges_.size(); }
  std::size_t cols() const { return col_vertices_.size(); }
  bool square() const { return rows() == cols(); }
  const std::vector<int>& row_edges() const { return row_edges_; }
  const std::vector<int>& col_vertices() const { return col_vertices_; }
  std::uint64_t row_mask(std::size_t r) const { return row_bits_[r]; }
  int entry(std::size_t r, std::size_t c) const {
    return static_cast<int>((row_bits_[r] >> c) & 1u);
  }

 private:
  std::vector<int> row_edges_;
  std::vector<int> col_vertices_;
  std::vector<std::uint64_t> row_bits_;
};

inline BiadjacencyMatrix incidence_matrix(const Hypergraph& h) {
  std::vector<int> rows(h.edge_count());
  std::vector<int> cols(static_cast<std::size_t>(h.vertex_count()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  for (int v = 1; v <= h.vertex_count(); ++v) cols[static_cast<std::size_t>(v - 1)] = v;
  std::vector<std::uint64_t> bits(h.edge_count(), 0);
  for (std::size_t i = 0; i < h.edge_count(); ++i)
    for (int v : h.edges()[i]) bits[i] |= 1ull << (v - 1);
  return BiadjacencyMatrix(std::move(rows), std::move(cols), std::move(bits));
}

// drop the three columns labeled by t; rows keep their identity
inline BiadjacencyMatrix delete_vertices(const BiadjacencyMatrix& m,
                                         const VertexTriple& t) {
  std::vector<std::size_t> keep;
  keep.reserve(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!t.contains(m.col_vertices()[c])) keep.push_back(c);
  if (keep.size() != m.cols() - 3)
    throw std::invalid_argument("triple labels must all be current columns");

  std::vector<int> cols(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) cols[j] = m.col_vertices()[keep[j]];
  std::vector<std::uint64_t> bits(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t j = 0; j < keep.size(); ++j)
      bits[r] |= static_cast<std::uint64_t>(m.entry(r, keep[j])) << j;
  return BiadjacencyMatrix(m.row_edges(), std::move(cols), std::move(bits));
}

// new vertex n+1 and new edge {t, n+1}; leaves the degree unchanged
inline Hypergraph add_edge_transform(const Hypergraph& h, const VertexTriple& t) {
  if (t.v[0] < 1 || t.v[2] > h.vertex_count())
    throw std::invalid_argument("triple label out of range");
  std::vector<Edge> edges = h.edges();
  edges.push_back(make_edge(t.v[0], t.v[1], t.v[2], h.vertex_count() + 1));
  return Hypergraph(h.vertex_count() + 1, std::move(edges));
}

// perm[v-1] is the new label of v; perm must be a bijection of [1,n]
inline Hypergraph relabel(const Hypergraph& h, const std::vector<int>& perm) {
  const std::size_t n = static_cast<std::size_t>(h.vertex_count());
  if (perm.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<bool> seen(n, false);
  for (int x : perm) {
    if (x < 1 || static_cast<std::size_t>(x) > n || seen[static_cast<std::size_t>(x - 1)])
      throw std::invalid_argument("not a permutation of [1,n]");
    seen[static_cast<std::size_t>(x - 1)] = true;
  }
  std::vector<Edge> edges = h.edges();
  for (Edge& e : edges) {
    for (int& v : e) v = perm[static_cast<std::size_t>(v - 1)];
    std::sort(e.begin(), e.end());
  }
  return Hypergraph(h.vertex_count(), std::move(edges));
}

namespace detail {

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) /
                                   static_cast<std::uint64_t>(i);
  return r;
}

// rank-th 4-subset of {1..n} in lexicographic order
inline Edge unrank_combination4(int n, std::uint64_t rank) {
  Edge e{};
  int prev = 0;
  for (int i = 0; i < 4; ++i) {
    int c = prev + 1;
    for (;; ++c) {
      std::uint64_t block = binomial(n - c, 3 - i);
      if (rank < block) break;
      rank -= block;
    }
    e[static_cast<std::size_t>(i)] = c;
    prev = c;
  }
  return e;
}

}  // namespace detail

// n-3 edges drawn i.i.d. uniformly (with repetition) from all C(n,4) subsets
inline Hypergraph random_hypergraph(int n, std::uint64_t seed) {
  if (n < 5) throw std::invalid_argument("random draw needs n >= 5");
  if (n > 32) throw std::invalid_argument("supported size is n <= 32");
  SplitMix64 rng(seed);
  const std::uint64_t total = detail::binomial(n, 4);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n - 3));
  for (int i = 0; i < n - 3; ++i)
    edges.push_back(detail::unrank_combination4(n, rng.next_below(total)));
  return Hypergraph(n, std::move(edges));
}

// all C(n,3) triples in lexicographic order
inline std::vector<VertexTriple> all_triples(int n) {
  std::vector<VertexTriple> ts;
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c) ts.emplace_back(a, b, c);
  return ts;
}

namespace detail {

inline Hypergraph hypergraph_from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  if (!j.is_object()) throw ParseError("top level must be an object");
  for (const auto& item : j.items())
    if (item.key() != "n" && item.key() != "edges")
      throw ParseError("unknown key \"" + item.key() + "\"");
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw ParseError("missing integer field \"n\"");
  if (!j.contains("edges") || !j["edges"].is_array())
    throw ParseError("missing array field \"edges\"");
  const int n = j["n"].get<int>();
  if (n < 4) throw ParseError("n must be at least 4");
  std::vector<Edge> edges;
  for (const auto& je : j["edges"]) {
    if (!je.is_array() || je.size() != 4)
      throw ParseError("each edge must be an array of 4 vertex labels");
    Edge e{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!je[i].is_number_integer()) throw ParseError("vertex labels must be integers");
      e[i] = je[i].get<int>();
    }
    edges.push_back(e);
  }
  try {
    return Hypergraph(n, std::move(edges));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what());
  }
}

inline Hypergraph hypergraph_from_plain(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_n = false;
  int n = 0;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (!have_n) {
      std::string tag;
      if (!(ls >> tag) || tag != "n" || !(ls >> n))
        throw ParseError(where + "expected header \"n <count>\"");
      std::string extra;
      if (ls >> extra) throw ParseError(where + "trailing tokens after header");
      if (n < 4) throw ParseError(where + "n must be at least 4");
      have_n = true;
      continue;
    }
    Edge e{};
    for (std::size_t i = 0; i < 4; ++i)
      if (!(ls >> e[i]))
        throw ParseError(where + "expected 4 vertex labels");
    std::string extra;
    if (ls >> extra) throw ParseError(where + "expected exactly 4 vertex labels");
    edges.push_back(e);
  }
  if (!have_n) throw ParseError("missing header \"n <count>\"");
  try {
    return Hypergraph(n, std::move(edges));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what());
  }
}

}  // namespace detail

inline Hypergraph parse_hypergraph(std::string_view text, Format f) {
  return f == Format::json ? detail::hypergraph_from_json(text)
                           : detail::hypergraph_from_plain(text);
}

// canonical form: vertices ascending inside each edge, edges sorted
// lexicographically; two isomorphic labelled inputs serialize identically
inline std::string serialize_hypergraph(const Hypergraph& h, Format f) {
  std::vector<Edge> edges = h.edges();
  std::sort(edges.begin(), edges.end());
  if (f == Format::json) {
    nlohmann::ordered_json j;
    j["n"] = h.vertex_count();
    j["edges"] = nlohmann::ordered_json::array();
    for (const Edge& e : edges) j["edges"].push_back(e);
    return j.dump();
  }
  std::ostringstream os;
  os << "n " << h.vertex_count() << '\n';
  for (const Edge& e : edges)
    os << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << '\n';
  return os.str();
}

}  // namespace xratio
