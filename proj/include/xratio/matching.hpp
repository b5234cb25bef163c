#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "xratio/hypergraph.hpp"

namespace xratio {

// Permanent of a square 0/1 matrix given as row bitmasks. Ryser's inclusion-
// exclusion over column subsets, walked in Gray-code order so each step
// updates one column's contribution to the per-row counts. Signed 128-bit
// accumulation; the size guard keeps partial sums provably inside it.
inline std::uint64_t permanent(const std::vector<std::uint64_t>& rows) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1;
  if (k > 30) throw std::invalid_argument("permanent supported up to 30x30");
  const std::uint64_t full = (1ull << k) - 1;
  double bits = k;
  for (std::uint64_t r : rows) {
    if (r & ~full) throw std::invalid_argument("row mask wider than the matrix");
    bits += std::log2(static_cast<double>(std::max(std::popcount(r), 1)));
  }
  // |partial sum| <= 2^k * prod(row sums); 126 leaves sign headroom in i128
  if (bits > 126.0)
    throw std::overflow_error("permanent accumulator would overflow");

  // column -> set of rows it hits
  std::vector<std::uint32_t> col_rows(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if ((rows[static_cast<std::size_t>(i)] >> j) & 1u)
        col_rows[static_cast<std::size_t>(j)] |= 1u << i;

  std::vector<int> cnt(static_cast<std::size_t>(k), 0);
  __int128 total = 0;
  std::uint32_t prev = 0;
  for (std::uint64_t s = 1; s <= full; ++s) {
    const auto gray = static_cast<std::uint32_t>(s ^ (s >> 1));
    const std::uint32_t flipped = gray ^ prev;
    const int j = std::countr_zero(flipped);
    const int delta = (gray & flipped) ? 1 : -1;
    for (std::uint32_t hit = col_rows[static_cast<std::size_t>(j)]; hit;
         hit &= hit - 1)
      cnt[static_cast<std::size_t>(std::countr_zero(hit))] += delta;
    prev = gray;

    __int128 prod = 1;
    for (int i = 0; i < k && prod != 0; ++i) prod *= cnt[static_cast<std::size_t>(i)];
    if (((k - std::popcount(gray)) & 1) == 0)
      total += prod;
    else
      total -= prod;
  }
  if (total < 0 || total > static_cast<__int128>(std::numeric_limits<std::uint64_t>::max()))
    throw std::overflow_error("permanent does not fit in 64 bits");
  return static_cast<std::uint64_t>(total);
}

inline std::uint64_t permanent(const BiadjacencyMatrix& m) {
  if (!m.square()) throw std::invalid_argument("permanent needs a square matrix");
  std::vector<std::uint64_t> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rows[r] = m.row_mask(r);
  return permanent(rows);
}

// All perfect matchings as column-position sequences (entry i is the column
// matched to row i), emitted in lexicographic order of that sequence.
inline std::vector<std::vector<int>> enumerate_perfect_matchings(
    const std::vector<std::uint64_t>& rows) {
  const int k = static_cast<int>(rows.size());
  if (k > 12) throw std::invalid_argument("matching enumeration supported up to 12 rows");
  const std::uint64_t full = k ? (1ull << k) - 1 : 0;
  for (std::uint64_t r : rows)
    if (r & ~full) throw std::invalid_argument("row mask wider than the matrix");

  std::vector<std::vector<int>> out;
  std::vector<int> pick(static_cast<std::size_t>(k), 0);
  auto rec = [&](auto&& self, int i, std::uint64_t free) -> void {
    if (i == k) {
      out.push_back(pick);
      return;
    }
    for (std::uint64_t avail = rows[static_cast<std::size_t>(i)] & free; avail;
         avail &= avail - 1) {
      const int j = std::countr_zero(avail);
      pick[static_cast<std::size_t>(i)] = j;
      self(self, i + 1, free & ~(1ull << j));
    }
  };
  rec(rec, 0, full);
  return out;
}

inline std::vector<std::vector<int>> enumerate_perfect_matchings(
    const BiadjacencyMatrix& m) {
  if (!m.square()) throw std::invalid_argument("enumeration needs a square matrix");
  std::vector<std::uint64_t> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rows[r] = m.row_mask(r);
  return enumerate_perfect_matchings(rows);
}

// perfect matching count of the incidence matrix with the triple deleted;
// this upper-bounds the degree of the associated cross-ratio map
inline std::uint64_t matching_bound(const Hypergraph& h, const VertexTriple& t) {
  if (!h.balanced()) throw std::invalid_argument("hypergraph must be balanced");
  if (t.v[0] < 1 || t.v[2] > h.vertex_count())
    throw std::invalid_argument("triple label out of range");
  return permanent(delete_vertices(incidence_matrix(h), t));
}

// min over nonempty edge subsets E' of |N(E')| - |E'|; 4-uniformity caps it
// at 3, reached exactly when every vertex triple leaves a perfect matching
inline int surplus(const Hypergraph& h) {
  const int m = static_cast<int>(h.edge_count());
  if (m == 0) throw std::invalid_argument("surplus needs at least one edge");
  if (m > 24) throw std::invalid_argument("surplus enumeration supported up to 24 edges");
  const auto masks = h.edge_masks();
  int best = std::numeric_limits<int>::max();
  for (std::uint32_t s = 1; s < (1u << m); ++s) {
    std::uint32_t nb = 0;
    for (std::uint32_t rest = s; rest; rest &= rest - 1)
      nb |= masks[static_cast<std::size_t>(std::countr_zero(rest))];
    best = std::min(best, std::popcount(nb) - std::popcount(s));
  }
  return best;
}

inline bool hall_criterion(const Hypergraph& h) {
  if (!h.balanced()) throw std::invalid_argument("hypergraph must be balanced");
  return surplus(h) == 3;
}

// product over edges of (d_e!)^(1/d_e) with d_e = |e \ t|; upper-bounds the
// permanent of the reduced matrix by row sums
inline double bregman_minc(const Hypergraph& h, const VertexTriple& t) {
  if (!h.balanced()) throw std::invalid_argument("hypergraph must be balanced");
  if (t.v[0] < 1 || t.v[2] > h.vertex_count())
    throw std::invalid_argument("triple label out of range");
  static constexpr double kFactorial[5] = {1, 1, 2, 6, 24};
  double prod = 1.0;
  for (const Edge& e : h.edges()) {
    int d = 4;
    for (int v : e)
      if (t.contains(v)) --d;
    if (d == 0) return 0.0;  // unreachable for 4-element edges, kept for the contract
    prod *= std::pow(kFactorial[d], 1.0 / d);
  }
  return prod;
}

struct UniformBounds {
  double pow24;        // 24^((n-3)/4), the Bregman-Minc value for all-full rows
  std::uint64_t pow2;  // 2^(n-4), from the recursion's split count
};

inline UniformBounds uniform_bounds(int n) {
  if (n < 4) throw std::invalid_argument("uniform bounds need n >= 4");
  if (n > 67) throw std::invalid_argument("2^(n-4) exceeds 64 bits");
  return {std::pow(24.0, (n - 3) / 4.0), 1ull << (n - 4)};
}

struct BoundReport {
  std::map<VertexTriple, std::uint64_t> per_triple;  // lexicographic iteration
  std::uint64_t min_bound = 0;
  std::vector<VertexTriple> argmin_triples;
  int surplus = 3;
  double bregman_minc_at_argmin = 0.0;
  double uniform_bound_24 = 0.0;
  std::uint64_t uniform_bound_pow2 = 0;
};

// evaluates the matching bound at every triple; cross-checks positivity of
// the minimum against the surplus criterion instead of assuming it
inline BoundReport min_matching_bound(const Hypergraph& h) {
  if (!h.balanced()) throw std::invalid_argument("hypergraph must be balanced");
  BoundReport rep;
  const BiadjacencyMatrix inc = incidence_matrix(h);
  rep.min_bound = std::numeric_limits<std::uint64_t>::max();
  for (const VertexTriple& t : all_triples(h.vertex_count())) {
    const std::uint64_t b = permanent(delete_vertices(inc, t));
    rep.per_triple.emplace(t, b);
    if (b < rep.min_bound) {
      rep.min_bound = b;
      rep.argmin_triples.clear();
    }
    if (b == rep.min_bound) rep.argmin_triples.push_back(t);
  }
  // an empty edge set (n = 3) imposes no constraint; treat as criterion met
  rep.surplus = h.edge_count() ? surplus(h) : 3;
  if ((rep.min_bound > 0) != (rep.surplus == 3))
    throw std::logic_error(
        "matching bound positivity disagrees with the surplus criterion");
  rep.bregman_minc_at_argmin = bregman_minc(h, rep.argmin_triples.front());
  if (h.vertex_count() >= 4) {
    const UniformBounds ub = uniform_bounds(h.vertex_count());
    rep.uniform_bound_24 = ub.pow24;
    rep.uniform_bound_pow2 = ub.pow2;
  } else {
    // n = 3, no edges: the lone map has degree 1 and both bounds collapse
    rep.uniform_bound_24 = 1.0;
    rep.uniform_bound_pow2 = 1;
  }
  return rep;
}

}  // namespace xratio
