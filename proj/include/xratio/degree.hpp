#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "xratio/core.hpp"
#include "xratio/hypergraph.hpp"

namespace xratio {

// One admissible recursion step: the instance splits along V' into two
// smaller instances whose degrees multiply. `part` is V' in the original
// labels; left/right are relabelled to 1..k with the fresh vertex last.
struct GoldnerSplit {
  Edge pivot;
  std::array<int, 2> pair;
  std::vector<int> part;
  Hypergraph left;
  Hypergraph right;
};

namespace detail {

struct CompactH {
  int n = 0;
  std::vector<std::uint32_t> edges;  // bit v is vertex v, 0-based labels
};

inline CompactH compact_of(const Hypergraph& h) {
  CompactH c;
  c.n = h.vertex_count();
  if (c.n > 32) throw std::invalid_argument("degree computation supports n <= 32");
  c.edges.reserve(h.edge_count());
  for (std::size_t i = 0; i < h.edge_count(); ++i) c.edges.push_back(h.edge_mask(i));
  return c;
}

inline std::uint32_t full_mask(int n) {
  return n == 32 ? ~0u : ((1u << n) - 1);
}

inline std::array<std::uint8_t, 4> edge_tuple(std::uint32_t mask) {
  std::array<std::uint8_t, 4> t{};
  std::size_t i = 0;
  for (std::uint32_t rest = mask; rest; rest &= rest - 1)
    t[i++] = static_cast<std::uint8_t>(std::countr_zero(rest));
  return t;
}

// memo key: edges as sorted tuples, labels renumbered by first appearance,
// re-sorted. Equal keys reconstruct equal labelled instances, so collisions
// between different instances are impossible.
inline std::string degree_memo_key(const CompactH& h) {
  std::vector<std::array<std::uint8_t, 4>> tuples;
  tuples.reserve(h.edges.size());
  for (std::uint32_t e : h.edges) tuples.push_back(edge_tuple(e));
  std::sort(tuples.begin(), tuples.end());
  std::array<std::int8_t, 32> to;
  to.fill(-1);
  std::int8_t next = 0;
  for (const auto& t : tuples)
    for (std::uint8_t v : t)
      if (to[v] < 0) to[v] = next++;
  for (auto& t : tuples) {
    for (auto& v : t) v = static_cast<std::uint8_t>(to[v]);
    std::sort(t.begin(), t.end());
  }
  std::sort(tuples.begin(), tuples.end());
  std::string key;
  key.reserve(1 + 4 * tuples.size());
  key.push_back(static_cast<char>(h.n));
  for (const auto& t : tuples)
    for (std::uint8_t v : t) key.push_back(static_cast<char>(v));
  return key;
}

struct DegreeCtx {
  std::unordered_map<std::string, std::uint64_t> memo;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

inline void check_deadline(const DegreeCtx& ctx) {
  if (ctx.deadline && std::chrono::steady_clock::now() >= *ctx.deadline)
    throw Timeout("degree computation exceeded its time budget");
}

// Enumerates the parts V' = pair ∪ W admissible for pivot occurrence pi:
// W ranges over subsets of V minus the pivot edge in ascending bitmask
// order, and V' is admissible iff no other edge meets it in exactly 2
// vertices. Calls sink(W) for each admissible choice.
template <typename F>
void for_each_valid_part(const CompactH& h, std::size_t pi, std::uint32_t pair_mask,
                         F&& sink) {
  const std::uint32_t others = full_mask(h.n) & ~h.edges[pi];
  std::vector<std::pair<int, std::uint32_t>> cons;
  cons.reserve(h.edges.size() - 1);
  for (std::size_t j = 0; j < h.edges.size(); ++j)
    if (j != pi)
      cons.emplace_back(std::popcount(h.edges[j] & pair_mask),
                        h.edges[j] & others);
  std::uint32_t w = 0;
  for (;;) {
    bool ok = true;
    for (const auto& [base, m] : cons)
      if (base + std::popcount(w & m) == 2) {
        ok = false;
        break;
      }
    if (ok) sink(w);
    if (w == others) break;
    w = (w - others) & others;  // next submask, ascending
  }
}

// child instance on `part` plus one fresh vertex (the new top label); keeps
// edges meeting part in >= 3 vertices, clipping the fourth to the fresh one
inline CompactH child_of(const CompactH& h, std::size_t pi, std::uint32_t part) {
  CompactH c;
  const int cnt = std::popcount(part);
  c.n = cnt + 1;
  std::array<std::uint8_t, 32> to{};
  std::uint8_t next = 0;
  for (std::uint32_t rest = part; rest; rest &= rest - 1)
    to[static_cast<std::size_t>(std::countr_zero(rest))] = next++;
  const std::uint32_t fresh = 1u << cnt;
  for (std::size_t j = 0; j < h.edges.size(); ++j) {
    if (j == pi) continue;
    const std::uint32_t inter = h.edges[j] & part;
    const int met = std::popcount(inter);
    if (met < 3) continue;
    std::uint32_t m = 0;
    for (std::uint32_t rest = inter; rest; rest &= rest - 1)
      m |= 1u << to[static_cast<std::size_t>(std::countr_zero(rest))];
    if (met == 3) m |= fresh;
    c.edges.push_back(m);
  }
  return c;
}

inline std::uint64_t degree_rec(const CompactH& h, DegreeCtx& ctx);

// sum of degree products over all admissible parts of (pi, pair)
inline std::uint64_t degree_sum_for_choice(const CompactH& h, std::size_t pi,
                                           std::uint32_t pair_mask, DegreeCtx& ctx) {
  const std::uint32_t full = full_mask(h.n);
  std::uint64_t total = 0;
  for_each_valid_part(h, pi, pair_mask, [&](std::uint32_t w) {
    const std::uint32_t part = pair_mask | w;
    const std::uint64_t left = degree_rec(child_of(h, pi, part), ctx);
    if (left) total += left * degree_rec(child_of(h, pi, full & ~part), ctx);
  });
  return total;
}

inline std::uint64_t degree_rec(const CompactH& h, DegreeCtx& ctx) {
  if (static_cast<int>(h.edges.size()) != h.n - 3) return 0;
  if (h.edges.empty()) return 1;
  const std::uint32_t full = full_mask(h.n);
  std::uint32_t cover = 0;
  for (std::uint32_t e : h.edges) cover |= e;
  if (cover != full) return 0;  // an untouched vertex forces a zero fiber
  if (h.edges.size() == 1) return 1;

  check_deadline(ctx);
  std::string key = degree_memo_key(h);
  if (auto it = ctx.memo.find(key); it != ctx.memo.end()) return it->second;

  // pivot heuristic: fewest admissible parts; candidates scanned in
  // lexicographic (edge tuple, pair tuple) order so ties break the same way
  // on every run. A zero-count candidate settles the value immediately.
  std::vector<std::size_t> order(h.edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return edge_tuple(h.edges[a]) < edge_tuple(h.edges[b]);
  });

  std::size_t best_pi = 0;
  std::uint32_t best_pair = 0;
  std::uint64_t best_count = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t oi = 0; oi < order.size() && best_count > 0; ++oi) {
    const std::size_t pi = order[oi];
    if (oi > 0 && h.edges[order[oi - 1]] == h.edges[pi]) continue;  // duplicate edge
    const auto vs = edge_tuple(h.edges[pi]);
    for (std::size_t a = 0; a < 4 && best_count > 0; ++a)
      for (std::size_t b = a + 1; b < 4 && best_count > 0; ++b) {
        const std::uint32_t p = (1u << vs[a]) | (1u << vs[b]);
        std::uint64_t count = 0;
        for_each_valid_part(h, pi, p, [&](std::uint32_t) { ++count; });
        if (count < best_count) {
          best_count = count;
          best_pi = pi;
          best_pair = p;
        }
      }
  }

  const std::uint64_t total =
      best_count == 0 ? 0 : degree_sum_for_choice(h, best_pi, best_pair, ctx);
  ctx.memo.emplace(std::move(key), total);
  return total;
}

inline std::size_t pivot_index(const Hypergraph& h, const Edge& pivot) {
  Edge p = pivot;
  std::sort(p.begin(), p.end());
  const auto& es = h.edges();
  const auto it = std::find(es.begin(), es.end(), p);
  if (it == es.end()) throw std::invalid_argument("pivot edge is not in the hypergraph");
  return static_cast<std::size_t>(it - es.begin());
}

inline std::uint32_t pair_mask_checked(const Edge& pivot, std::array<int, 2> pair) {
  if (pair[0] == pair[1]) throw std::invalid_argument("pair labels must differ");
  for (int v : pair)
    if (std::find(pivot.begin(), pivot.end(), v) == pivot.end())
      throw std::invalid_argument("pair must lie inside the pivot edge");
  return (1u << (pair[0] - 1)) | (1u << (pair[1] - 1));
}

}  // namespace detail

// Degree of the cross-ratio map attached to h. Conventions: 0 when the edge
// count is not n-3 or some vertex is isolated; 1 for the empty instance on
// 3 vertices and for a single edge.
inline std::uint64_t cross_ratio_degree(
    const Hypergraph& h,
    std::optional<std::chrono::steady_clock::duration> budget = std::nullopt) {
  detail::DegreeCtx ctx;
  if (budget) ctx.deadline = std::chrono::steady_clock::now() + *budget;
  const detail::CompactH c = detail::compact_of(h);
  return detail::degree_rec(c, ctx);
}

// Same value computed with an explicit pivot edge and pair; exercising many
// choices cross-checks the recursion's choice independence.
inline std::uint64_t degree_with_choice(
    const Hypergraph& h, const Edge& pivot, std::array<int, 2> pair,
    std::optional<std::chrono::steady_clock::duration> budget = std::nullopt) {
  detail::DegreeCtx ctx;
  if (budget) ctx.deadline = std::chrono::steady_clock::now() + *budget;
  const detail::CompactH c = detail::compact_of(h);
  const std::size_t pi = detail::pivot_index(h, pivot);
  const std::uint32_t p = detail::pair_mask_checked(h.edges()[pi], pair);
  if (static_cast<int>(c.edges.size()) != c.n - 3) return 0;
  std::uint32_t cover = 0;
  for (std::uint32_t e : c.edges) cover |= e;
  if (cover != detail::full_mask(c.n)) return 0;
  if (c.edges.size() == 1) return 1;
  return detail::degree_sum_for_choice(c, pi, p, ctx);
}

// All admissible splits for the given pivot and pair, parts in ascending
// bitmask order of V'.
inline std::vector<GoldnerSplit> valid_splits(const Hypergraph& h, const Edge& pivot,
                                              std::array<int, 2> pair) {
  const detail::CompactH c = detail::compact_of(h);
  const std::size_t pi = detail::pivot_index(h, pivot);
  const Edge piv = h.edges()[pi];
  const std::uint32_t p = detail::pair_mask_checked(piv, pair);
  std::sort(pair.begin(), pair.end());

  auto to_hypergraph = [](const detail::CompactH& ch) {
    std::vector<Edge> es;
    es.reserve(ch.edges.size());
    for (std::uint32_t m : ch.edges) {
      const auto t = detail::edge_tuple(m);
      es.push_back(make_edge(t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1));
    }
    return Hypergraph(ch.n, std::move(es));
  };

  std::vector<GoldnerSplit> out;
  const std::uint32_t full = detail::full_mask(c.n);
  detail::for_each_valid_part(c, pi, p, [&](std::uint32_t w) {
    const std::uint32_t part = p | w;
    std::vector<int> labels;
    for (std::uint32_t rest = part; rest; rest &= rest - 1)
      labels.push_back(std::countr_zero(rest) + 1);
    out.push_back(GoldnerSplit{piv, pair, std::move(labels),
                               to_hypergraph(detail::child_of(c, pi, part)),
                               to_hypergraph(detail::child_of(c, pi, full & ~part))});
  });
  return out;
}

}  // namespace xratio
