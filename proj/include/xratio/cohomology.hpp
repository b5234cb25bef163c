#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "xratio/hypergraph.hpp"

namespace xratio {

// Exponent vector over up to 32 edge variables, packed 4 bits each (vars
// 0..15 in lo, 16..31 in hi). Ring relation: any exponent above 3 is zero,
// so a set bit in 0xCC.. marks a vanished monomial.
struct Monomial {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  friend bool operator==(const Monomial&, const Monomial&) = default;

  int exponent(int var) const {
    const std::uint64_t w = var < 16 ? lo : hi;
    return static_cast<int>((w >> ((var & 15) * 4)) & 0xF);
  }

  static Monomial unit() { return {}; }

  // single-variable power x_var^e, e in [0,3]
  static Monomial power(int var, int e) {
    if (var < 0 || var >= 32) throw std::invalid_argument("variable out of range");
    if (e < 0 || e > 3) throw std::invalid_argument("exponent must be in [0,3]");
    Monomial m;
    (var < 16 ? m.lo : m.hi) = static_cast<std::uint64_t>(e) << ((var & 15) * 4);
    return m;
  }

  // nullopt when some exponent would exceed 3 (the product is zero in the
  // ring); nibble sums stay below 8, so no carry crosses into a neighbor
  static std::optional<Monomial> product(const Monomial& a, const Monomial& b) {
    constexpr std::uint64_t kDead = 0xCCCCCCCCCCCCCCCCull;
    Monomial r{a.lo + b.lo, a.hi + b.hi};
    if ((r.lo | r.hi) & kDead) return std::nullopt;
    return r;
  }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const {
    std::uint64_t z = m.lo ^ (m.hi * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw std::overflow_error("cohomology coefficient exceeds 64 bits");
  return r;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("cohomology coefficient exceeds 64 bits");
  return r;
}

}  // namespace detail

// Z[x_0..x_{m-1}] / (x_e^4): nonnegative 64-bit coefficients with checked
// arithmetic, zero coefficients never stored
class TruncatedPolynomial {
 public:
  using TermMap = std::unordered_map<Monomial, std::uint64_t, MonomialHash>;

  explicit TruncatedPolynomial(int var_count) : vars_(var_count) {
    if (var_count < 0 || var_count > 32)
      throw std::invalid_argument("variable count must be in [0,32]");
  }

  static TruncatedPolynomial one(int var_count) {
    TruncatedPolynomial p(var_count);
    p.terms_.emplace(Monomial::unit(), 1);
    return p;
  }

  int var_count() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  std::uint64_t coefficient(const Monomial& m) const {
    const auto it = terms_.find(m);
    return it == terms_.end() ? 0 : it->second;
  }

  void add_term(const Monomial& m, std::uint64_t coeff) {
    if (coeff == 0) throw std::invalid_argument("zero coefficients are not stored");
    validate(m);
    auto [it, fresh] = terms_.emplace(m, coeff);
    if (!fresh) it->second = detail::checked_add(it->second, coeff);
  }

  TruncatedPolynomial add(const TruncatedPolynomial& other) const {
    require_same_vars(other);
    TruncatedPolynomial out = *this;
    for (const auto& [m, c] : other.terms_) out.add_term(m, c);
    return out;
  }

  TruncatedPolynomial multiply(const TruncatedPolynomial& other) const {
    require_same_vars(other);
    TruncatedPolynomial out(vars_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : other.terms_) {
        const auto prod = Monomial::product(ma, mb);
        if (!prod) continue;
        auto& slot = out.terms_[*prod];
        slot = detail::checked_add(slot, detail::checked_mul(ca, cb));
      }
    return out;
  }

  // deterministic order for printing and comparison in tests
  std::vector<std::pair<Monomial, std::uint64_t>> sorted_terms() const {
    std::vector<std::pair<Monomial, std::uint64_t>> v(terms_.begin(), terms_.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return std::pair(a.first.hi, a.first.lo) < std::pair(b.first.hi, b.first.lo);
    });
    return v;
  }

  friend bool operator==(const TruncatedPolynomial& a, const TruncatedPolynomial& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

 private:
  void validate(const Monomial& m) const {
    constexpr std::uint64_t kDead = 0xCCCCCCCCCCCCCCCCull;
    if ((m.lo | m.hi) & kDead)
      throw std::invalid_argument("exponent above 3 is zero in the ring");
    for (int v = vars_; v < 32; ++v)
      if (m.exponent(v) != 0)
        throw std::invalid_argument("monomial uses a variable beyond var_count");
  }

  void require_same_vars(const TruncatedPolynomial& other) const {
    if (vars_ != other.vars_)
      throw std::invalid_argument("variable counts differ");
  }

  int vars_;
  TermMap terms_;
};

// class of the incidence stratum of vertex v relative to the triple t:
// a vertex of t contributes the full product of its incident edge variables,
// any other vertex the elementary symmetric polynomial one step down
struct IncidenceClass {
  int vertex = 0;
  bool in_triple = false;
  TruncatedPolynomial poly{0};
};

inline IncidenceClass incidence_class(const Hypergraph& h, int v,
                                      const VertexTriple& t) {
  if (v < 1 || v > h.vertex_count())
    throw std::invalid_argument("vertex label out of range");
  if (t.v[0] < 1 || t.v[2] > h.vertex_count())
    throw std::invalid_argument("triple label out of range");
  const int m = static_cast<int>(h.edge_count());
  if (m > 32) throw std::invalid_argument("at most 32 edges supported");

  std::vector<int> star;
  for (int i = 0; i < m; ++i) {
    const Edge& e = h.edges()[static_cast<std::size_t>(i)];
    if (std::find(e.begin(), e.end(), v) != e.end()) star.push_back(i);
  }

  IncidenceClass out{v, t.contains(v), TruncatedPolynomial(m)};
  if (out.in_triple) {
    Monomial mono = Monomial::unit();
    for (int e : star) mono = *Monomial::product(mono, Monomial::power(e, 1));
    out.poly.add_term(mono, 1);  // empty star gives the constant 1
    return out;
  }
  if (star.empty())
    throw std::invalid_argument(
        "vertex outside the triple has no incident edge");
  // elementary symmetric e_{k-1}: one term per omitted edge
  for (std::size_t skip = 0; skip < star.size(); ++skip) {
    Monomial mono = Monomial::unit();
    for (std::size_t j = 0; j < star.size(); ++j)
      if (j != skip) mono = *Monomial::product(mono, Monomial::power(star[j], 1));
    out.poly.add_term(mono, 1);
  }
  return out;
}

// Matching bound computed in the truncated ring: the coefficient of
// prod_e x_e^3 in the product of all vertex classes. Multiplies in
// ascending star size and drops monomials that can no longer reach
// exponent 3 on some edge (each remaining factor raises an edge variable
// at most once).
inline std::uint64_t cohomology_bound(const Hypergraph& h, const VertexTriple& t) {
  if (!h.balanced()) throw std::invalid_argument("hypergraph must be balanced");
  if (t.v[0] < 1 || t.v[2] > h.vertex_count())
    throw std::invalid_argument("triple label out of range");
  const int n = h.vertex_count();
  const int m = static_cast<int>(h.edge_count());
  if (m == 0) return 1;
  if (m > 32) throw std::invalid_argument("at most 32 edges supported");

  std::vector<std::vector<int>> stars(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i)
    for (int v : h.edges()[static_cast<std::size_t>(i)])
      stars[static_cast<std::size_t>(v - 1)].push_back(i);

  int total_degree = 0;
  for (int v = 1; v <= n; ++v) {
    const auto& star = stars[static_cast<std::size_t>(v - 1)];
    if (t.contains(v)) {
      total_degree += static_cast<int>(star.size());
    } else {
      if (star.empty())
        throw std::invalid_argument(
            "vertex outside the triple has no incident edge");
      total_degree += static_cast<int>(star.size()) - 1;
    }
  }
  if (total_degree != 3 * m)
    throw std::logic_error("class degrees do not sum to 3 per edge");

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) order[static_cast<std::size_t>(v)] = v + 1;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto sa = stars[static_cast<std::size_t>(a - 1)].size();
    const auto sb = stars[static_cast<std::size_t>(b - 1)].size();
    return sa != sb ? sa < sb : a < b;
  });

  // remaining[e]: factors not yet multiplied that can still raise x_e
  std::vector<int> remaining(static_cast<std::size_t>(m), 4);

  using TermMap = TruncatedPolynomial::TermMap;
  TermMap frontier;
  frontier.emplace(Monomial::unit(), 1);
  TermMap next;

  const auto alive = [&](const Monomial& mono) {
    for (int e = 0; e < m; ++e)
      if (mono.exponent(e) + remaining[static_cast<std::size_t>(e)] < 3)
        return false;
    return true;
  };

  for (int v : order) {
    const IncidenceClass cls = incidence_class(h, v, t);
    for (int e : stars[static_cast<std::size_t>(v - 1)])
      --remaining[static_cast<std::size_t>(e)];
    next.clear();
    for (const auto& [ma, ca] : frontier)
      for (const auto& [mb, cb] : cls.poly.terms()) {
        const auto prod = Monomial::product(ma, mb);
        if (!prod || !alive(*prod)) continue;
        auto& slot = next[*prod];
        slot = detail::checked_add(slot, detail::checked_mul(ca, cb));
      }
    frontier.swap(next);
    if (frontier.empty()) return 0;
  }

  Monomial target;
  for (int e = 0; e < m; ++e) target = *Monomial::product(target, Monomial::power(e, 3));
  const auto it = frontier.find(target);
  return it == frontier.end() ? 0 : it->second;
}

}  // namespace xratio
