#pragma once

// d-uniform hypergraphs on the vertex set [n] = {1, ..., n}.
//
// Vertex sets are stored as 64-bit masks (bit v set <=> v in the set), which
// caps n at 63. Every search in this library runs at desk scale, far below
// that limit.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace xtt {

using Vertex = int;
using Mask = std::uint64_t;

inline constexpr int kMaxVertices = 63;

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidSequence : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Mask helpers

inline constexpr Mask bit(Vertex v) { return Mask{1} << v; }

inline int popcount(Mask m) { return std::popcount(m); }

inline bool contains(Mask m, Vertex v) { return (m >> v) & 1U; }

inline Mask to_mask(std::span<const Vertex> vs) {
  Mask m = 0;
  for (Vertex v : vs) m |= bit(v);
  return m;
}

inline Mask to_mask(std::initializer_list<Vertex> vs) {
  return to_mask(std::span<const Vertex>(vs.begin(), vs.size()));
}

/// Ascending list of the vertices in `m`.
inline std::vector<Vertex> vertices_of(Mask m) {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(popcount(m)));
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

/// Lexicographic order on the sorted vertex tuples of two sets of equal size.
/// The set holding the lowest element of the symmetric difference is smaller.
inline bool lex_less(Mask a, Mask b) {
  if (a == b) return false;
  if (popcount(a) != popcount(b)) return popcount(a) < popcount(b);
  Mask low = (a ^ b) & (~(a ^ b) + 1);
  return (a & low) != 0;
}

inline std::string to_string(Mask m) {
  std::string s = "{";
  bool first = true;
  for (Vertex v : vertices_of(m)) {
    if (!first) s += ",";
    s += std::to_string(v);
    first = false;
  }
  return s + "}";
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

/// Calls f(mask) for every k-subset of `m`.
template <class F>
void for_each_subset(Mask m, int k, F &&f) {
  std::vector<Vertex> vs = vertices_of(m);
  int size = static_cast<int>(vs.size());
  if (k < 0 || k > size) return;
  if (k == 0) {
    f(Mask{0});
    return;
  }
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    Mask s = 0;
    for (int i : idx) s |= bit(vs[static_cast<std::size_t>(i)]);
    f(s);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == size - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// Mask of {1, ..., n}.
inline Mask full_mask(int n) { return ((Mask{1} << n) - 1) << 1; }

// ---------------------------------------------------------------------------

/// A d-uniform hypergraph on [n]. Immutable after construction; edges are kept
/// in canonical lexicographic order with a hash index for membership.
class DGraph {
 public:
  DGraph() = default;

  DGraph(int n, int d) : n_(n), d_(d) { check_params(); }

  DGraph(int n, int d, std::vector<Mask> edges) : n_(n), d_(d), edges_(std::move(edges)) {
    check_params();
    const Mask allowed = full_mask(n_);
    for (Mask e : edges_) {
      if (popcount(e) != d_) throw ParameterError("edge " + to_string(e) + " does not have " + std::to_string(d_) + " vertices");
      if ((e & ~allowed) != 0) throw ParameterError("edge " + to_string(e) + " leaves [1," + std::to_string(n_) + "]");
    }
    std::sort(edges_.begin(), edges_.end(), lex_less);
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw ParameterError("duplicate edge in hypergraph");
    index_.reserve(edges_.size() * 2);
    index_.insert(edges_.begin(), edges_.end());
  }

  int n() const { return n_; }
  int d() const { return d_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::vector<Mask> &edges() const { return edges_; }

  bool contains(Mask e) const { return index_.count(e) != 0; }
  bool contains(std::span<const Vertex> e) const { return contains(to_mask(e)); }

  /// |G({v})|.
  int vertex_degree(Vertex v) const {
    int c = 0;
    for (Mask e : edges_)
      if (xtt::contains(e, v)) ++c;
    return c;
  }

  /// Degrees of all vertices, indexed 0..n (entry 0 unused).
  std::vector<int> vertex_degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_) + 1, 0);
    for (Mask e : edges_)
      for (Vertex v : vertices_of(e)) ++deg[static_cast<std::size_t>(v)];
    return deg;
  }

  friend bool operator==(const DGraph &a, const DGraph &b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.edges_ == b.edges_;
  }

 private:
  void check_params() const {
    if (n_ < 0 || n_ > kMaxVertices) throw ParameterError("vertex count out of range [0, 63]");
    if (d_ < 0 || d_ > n_) throw ParameterError("uniformity must satisfy 0 <= d <= n");
  }

  int n_ = 0;
  int d_ = 0;
  std::vector<Mask> edges_;
  std::unordered_set<Mask> index_;
};

/// K_n^{(d)}.
inline DGraph complete(int n, int d) {
  if (d < 1 || d > n) throw ParameterError("complete graph needs 1 <= d <= n");
  if (n > kMaxVertices) throw ParameterError("vertex count above 63");
  std::vector<Mask> edges;
  edges.reserve(static_cast<std::size_t>(binomial(n, d)));
  for_each_subset(full_mask(n), d, [&](Mask s) { edges.push_back(s); });
  return DGraph(n, d, std::move(edges));
}

/// The link G(S): the (d-|S|)-graph of all S' with S u S' in G.
inline DGraph link(const DGraph &g, Mask s) {
  int k = popcount(s);
  if (k > g.d()) throw ParameterError("link set larger than the uniformity");
  if ((s & ~full_mask(g.n())) != 0) throw ParameterError("link set leaves the vertex range");
  std::vector<Mask> out;
  for (Mask e : g.edges())
    if ((e & s) == s) out.push_back(e & ~s);
  return DGraph(g.n(), g.d() - k, std::move(out));
}

inline int degree(const DGraph &g, Mask s) {
  int c = 0;
  for (Mask e : g.edges())
    if ((e & s) == s) ++c;
  return c;
}

/// |G(S)| for every i-set S that lies in some edge; absent sets have degree 0.
inline std::unordered_map<Mask, int> level_degrees(const DGraph &g, int i) {
  std::unordered_map<Mask, int> counts;
  for (Mask e : g.edges()) for_each_subset(e, i, [&](Mask s) { ++counts[s]; });
  return counts;
}

struct DegreeRange {
  int min = 0;
  int max = 0;
  friend bool operator==(const DegreeRange &, const DegreeRange &) = default;
};

/// (delta_i(G), Delta_i(G)) over all C(n, i) i-subsets of [n].
inline DegreeRange degree_profile(const DGraph &g, int i) {
  if (i < 0 || i > g.d() - 1) throw ParameterError("degree level must lie in [0, d-1]");
  auto counts = level_degrees(g, i);
  DegreeRange r;
  if (counts.empty()) return r;
  r.max = 0;
  r.min = counts.begin()->second;
  for (auto &[s, c] : counts) {
    r.max = std::max(r.max, c);
    r.min = std::min(r.min, c);
  }
  if (counts.size() < binomial(g.n(), i)) r.min = 0;
  return r;
}

/// delta(G) = delta_{d-1}(G).
inline int min_codegree(const DGraph &g) { return degree_profile(g, g.d() - 1).min; }
/// Delta(G) = Delta_{d-1}(G).
inline int max_codegree(const DGraph &g) { return degree_profile(g, g.d() - 1).max; }

inline DGraph without(const DGraph &g, std::span<const Mask> removed) {
  std::unordered_set<Mask> drop(removed.begin(), removed.end());
  std::vector<Mask> keep;
  for (Mask e : g.edges())
    if (!drop.count(e)) keep.push_back(e);
  return DGraph(g.n(), g.d(), std::move(keep));
}

/// Union with extra edges; edges already present are ignored.
inline DGraph with(const DGraph &g, std::span<const Mask> added) {
  std::vector<Mask> all = g.edges();
  for (Mask e : added)
    if (!g.contains(e)) all.push_back(e);
  std::sort(all.begin(), all.end(), lex_less);
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return DGraph(g.n(), g.d(), std::move(all));
}

inline DGraph induced(const DGraph &g, Mask u) {
  std::vector<Mask> keep;
  for (Mask e : g.edges())
    if ((e & ~u) == 0) keep.push_back(e);
  return DGraph(g.n(), g.d(), std::move(keep));
}

}  // namespace xtt
