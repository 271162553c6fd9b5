#pragma once

// Exact backtracking searches: extra-tight Euler tours and trails, longest
// induced paths in Johnson graphs, and maximum-diameter complexes.

#include <chrono>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "complex.hpp"
#include "divisibility.hpp"
#include "hypergraph.hpp"
#include "trails.hpp"

namespace xtt {

enum class SearchMode { exhaustive, first_found };
enum class SearchStatus { found, none, timeout };

inline const char *to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::none: return "none";
    case SearchStatus::timeout: return "timeout";
  }
  return "?";
}

struct SearchBudget {
  double max_seconds = 60.0;
  std::uint64_t max_nodes = 1'000'000'000ULL;
  SearchMode mode = SearchMode::exhaustive;
};

namespace detail {

class Clock {
 public:
  explicit Clock(const SearchBudget &b) : budget_(b), start_(std::chrono::steady_clock::now()) {
    if (b.max_seconds <= 0 || b.max_nodes == 0) throw ParameterError("search budget caps must be positive");
  }

  // Counts one node; true once a cap is hit.
  bool tick() {
    ++nodes_;
    if (expired_) return true;
    if (nodes_ > budget_.max_nodes) expired_ = true;
    else if ((nodes_ & 0x3ff) == 0 && seconds() > budget_.max_seconds) expired_ = true;
    return expired_;
  }

  bool expired() const { return expired_; }
  std::uint64_t nodes() const { return nodes_; }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  SearchBudget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  bool expired_ = false;
};

// Dense edge ids for O(1) used-flags.
class EdgeIndex {
 public:
  explicit EdgeIndex(const DGraph &g) {
    ids_.reserve(g.size() * 2);
    for (std::size_t i = 0; i < g.size(); ++i) ids_.emplace(g.edges()[i], static_cast<int>(i));
  }
  int id(Mask e) const {
    auto it = ids_.find(e);
    return it == ids_.end() ? -1 : it->second;
  }

 private:
  std::unordered_map<Mask, int> ids_;
};

}  // namespace detail

struct TourResult {
  SearchStatus status = SearchStatus::none;
  std::optional<VertexSeq> witness;
  std::uint64_t nodes = 0;
  double seconds = 0;
  std::string reason;  // why `none` was decided without search, if it was
  std::optional<ExtremalCertificate> certificate;
};

struct TourOptions {
  // Off only to test necessity: skips the d^2 | deg(v) check and the
  // per-vertex occurrence budget derived from it.
  bool degree_prechecks = true;
  bool symmetry = true;
};

namespace detail {

// Shared DFS over sequences v_1..v_k, some entries preset. Each placed entry
// v_j claims the d sets whose largest position is j; the wrap-around sets of a
// tour are claimed last.
struct SeqSearch {
  const DGraph &g;
  int d = 0;
  int k = 0;
  bool closed = false;
  std::vector<Vertex> seq;           // 1-based, seq[0] unused
  std::vector<bool> preset;
  std::vector<int> occ_left;         // per vertex; empty disables the budget
  EdgeIndex index;
  std::vector<char> used;
  Clock &clock;

  SeqSearch(const DGraph &host, int k_, bool closed_, Clock &c)
      : g(host), d(host.d()), k(k_), closed(closed_), seq(static_cast<std::size_t>(k_) + 1, 0),
        preset(static_cast<std::size_t>(k_) + 1, false), index(host), used(host.size(), 0), clock(c) {}

  Vertex at(int i) const { return seq[static_cast<std::size_t>(i)]; }

  // Sets claimed at position j (j >= d), appended to `out`.
  void sets_at(int j, std::vector<Mask> &out) const {
    if (j == d) {
      Mask b = 0;
      for (int i = 1; i <= d; ++i) b |= bit(at(i));
      out.push_back(b);
      return;
    }
    const int s = j - d;
    Mask w = 0;
    for (int i = s; i <= j; ++i) w |= bit(at(i));
    for (int sg = 1; sg < d; ++sg) out.push_back(w & ~bit(at(s + sg)));
    out.push_back(w & ~bit(at(s)));  // the block v_{j-d+1}..v_j
  }

  // Wrap-around sets of a tour: windows starting at k-d+1..k.
  void wrap_sets(std::vector<Mask> &out) const {
    auto cyc = [&](int i) { return at((i - 1) % k + 1); };
    for (int s = k - d + 1; s <= k; ++s) {
      Mask w = 0;
      for (int i = 0; i <= d; ++i) w |= bit(cyc(s + i));
      for (int sg = 1; sg <= d; ++sg) {
        if (s == k - d + 1 && sg == d) continue;  // the block claimed at position k
        out.push_back(w & ~bit(cyc(s + sg)));
      }
    }
  }

  bool window_ok(int j, Vertex v) const {
    for (int i = std::max(1, j - d); i < j; ++i)
      if (at(i) == v) return false;
    for (int i = j + 1; i <= std::min(k, j + d); ++i)
      if (preset[static_cast<std::size_t>(i)] && at(i) == v) return false;
    if (closed && j > k - d)
      for (int i = 1; i <= j + d - k; ++i)
        if (at(i) == v) return false;
    return true;
  }

  // Marks the sets; on failure nothing stays marked.
  bool claim(const std::vector<Mask> &sets, std::vector<int> &ids) {
    ids.clear();
    for (Mask e : sets) {
      int id = popcount(e) == d ? index.id(e) : -1;
      if (id < 0 || used[static_cast<std::size_t>(id)]) {
        for (int x : ids) used[static_cast<std::size_t>(x)] = 0;
        ids.clear();
        return false;
      }
      used[static_cast<std::size_t>(id)] = 1;
      ids.push_back(id);
    }
    return true;
  }

  void release(const std::vector<int> &ids) {
    for (int x : ids) used[static_cast<std::size_t>(x)] = 0;
  }

  bool run(int j) {
    if (clock.tick()) return false;
    if (j > k) {
      if (!closed) return true;
      std::vector<Mask> sets;
      std::vector<int> ids;
      wrap_sets(sets);
      if (claim(sets, ids)) return true;
      return false;
    }
    if (preset[static_cast<std::size_t>(j)]) {
      Vertex v = at(j);
      if (!window_ok(j, v)) return false;
      std::vector<Mask> sets;
      std::vector<int> ids;
      if (j >= d) sets_at(j, sets);
      if (!claim(sets, ids)) return false;
      if (run(j + 1)) return true;
      release(ids);
      return false;
    }
    std::vector<Mask> sets;
    std::vector<int> ids;
    for (Vertex v = 1; v <= g.n(); ++v) {
      if (!occ_left.empty() && occ_left[static_cast<std::size_t>(v)] == 0) continue;
      if (!window_ok(j, v)) continue;
      seq[static_cast<std::size_t>(j)] = v;
      sets.clear();
      if (j >= d) sets_at(j, sets);
      if (!claim(sets, ids)) continue;
      if (!occ_left.empty()) --occ_left[static_cast<std::size_t>(v)];
      if (run(j + 1)) return true;
      if (!occ_left.empty()) ++occ_left[static_cast<std::size_t>(v)];
      release(ids);
      if (clock.expired()) break;
    }
    seq[static_cast<std::size_t>(j)] = 0;
    return false;
  }
};

inline bool is_complete(const DGraph &g) { return g.size() == binomial(g.n(), g.d()); }

}  // namespace detail

/// Closed sequence covering every edge of G exactly once.
inline TourResult find_euler_tour(const DGraph &g, const SearchBudget &budget, TourOptions opt = {}) {
  detail::Clock clock(budget);
  TourResult r;
  const int d = g.d();
  auto finish = [&](SearchStatus s) {
    r.status = s;
    r.nodes = clock.nodes();
    r.seconds = clock.seconds();
    return r;
  };
  if (d < 1 || g.empty()) {
    r.reason = "empty graph";
    return finish(SearchStatus::none);
  }
  if (g.size() % static_cast<std::size_t>(d) != 0) {
    r.reason = "edge count not divisible by d";
    return finish(SearchStatus::none);
  }
  const int k = static_cast<int>(g.size()) / d;
  if (k < d + 3) {
    r.reason = "tour would have fewer than d+3 entries";
    return finish(SearchStatus::none);
  }
  std::vector<int> occ;
  if (opt.degree_prechecks) {
    auto table = tour_feasible(g);
    if (!table.feasible) {
      r.reason = "some vertex degree is not divisible by d^2";
      return finish(SearchStatus::none);
    }
    auto deg = g.vertex_degrees();
    occ.assign(deg.size(), 0);
    for (std::size_t v = 0; v < deg.size(); ++v) occ[v] = deg[v] / (d * d);
  }

  // Rotate an occurrence of the smallest non-isolated vertex to the front. A
  // complete host is S_n-symmetric, so its first window may be relabelled 1..d+1.
  std::vector<Vertex> prefix;
  for (Vertex v = 1; v <= g.n() && prefix.empty(); ++v)
    if (g.vertex_degree(v) > 0) prefix.push_back(v);
  if (opt.symmetry && detail::is_complete(g))
    for (Vertex v = 2; v <= d + 1; ++v) prefix.push_back(v);
  detail::SeqSearch s(g, k, true, clock);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    s.seq[i + 1] = prefix[i];
    s.preset[i + 1] = true;
    if (!occ.empty() && occ[static_cast<std::size_t>(prefix[i])]-- == 0) {
      r.reason = "vertex budget exhausted by the fixed prefix";
      return finish(SearchStatus::none);
    }
  }
  s.occ_left = occ;

  bool ok = s.run(1);
  if (ok) {
    VertexSeq w{d, std::vector<Vertex>(s.seq.begin() + 1, s.seq.end()), true};
    if (!covers_exactly(w, g)) throw std::logic_error("tour search produced an invalid witness");
    r.witness = w;
    r.certificate = certify_extremal(facets_of(w, g.n()));
    return finish(SearchStatus::found);
  }
  return finish(clock.expired() ? SearchStatus::timeout : SearchStatus::none);
}

struct TrailResult {
  SearchStatus status = SearchStatus::none;
  std::optional<VertexSeq> witness;
  std::uint64_t nodes = 0;
  double seconds = 0;
  std::string reason;
  std::optional<ResidueTable> residues;
};

/// Open sequence covering G exactly, beginning with `start` and ending with
/// `finish` (both in sequence order).
inline TrailResult find_euler_trail(const DGraph &g, std::span<const Vertex> start, std::span<const Vertex> finish,
                                    const SearchBudget &budget) {
  detail::Clock clock(budget);
  TrailResult r;
  const int d = g.d();
  auto done = [&](SearchStatus s) {
    r.status = s;
    r.nodes = clock.nodes();
    r.seconds = clock.seconds();
    return r;
  };
  auto table = trail_feasible(g, start, finish);
  r.residues = table;
  if (!table.feasible) {
    r.reason = "degree residues differ from the end targets";
    return done(SearchStatus::none);
  }
  if ((g.size() - 1) % static_cast<std::size_t>(d) != 0) {
    r.reason = "edge count is not 1 mod d";
    return done(SearchStatus::none);
  }
  const int k = static_cast<int>((g.size() - 1) / static_cast<std::size_t>(d)) + d;
  if (k < 2 * d) {
    r.reason = "trail too short for disjoint ends";
    return done(SearchStatus::none);
  }

  // Interior occurrences per vertex: each contributes d^2 edges.
  auto deg = g.vertex_degrees();
  std::vector<int> occ(deg.size(), 0);
  for (int i = 1; i <= d; ++i) {
    deg[static_cast<std::size_t>(start[static_cast<std::size_t>(i - 1)])] -= i * (d - 1) + 1;
    deg[static_cast<std::size_t>(finish[static_cast<std::size_t>(d - i)])] -= i * (d - 1) + 1;
  }
  for (std::size_t v = 1; v < deg.size(); ++v) {
    if (deg[v] < 0) {
      r.reason = "an end vertex has too small a degree";
      return done(SearchStatus::none);
    }
    occ[v] = deg[v] / (d * d);
  }

  detail::SeqSearch s(g, k, false, clock);
  for (int i = 1; i <= d; ++i) {
    s.seq[static_cast<std::size_t>(i)] = start[static_cast<std::size_t>(i - 1)];
    s.preset[static_cast<std::size_t>(i)] = true;
    s.seq[static_cast<std::size_t>(k - d + i)] = finish[static_cast<std::size_t>(i - 1)];
    s.preset[static_cast<std::size_t>(k - d + i)] = true;
  }
  s.occ_left = occ;
  bool ok = s.run(1);
  if (ok) {
    VertexSeq w{d, std::vector<Vertex>(s.seq.begin() + 1, s.seq.end()), false};
    if (!covers_exactly(w, g)) throw std::logic_error("trail search produced an invalid witness");
    r.witness = w;
    return done(SearchStatus::found);
  }
  return done(clock.expired() ? SearchStatus::timeout : SearchStatus::none);
}

// ---------------------------------------------------------------------------
// Johnson graphs

struct JohnsonResult {
  SearchStatus status = SearchStatus::none;  // found: optimum proven; timeout: best so far
  int length = -1;                           // edges on the best path
  std::vector<Mask> witness;                 // k-sets along the path
  bool proven = false;
  std::uint64_t nodes = 0;
  double seconds = 0;
};

namespace detail {

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
  Bits &operator|=(const Bits &o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  std::size_t count_and_not(const Bits &o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += static_cast<std::size_t>(std::popcount(w_[i] & ~o.w_[i]));
    return c;
  }
  template <class F>
  void for_each_and_not(const Bits &a, const Bits &b, F &&f) const {  // this & a & ~b
    for (std::size_t i = 0; i < w_.size(); ++i) {
      std::uint64_t x = w_[i] & a.w_[i] & ~b.w_[i];
      while (x) {
        f(i * 64 + static_cast<std::size_t>(std::countr_zero(x)));
        x &= x - 1;
      }
    }
  }
  template <class F>
  void for_each_not(F &&f, std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i)
      if (!test(i)) f(i);
  }
  void clear() { std::fill(w_.begin(), w_.end(), 0); }

 private:
  std::vector<std::uint64_t> w_;
};

}  // namespace detail

/// Longest induced path in J(n, k). The first three vertices are fixed up to
/// the symmetric group acting on [n].
inline JohnsonResult johnson_longest_induced_path(int n, int k, const SearchBudget &budget) {
  if (k < 1 || k > n || n > kMaxVertices) throw ParameterError("need 1 <= k <= n <= 63");
  detail::Clock clock(budget);
  if (k == 1) {  // J(n,1) is complete
    JohnsonResult r;
    r.length = n >= 2 ? 1 : 0;
    r.witness.push_back(bit(1));
    if (n >= 2) r.witness.push_back(bit(2));
    r.proven = true;
    r.status = SearchStatus::found;
    return r;
  }
  std::vector<Mask> verts;
  for_each_subset(full_mask(n), k, [&](Mask s) { verts.push_back(s); });
  const std::size_t m = verts.size();
  std::unordered_map<Mask, std::size_t> vid;
  for (std::size_t i = 0; i < m; ++i) vid[verts[i]] = i;

  std::vector<Mask> ridges;
  for_each_subset(full_mask(n), k - 1, [&](Mask s) { ridges.push_back(s); });
  std::unordered_map<Mask, std::size_t> rid;
  for (std::size_t i = 0; i < ridges.size(); ++i) rid[ridges[i]] = i;

  std::vector<detail::Bits> nbr(m, detail::Bits(m)), closed(m, detail::Bits(m)), own(m, detail::Bits(ridges.size()));
  for (std::size_t i = 0; i < m; ++i) {
    closed[i].set(i);
    for_each_subset(verts[i], k - 1, [&](Mask r) { own[i].set(rid[r]); });
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && popcount(verts[i] & verts[j]) == k - 1) {
        nbr[i].set(j);
        closed[i].set(j);
      }
  }

  std::optional<std::uint64_t> cap;
  if (k - 1 >= 2 && k - 1 < n) cap = hs_bound(n, k - 1);

  JohnsonResult r;
  std::vector<std::size_t> path;
  std::vector<std::size_t> best;

  auto record = [&] {
    if (static_cast<int>(path.size()) - 1 > static_cast<int>(best.size()) - 1) best = path;
  };
  auto at_cap = [&] { return cap && best.size() >= 1 && static_cast<std::uint64_t>(best.size() - 1) >= *cap; };

  // blocked: closed neighbourhoods of every path vertex but the last.
  // covered: ridges of all path vertices.
  auto dfs = [&](auto &&self, const detail::Bits &blocked, const detail::Bits &covered) -> void {
    record();
    if (at_cap() || clock.tick()) return;
    const std::size_t last = path.back();
    const int len = static_cast<int>(path.size()) - 1;

    // Every later vertex lies outside `blocked`, and brings k-1 ridges that
    // nothing on the path has yet.
    detail::Bits avail(ridges.size());
    bool any = false;
    blocked.for_each_not(
        [&](std::size_t v) {
          if (v == last) return;
          avail |= own[v];
          any = true;
        },
        m);
    if (!any) return;
    const int bound = len + static_cast<int>(avail.count_and_not(covered) / static_cast<std::size_t>(k - 1));
    if (bound <= static_cast<int>(best.size()) - 1) return;

    std::vector<std::size_t> next;
    nbr[last].for_each_and_not(nbr[last], blocked, [&](std::size_t v) { next.push_back(v); });
    for (std::size_t v : next) {
      detail::Bits nb = blocked;
      nb |= closed[last];
      detail::Bits nc = covered;
      nc |= own[v];
      path.push_back(v);
      self(self, nb, nc);
      path.pop_back();
      if (at_cap() || clock.expired()) return;
    }
  };

  auto range = [](int lo, int hi) {
    Mask x = 0;
    for (int v = lo; v <= hi; ++v) x |= bit(v);
    return x;
  };
  std::vector<Mask> prefix{range(1, k)};
  if (k < n) prefix.push_back(range(1, k - 1) | bit(k + 1));
  if (k + 2 <= n) prefix.push_back(range(1, k - 2) | bit(k + 1) | bit(k + 2));
  detail::Bits blocked(m), covered(ridges.size());
  for (Mask pm : prefix) {
    if (!path.empty()) blocked |= closed[path.back()];
    std::size_t v = vid.at(pm);
    path.push_back(v);
    covered |= own[v];
  }
  dfs(dfs, blocked, covered);

  r.length = best.empty() ? 0 : static_cast<int>(best.size()) - 1;
  for (std::size_t v : best) r.witness.push_back(verts[v]);
  r.proven = !clock.expired() || at_cap();
  r.status = r.proven ? SearchStatus::found : SearchStatus::timeout;
  r.nodes = clock.nodes();
  r.seconds = clock.seconds();
  return r;
}

struct DiameterResult {
  SearchStatus status = SearchStatus::none;
  FacetFamily complex;
  int diameter = -1;
  bool proven = false;
  ExtremalCertificate certificate;
  std::uint64_t nodes = 0;
  double seconds = 0;
};

/// Largest dual-graph diameter of a pure d-complex on [n], realised by an
/// induced path of J(n, d+1).
inline DiameterResult max_diameter_complex(int n, int d, const SearchBudget &budget) {
  auto j = johnson_longest_induced_path(n, d + 1, budget);
  DiameterResult r;
  r.complex = FacetFamily(n, d, j.witness);
  r.certificate = certify_extremal(r.complex);
  if (r.certificate.shape != DualShape::path || r.certificate.diameter != j.length)
    throw std::logic_error("induced path did not revalidate as a path complex");
  r.diameter = j.length;
  r.proven = j.proven;
  r.status = j.status;
  r.nodes = j.nodes;
  r.seconds = j.seconds;
  return r;
}

}  // namespace xtt
