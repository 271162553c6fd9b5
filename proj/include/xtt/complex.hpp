#pragma once

// Pure simplicial d-complexes given by their facets, i.e. (d+1)-graphs.

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypergraph.hpp"

namespace xtt {

/// Facets of a pure d-complex on [n]; every facet has d+1 vertices.
class FacetFamily {
 public:
  FacetFamily() = default;
  FacetFamily(int n, int d, std::vector<Mask> facets) : facets_(n, d + 1, std::move(facets)) {
    if (d < 0) throw ParameterError("complex dimension must be nonnegative");
  }
  explicit FacetFamily(DGraph facets) : facets_(std::move(facets)) {
    if (facets_.d() < 1) throw ParameterError("facets need at least one vertex");
  }

  int n() const { return facets_.n(); }
  int d() const { return facets_.d() - 1; }
  std::size_t size() const { return facets_.size(); }
  const std::vector<Mask> &facets() const { return facets_.edges(); }
  const DGraph &as_graph() const { return facets_; }
  bool contains(Mask f) const { return facets_.contains(f); }

  friend bool operator==(const FacetFamily &a, const FacetFamily &b) { return a.facets_ == b.facets_; }

 private:
  DGraph facets_;
};

/// All d-sets lying in some facet.
inline DGraph shadow(const FacetFamily &f) {
  std::unordered_set<Mask> seen;
  std::vector<Mask> out;
  for (Mask facet : f.facets())
    for_each_subset(facet, f.d(), [&](Mask r) {
      if (seen.insert(r).second) out.push_back(r);
    });
  return DGraph(f.n(), f.d(), std::move(out));
}

enum class DualShape { empty, path, cycle, other };

inline const char *to_string(DualShape s) {
  switch (s) {
    case DualShape::empty: return "empty";
    case DualShape::path: return "path";
    case DualShape::cycle: return "cycle";
    case DualShape::other: return "other";
  }
  return "?";
}

struct DualGraph {
  std::vector<Mask> facets;             // canonical order, indices below refer to it
  std::vector<std::vector<int>> adj;    // sorted neighbour lists
  DualShape shape = DualShape::empty;
  bool connected = false;

  std::size_t edge_count() const {
    std::size_t s = 0;
    for (auto &a : adj) s += a.size();
    return s / 2;
  }
};

namespace detail {

inline std::vector<int> bfs_distances(const std::vector<std::vector<int>> &adj, int src) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> q{src};
  dist[static_cast<std::size_t>(src)] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int w : adj[static_cast<std::size_t>(u)])
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push_back(w);
      }
  }
  return dist;
}

}  // namespace detail

/// Facets are adjacent iff they share d vertices, i.e. a common ridge.
inline DualGraph dual_graph(const FacetFamily &f) {
  DualGraph g;
  g.facets = f.facets();
  const std::size_t m = g.facets.size();
  g.adj.assign(m, {});
  if (m == 0) return g;

  std::unordered_map<Mask, std::vector<int>> by_ridge;
  for (std::size_t i = 0; i < m; ++i)
    for_each_subset(g.facets[i], f.d(), [&](Mask r) { by_ridge[r].push_back(static_cast<int>(i)); });
  for (auto &[ridge, ids] : by_ridge)
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        g.adj[static_cast<std::size_t>(ids[a])].push_back(ids[b]);
        g.adj[static_cast<std::size_t>(ids[b])].push_back(ids[a]);
      }
  for (auto &a : g.adj) std::sort(a.begin(), a.end());

  auto dist = detail::bfs_distances(g.adj, 0);
  g.connected = std::none_of(dist.begin(), dist.end(), [](int x) { return x < 0; });

  std::size_t deg1 = 0, deg2 = 0;
  for (auto &a : g.adj) {
    if (a.size() == 1) ++deg1;
    else if (a.size() == 2) ++deg2;
  }
  if (!g.connected) g.shape = DualShape::other;
  else if (m == 1) g.shape = DualShape::path;
  else if (deg1 == 2 && deg1 + deg2 == m) g.shape = DualShape::path;
  else if (m >= 3 && deg2 == m) g.shape = DualShape::cycle;
  else g.shape = DualShape::other;
  return g;
}

/// Largest facet distance in the dual graph; empty when it is disconnected.
inline std::optional<int> diameter(const DualGraph &g) {
  if (g.facets.empty() || !g.connected) return std::nullopt;
  int best = 0;
  for (std::size_t s = 0; s < g.adj.size(); ++s) {
    auto dist = detail::bfs_distances(g.adj, static_cast<int>(s));
    for (int x : dist) best = std::max(best, x);
  }
  return best;
}

inline std::optional<int> diameter(const FacetFamily &f) { return diameter(dual_graph(f)); }

/// floor(C(n,d)/d - (d+1)/d): the volume bound on the diameter.
inline std::uint64_t hs_bound(int n, int d) {
  if (d < 2 || d >= n) throw ParameterError("hs_bound needs 2 <= d < n");
  return (binomial(n, d) - static_cast<std::uint64_t>(d) - 1) / static_cast<std::uint64_t>(d);
}

struct ExtremalCertificate {
  DualShape shape = DualShape::empty;
  bool connected = false;
  std::size_t facets = 0;
  std::size_t shadow_size = 0;
  bool shadow_identity = false;   // |shadow| = |F| d + 1 (path) or |F| d (cycle)
  std::optional<int> diameter;
  std::uint64_t bound = 0;
  std::vector<Mask> missing;      // d-sets of [n] outside the shadow, canonical order
  bool extremal = false;
};

inline ExtremalCertificate certify_extremal(const FacetFamily &f) {
  ExtremalCertificate c;
  auto g = dual_graph(f);
  auto sh = shadow(f);
  c.shape = g.shape;
  c.connected = g.connected;
  c.facets = f.size();
  c.shadow_size = sh.size();
  c.diameter = diameter(g);
  const std::size_t d = static_cast<std::size_t>(f.d());
  if (c.shape == DualShape::path) c.shadow_identity = c.shadow_size == c.facets * d + 1;
  else if (c.shape == DualShape::cycle) c.shadow_identity = c.shadow_size == c.facets * d;
  if (f.d() >= 2 && f.d() < f.n()) c.bound = hs_bound(f.n(), f.d());
  for_each_subset(full_mask(f.n()), f.d(), [&](Mask s) {
    if (!sh.contains(s)) c.missing.push_back(s);
  });
  c.extremal = c.shape == DualShape::path && c.shadow_identity && f.d() >= 2 &&
               c.missing.size() <= d - 1;
  return c;
}

}  // namespace xtt
