#pragma once

// Extra-tight trails and tours.
//
// For an open sequence v_1..v_k the covered sets are
//   e(i, s) = {v_i, ..., v_{i+d}} minus v_{i+s}     for i in [k-d], s in [d]
// plus the final block {v_{k-d+1}, ..., v_k}. A closed sequence uses every
// i in [k] with indices taken mod k.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "hypergraph.hpp"

namespace xtt {

struct VertexSeq {
  int d = 0;
  std::vector<Vertex> entries;
  bool closed = false;

  std::size_t size() const { return entries.size(); }
  friend bool operator==(const VertexSeq &, const VertexSeq &) = default;
};

inline VertexSeq open_seq(int d, std::vector<Vertex> v) { return {d, std::move(v), false}; }
inline VertexSeq closed_seq(int d, std::vector<Vertex> v) { return {d, std::move(v), true}; }

struct CoveredEdge {
  int iota = 0;   // 1-based window start
  int sigma = 0;  // 1-based offset of the dropped vertex
  Mask edge = 0;
  friend bool operator==(const CoveredEdge &, const CoveredEdge &) = default;
};

namespace detail {

inline void check_shape(const VertexSeq &s) {
  if (s.d < 1) throw InvalidSequence("uniformity must be at least 1");
  const int k = static_cast<int>(s.size());
  if (!s.closed && k < s.d) throw InvalidSequence("open sequence shorter than d");
  if (s.closed && k < s.d + 3) throw InvalidSequence("closed sequence needs at least d+3 entries");
  for (Vertex v : s.entries)
    if (v < 1 || v > kMaxVertices) throw InvalidSequence("vertex " + std::to_string(v) + " out of range");
}

inline Vertex at(const VertexSeq &s, int i) {  // 1-based, cyclic for tours
  const int k = static_cast<int>(s.size());
  return s.entries[static_cast<std::size_t>(((i - 1) % k + k) % k)];
}

inline std::string window_text(const VertexSeq &s, int from, int len) {
  std::string out = "(";
  for (int j = 0; j < len; ++j) {
    if (j) out += ",";
    out += std::to_string(at(s, from + j));
  }
  return out + ")";
}

// Emits every covered set without checking window distinctness.
inline std::vector<CoveredEdge> raw_cover(const VertexSeq &s) {
  const int k = static_cast<int>(s.size());
  const int d = s.d;
  const int starts = s.closed ? k : k - d;
  std::vector<CoveredEdge> out;
  out.reserve(static_cast<std::size_t>(starts * d + 1));
  for (int i = 1; i <= starts; ++i) {
    for (int sg = 1; sg <= d; ++sg) {
      // built entry by entry: in a bad window the dropped vertex may recur
      Mask e = 0;
      for (int j = 0; j <= d; ++j)
        if (j != sg) e |= bit(at(s, i + j));
      out.push_back({i, sg, e});
    }
  }
  if (!s.closed) {
    Mask last = 0;
    for (int j = k - d + 1; j <= k; ++j) last |= bit(at(s, j));
    out.push_back({k - d + 1, d, last});
  }
  return out;
}

// First window of d+1 entries (or the final d-block) holding a repeat.
inline std::optional<std::string> bad_window(const VertexSeq &s) {
  const int k = static_cast<int>(s.size());
  const int d = s.d;
  const int starts = s.closed ? k : k - d;
  for (int i = 1; i <= starts; ++i) {
    Mask w = 0;
    for (int j = 0; j <= d; ++j) w |= bit(at(s, i + j));
    if (popcount(w) != d + 1) return window_text(s, i, d + 1) + " at position " + std::to_string(i);
  }
  if (!s.closed) {
    Mask last = 0;
    for (int j = k - d + 1; j <= k; ++j) last |= bit(at(s, j));
    if (popcount(last) != d) return window_text(s, k - d + 1, d) + " at position " + std::to_string(k - d + 1);
  }
  return std::nullopt;
}

}  // namespace detail

/// Covered sets in (iota, sigma) order. Throws InvalidSequence when some
/// window of d+1 consecutive entries repeats a vertex.
inline std::vector<CoveredEdge> covered_edges(const VertexSeq &s) {
  detail::check_shape(s);
  if (auto bad = detail::bad_window(s)) throw InvalidSequence("repeated vertex in window " + *bad);
  return detail::raw_cover(s);
}

inline std::vector<Mask> covered_masks(const VertexSeq &s) {
  std::vector<Mask> out;
  for (auto &c : covered_edges(s)) out.push_back(c.edge);
  return out;
}

struct Duplicate {
  Mask edge = 0;
  int first = 0;   // indices into CoverageReport::covered
  int second = 0;
};

struct CoverageReport {
  std::vector<CoveredEdge> covered;
  std::vector<Duplicate> duplicates;
  std::vector<Mask> missing_from_host;
  std::string error;  // shape problem, if any
  bool valid = false;
};

/// Never throws on bad input. A window with a repeated vertex yields a set with
/// fewer than d vertices, which no host contains, so it shows up in
/// missing_from_host.
inline CoverageReport validate(const VertexSeq &s, const DGraph &host) {
  CoverageReport r;
  try {
    detail::check_shape(s);
  } catch (const InvalidSequence &e) {
    r.error = e.what();
    return r;
  }
  if (host.d() != s.d) {
    r.error = "host uniformity differs from sequence uniformity";
    return r;
  }
  r.covered = detail::raw_cover(s);
  std::unordered_map<Mask, int> first;
  for (std::size_t i = 0; i < r.covered.size(); ++i) {
    Mask e = r.covered[i].edge;
    auto [it, fresh] = first.emplace(e, static_cast<int>(i));
    if (!fresh) r.duplicates.push_back({e, it->second, static_cast<int>(i)});
    if (popcount(e) != s.d || !host.contains(e)) r.missing_from_host.push_back(e);
  }
  r.valid = r.duplicates.empty() && r.missing_from_host.empty();
  return r;
}

/// True iff s is an Euler trail/tour of host: valid and covering every edge.
inline bool covers_exactly(const VertexSeq &s, const DGraph &host) {
  auto r = validate(s, host);
  return r.valid && r.covered.size() == host.size();
}

inline std::pair<std::vector<Vertex>, std::vector<Vertex>> ends(const VertexSeq &s) {
  if (s.closed) throw InvalidSequence("a closed sequence has no ends");
  if (static_cast<int>(s.size()) < s.d) throw InvalidSequence("open sequence shorter than d");
  auto d = static_cast<std::ptrdiff_t>(s.d);
  return {std::vector<Vertex>(s.entries.begin(), s.entries.begin() + d),
          std::vector<Vertex>(s.entries.end() - d, s.entries.end())};
}

/// Number of covered sets containing each vertex.
inline std::map<Vertex, int> trail_degrees(const VertexSeq &s) {
  std::map<Vertex, int> deg;
  for (Vertex v : s.entries) deg[v] = 0;
  for (auto &c : covered_edges(s))
    for (Vertex v : vertices_of(c.edge)) ++deg[v];
  return deg;
}

inline Vertex max_entry(const VertexSeq &s) {
  Vertex m = 0;
  for (Vertex v : s.entries) m = std::max(m, v);
  return m;
}

/// Valid extra-tight trail in the complete d-graph on [max entry].
inline bool is_straight(const VertexSeq &s) {
  if (s.closed || s.d < 1 || static_cast<int>(s.size()) < s.d) return false;
  Vertex n = max_entry(s);
  if (n < s.d || n > kMaxVertices) return false;
  return validate(s, complete(n, s.d)).valid;
}

/// Windows of d+1 consecutive entries as facets (cyclic windows for tours).
inline FacetFamily facets_of(const VertexSeq &s, int n = 0) {
  detail::check_shape(s);
  if (auto bad = detail::bad_window(s)) throw InvalidSequence("repeated vertex in window " + *bad);
  if (n == 0) n = max_entry(s);
  const int k = static_cast<int>(s.size());
  const int starts = s.closed ? k : k - s.d;
  std::vector<Mask> out;
  std::unordered_set<Mask> seen;
  for (int i = 1; i <= starts; ++i) {
    Mask w = 0;
    for (int j = 0; j <= s.d; ++j) w |= bit(detail::at(s, i + j));
    if (!seen.insert(w).second)
      throw InvalidSequence("window " + detail::window_text(s, i, s.d + 1) + " repeats an earlier window");
    out.push_back(w);
  }
  return FacetFamily(n, s.d, std::move(out));
}

inline VertexSeq reversed(const VertexSeq &s) {
  VertexSeq r = s;
  std::reverse(r.entries.begin(), r.entries.end());
  return r;
}

inline VertexSeq iota_seq(int d, int k, bool closed) {
  VertexSeq s{d, {}, closed};
  for (int i = 1; i <= k; ++i) s.entries.push_back(i);
  return s;
}

/// Edge set of the closed sequence (1, ..., f).
inline DGraph extra_tight_cycle(int f, int d) { return DGraph(f, d, covered_masks(iota_seq(d, f, true))); }

/// Edge set of the open sequence (1, ..., k).
inline DGraph extra_tight_path(int k, int d) { return DGraph(k, d, covered_masks(iota_seq(d, k, false))); }

}  // namespace xtt
