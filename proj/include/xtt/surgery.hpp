#pragma once

// Local rewiring of extra-tight trails and straight complexes: gluing two
// trails through fresh connectors, turns, cycle insertion, label swaps and
// switcher checks, and the degree-fixing digraph that schedules turns.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "divisibility.hpp"
#include "hypergraph.hpp"
#include "trails.hpp"

namespace xtt {

// ---------------------------------------------------------------------------
// glue

namespace detail {

inline std::unordered_set<Mask> edge_set(const VertexSeq &s) {
  std::unordered_set<Mask> out;
  if (s.entries.empty()) return out;
  for (auto &c : covered_edges(s)) out.insert(c.edge);
  return out;
}

inline Mask block_mask(std::span<const Vertex> v) { return to_mask(v); }

}  // namespace detail

struct GlueOptions {
  std::size_t max_nodes = 2'000'000;
};

/// (A, x_1..x_2d, B) with 2d distinct connectors x_j from U, avoiding the last
/// d vertices of A and the first d of B. Connectors are tried lowest first
/// with full backtracking. Throws Infeasible when no choice works.
inline VertexSeq glue(const VertexSeq &a, const VertexSeq &b, const DGraph &g, Mask u,
                      GlueOptions opt = {}) {
  const int d = g.d();
  if (d < 2) throw ParameterError("gluing needs d >= 2");
  for (const VertexSeq *s : {&a, &b}) {
    if (s->closed) throw ParameterError("glue takes open sequences");
    if (s->entries.empty()) continue;
    if (s->d != d) throw ParameterError("sequence uniformity differs from host");
    if (!validate(*s, g).valid) throw ParameterError("input sequence is not a trail in the host");
  }
  auto used = detail::edge_set(a);
  for (Mask e : detail::edge_set(b))
    if (!used.insert(e).second) throw ParameterError("input trails share an edge");

  const auto dd = static_cast<std::size_t>(d);
  std::vector<Vertex> tail, head;
  if (!a.entries.empty()) tail.assign(a.entries.end() - static_cast<std::ptrdiff_t>(dd), a.entries.end());
  if (!b.entries.empty()) head.assign(b.entries.begin(), b.entries.begin() + static_cast<std::ptrdiff_t>(dd));
  const Mask tail_block = tail.empty() ? 0 : detail::block_mask(tail);
  const Mask head_block = head.empty() ? 0 : detail::block_mask(head);

  std::vector<Vertex> cand;
  for (Vertex v : vertices_of(u & full_mask(g.n()) & ~tail_block & ~head_block)) cand.push_back(v);

  std::vector<Vertex> chosen;
  std::size_t nodes = 0;
  int deepest = 0;

  // Sets covered by the local segment that are new relative to A and B.
  auto local_ok = [&](bool with_head) {
    VertexSeq loc{d, tail, false};
    loc.entries.insert(loc.entries.end(), chosen.begin(), chosen.end());
    if (with_head) loc.entries.insert(loc.entries.end(), head.begin(), head.end());
    if (static_cast<int>(loc.size()) < d) return true;
    if (detail::bad_window(loc)) return false;
    std::unordered_set<Mask> fresh;
    for (auto &c : detail::raw_cover(loc)) {
      if (c.edge == tail_block || (with_head && c.edge == head_block)) continue;
      if (!g.contains(c.edge) || used.count(c.edge) || !fresh.insert(c.edge).second) return false;
    }
    return true;
  };

  auto dfs = [&](auto &&self) -> bool {
    const int i = static_cast<int>(chosen.size());
    deepest = std::max(deepest, i);
    if (i == 2 * d) return true;
    for (Vertex v : cand) {
      if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      if (++nodes > opt.max_nodes) return false;
      chosen.push_back(v);
      if (local_ok(i + 1 == 2 * d) && self(self)) return true;
      chosen.pop_back();
    }
    return false;
  };

  if (!dfs(dfs))
    throw Infeasible("no connector for step " + std::to_string(deepest + 1) + " of " + std::to_string(2 * d) +
                     (nodes > opt.max_nodes ? " (node cap reached)" : ""));

  VertexSeq out{d, a.entries, false};
  out.entries.insert(out.entries.end(), chosen.begin(), chosen.end());
  out.entries.insert(out.entries.end(), b.entries.begin(), b.entries.end());
  if (!validate(out, g).valid) throw Infeasible("glued sequence failed revalidation");
  return out;
}

// ---------------------------------------------------------------------------
// turns

struct TurnResult {
  FacetFamily family;
  std::map<Vertex, int> delta;  // new minus old shadow degree, every vertex of [n]
  Mask removed = 0;
  Mask added = 0;
};

/// The d-sets a turn on `run` would add to the shadow.
inline std::vector<Mask> turn_gained_sets(std::span<const Vertex> run, int d) {
  auto v = [&](int i) { return run[static_cast<std::size_t>(i - 1)]; };
  Mask fresh = bit(v(d + 2));
  for (int i = d + 4; i <= 2 * d + 3; ++i) fresh |= bit(v(i));
  std::vector<Mask> out;
  for (int i = d + 4; i <= 2 * d + 2; ++i) out.push_back(fresh & ~bit(v(i)));
  return out;
}

/// Replaces facet {v_{d+3}..v_{2d+3}} of the run by {v_{d+2}, v_{d+4}..v_{2d+3}}.
inline TurnResult apply_turn(const FacetFamily &f, std::span<const Vertex> run) {
  const int d = f.d();
  if (d < 2) throw ParameterError("turns need d >= 2");
  if (static_cast<int>(run.size()) != 2 * d + 4) throw ParameterError("a turn run has 2d+4 vertices");
  auto v = [&](int i) { return run[static_cast<std::size_t>(i - 1)]; };
  for (int s = 1; s <= d + 4; ++s) {
    Mask w = 0;
    for (int j = s; j <= s + d; ++j) w |= bit(v(j));
    if (popcount(w) != d + 1) throw ParameterError("run window at " + std::to_string(s) + " repeats a vertex");
    if (!f.contains(w)) throw ParameterError("run window " + to_string(w) + " is not a facet");
  }
  Mask removed = 0, added = bit(v(d + 2));
  for (int i = d + 3; i <= 2 * d + 3; ++i) removed |= bit(v(i));
  for (int i = d + 4; i <= 2 * d + 3; ++i) added |= bit(v(i));
  if (popcount(added) != d + 1) throw ParameterError("turned facet " + to_string(added) + " repeats a vertex");

  auto before = shadow(f);
  for (Mask s : turn_gained_sets(run, d))
    if (before.contains(s)) throw ParameterError("turn precondition fails: " + to_string(s) + " already present");

  std::vector<Mask> facets;
  for (Mask x : f.facets())
    if (x != removed) facets.push_back(x);
  facets.push_back(added);
  TurnResult r{FacetFamily(f.n(), d, std::move(facets)), {}, removed, added};
  auto after = shadow(r.family);
  auto db = before.vertex_degrees(), da = after.vertex_degrees();
  for (Vertex x = 1; x <= f.n(); ++x) r.delta[x] = da[static_cast<std::size_t>(x)] - db[static_cast<std::size_t>(x)];
  return r;
}

// ---------------------------------------------------------------------------
// cycle insertion and switchers

struct ExchangePair {
  std::vector<Mask> e1;  // covered only after rewiring
  std::vector<Mask> e2;  // covered only before
  std::vector<Vertex> u; // u_0..u_d
  Vertex w0 = 0;
  Vertex wd = 0;
};

/// E1/E2 for anchors u_0..u_d, w_0, w_d.
inline ExchangePair exchange_pair(std::span<const Vertex> u, Vertex w0, Vertex wd) {
  const int d = static_cast<int>(u.size()) - 1;
  if (d < 2) throw ParameterError("exchange pairs need d >= 2");
  ExchangePair x{{}, {}, std::vector<Vertex>(u.begin(), u.end()), w0, wd};
  Mask mid = 0;
  for (int i = 1; i <= d - 1; ++i) mid |= bit(u[static_cast<std::size_t>(i)]);
  const Vertex u0 = u[0], ud = u[static_cast<std::size_t>(d)];
  for (int i = 1; i <= d - 1; ++i) {
    Mask rest = mid & ~bit(u[static_cast<std::size_t>(i)]);
    x.e1.push_back(rest | bit(u0) | bit(wd));
    x.e1.push_back(rest | bit(w0) | bit(ud));
    x.e2.push_back(rest | bit(w0) | bit(wd));
    x.e2.push_back(rest | bit(u0) | bit(ud));
  }
  return x;
}

struct InsertResult {
  VertexSeq seq;
  ExchangePair exchange;
};

/// Splices `cycle` into `trail` at the run (w_0, u_1..u_{d-1}, w_d) starting
/// at 0-based index `at`. The cycle must contain (u_0, u_1..u_{d-1}, u_d)
/// consecutively; the first cyclic match is used.
inline InsertResult insert_cycle(const VertexSeq &trail, const VertexSeq &cycle, std::size_t at) {
  const int d = trail.d;
  if (d < 2 || cycle.d != d) throw ParameterError("insert_cycle needs matching uniformity d >= 2");
  if (trail.closed || !cycle.closed) throw ParameterError("insert_cycle takes an open trail and a closed cycle");
  const auto dd = static_cast<std::size_t>(d);
  if (at + dd >= trail.size()) throw InvalidSequence("anchor run runs past the end of the trail");
  const std::size_t k = cycle.size();

  std::optional<std::size_t> start;
  for (std::size_t j = 0; j < k && !start; ++j) {
    bool ok = true;
    for (std::size_t i = 1; i < dd && ok; ++i) ok = cycle.entries[(j + i) % k] == trail.entries[at + i];
    if (ok) start = j;
  }
  if (!start) throw InvalidSequence("cycle does not contain the anchor vertices u_1..u_{d-1} consecutively");

  std::vector<Vertex> u;
  for (std::size_t i = 0; i <= dd; ++i) u.push_back(cycle.entries[(*start + i) % k]);
  const Vertex w0 = trail.entries[at], wd = trail.entries[at + dd];

  VertexSeq out{d, {}, false};
  out.entries.assign(trail.entries.begin(), trail.entries.begin() + static_cast<std::ptrdiff_t>(at + dd));
  out.entries.push_back(u[dd]);
  for (std::size_t i = dd + 1; i < k; ++i) out.entries.push_back(cycle.entries[(*start + i) % k]);
  for (std::size_t i = 0; i < dd; ++i) out.entries.push_back(u[i]);
  out.entries.insert(out.entries.end(), trail.entries.begin() + static_cast<std::ptrdiff_t>(at + dd), trail.entries.end());
  return {out, exchange_pair(u, w0, wd)};
}

inline VertexSeq swap_labels(const VertexSeq &s, Vertex a, Vertex b) {
  VertexSeq r = s;
  for (Vertex &v : r.entries) {
    if (v == a) v = b;
    else if (v == b) v = a;
  }
  return r;
}

struct SwitcherCertificate {
  bool inputs_valid = false;
  bool same_ends = false;
  bool t1_minus_t2 = false;  // T1 \ T2 = E1
  bool t2_minus_t1 = false;  // T2 \ T1 = E2
  bool independent = false;  // no edge of T1 \ E1 inside V(E1 u E2)
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

inline SwitcherCertificate verify_switcher(const VertexSeq &t1, const VertexSeq &t2, const ExchangePair &x) {
  SwitcherCertificate c;
  auto fail = [&](bool cond, const char *clause) {
    if (!cond) c.failures.emplace_back(clause);
    return cond;
  };
  auto straight_in_own_span = [](const VertexSeq &s) {
    if (s.closed || s.d < 1 || static_cast<int>(s.size()) < s.d) return false;
    auto r = validate(s, complete(std::max(max_entry(s), s.d), s.d));
    return r.valid;
  };
  c.inputs_valid = fail(straight_in_own_span(t1) && straight_in_own_span(t2) && t1.d == t2.d, "inputs are extra-tight trails");
  if (!c.inputs_valid) return c;
  c.same_ends = fail(ends(t1) == ends(t2), "same ends");

  std::set<Mask> s1, s2, e1(x.e1.begin(), x.e1.end()), e2(x.e2.begin(), x.e2.end());
  for (Mask e : covered_masks(t1)) s1.insert(e);
  for (Mask e : covered_masks(t2)) s2.insert(e);
  std::set<Mask> d12, d21;
  std::set_difference(s1.begin(), s1.end(), s2.begin(), s2.end(), std::inserter(d12, d12.end()));
  std::set_difference(s2.begin(), s2.end(), s1.begin(), s1.end(), std::inserter(d21, d21.end()));
  c.t1_minus_t2 = fail(d12 == e1, "T1 minus T2 equals E1");
  c.t2_minus_t1 = fail(d21 == e2, "T2 minus T1 equals E2");

  Mask span = 0;
  for (Mask e : e1) span |= e;
  for (Mask e : e2) span |= e;
  bool indep = true;
  for (Mask e : s1)
    if (!e1.count(e) && (e & ~span) == 0) indep = false;
  c.independent = fail(indep, "V(E1 u E2) independent in T1 minus E1");
  return c;
}

struct SwitcherPair {
  VertexSeq t1, t2;
  ExchangePair exchange;
};

/// The explicit d = 2 switcher: T1 = (x1, w2, u0, x2, x3, w0, u2, x1) and T2
/// obtained by swapping u0 and w0. u1 only labels the exchange anchors.
inline SwitcherPair d2_switcher(Vertex u0, Vertex u1, Vertex u2, Vertex w0, Vertex w2, Vertex x1, Vertex x2,
                                Vertex x3) {
  VertexSeq t1{2, {x1, w2, u0, x2, x3, w0, u2, x1}, false};
  std::vector<Vertex> u{u0, u1, u2};
  return {t1, swap_labels(t1, u0, w0), exchange_pair(u, w0, w2)};
}

// ---------------------------------------------------------------------------
// degree-fixing digraph

struct Arc {
  Vertex from = 0;
  Vertex to = 0;
  friend bool operator==(const Arc &, const Arc &) = default;
};

struct FixDigraph {
  std::vector<Arc> arcs;
  int bound = 0;                   // per-vertex cap on in + out
  std::vector<std::string> log;    // one line per swept vertex or routed unit
};

/// The two special d-tuples; first[i-1] and last[i-1] get target i(d-1)+1.
struct Endpoints {
  std::vector<Vertex> first;
  std::vector<Vertex> last;

  static Endpoints standard(int n, int d) {
    Endpoints e;
    for (int i = 1; i <= d; ++i) {
      e.first.push_back(i);
      e.last.push_back(n + 1 - i);
    }
    return e;
  }
};

enum class DigraphStrategy {
  sweep,     // left-to-right, paths v -> u -> v+1, with relaxations when stuck
  balanced,  // few arcs: net out-degrees chosen near zero, sources matched to sinks
};

namespace detail {

inline int mod_pos(long long x, int m) { return static_cast<int>(((x % m) + m) % m); }

struct DigraphState {
  int n = 0, d = 0, cap = 0;
  std::vector<int> out, in;
  std::vector<Arc> arcs;
  std::set<Mask> pairs;      // unordered pairs already used (d = 2 keeps them distinct)
  std::set<Mask> forbidden;  // d = 2 only

  int load(Vertex v) const { return out[static_cast<std::size_t>(v)] + in[static_cast<std::size_t>(v)]; }

  bool arc_allowed(Vertex a, Vertex b) const {
    if (a == b) return false;
    if (d == 2) {
      Mask p = bit(a) | bit(b);
      if (forbidden.count(p) || pairs.count(p)) return false;
    }
    return true;
  }

  void add(Vertex a, Vertex b) {
    arcs.push_back({a, b});
    ++out[static_cast<std::size_t>(a)];
    ++in[static_cast<std::size_t>(b)];
    pairs.insert(bit(a) | bit(b));
  }
};

}  // namespace detail

/// Per-vertex out-minus-in (mod d^2) that clause (i) demands.
inline std::vector<int> required_flow(const DGraph &reduced, const Endpoints &ends) {
  const int d = reduced.d(), mod = d * d;
  const int inv = mod - d - 1;  // (d-1)(-d-1) = 1 - d^2
  auto deg = reduced.vertex_degrees();
  std::map<Vertex, int> target;
  for (int i = 1; i <= d; ++i) {
    target[ends.first[static_cast<std::size_t>(i - 1)]] = i * (d - 1) + 1;
    target[ends.last[static_cast<std::size_t>(i - 1)]] = i * (d - 1) + 1;
  }
  std::vector<int> f(static_cast<std::size_t>(reduced.n()) + 1, 0);
  for (Vertex v = 1; v <= reduced.n(); ++v) {
    int t = target.count(v) ? target[v] : 0;
    f[static_cast<std::size_t>(v)] =
        detail::mod_pos(static_cast<long long>(t - deg[static_cast<std::size_t>(v)]) * inv, mod);
  }
  return f;
}

inline FixDigraph fix_digraph(const DGraph &g, const std::vector<Mask> &matching, const Endpoints &ends,
                              DigraphStrategy strategy = DigraphStrategy::sweep) {
  const int n = g.n(), d = g.d(), mod = d * d;
  if (d < 2) throw ParameterError("degree fixing needs d >= 2");
  if (static_cast<int>(ends.first.size()) != d || static_cast<int>(ends.last.size()) != d)
    throw ParameterError("each endpoint tuple needs d vertices");
  Mask ends_mask = to_mask(ends.first) | to_mask(ends.last);
  if (popcount(ends_mask) != 2 * d) throw ParameterError("the 2d endpoint vertices must be distinct");
  Mask m_vertices = 0;
  for (Mask e : matching) {
    if (!g.contains(e)) throw ParameterError("matching edge " + to_string(e) + " is not in the graph");
    if (e & m_vertices) throw ParameterError("matching edges overlap");
    m_vertices |= e;
  }
  DGraph reduced = without(g, matching);
  long long total = 0;
  for (int x : reduced.vertex_degrees()) total += x;
  if (total % mod != d % mod)
    throw Infeasible("degree sum " + std::to_string(total) + " is not d mod d^2 after removing the matching");

  auto f = required_flow(reduced, ends);
  detail::DigraphState st;
  st.n = n;
  st.d = d;
  st.cap = 5 * d * d;
  st.out.assign(static_cast<std::size_t>(n) + 1, 0);
  st.in.assign(static_cast<std::size_t>(n) + 1, 0);
  if (d == 2) {
    for (Mask e : matching) st.forbidden.insert(e);
    st.forbidden.insert(to_mask(ends.first));
    st.forbidden.insert(to_mask(ends.last));
  }
  FixDigraph out;
  out.bound = st.cap;

  auto net = [&](Vertex v) { return st.out[static_cast<std::size_t>(v)] - st.in[static_cast<std::size_t>(v)]; };

  if (strategy == DigraphStrategy::sweep) {
    const Mask paper_excluded = bit(1) | bit(2) | bit(n - 1) | bit(n) | m_vertices | ends_mask;
    // Routes `units` of flow src -> dst; each unit is a path through a fresh
    // intermediate or, as a last resort, a direct arc.
    auto route = [&](detail::DigraphState s, Vertex src, Vertex dst, int units,
                     std::vector<std::string> &notes) -> std::optional<detail::DigraphState> {
      for (int k = 0; k < units; ++k) {
        Mask adjacent = 0;
        for (auto &a : s.arcs) {
          if (a.from == src || a.to == src || a.from == dst || a.to == dst) adjacent |= bit(a.from) | bit(a.to);
        }
        Mask busy = 0;
        for (Vertex x = 1; x <= n; ++x)
          if (s.load(x) >= 3 * d * d - 1) busy |= bit(x);
        bool placed = false;
        for (int tier = 1; tier <= 3 && !placed; ++tier) {
          if (tier <= 2) {
            Mask excluded = bit(src) | bit(dst);
            if (tier == 1) excluded |= paper_excluded | busy | adjacent;
            for (Vertex x = 1; x <= n && !placed; ++x) {
              if (excluded & bit(x)) continue;
              if (s.load(x) + 2 > s.cap || s.load(src) + 1 > s.cap || s.load(dst) + 1 > s.cap) continue;
              if (!s.arc_allowed(src, x) || !s.arc_allowed(x, dst)) continue;
              s.add(src, x);
              s.add(x, dst);
              placed = true;
              if (tier > 1) notes.push_back("relaxed intermediate " + std::to_string(x));
            }
          } else if (s.arc_allowed(src, dst) && s.load(src) + 1 <= s.cap && s.load(dst) + 1 <= s.cap) {
            s.add(src, dst);
            placed = true;
            notes.push_back("direct arc");
          }
        }
        if (!placed) return std::nullopt;
      }
      return s;
    };

    for (Vertex v = 1; v < n; ++v) {
      int a = detail::mod_pos(f[static_cast<std::size_t>(v)] - net(v), mod);
      if (a == 0) continue;
      std::vector<std::string> notes;
      auto next = route(st, v, v + 1, a, notes);
      std::string how = std::to_string(a) + " forward";
      if (!next) {
        notes.clear();
        next = route(st, v + 1, v, mod - a, notes);
        how = std::to_string(mod - a) + " reverse";
      }
      if (!next) throw Infeasible("no admissible intermediates for vertex " + std::to_string(v));
      st = std::move(*next);
      std::string line = "v=" + std::to_string(v) + ": " + how;
      for (auto &s : notes) line += "; " + s;
      out.log.push_back(line);
    }
  } else {
    std::vector<int> r(static_cast<std::size_t>(n) + 1, 0);
    long long sum = 0;
    for (Vertex v = 1; v <= n; ++v) {
      int x = f[static_cast<std::size_t>(v)];
      r[static_cast<std::size_t>(v)] = 2 * x <= mod ? x : x - mod;
      sum += r[static_cast<std::size_t>(v)];
    }
    // Shift whole multiples of d^2 where |net| grows least, sparing the ends
    // and matched vertices, which already carry extra load.
    const Mask special = ends_mask | m_vertices;
    while (sum != 0) {
      const int step = sum > 0 ? -mod : mod;
      auto cost = [&](Vertex v) {
        int x = r[static_cast<std::size_t>(v)];
        return std::pair{std::abs(x + step) - std::abs(x), (special & bit(v)) != 0};
      };
      Vertex pick = 1;
      for (Vertex v = 2; v <= n; ++v)
        if (cost(v) < cost(pick)) pick = v;
      r[static_cast<std::size_t>(pick)] += step;
      sum += step;
    }
    std::vector<int> owe(r);  // positive: arcs still to send, negative: to receive
    for (Vertex src = 1; src <= n; ++src) {
      while (owe[static_cast<std::size_t>(src)] > 0) {
        // least loaded sink first, lowest label on ties
        std::vector<Vertex> sinks;
        for (Vertex v = 1; v <= n; ++v)
          if (owe[static_cast<std::size_t>(v)] < 0) sinks.push_back(v);
        std::vector<Vertex> mids;
        for (Vertex v = 1; v <= n; ++v) mids.push_back(v);
        auto by_load = [&](Vertex a, Vertex b) { return st.load(a) < st.load(b); };
        std::stable_sort(sinks.begin(), sinks.end(), by_load);
        std::stable_sort(mids.begin(), mids.end(), by_load);
        bool placed = false;
        for (Vertex dst : sinks) {
          if (!st.arc_allowed(src, dst) || st.load(src) + 1 > st.cap || st.load(dst) + 1 > st.cap) continue;
          st.add(src, dst);
          placed = true;
          ++owe[static_cast<std::size_t>(dst)];
          out.log.push_back("arc " + std::to_string(src) + "->" + std::to_string(dst));
          break;
        }
        for (Vertex dst : sinks) {
          if (placed) break;
          for (Vertex w : mids) {
            if (w == src || w == dst) continue;
            if (!st.arc_allowed(src, w) || !st.arc_allowed(w, dst)) continue;
            if (st.load(src) + 1 > st.cap || st.load(dst) + 1 > st.cap || st.load(w) + 2 > st.cap) continue;
            st.add(src, w);
            st.add(w, dst);
            placed = true;
            ++owe[static_cast<std::size_t>(dst)];
            out.log.push_back("path " + std::to_string(src) + "->" + std::to_string(w) + "->" + std::to_string(dst));
            break;
          }
        }
        if (!placed) throw Infeasible("cannot route flow out of vertex " + std::to_string(src));
        --owe[static_cast<std::size_t>(src)];
      }
    }
  }
  out.arcs = std::move(st.arcs);
  return out;
}

struct ClaimCheck {
  bool residues = false;    // clause (i)
  bool load = false;        // clause (ii)
  bool avoids_ends = false; // clause (iii), vacuous for d > 2
  bool ok() const { return residues && load && avoids_ends; }
};

inline ClaimCheck check_fix_digraph(const DGraph &g, const std::vector<Mask> &matching, const Endpoints &ends,
                                    const FixDigraph &dg) {
  const int n = g.n(), d = g.d(), mod = d * d;
  ClaimCheck c;
  auto deg = without(g, matching).vertex_degrees();
  std::vector<int> out(static_cast<std::size_t>(n) + 1), in(static_cast<std::size_t>(n) + 1);
  for (auto &a : dg.arcs) {
    ++out[static_cast<std::size_t>(a.from)];
    ++in[static_cast<std::size_t>(a.to)];
  }
  std::map<Vertex, int> target;
  for (int i = 1; i <= d; ++i) {
    target[ends.first[static_cast<std::size_t>(i - 1)]] = i * (d - 1) + 1;
    target[ends.last[static_cast<std::size_t>(i - 1)]] = i * (d - 1) + 1;
  }
  c.residues = c.load = c.avoids_ends = true;
  for (Vertex v = 1; v <= n; ++v) {
    auto i = static_cast<std::size_t>(v);
    long long lhs = deg[i] + static_cast<long long>(out[i] - in[i]) * (d - 1);
    int t = target.count(v) ? target[v] : 0;
    if (detail::mod_pos(lhs - t, mod) != 0) c.residues = false;
    if (out[i] + in[i] > 5 * d * d) c.load = false;
  }
  if (d == 2) {
    std::set<Mask> bad(matching.begin(), matching.end());
    bad.insert(to_mask(ends.first));
    bad.insert(to_mask(ends.last));
    for (auto &a : dg.arcs)
      if (bad.count(bit(a.from) | bit(a.to))) c.avoids_ends = false;
  }
  return c;
}

// ---------------------------------------------------------------------------
// turn plan

struct PlanOptions {
  int occurrence_cap = 0;  // 0 means 24 d^3
  DigraphStrategy strategy = DigraphStrategy::balanced;
  std::size_t max_nodes = 5'000'000;  // over all attempts
  std::size_t attempt_nodes = 200'000;
};

struct TurnPlan {
  int n = 0, d = 0;
  VertexSeq seq;                  // the straight sequence before turns
  FixDigraph digraph;
  FacetFamily complex;            // after all turns
  DGraph residual;                // uncovered d-sets plus the last window
  std::vector<Mask> matching;
  std::vector<Vertex> start;      // ends for the residual trail
  std::vector<Vertex> finish;
  ResidueTable residues;
  std::vector<std::string> log;
};

/// s pairwise disjoint d-sets avoiding 1..d and n-d+1..n, lowest first.
inline std::vector<Mask> end_avoiding_matching(int n, int d, int s) {
  std::vector<Mask> m;
  Vertex next = d + 1;
  for (int j = 0; j < s; ++j) {
    if (next + d - 1 > n - d) throw Infeasible("too few vertices for the matching");
    Mask e = 0;
    for (int i = 0; i < d; ++i) e |= bit(next + i);
    m.push_back(e);
    next += d;
  }
  return m;
}

inline TurnPlan plan_turn_sequence(int n, int d, PlanOptions opt = {}) {
  if (d < 2 || n < 3 * d) throw ParameterError("plan needs d >= 2 and n >= 3d");
  if (n > kMaxVertices) throw ParameterError("vertex count above 63");
  const int cap = opt.occurrence_cap > 0 ? opt.occurrence_cap : 24 * d * d * d;
  TurnPlan p;
  p.n = n;
  p.d = d;
  DGraph kn = complete(n, d);
  p.matching = end_avoiding_matching(n, d, compute_s(n, d));
  DGraph g = without(kn, p.matching);
  Endpoints ends = Endpoints::standard(n, d);
  p.digraph = fix_digraph(kn, p.matching, ends, opt.strategy);

  const int t = static_cast<int>(p.digraph.arcs.size());
  const int block = 2 * d + 4;
  const int len = d + t * block;
  std::vector<Vertex> seq(static_cast<std::size_t>(len), 0);
  std::vector<bool> fixed(static_cast<std::size_t>(len), false);
  for (int i = 0; i < d; ++i) {
    seq[static_cast<std::size_t>(i)] = i + 1;
    fixed[static_cast<std::size_t>(i)] = true;
  }
  // A turn raises the sequence degree of its first vertex, which must absorb
  // an incoming arc, so the head of each arc goes first.
  for (int i = 0; i < t; ++i) {
    const int base = d + i * block;
    seq[static_cast<std::size_t>(base + d + 1)] = p.digraph.arcs[static_cast<std::size_t>(i)].to;
    seq[static_cast<std::size_t>(base + d + 2)] = p.digraph.arcs[static_cast<std::size_t>(i)].from;
    fixed[static_cast<std::size_t>(base + d + 1)] = fixed[static_cast<std::size_t>(base + d + 2)] = true;
  }

  // Position sets whose d-sets must be distinct edges of g.
  std::vector<std::vector<int>> sets;
  for (int s = 0; s + d < len; ++s)
    for (int sg = 1; sg <= d; ++sg) {
      std::vector<int> ps;
      for (int j = 0; j <= d; ++j)
        if (j != sg) ps.push_back(s + j);
      sets.push_back(ps);
    }
  {
    std::vector<int> last;
    for (int j = len - d; j < len; ++j) last.push_back(j);
    sets.push_back(last);
  }
  for (int i = 0; i < t; ++i) {
    const int base = d + i * block;  // 0-based position of v_1 of this block
    auto pos = [&](int j) { return base + j - 1; };
    for (int drop = d + 4; drop <= 2 * d + 2; ++drop) {
      std::vector<int> ps{pos(d + 2)};
      for (int j = d + 4; j <= 2 * d + 3; ++j)
        if (j != drop) ps.push_back(pos(j));
      sets.push_back(ps);
    }
  }
  // every position set needs its own edge of g other than the last block
  if (sets.size() + 1 > g.size())
    throw Infeasible(std::to_string(t) + " turns need " + std::to_string(sets.size()) + " distinct d-sets but only " +
                     std::to_string(g.size() - 1) + " are available");
  std::vector<std::vector<int>> sets_at(static_cast<std::size_t>(len));
  for (std::size_t k = 0; k < sets.size(); ++k)
    for (int q : sets[k]) sets_at[static_cast<std::size_t>(q)].push_back(static_cast<int>(k));

  const Mask forbidden_block = to_mask(ends.last);
  std::unordered_set<Mask> taken;
  std::vector<int> occ(static_cast<std::size_t>(n) + 1, 0);
  std::vector<bool> defined(fixed);
  for (int q = 0; q < len; ++q)
    if (fixed[static_cast<std::size_t>(q)]) ++occ[static_cast<std::size_t>(seq[static_cast<std::size_t>(q)])];

  auto set_mask = [&](int k) {
    Mask m = 0;
    for (int q : sets[static_cast<std::size_t>(k)]) m |= bit(seq[static_cast<std::size_t>(q)]);
    return m;
  };
  auto complete_set = [&](int k) {
    for (int q : sets[static_cast<std::size_t>(k)])
      if (!defined[static_cast<std::size_t>(q)]) return false;
    return true;
  };
  auto good = [&](Mask m) { return popcount(m) == d && g.contains(m) && m != forbidden_block && !taken.count(m); };

  // Sets fixed before any free choice.
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (!complete_set(static_cast<int>(k))) continue;
    Mask m = set_mask(static_cast<int>(k));
    if (!good(m)) throw Infeasible("fixed entries already clash on " + to_string(m));
    taken.insert(m);
  }
  for (int q = 0; q < len; ++q)
    for (int j = q + 1; j <= std::min(len - 1, q + d); ++j)
      if (fixed[static_cast<std::size_t>(q)] && fixed[static_cast<std::size_t>(j)] &&
          seq[static_cast<std::size_t>(q)] == seq[static_cast<std::size_t>(j)])
        throw Infeasible("fixed entries repeat within a window");

  std::vector<int> free_pos;
  for (int q = 0; q < len; ++q)
    if (!fixed[static_cast<std::size_t>(q)]) free_pos.push_back(q);

  std::size_t nodes = 0, total = 0;
  std::size_t deepest = 0;
  std::vector<Vertex> tie(static_cast<std::size_t>(n - d));
  auto dfs = [&](auto &&self, std::size_t idx) -> bool {
    deepest = std::max(deepest, idx);
    if (idx == free_pos.size()) return true;
    const int q = free_pos[idx];
    // least used first spreads the load so no vertex runs out of fresh sets
    std::vector<Vertex> order(tie);
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
      return occ[static_cast<std::size_t>(a)] < occ[static_cast<std::size_t>(b)];
    });
    for (Vertex v : order) {
      if (occ[static_cast<std::size_t>(v)] >= cap) continue;
      bool clash = false;
      for (int j = std::max(0, q - d); j <= std::min(len - 1, q + d) && !clash; ++j)
        if (j != q && defined[static_cast<std::size_t>(j)] && seq[static_cast<std::size_t>(j)] == v) clash = true;
      if (clash) continue;
      if (++nodes > opt.attempt_nodes) return false;
      seq[static_cast<std::size_t>(q)] = v;
      defined[static_cast<std::size_t>(q)] = true;
      std::vector<Mask> added;
      bool ok = true;
      for (int k : sets_at[static_cast<std::size_t>(q)]) {
        if (!complete_set(k)) continue;
        Mask m = set_mask(k);
        if (!good(m)) {
          ok = false;
          break;
        }
        taken.insert(m);
        added.push_back(m);
      }
      if (ok) {
        ++occ[static_cast<std::size_t>(v)];
        if (self(self, idx + 1)) return true;
        --occ[static_cast<std::size_t>(v)];
      }
      for (Mask m : added) taken.erase(m);
      defined[static_cast<std::size_t>(q)] = false;
      if (nodes > opt.attempt_nodes) return false;
    }
    return false;
  };
  // Restart with freshly shuffled ties when an attempt thrashes; the first
  // attempt breaks ties by lowest label. The DFS undoes itself on failure.
  bool found = false, capped = false;
  for (std::uint64_t attempt = 0; !found && total < opt.max_nodes; ++attempt) {
    std::iota(tie.begin(), tie.end(), Vertex{1});
    if (attempt > 0) {
      std::mt19937_64 rng(attempt);
      std::shuffle(tie.begin(), tie.end(), rng);
    }
    nodes = 0;
    found = dfs(dfs, 0);
    total += nodes;
    capped = nodes > opt.attempt_nodes;
    if (!found && !capped) break;  // exhausted: restarts cannot help
  }
  if (!found)
    throw Infeasible("sequence search stuck at position " + std::to_string(free_pos.empty() ? 0 : free_pos[std::min(deepest, free_pos.size() - 1)]) +
                     " of " + std::to_string(len) + (capped ? " (node cap reached)" : ""));

  p.seq = VertexSeq{d, seq, false};
  p.complex = t > 0 ? facets_of(p.seq, n) : FacetFamily(n, d, {});
  for (int i = 0; i < t; ++i) {
    const int base = d + i * block;
    std::span<const Vertex> run(seq.data() + base, static_cast<std::size_t>(block));
    auto r = apply_turn(p.complex, run);
    p.complex = std::move(r.family);
    p.log.push_back("turn " + std::to_string(i + 1) + ": arc " + std::to_string(p.digraph.arcs[static_cast<std::size_t>(i)].from) +
                    "->" + std::to_string(p.digraph.arcs[static_cast<std::size_t>(i)].to) + " replaces " +
                    to_string(r.removed) + " by " + to_string(r.added));
  }

  p.start.assign(seq.end() - d, seq.end());
  p.finish.assign(ends.last.rbegin(), ends.last.rend());
  std::vector<Mask> covered = p.complex.size() ? shadow(p.complex).edges() : std::vector<Mask>{};
  std::vector<Mask> rest;
  std::unordered_set<Mask> cov(covered.begin(), covered.end());
  for (Mask e : g.edges())
    if (!cov.count(e)) rest.push_back(e);
  Mask last_window = to_mask(p.start);
  if (std::find(rest.begin(), rest.end(), last_window) == rest.end()) rest.push_back(last_window);
  p.residual = DGraph(n, d, std::move(rest));
  p.residues = trail_feasible(p.residual, p.start, p.finish);
  return p;
}

}  // namespace xtt
