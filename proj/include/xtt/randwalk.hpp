#pragma once

// Fractional clique decompositions, the window random walk they drive, path
// sampling from that walk and a greedy desk-scale path packing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "surgery.hpp"
#include "trails.hpp"

namespace xtt {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, m).
inline std::size_t uniform_index(Rng &rng, std::size_t m) {
  return static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, m - 1)(rng));
}

// ---------------------------------------------------------------------------
// fractional decompositions

enum class DecompMethod { automatic, closed_form, scaling, lp };

inline const char *to_string(DecompMethod m) {
  switch (m) {
    case DecompMethod::automatic: return "automatic";
    case DecompMethod::closed_form: return "closed_form";
    case DecompMethod::scaling: return "scaling";
    case DecompMethod::lp: return "lp";
  }
  return "?";
}

struct FractionalDecomp {
  int n = 0;
  int d = 0;
  std::vector<Mask> cliques;             // (d+1)-sets whose d-subsets are all edges
  std::vector<double> weights;           // parallel to cliques
  std::unordered_map<Mask, double> by_clique;
  double mu = 0;
  bool normal = false;                   // mu/n <= x <= 1/(mu n) on the support
  DecompMethod method = DecompMethod::automatic;
  double residual = 0;                   // max |edge sum - 1|
  int sweeps = 0;
  bool converged = false;

  double weight(Mask clique) const {
    auto it = by_clique.find(clique);
    return it == by_clique.end() ? 0.0 : it->second;
  }
};

namespace detail {

inline std::vector<Mask> cliques_of(const DGraph &g) {
  std::unordered_set<Mask> seen;
  std::vector<Mask> out;
  const Mask all = full_mask(g.n());
  for (Mask e : g.edges())
    for (Vertex v : vertices_of(all & ~e)) {
      Mask c = e | bit(v);
      if (seen.count(c)) continue;
      bool ok = true;
      for_each_subset(c, g.d(), [&](Mask s) { ok = ok && g.contains(s); });
      if (ok) {
        seen.insert(c);
        out.push_back(c);
      }
    }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

// Edge-by-clique incidence: for each edge, the clique ids containing it.
inline std::vector<std::vector<int>> incidence(const DGraph &g, const std::vector<Mask> &cliques) {
  std::unordered_map<Mask, int> id;
  for (std::size_t i = 0; i < g.size(); ++i) id[g.edges()[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> inc(g.size());
  for (std::size_t c = 0; c < cliques.size(); ++c)
    for_each_subset(cliques[c], g.d(), [&](Mask s) { inc[static_cast<std::size_t>(id.at(s))].push_back(static_cast<int>(c)); });
  return inc;
}

inline double residual(const std::vector<std::vector<int>> &inc, const std::vector<double> &x) {
  double r = 0;
  for (auto &row : inc) {
    double s = 0;
    for (int c : row) s += x[static_cast<std::size_t>(c)];
    r = std::max(r, std::abs(s - 1.0));
  }
  return r;
}

// Each clique is multiplied by the geometric mean of 1/sum over its edges.
inline int scale(const std::vector<std::vector<int>> &inc, std::size_t cliques, std::vector<double> &x,
                 int max_sweeps, double tol) {
  std::vector<double> logf(cliques);
  std::vector<int> cnt(cliques);
  for (auto &row : inc)
    for (int c : row) ++cnt[static_cast<std::size_t>(c)];
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (residual(inc, x) < tol) return sweep;
    std::fill(logf.begin(), logf.end(), 0.0);
    for (auto &row : inc) {
      double s = 0;
      for (int c : row) s += x[static_cast<std::size_t>(c)];
      double l = -std::log(s);
      for (int c : row) logf[static_cast<std::size_t>(c)] += l;
    }
    for (std::size_t c = 0; c < cliques; ++c) x[c] *= std::exp(logf[c] / cnt[c]);
  }
  return max_sweeps;
}

// Phase-I simplex for {x >= 0 : A x = 1}, A the 0/1 incidence. Dense tableau,
// Bland's rule. Returns false when the artificial optimum stays positive.
inline bool lp_feasible_point(const std::vector<std::vector<int>> &inc, std::size_t cols, std::vector<double> &x) {
  const std::size_t m = inc.size();
  const std::size_t width = cols + m + 1;  // structural, artificial, rhs
  if (m * width > 50'000'000) throw Infeasible("linear program too large for the dense fallback");
  std::vector<double> t((m + 1) * width, 0.0);
  auto cell = [&](std::size_t r, std::size_t c) -> double & { return t[r * width + c]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (int c : inc[r]) cell(r, static_cast<std::size_t>(c)) = 1.0;
    cell(r, cols + r) = 1.0;
    cell(r, width - 1) = 1.0;
    basis[r] = cols + r;
  }
  // objective row: minimise the artificial sum, stored as reduced costs
  for (std::size_t c = 0; c < width; ++c) {
    double s = 0;
    for (std::size_t r = 0; r < m; ++r) s += cell(r, c);
    cell(m, c) = c >= cols && c < cols + m ? 0.0 : -s;
  }
  const double eps = 1e-11;
  for (std::size_t iter = 0; iter < 100 * (m + cols); ++iter) {
    std::size_t enter = width;
    for (std::size_t c = 0; c + 1 < width; ++c)
      if (cell(m, c) < -eps) {
        enter = c;
        break;
      }
    if (enter == width) break;
    std::size_t leave = m;
    double best = 0;
    for (std::size_t r = 0; r < m; ++r) {
      double a = cell(r, enter);
      if (a <= eps) continue;
      double ratio = cell(r, width - 1) / a;
      if (leave == m || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in phase one
    double piv = cell(leave, enter);
    for (std::size_t c = 0; c < width; ++c) cell(leave, c) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      double f = cell(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) cell(r, c) -= f * cell(leave, c);
    }
    basis[leave] = enter;
  }
  x.assign(cols, 0.0);
  double art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    double v = cell(r, width - 1);
    if (basis[r] < cols) x[basis[r]] = v;
    else art += v;
  }
  return art < 1e-9;
}

}  // namespace detail

struct DecompOptions {
  DecompMethod method = DecompMethod::automatic;
  int max_sweeps = 10'000;
  double tolerance = 1e-9;
};

/// Nonnegative clique weights with unit sum over every edge. Complete hosts use
/// x = 1/(n-d); otherwise multiplicative scaling from 1/(mean clique count),
/// then a simplex fallback. Throws Infeasible when some edge lies in no clique
/// or the fallback finds the system infeasible.
inline FractionalDecomp fractional_decomposition(const DGraph &g, double mu, DecompOptions opt = {}) {
  if (g.d() < 1 || g.d() >= g.n()) throw ParameterError("decomposition needs 1 <= d < n");
  if (g.empty()) throw ParameterError("decomposition of an empty graph");
  FractionalDecomp out;
  out.n = g.n();
  out.d = g.d();
  out.mu = mu;
  out.cliques = detail::cliques_of(g);
  auto inc = detail::incidence(g, out.cliques);
  for (std::size_t e = 0; e < inc.size(); ++e)
    if (inc[e].empty()) throw Infeasible("edge " + to_string(g.edges()[e]) + " lies in no clique");

  const std::size_t cn = out.cliques.size();
  const bool full = g.size() == binomial(g.n(), g.d());
  DecompMethod m = opt.method;
  if (m == DecompMethod::automatic) m = full ? DecompMethod::closed_form : DecompMethod::scaling;
  if (m == DecompMethod::closed_form && !full) throw ParameterError("closed form needs a complete host");

  std::vector<double> x;
  if (m == DecompMethod::closed_form) {
    x.assign(cn, 1.0 / (g.n() - g.d()));
  } else if (m == DecompMethod::scaling) {
    double mean = 0;
    for (auto &row : inc) mean += static_cast<double>(row.size());
    mean /= static_cast<double>(inc.size());
    x.assign(cn, 1.0 / mean);
    out.sweeps = detail::scale(inc, cn, x, opt.max_sweeps, opt.tolerance);
    if (detail::residual(inc, x) >= opt.tolerance && opt.method == DecompMethod::automatic) m = DecompMethod::lp;
  }
  if (m == DecompMethod::lp) {
    if (!detail::lp_feasible_point(inc, cn, x)) throw Infeasible("no fractional decomposition exists");
  }
  out.method = m;
  out.weights = x;
  out.residual = detail::residual(inc, x);
  out.converged = out.residual < opt.tolerance;
  for (std::size_t c = 0; c < cn; ++c) out.by_clique.emplace(out.cliques[c], x[c]);

  const double lo = mu / g.n(), hi = 1.0 / (mu * g.n()), slack = 1e-12;
  out.normal = mu > 0 && std::all_of(x.begin(), x.end(), [&](double w) {
                 return w <= slack || (w >= lo - slack && w <= hi + slack);
               });
  return out;
}

/// max over edges of |sum of weights of cliques containing it - 1|.
inline double decomposition_residual(const DGraph &g, const FractionalDecomp &x) {
  double r = 0;
  const Mask all = full_mask(g.n());
  for (Mask e : g.edges()) {
    double s = 0;
    for (Vertex v : vertices_of(all & ~e)) s += x.weight(e | bit(v));
    r = std::max(r, std::abs(s - 1.0));
  }
  return r;
}

// ---------------------------------------------------------------------------
// the walk

/// The last d entries of the walk are `current`; `history` holds every entry.
struct WalkState {
  std::vector<Vertex> history;
  std::vector<Vertex> current;
  std::uint64_t rng_seed = 0;
  Rng rng;
  bool keep_history = true;
};

/// Next-vertex distribution from the window `z`: v gets x(z + v), renormalised.
inline std::vector<std::pair<Vertex, double>> transition(const FractionalDecomp &x, std::span<const Vertex> z) {
  const Mask zm = to_mask(z);
  std::vector<std::pair<Vertex, double>> out;
  double total = 0;
  for (Vertex v = 1; v <= x.n; ++v) {
    if (contains(zm, v)) continue;
    double w = x.weight(zm | bit(v));
    if (w > 0) {
      out.emplace_back(v, w);
      total += w;
    }
  }
  if (total <= 0) throw Infeasible("walk is stuck at window " + to_string(zm));
  for (auto &p : out) p.second /= total;
  return out;
}

namespace detail {

inline Vertex sample_next(const FractionalDecomp &x, std::span<const Vertex> z, Rng &rng) {
  auto dist = transition(x, z);
  double r = uniform01(rng);
  for (auto &[v, p] : dist) {
    if (r < p) return v;
    r -= p;
  }
  return dist.back().first;
}

// Uniform element of (V)_d: a uniform edge in a uniform order.
inline std::vector<Vertex> uniform_ordered_edge(const DGraph &g, Rng &rng) {
  auto vs = vertices_of(g.edges()[uniform_index(rng, g.size())]);
  for (std::size_t i = vs.size(); i > 1; --i) std::swap(vs[i - 1], vs[uniform_index(rng, i)]);
  return vs;
}

}  // namespace detail

inline WalkState start_walk(const DGraph &g, std::uint64_t seed, bool keep_history = true) {
  if (g.empty()) throw ParameterError("walk on an empty graph");
  WalkState s;
  s.rng_seed = seed;
  s.rng.seed(seed);
  s.keep_history = keep_history;
  s.current = detail::uniform_ordered_edge(g, s.rng);
  if (keep_history) s.history = s.current;
  return s;
}

inline void walk_step(WalkState &s, const FractionalDecomp &x) {
  Vertex v = detail::sample_next(x, s.current, s.rng);
  s.current.erase(s.current.begin());
  s.current.push_back(v);
  if (s.keep_history) s.history.push_back(v);
}

struct StationarityReport {
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  int skip = 0;                   // 0: consecutive windows; j: offset j of d+1 dropped
  std::size_t tuples = 0;         // |(V)_d|
  double expected = 0;            // 1/|(V)_d|
  double max_deviation = 0;
  double tolerance = 0;           // 4 standard errors
  bool within = false;
  std::vector<Vertex> worst;
  std::map<std::vector<Vertex>, std::size_t> counts;
};

/// Frequencies of ordered d-tuples read off `steps` successive windows. With
/// skip = j in [1, d-1] each window is d of d+1 consecutive entries, missing
/// the one at offset j.
inline StationarityReport stationarity_check(const DGraph &g, const FractionalDecomp &x, std::size_t steps,
                                             std::uint64_t seed, int skip = 0) {
  const int d = g.d();
  if (skip < 0 || (skip > 0 && skip >= d)) throw ParameterError("skip offset must lie in [1, d-1]");
  if (steps == 0) throw ParameterError("need at least one step");
  StationarityReport r;
  r.seed = seed;
  r.steps = steps;
  r.skip = skip;
  std::uint64_t orderings = 1;
  for (int i = 2; i <= d; ++i) orderings *= static_cast<std::uint64_t>(i);
  r.tuples = g.size() * orderings;
  r.expected = 1.0 / static_cast<double>(r.tuples);

  auto s = start_walk(g, seed, false);
  std::vector<Vertex> buf = s.current;  // last d+1 entries once warm
  if (skip > 0) {
    walk_step(s, x);
    buf.push_back(s.current.back());
  }
  std::vector<Vertex> key(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < steps; ++i) {
    if (skip == 0) {
      key = s.current;
    } else {
      std::size_t k = 0;
      for (int j = 0; j <= d; ++j)
        if (j != skip) key[k++] = buf[static_cast<std::size_t>(j)];
    }
    ++r.counts[key];
    walk_step(s, x);
    if (skip > 0) {
      buf.erase(buf.begin());
      buf.push_back(s.current.back());
    }
  }

  r.tolerance = 4.0 * std::sqrt(r.expected * (1 - r.expected) / static_cast<double>(steps));
  auto check = [&](const std::vector<Vertex> &t, double freq) {
    double dev = std::abs(freq - r.expected);
    if (dev >= r.max_deviation) {
      r.max_deviation = dev;
      r.worst = t;
    }
  };
  for (auto &[t, c] : r.counts) check(t, static_cast<double>(c) / static_cast<double>(steps));
  // tuples never seen deviate by the full expected value
  if (r.counts.size() < r.tuples) {
    for (Mask e : g.edges()) {
      auto vs = vertices_of(e);
      do {
        if (!r.counts.count(vs)) check(vs, 0.0);
      } while (std::next_permutation(vs.begin(), vs.end()));
    }
  }
  r.within = r.max_deviation <= r.tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// path sampling

struct PathSample {
  VertexSeq path;
  std::size_t attempts = 0;  // walks drawn, including the accepted one
};

/// Runs t-entry walks until one has no repeated vertex.
inline PathSample sample_path(const DGraph &g, const FractionalDecomp &x, int t, Rng &rng,
                              std::size_t max_attempts = 100'000) {
  const int d = g.d();
  if (t < d || t > g.n()) throw ParameterError("path order must lie in [d, n]");
  PathSample out;
  for (out.attempts = 1; out.attempts <= max_attempts; ++out.attempts) {
    std::vector<Vertex> seq = detail::uniform_ordered_edge(g, rng);
    while (static_cast<int>(seq.size()) < t) {
      std::span<const Vertex> z(seq.data() + seq.size() - static_cast<std::size_t>(d), static_cast<std::size_t>(d));
      seq.push_back(detail::sample_next(x, z, rng));
    }
    Mask m = 0;
    for (Vertex v : seq) m |= bit(v);
    if (popcount(m) != t) continue;
    out.path = open_seq(d, std::move(seq));
    if (!validate(out.path, g).valid) throw Infeasible("sampled path failed validation");
    return out;
  }
  throw Infeasible("rejection cap of " + std::to_string(max_attempts) + " walks exceeded");
}

inline PathSample sample_path(const DGraph &g, const FractionalDecomp &x, int t, std::uint64_t seed,
                              std::size_t max_attempts = 100'000) {
  Rng rng(seed);
  return sample_path(g, x, t, rng, max_attempts);
}

// ---------------------------------------------------------------------------
// greedy packing

struct Packing {
  std::vector<VertexSeq> paths;
  DGraph leftover;
  int leftover_max_codegree = 0;             // Delta(L)
  std::map<Mask, int> end_counts;            // (d-1)-set -> number of path ends containing it
  int end_cap = 0;
  std::uint64_t seed = 0;
};

struct GreedyOptions {
  int max_failures = 400;          // failed starts in a row before a fill stops
  std::size_t extend_nodes = 4000; // DFS budget per start orientation
  int repair_rounds = 200;         // ruin-and-refill rounds after the first fill
  int repair_remove = 2;           // paths taken out per round
};

namespace detail {

inline int max_codegree_of(const DGraph &g) {
  if (g.empty() || g.d() == 0) return 0;
  std::unordered_map<Mask, int> c;
  int best = 0;
  for (Mask e : g.edges())
    for_each_subset(e, g.d() - 1, [&](Mask s) { best = std::max(best, ++c[s]); });
  return best;
}

class Packer {
 public:
  Packer(const DGraph &g, int t, int end_cap, const GreedyOptions &opt, Rng &rng)
      : d_(g.d()), n_(g.n()), t_(t), end_cap_(end_cap), opt_(&opt), rng_(&rng),
        free_(g.edges().begin(), g.edges().end()), free_deg_(g.vertex_degrees()) {
    for (Mask e : g.edges())
      for_each_subset(e, d_ - 1, [&](Mask s) { ++codeg_[s]; });
  }

  // Adds paths until `max_failures` starts in a row fail or every free edge
  // has failed as a start. Starts favour edges on high free-degree vertices.
  void fill() {
    std::unordered_set<Mask> dead;
    int failures = 0;
    while (failures < opt_->max_failures) {
      int top = -1;
      std::vector<Mask> heavy;
      for (Mask e : free_) {
        if (dead.count(e)) continue;
        int w = 0;
        for (Vertex v : vertices_of(e)) w += free_deg_[static_cast<std::size_t>(v)];
        if (w > top) {
          top = w;
          heavy.clear();
        }
        if (w == top) heavy.push_back(e);
      }
      if (heavy.empty()) return;
      std::sort(heavy.begin(), heavy.end());  // unordered_set order is not portable
      Mask start = heavy[uniform_index(*rng_, heavy.size())];
      std::vector<Vertex> seq;
      bool ok = false;
      for (int attempt = 0; attempt < d_ && !ok; ++attempt) ok = grow(start, seq) && ends_fit(seq);
      if (!ok) {
        dead.insert(start);
        ++failures;
        continue;
      }
      failures = 0;
      dead.clear();
      add(open_seq(d_, seq));
    }
  }

  // Lexicographic: max codegree, how many sets attain it, sum of squares.
  std::tuple<int, int, long long> score() const {
    int top = 0, at_top = 0;
    long long sq = 0;
    for (auto &[s, c] : codeg_) {
      sq += static_cast<long long>(c) * c;
      if (c > top) {
        top = c;
        at_top = 0;
      }
      if (c == top) ++at_top;
    }
    return {top, at_top, sq};
  }

  void remove_random(int count) {
    for (int i = 0; i < count && !paths_.empty(); ++i) {
      std::size_t at = uniform_index(*rng_, paths_.size());
      std::swap(paths_[at], paths_.back());
      VertexSeq p = std::move(paths_.back());
      paths_.pop_back();
      for (Mask e : covered_masks(p)) release(e);
      for (Mask s : end_sets(p.entries)) --ends_[s];
    }
  }

  Packing result(std::uint64_t seed) const {
    Packing out;
    out.seed = seed;
    out.end_cap = end_cap_;
    out.paths = paths_;
    for (auto &[s, c] : ends_)
      if (c > 0) out.end_counts[s] = c;
    std::vector<Mask> rest(free_.begin(), free_.end());
    std::sort(rest.begin(), rest.end());
    out.leftover = DGraph(n_, d_, std::move(rest));
    out.leftover_max_codegree = max_codegree_of(out.leftover);
    return out;
  }

 private:
  std::vector<Mask> end_sets(const std::vector<Vertex> &seq) const {
    std::vector<Mask> out;
    const auto dd = static_cast<std::size_t>(d_);
    Mask a = to_mask(std::span<const Vertex>(seq.data(), dd));
    Mask b = to_mask(std::span<const Vertex>(seq.data() + seq.size() - dd, dd));
    for (Mask e : {a, b}) for_each_subset(e, d_ - 1, [&](Mask s) { out.push_back(s); });
    return out;
  }

  bool ends_fit(const std::vector<Vertex> &seq) {
    std::map<Mask, int> extra;
    for (Mask s : end_sets(seq))
      if (ends_[s] + ++extra[s] > end_cap_) return false;
    return true;
  }

  void add(VertexSeq p) {
    for (Mask e : covered_masks(p)) {
      free_.erase(e);
      for (Vertex v : vertices_of(e)) --free_deg_[static_cast<std::size_t>(v)];
      for_each_subset(e, d_ - 1, [&](Mask s) { --codeg_[s]; });
    }
    for (Mask s : end_sets(p.entries)) ++ends_[s];
    paths_.push_back(std::move(p));
  }

  void release(Mask e) {
    free_.insert(e);
    for (Vertex v : vertices_of(e)) ++free_deg_[static_cast<std::size_t>(v)];
    for_each_subset(e, d_ - 1, [&](Mask s) { ++codeg_[s]; });
  }

  // Randomised DFS for t distinct vertices starting with the edge `start`.
  // Appending v covers the last block plus v minus each block entry.
  bool grow(Mask start, std::vector<Vertex> &seq) {
    seq = vertices_of(start);
    std::shuffle(seq.begin(), seq.end(), *rng_);
    std::unordered_set<Mask> mine{start};
    std::size_t nodes = 0;
    std::vector<Vertex> order(static_cast<std::size_t>(n_));
    std::iota(order.begin(), order.end(), 1);
    auto dfs = [&](auto &&self) -> bool {
      if (static_cast<int>(seq.size()) == t_) return true;
      std::vector<Vertex> cands = order;
      std::shuffle(cands.begin(), cands.end(), *rng_);
      std::stable_sort(cands.begin(), cands.end(), [&](Vertex a, Vertex b) {
        return free_deg_[static_cast<std::size_t>(a)] > free_deg_[static_cast<std::size_t>(b)];
      });
      const Mask used = to_mask(seq);
      const Mask block = to_mask(std::span<const Vertex>(seq.data() + seq.size() - static_cast<std::size_t>(d_),
                                                         static_cast<std::size_t>(d_)));
      for (Vertex v : cands) {
        if (contains(used, v)) continue;
        if (++nodes > opt_->extend_nodes) return false;
        const Mask facet = block | bit(v);
        std::vector<Mask> added;
        bool ok = true;
        for (Vertex w : vertices_of(block)) {
          Mask e = facet & ~bit(w);
          if (!free_.count(e) || mine.count(e)) {
            ok = false;
            break;
          }
          added.push_back(e);
        }
        if (!ok) continue;
        for (Mask e : added) mine.insert(e);
        seq.push_back(v);
        if (self(self)) return true;
        seq.pop_back();
        for (Mask e : added) mine.erase(e);
      }
      return false;
    };
    return dfs(dfs);
  }

  int d_, n_, t_, end_cap_;
  const GreedyOptions *opt_;
  Rng *rng_;
  std::unordered_set<Mask> free_;
  std::vector<int> free_deg_;
  std::unordered_map<Mask, int> codeg_;  // free edges per (d-1)-set
  std::unordered_map<Mask, int> ends_;   // path ends per (d-1)-set
  std::vector<VertexSeq> paths_;
};

}  // namespace detail

/// Edge-disjoint extra-tight paths of order t. A greedy fill is followed by
/// ruin-and-refill rounds that keep a change only when the leftover's
/// codegree profile does not get worse. A path is kept only if every (d-1)-set
/// of its two ends stays within floor(gamma n) path ends.
inline Packing greedy_approx_decomposition(const DGraph &g, int t, double gamma, std::uint64_t seed,
                                           GreedyOptions opt = {}) {
  const int d = g.d();
  if (d < 2) throw ParameterError("packing needs d >= 2");
  if (t < 2 * d || t > g.n()) throw ParameterError("path order must lie in [2d, n]");
  if (opt.repair_rounds < 0 || opt.repair_remove < 1) throw ParameterError("repair settings must be non-negative");
  Rng rng(seed);
  detail::Packer best(g, t, static_cast<int>(std::floor(gamma * g.n())), opt, rng);
  best.fill();
  for (int round = 0; round < opt.repair_rounds; ++round) {
    detail::Packer trial = best;
    trial.remove_random(opt.repair_remove);
    trial.fill();
    if (trial.score() <= best.score()) best = std::move(trial);
  }
  return best.result(seed);
}

/// Glues the packing into one trail through `reserve`, whose ends lie in U.
/// Each step only sees reserve plus the two pieces being joined, so
/// connectors never borrow an edge of a later path.
inline VertexSeq connect_packing(const std::vector<VertexSeq> &packing, const DGraph &reserve, Mask u,
                                 GlueOptions opt = {}) {
  const int d = reserve.d();
  std::unordered_set<Mask> packed;
  for (auto &p : packing) {
    if (p.d != d) throw ParameterError("packing uniformity differs from reserve");
    for (Mask e : covered_masks(p)) {
      if (reserve.contains(e)) throw ParameterError("packing path uses a reserve edge");
      if (!packed.insert(e).second) throw ParameterError("packing paths share an edge");
    }
  }
  auto host = [&](const VertexSeq &a, const VertexSeq &b) {
    std::vector<Mask> extra;
    for (const VertexSeq *s : {&a, &b})
      if (!s->entries.empty())
        for (Mask e : covered_masks(*s)) extra.push_back(e);
    return with(reserve, extra);
  };
  const VertexSeq none{d, {}, false};
  if (packing.empty()) return glue(none, none, reserve, u, opt);
  VertexSeq cur = glue(none, packing.front(), host(none, packing.front()), u, opt);
  for (std::size_t i = 1; i < packing.size(); ++i)
    cur = glue(cur, packing[i], host(cur, packing[i]), full_mask(reserve.n()), opt);
  return glue(cur, none, host(cur, none), u, opt);
}

}  // namespace xtt
