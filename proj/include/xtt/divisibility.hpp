#pragma once

// Divisibility vectors and the degree congruences that extra-tight Euler
// tours and trails force on their host.

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hypergraph.hpp"

namespace xtt {

/// g[i] = gcd of |F(S)| over all i-sets S, for i = 0..d-1. Zero degrees are
/// skipped; a level with no nonzero degree gets 0.
struct DivVector {
  std::vector<std::uint64_t> g;
  friend bool operator==(const DivVector &, const DivVector &) = default;
};

inline DivVector div_vector(const DGraph &f) {
  if (f.empty()) throw ParameterError("divisibility vector of an empty graph");
  DivVector out;
  for (int i = 0; i < f.d(); ++i) {
    std::uint64_t g = 0;
    for (auto &[s, c] : level_degrees(f, i)) g = std::gcd(g, static_cast<std::uint64_t>(c));
    out.g.push_back(g);
  }
  return out;
}

/// Every i-degree of G is a multiple of Deg(F)_i; a zero entry divides anything.
inline bool is_divisible(const DGraph &g, const DGraph &f) {
  if (g.d() != f.d()) throw ParameterError("uniformities differ");
  auto dv = div_vector(f);
  for (int i = 0; i < g.d(); ++i) {
    std::uint64_t m = dv.g[static_cast<std::size_t>(i)];
    if (m == 0) continue;
    if (i == 0) {
      if (g.size() % m != 0) return false;
      continue;
    }
    for (auto &[s, c] : level_degrees(g, i))
      if (static_cast<std::uint64_t>(c) % m != 0) return false;
  }
  return true;
}

struct ResidueRow {
  int degree = 0;
  int residue = 0;
  int target = 0;
  bool ok() const { return residue == target; }
};

struct ResidueTable {
  int modulus = 0;
  std::map<Vertex, ResidueRow> rows;  // every vertex of [n]
  bool feasible = false;

  std::vector<Vertex> offenders() const {
    std::vector<Vertex> out;
    for (auto &[v, r] : rows)
      if (!r.ok()) out.push_back(v);
    return out;
  }
};

namespace detail {

inline ResidueTable residues(const DGraph &g, const std::map<Vertex, int> &targets) {
  ResidueTable t;
  const int mod = g.d() * g.d();
  t.modulus = mod;
  auto deg = g.vertex_degrees();
  t.feasible = true;
  for (Vertex v = 1; v <= g.n(); ++v) {
    ResidueRow r;
    r.degree = deg[static_cast<std::size_t>(v)];
    r.residue = r.degree % mod;
    auto it = targets.find(v);
    r.target = it == targets.end() ? 0 : it->second % mod;
    t.feasible = t.feasible && r.ok();
    t.rows.emplace(v, r);
  }
  return t;
}

}  // namespace detail

/// d^2 divides every vertex degree.
inline ResidueTable tour_feasible(const DGraph &g) { return detail::residues(g, {}); }

/// Target residue i(d-1)+1 for the i-th vertex of each end, counted from the
/// outside; 0 elsewhere.
///
/// `start` is (v_1..v_d) and `finish` is the last d entries in sequence order,
/// so finish[d-i] is the vertex at distance i from the far end.
inline std::map<Vertex, int> trail_targets(int d, std::span<const Vertex> start, std::span<const Vertex> finish) {
  std::map<Vertex, int> t;
  for (int i = 1; i <= d; ++i) {
    t[start[static_cast<std::size_t>(i - 1)]] = i * (d - 1) + 1;
    t[finish[static_cast<std::size_t>(d - i)]] = i * (d - 1) + 1;
  }
  return t;
}

inline void check_ends(const DGraph &g, std::span<const Vertex> start, std::span<const Vertex> finish) {
  const auto d = static_cast<std::size_t>(g.d());
  if (start.size() != d || finish.size() != d) throw ParameterError("each end needs exactly d vertices");
  Mask a = to_mask(start), b = to_mask(finish);
  if (popcount(a) != g.d() || popcount(b) != g.d()) throw ParameterError("end tuple repeats a vertex");
  if (a & b) throw ParameterError("ends are not disjoint");
  if (!g.contains(a)) throw ParameterError("start " + to_string(a) + " is not an edge");
  if (!g.contains(b)) throw ParameterError("finish " + to_string(b) + " is not an edge");
}

inline ResidueTable trail_feasible(const DGraph &g, std::span<const Vertex> start, std::span<const Vertex> finish) {
  check_ends(g, start, finish);
  return detail::residues(g, trail_targets(g.d(), start, finish));
}

/// The s in [0, d-1] with n C(n-1, d-1) = d(s+1) mod d^2.
inline int compute_s(int n, int d) {
  if (d < 2 || d >= n) throw ParameterError("compute_s needs 2 <= d < n");
  const std::uint64_t mod = static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d);
  const std::uint64_t lhs = (static_cast<std::uint64_t>(n) % mod) * (binomial(n - 1, d - 1) % mod) % mod;
  for (int s = 0; s < d; ++s)
    if (lhs == static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(s + 1) % mod) return s;
  throw Infeasible("no s solves the handshake congruence");  // unreachable: d | n C(n-1,d-1)
}

}  // namespace xtt
