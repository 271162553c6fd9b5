#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"

using namespace xtt;

namespace {

DGraph minus_perfect_matching(int n) {
  std::vector<Mask> m;
  for (Vertex v = 1; v + 1 <= n; v += 2) m.push_back(bit(v) | bit(v + 1));
  return without(complete(n, 2), m);
}

// Exact sum over cliques containing each edge, as a check that is blind to
// the decomposition's internals.
double worst_edge_sum_error(const DGraph &g, const FractionalDecomp &x) {
  double worst = 0;
  for (Mask e : g.edges()) {
    double s = 0;
    for (std::size_t i = 0; i < x.cliques.size(); ++i)
      if ((x.cliques[i] & e) == e) s += x.weights[i];
    worst = std::max(worst, std::abs(s - 1));
  }
  return worst;
}

}  // namespace

TEST(Fractional, K5ClosedForm) {
  auto x = fractional_decomposition(complete(5, 2), 0.9);
  EXPECT_EQ(x.cliques.size(), 10u);
  for (double w : x.weights) EXPECT_DOUBLE_EQ(w, 1.0 / 3);
  EXPECT_EQ(x.method, DecompMethod::closed_form);
  EXPECT_LT(worst_edge_sum_error(complete(5, 2), x), 1e-12);
}

TEST(Fractional, CompleteHostsClosedForm) {
  for (int d = 2; d <= 3; ++d)
    for (int n = d + 1; n <= 12; ++n) {
      auto g = complete(n, d);
      auto x = fractional_decomposition(g, 0.9);
      EXPECT_EQ(x.cliques.size(), binomial(n, d + 1));
      for (double w : x.weights) EXPECT_DOUBLE_EQ(w, 1.0 / (n - d));
      EXPECT_LT(worst_edge_sum_error(g, x), 1e-9);
    }
}

TEST(Fractional, NormalityOfClosedFormForLargeN) {
  // 1/(n-d) <= 1/(0.9 n) once n >= 10 d
  for (int d = 2; d <= 3; ++d)
    for (int n : {10 * d, 10 * d + 5, 40}) {
      auto x = fractional_decomposition(complete(n, d), 0.9);
      EXPECT_TRUE(x.normal) << n << "," << d;
    }
  EXPECT_FALSE(fractional_decomposition(complete(5, 2), 0.9).normal);
}

TEST(Fractional, MinusMatchingByScalingAndLp) {
  auto g = minus_perfect_matching(12);
  auto s = fractional_decomposition(g, 0.9);
  EXPECT_EQ(s.method, DecompMethod::scaling);
  EXPECT_TRUE(s.converged);
  EXPECT_LT(worst_edge_sum_error(g, s), 1e-9);
  EXPECT_LT(decomposition_residual(g, s), 1e-9);

  DecompOptions lp;
  lp.method = DecompMethod::lp;
  auto l = fractional_decomposition(g, 0.9, lp);
  EXPECT_EQ(l.method, DecompMethod::lp);
  EXPECT_LT(worst_edge_sum_error(g, l), 1e-9);
  for (double w : l.weights) EXPECT_GE(w, -1e-12);
}

TEST(Fractional, IrregularHostsConverge) {
  gen::Rng rng(71);
  for (int rep = 0; rep < 10; ++rep) {
    int n = gen::pick(rng, 9, 14);
    auto perm = gen::shuffled_range(rng, n);
    std::vector<Mask> drop;
    for (int i = 0; i + 1 < gen::pick(rng, 2, 4) * 2; i += 2)
      drop.push_back(bit(perm[static_cast<std::size_t>(i)]) | bit(perm[static_cast<std::size_t>(i + 1)]));
    drop.push_back(bit(perm[0]) | bit(perm[static_cast<std::size_t>(n - 1)]));
    auto g = without(complete(n, 2), drop);
    auto x = fractional_decomposition(g, 0.5);
    EXPECT_TRUE(x.converged) << x.residual;
    EXPECT_LT(worst_edge_sum_error(g, x), 1e-9);
    DecompOptions lp;
    lp.method = DecompMethod::lp;
    EXPECT_LT(worst_edge_sum_error(g, fractional_decomposition(g, 0.5, lp)), 1e-9);
  }
}

TEST(Fractional, EdgeWithoutCliqueIsInfeasible) {
  DGraph star(5, 2, {to_mask({1, 2}), to_mask({1, 3}), to_mask({2, 3}), to_mask({4, 5})});
  EXPECT_THROW(fractional_decomposition(star, 0.9), Infeasible);
}

TEST(Fractional, LpDetectsInfeasibleSystem) {
  // Two triangles sharing edge {1,2}: that edge would need total weight 2.
  DGraph g(4, 2, {to_mask({1, 2}), to_mask({1, 3}), to_mask({2, 3}), to_mask({1, 4}), to_mask({2, 4})});
  DecompOptions lp;
  lp.method = DecompMethod::lp;
  EXPECT_THROW(fractional_decomposition(g, 0.9, lp), Infeasible);
  auto x = fractional_decomposition(g, 0.9, DecompOptions{DecompMethod::scaling, 200, 1e-9});
  EXPECT_FALSE(x.converged);
  EXPECT_GT(x.residual, 1e-3);
}

TEST(Walk, TransitionUniformOnK5) {
  auto x = fractional_decomposition(complete(5, 2), 0.9);
  for (Vertex a = 1; a <= 5; ++a)
    for (Vertex b = 1; b <= 5; ++b) {
      if (a == b) continue;
      std::vector<Vertex> z{a, b};
      auto t = transition(x, z);
      ASSERT_EQ(t.size(), 3u);
      for (auto &[v, p] : t) {
        EXPECT_NE(v, a);
        EXPECT_NE(v, b);
        EXPECT_DOUBLE_EQ(p, 1.0 / 3);
      }
    }
}

TEST(Walk, TransitionSumsToOneInRationals) {
  // complete host: weight 1/(n-d) on each of the n-d legal extensions
  for (int d = 2; d <= 3; ++d)
    for (int n = d + 1; n <= 10; ++n) {
      auto x = fractional_decomposition(complete(n, d), 0.9);
      std::vector<Vertex> z;
      for (int i = 1; i <= d; ++i) z.push_back(i);
      auto t = transition(x, z);
      long long num = 0, den = n - d;  // each weight is 1/den exactly
      for (auto &p : t) {
        (void)p;
        num += 1;
      }
      EXPECT_EQ(num, den);
      EXPECT_EQ(std::gcd(num, den), den);
    }
}

TEST(Walk, ReplayIsDeterministic) {
  auto g = complete(7, 2);
  auto x = fractional_decomposition(g, 0.9);
  auto a = start_walk(g, 99), b = start_walk(g, 99);
  for (int i = 0; i < 1000; ++i) {
    walk_step(a, x);
    walk_step(b, x);
  }
  EXPECT_EQ(a.history, b.history);
  auto c = start_walk(g, 100);
  for (int i = 0; i < 1000; ++i) walk_step(c, x);
  EXPECT_NE(a.history, c.history);
}

TEST(Walk, WindowsAreAlwaysEdges) {
  auto g = minus_perfect_matching(10);
  auto x = fractional_decomposition(g, 0.9);
  auto s = start_walk(g, 5);
  for (int i = 0; i < 5000; ++i) {
    ASSERT_TRUE(g.contains(to_mask(s.current)));
    walk_step(s, x);
  }
}

TEST(Walk, InitialStateIsUniform) {
  auto g = complete(4, 2);
  std::map<std::vector<Vertex>, int> count;
  const int reps = 24000;
  for (int i = 0; i < reps; ++i) ++count[start_walk(g, static_cast<std::uint64_t>(i)).current];
  ASSERT_EQ(count.size(), 12u);
  const double p = 1.0 / 12, se = std::sqrt(p * (1 - p) / reps);
  for (auto &[t, c] : count) EXPECT_NEAR(static_cast<double>(c) / reps, p, 5 * se);
}

TEST(Stationarity, K6Consecutive) {
  auto g = complete(6, 2);
  auto x = fractional_decomposition(g, 0.9);
  auto r = stationarity_check(g, x, 300'000, 3);
  EXPECT_EQ(r.tuples, 30u);
  EXPECT_EQ(r.counts.size(), 30u);
  EXPECT_TRUE(r.within) << r.max_deviation << " vs " << r.tolerance;
}

TEST(Stationarity, SkipOneWindow) {
  auto g = complete(6, 2);
  auto x = fractional_decomposition(g, 0.9);
  auto r = stationarity_check(g, x, 300'000, 4, 1);
  EXPECT_EQ(r.counts.size(), 30u);
  EXPECT_TRUE(r.within) << r.max_deviation << " vs " << r.tolerance;

  auto g3 = complete(6, 3);
  auto x3 = fractional_decomposition(g3, 0.9);
  for (int skip : {0, 1, 2}) {
    auto r3 = stationarity_check(g3, x3, 300'000, 5, skip);
    EXPECT_EQ(r3.tuples, 120u);
    EXPECT_TRUE(r3.within) << skip << ": " << r3.max_deviation << " vs " << r3.tolerance;
  }
}

TEST(Stationarity, IrregularHostUniformOverOrderedEdges) {
  auto g = minus_perfect_matching(8);
  auto x = fractional_decomposition(g, 0.9);
  auto r = stationarity_check(g, x, 400'000, 6);
  EXPECT_EQ(r.tuples, 2 * g.size());
  EXPECT_TRUE(r.within) << r.max_deviation << " vs " << r.tolerance;
}

TEST(Stationarity, SingleTriangleIsReducible) {
  // from (a, b) the only move is to c, so one run cycles through a single
  // orientation and never visits the reversed pairs
  auto g = complete(3, 2);
  auto x = fractional_decomposition(g, 0.9);
  auto r = stationarity_check(g, x, 100'000, 1);
  EXPECT_EQ(r.tuples, 6u);
  EXPECT_FALSE(r.within);
}

TEST(SamplePath, AcceptedSamplesValidate) {
  auto g = complete(30, 2);
  auto x = fractional_decomposition(g, 0.9);
  Rng rng(81);
  std::size_t attempts = 0;
  const int samples = 2000;
  for (int i = 0; i < samples; ++i) {
    auto s = sample_path(g, x, 8, rng);
    attempts += s.attempts;
    ASSERT_TRUE(validate(s.path, g).valid);
    ASSERT_EQ(s.path.size(), 8u);
    std::set<Vertex> distinct(s.path.entries.begin(), s.path.entries.end());
    ASSERT_EQ(distinct.size(), 8u);
  }
  EXPECT_GT(static_cast<double>(samples) / static_cast<double>(attempts), 0.5);
}

TEST(SamplePath, RejectionCap) {
  auto g = complete(4, 2);
  auto x = fractional_decomposition(g, 0.9);
  EXPECT_THROW(sample_path(g, x, 4, std::uint64_t{1}, 0), Infeasible);
  EXPECT_THROW(sample_path(g, x, 5, std::uint64_t{1}), ParameterError);
}

TEST(SamplePath, EdgeHitsNearUniform) {
  // K_10, t = 5: e* = (t-d)d+1 = 7 sets per path, Pr[e in P] ~ 7/45
  auto g = complete(10, 2);
  auto x = fractional_decomposition(g, 0.9);
  Rng rng(82);
  std::map<Mask, int> hits;
  const int samples = 100'000;
  for (int i = 0; i < samples; ++i)
    for (Mask e : covered_masks(sample_path(g, x, 5, rng).path)) ++hits[e];
  const double p = 7.0 / 45, se = std::sqrt(p * (1 - p) / samples);
  for (Mask e : g.edges()) EXPECT_NEAR(static_cast<double>(hits[e]) / samples, p, 5 * se) << to_string(e);
}

TEST(SamplePath, NoPathFarAboveMean) {
  auto g = complete(7, 2);
  auto x = fractional_decomposition(g, 0.9);
  Rng rng(83);
  std::map<std::vector<Vertex>, int> freq;
  const int samples = 1'000'000;
  for (int i = 0; i < samples; ++i) ++freq[sample_path(g, x, 5, rng).path.entries];
  // 7*6*5*4*3 = 2520 ordered paths of order 5
  EXPECT_EQ(freq.size(), 2520u);
  const double mean = static_cast<double>(samples) / 2520;
  for (auto &[p, c] : freq) EXPECT_LE(c, 10 * mean);
}

TEST(SamplePath, EndEventNearTwoOverG) {
  // Pr[a fixed edge is the first or last block] ~ 2/|G| (3 standard errors)
  auto g = complete(12, 2);
  auto x = fractional_decomposition(g, 0.9);
  Rng rng(84);
  std::map<Mask, int> at_end;
  const int samples = 200'000;
  for (int i = 0; i < samples; ++i) {
    auto s = sample_path(g, x, 6, rng).path;
    auto [a, b] = ends(s);
    ++at_end[to_mask(a)];
    ++at_end[to_mask(b)];
  }
  const double p = 2.0 / static_cast<double>(g.size()), se = std::sqrt(p * (1 - p) / samples);
  double worst = 0;
  for (Mask e : g.edges()) worst = std::max(worst, std::abs(at_end[e] / static_cast<double>(samples) - p));
  // the max over 66 edges: allow the 3-SE band plus a Bonferroni margin
  EXPECT_LE(worst, 4.5 * se);
  double mean = 0;
  for (Mask e : g.edges()) mean += at_end[e] / static_cast<double>(samples);
  mean /= static_cast<double>(g.size());
  EXPECT_NEAR(mean, p, 3 * se);
}

TEST(Greedy, K30Packing) {
  auto g = complete(30, 2);
  auto p = greedy_approx_decomposition(g, 10, 0.25, 7);
  EXPECT_LE(p.leftover_max_codegree, static_cast<int>(0.25 * 30));
  std::set<Mask> seen;
  std::size_t covered = 0;
  for (auto &s : p.paths) {
    EXPECT_TRUE(validate(s, g).valid);
    EXPECT_EQ(s.size(), 10u);
    for (Mask e : covered_masks(s)) {
      EXPECT_TRUE(seen.insert(e).second);
      ++covered;
    }
  }
  EXPECT_EQ(covered + p.leftover.size(), g.size());
  for (auto &[s, c] : p.end_counts) EXPECT_LE(c, p.end_cap);
}

TEST(Greedy, SeedDeterminism) {
  auto g = complete(16, 2);
  auto a = greedy_approx_decomposition(g, 6, 0.25, 11);
  auto b = greedy_approx_decomposition(g, 6, 0.25, 11);
  ASSERT_EQ(a.paths.size(), b.paths.size());
  for (std::size_t i = 0; i < a.paths.size(); ++i) EXPECT_EQ(a.paths[i], b.paths[i]);
}

TEST(Connect, TwoDisjointPathsInK30) {
  auto g = complete(30, 2);
  std::vector<VertexSeq> packing{open_seq(2, {1, 2, 3, 4}), open_seq(2, {5, 6, 7, 8})};
  std::vector<Mask> used;
  for (auto &p : packing)
    for (Mask e : covered_masks(p)) used.push_back(e);
  auto reserve = without(g, used);
  Mask u = to_mask({20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30});
  auto t = connect_packing(packing, reserve, u);
  EXPECT_TRUE(validate(t, g).valid);
  auto [a, b] = ends(t);
  for (Vertex v : a) EXPECT_TRUE(contains(u, v));
  for (Vertex v : b) EXPECT_TRUE(contains(u, v));
  std::set<Mask> packed(used.begin(), used.end());
  std::size_t from_packing = 0;
  for (Mask e : covered_masks(t)) {
    if (packed.count(e)) ++from_packing;
    else EXPECT_TRUE(reserve.contains(e));
  }
  EXPECT_EQ(from_packing, packed.size());
}

TEST(Connect, EmptyPacking) {
  auto g = complete(12, 2);
  auto t = connect_packing({}, g, full_mask(12));
  EXPECT_EQ(t.size(), 4u);
  EXPECT_TRUE(validate(t, g).valid);
}

TEST(Connect, GreedyPackingIntoOneTrail) {
  auto g = complete(30, 2);
  // reserve: every edge touching 17..30; packing lives on 1..16. Each end
  // occurrence spends about two reserve edges at its vertex, so the reserve
  // side must outnumber twice the worst end load.
  Mask low = full_mask(16);
  std::vector<Mask> inner, outer;
  for (Mask e : g.edges()) ((e & ~low) == 0 ? inner : outer).push_back(e);
  auto p = greedy_approx_decomposition(DGraph(30, 2, inner), 6, 0.25, 3);
  ASSERT_FALSE(p.paths.empty());
  DGraph reserve(30, 2, outer);
  auto t = connect_packing(p.paths, reserve, full_mask(30) & ~low);
  EXPECT_TRUE(validate(t, g).valid);
  std::size_t packed = 0;
  for (auto &s : p.paths) packed += covered_masks(s).size();
  std::size_t from_reserve = 0;
  for (Mask e : covered_masks(t)) from_reserve += reserve.contains(e);
  EXPECT_EQ(covered_masks(t).size(), packed + from_reserve);
}
