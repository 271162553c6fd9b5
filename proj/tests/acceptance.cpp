// One PASS/FAIL line per acceptance criterion. Every check recomputes its
// expected value with code that does not go through the routine under test.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>

#include "gen.hpp"

using namespace xtt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SearchBudget exhaustive(double secs) { return {secs, 1'000'000'000'000ULL, SearchMode::exhaustive}; }

std::set<Mask> oracle_edges(const VertexSeq &s) {
  std::set<Mask> out;
  for (auto &e : gen::oracle_cover(s.entries, s.d, s.closed)) out.insert(gen::mask_of(e));
  return out;
}

std::vector<std::set<Vertex>> edge_sets(const DGraph &g) {
  std::vector<std::set<Vertex>> out;
  for (Mask e : g.edges()) {
    auto vs = vertices_of(e);
    out.emplace_back(vs.begin(), vs.end());
  }
  return out;
}

// all d-subsets of all facets
std::set<Mask> oracle_shadow(const std::vector<std::vector<Vertex>> &facets, int d) {
  std::set<Mask> out;
  for (auto &f : facets) {
    std::vector<bool> pick(f.size(), false);
    std::fill(pick.begin(), pick.begin() + d, true);
    do {
      Mask m = 0;
      for (std::size_t i = 0; i < f.size(); ++i)
        if (pick[i]) m |= bit(f[i]);
      out.insert(m);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

// consecutive (d+1)-windows as vertex lists
std::vector<std::vector<Vertex>> windows(const VertexSeq &s) {
  std::vector<std::vector<Vertex>> out;
  const std::size_t k = s.size(), w = static_cast<std::size_t>(s.d) + 1;
  const std::size_t count = s.closed ? k : k + 1 - w;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Vertex> f;
    for (std::size_t j = 0; j < w; ++j) f.push_back(s.entries[(i + j) % k]);
    out.push_back(f);
  }
  return out;
}

int failures = 0;

void report(int id, bool ok, const std::string &detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  if (!ok) ++failures;
}

void run(int id, const std::function<std::pair<bool, std::string>()> &body) {
  auto t0 = Clock::now();
  try {
    auto [ok, detail] = body();
    std::ostringstream o;
    o << detail << " (" << std::fixed << std::setprecision(2) << seconds_since(t0) << " s)";
    report(id, ok, o.str());
  } catch (const std::exception &e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

std::pair<bool, std::string> k5_tour() {
  auto s = closed_seq(2, {1, 2, 3, 4, 5});
  auto k5 = complete(5, 2);
  auto cov = oracle_edges(s);
  bool oracle_ok = cov.size() == 10 && gen::oracle_valid(s.entries, 2, true);
  bool lib_ok = validate(s, k5).valid && covers_exactly(s, k5);
  bool div = binomial(4, 1) % 4 == 0 && tour_feasible(k5).feasible;
  return {oracle_ok && lib_ok && div, "closed (1,2,3,4,5) covers all 10 pairs of K5"};
}

std::pair<bool, std::string> divisibility_vectors() {
  int checked = 0;
  bool ok = true;
  for (int d = 2; d <= 4; ++d)
    for (int f = d + 3; f <= d + 6; ++f) {
      auto c = extra_tight_cycle(f, d);
      std::vector<std::uint64_t> want(static_cast<std::size_t>(d), 1);
      want[0] = static_cast<std::uint64_t>(f * d);
      want[1] = static_cast<std::uint64_t>(d * d);
      ok = ok && gen::oracle_div_vector(edge_sets(c), f, d) == want && div_vector(c).g == want;
      ++checked;
    }
  for (int d = 2; d <= 5; ++d) {
    auto p = extra_tight_path(2 * d, d - 1);
    std::vector<std::uint64_t> want(static_cast<std::size_t>(d - 1), 1);
    want[0] = static_cast<std::uint64_t>(d * d);
    ok = ok && gen::oracle_div_vector(edge_sets(p), 2 * d, d - 1) == want && div_vector(p).g == want;
    ++checked;
  }
  return {ok, std::to_string(checked) + " cycle/path complexes match the brute-force gcd oracle"};
}

std::pair<bool, std::string> trail_degree_profile() {
  gen::Rng rng(3001);
  bool ok = true;
  for (int d = 2; d <= 3; ++d)
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 20;
      const int k = gen::pick(rng, 2 * d, n);
      auto s = gen::random_path(rng, n, d, k);
      std::map<Vertex, int> oracle;
      for (auto &e : gen::oracle_cover(s.entries, d, false))
        for (Vertex v : e) ++oracle[v];
      auto lib = trail_degrees(s);
      for (int pos = 0; pos < k; ++pos) {
        Vertex v = s.entries[static_cast<std::size_t>(pos)];
        int from_end = std::min(pos + 1, k - pos);
        int want = from_end <= d ? from_end * (d - 1) + 1 : d * d;
        ok = ok && oracle[v] == want && lib[v] == want;
      }
    }
  return {ok, "ends i(d-1)+1 and interior d^2 on 400 random paths"};
}

std::pair<bool, std::string> shadow_identities() {
  gen::Rng rng(3002);
  bool ok = true;
  int paths = 0, cycles = 0;
  for (int d = 2; d <= 3; ++d) {
    for (int rep = 0; rep < 200; ++rep) {
      auto s = gen::random_trail(rng, 10, d, gen::pick(rng, d + 2, 13));
      auto f = facets_of(s, 10);
      if (dual_graph(f).shape != DualShape::path) continue;
      ++paths;
      auto sh = oracle_shadow(windows(s), d);
      ok = ok && sh.size() == f.size() * static_cast<std::size_t>(d) + 1 && shadow(f).size() == sh.size();
    }
    for (int rep = 0; rep < 200; ++rep) {
      auto s = gen::random_tour(rng, 12, d, gen::pick(rng, d + 3, d + 9));
      auto f = facets_of(s, 12);
      if (dual_graph(f).shape != DualShape::cycle) continue;
      ++cycles;
      auto sh = oracle_shadow(windows(s), d);
      ok = ok && sh.size() == f.size() * static_cast<std::size_t>(d) && shadow(f).size() == sh.size();
    }
  }
  ok = ok && paths >= 200 && cycles >= 200;
  return {ok, std::to_string(paths) + " dual paths and " + std::to_string(cycles) + " dual cycles"};
}

std::pair<bool, std::string> tour_search() {
  bool ok = true;
  std::string detail;
  for (int n : {4, 6, 7, 8}) {
    auto r = find_euler_tour(complete(n, 2), exhaustive(600));
    ok = ok && r.status == SearchStatus::none;
  }
  auto k5 = find_euler_tour(complete(5, 2), exhaustive(60));
  ok = ok && k5.status == SearchStatus::found && covers_exactly(*k5.witness, complete(5, 2));

  auto t0 = Clock::now();
  auto r9 = find_euler_tour(complete(9, 2), exhaustive(120));
  double secs = seconds_since(t0);
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << "none for n=4,6,7,8 " << (ok ? "ok" : "WRONG") << "; K5 found; ";
  if (r9.status != SearchStatus::found) {
    // No K9 tour exists (the search is exhaustive and an independent brute
    // force agrees), so the tour-based half cannot hold. Report the extremal
    // complex from the diameter search so the bound itself is still checked.
    auto alt = max_diameter_complex(9, 2, exhaustive(120));
    auto cert = certify_extremal(alt.complex);
    o << "K9 tour search " << to_string(r9.status) << " after " << r9.nodes << " nodes in " << secs
      << " s; diameter search gives an extremal complex of diameter " << alt.diameter
      << (cert.extremal && alt.diameter == 16 ? " (certified)" : " (NOT certified)");
    return {false, o.str()};
  }
  auto tour = *r9.witness;
  bool tour_ok = oracle_edges(tour).size() == 36 && gen::oracle_valid(tour.entries, 2, true);
  auto facets = windows(tour);
  facets.erase(facets.begin());
  std::vector<Mask> fm;
  for (auto &f : facets) fm.push_back(to_mask(f));
  auto cert = certify_extremal(FacetFamily(9, 2, fm));
  // diameter by BFS on ridge adjacency, independent of the library
  const std::size_t m = fm.size();
  int worst = 0;
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<int> dist(m, -1);
    std::vector<std::size_t> q{s};
    dist[s] = 0;
    for (std::size_t h = 0; h < q.size(); ++h)
      for (std::size_t j = 0; j < m; ++j)
        if (dist[j] < 0 && popcount(fm[q[h]] & fm[j]) == 2) {
          dist[j] = dist[q[h]] + 1;
          q.push_back(j);
        }
    for (int x : dist) worst = std::max(worst, x < 0 ? 1 << 20 : x);
  }
  ok = ok && tour_ok && secs <= 120 && cert.extremal && cert.diameter == 16 && worst == 16 && hs_bound(9, 2) == 16;
  o << "K9 tour in " << secs << " s, facet-deleted diameter " << worst;
  return {ok, o.str()};
}

std::pair<bool, std::string> switcher() {
  const Vertex u0 = 1, u1 = 2, u2 = 3, w0 = 4, w2 = 5, x1 = 6, x2 = 7, x3 = 8;
  auto p = d2_switcher(u0, u1, u2, w0, w2, x1, x2, x3);
  auto s1 = oracle_edges(p.t1), s2 = oracle_edges(p.t2);
  std::set<Mask> d12, d21;
  std::set_difference(s1.begin(), s1.end(), s2.begin(), s2.end(), std::inserter(d12, d12.end()));
  std::set_difference(s2.begin(), s2.end(), s1.begin(), s1.end(), std::inserter(d21, d21.end()));
  bool a = d12 == std::set<Mask>{to_mask({u0, w2}), to_mask({w0, u2})};
  bool b = d21 == std::set<Mask>{to_mask({w0, w2}), to_mask({u0, u2})};
  bool same_ends = p.t1.entries.front() == p.t2.entries.front() && p.t1.entries[1] == p.t2.entries[1] &&
                   p.t1.entries.back() == p.t2.entries.back() &&
                   p.t1.entries[p.t1.size() - 2] == p.t2.entries[p.t2.size() - 2];
  Mask span = bit(u0) | bit(u2) | bit(w0) | bit(w2);
  bool indep = true;
  for (Mask e : s1)
    if (!d12.count(e) && (e & ~span) == 0) indep = false;
  bool valid = gen::oracle_valid(p.t1.entries, 2, false) && gen::oracle_valid(p.t2.entries, 2, false);
  bool lib = verify_switcher(p.t1, p.t2, p.exchange).ok();
  return {a && b && same_ends && indep && valid && lib, "difference sets, ends and independence by enumeration"};
}

std::pair<bool, std::string> cycle_insertion() {
  gen::Rng rng(3007);
  bool ok = true;
  int done = 0;
  for (int d = 2; d <= 3; ++d)
    for (int rep = 0; rep < 100;) {
      const int n = 40;
      auto perm = gen::shuffled_range(rng, n);
      int k = gen::pick(rng, d + 1, 10);
      std::vector<Vertex> t(perm.begin(), perm.begin() + k);
      std::size_t at = static_cast<std::size_t>(gen::pick(rng, 0, k - d - 1));
      int ck = gen::pick(rng, d + 3, d + 7);
      std::vector<Vertex> c{perm[static_cast<std::size_t>(k)]};
      for (int i = 1; i < d; ++i) c.push_back(t[at + static_cast<std::size_t>(i)]);
      for (int i = d; i < ck; ++i) c.push_back(perm[static_cast<std::size_t>(k + i)]);
      std::rotate(c.begin(), c.begin() + gen::pick(rng, 0, ck - 1), c.end());
      auto trail = open_seq(d, t), cycle = closed_seq(d, c);
      if (!gen::oracle_valid(t, d, false) || !gen::oracle_valid(c, d, true)) continue;
      auto et = oracle_edges(trail), ec = oracle_edges(cycle);
      if (std::any_of(et.begin(), et.end(), [&](Mask e) { return ec.count(e) > 0; })) continue;
      ++rep;
      ++done;
      auto r = insert_cycle(trail, cycle, at);
      // E1/E2 from the anchors, rebuilt here
      std::size_t st = 0;
      while (c[(st + 1) % c.size()] != t[at + 1]) ++st;
      std::vector<Vertex> u;
      for (int i = 0; i <= d; ++i) u.push_back(c[(st + static_cast<std::size_t>(i)) % c.size()]);
      Vertex w0 = t[at], wd = t[at + static_cast<std::size_t>(d)];
      std::set<Mask> e1, e2;
      for (int i = 1; i < d; ++i) {
        Mask rest = 0;
        for (int j = 1; j < d; ++j)
          if (j != i) rest |= bit(u[static_cast<std::size_t>(j)]);
        e1.insert(rest | bit(u[0]) | bit(wd));
        e1.insert(rest | bit(w0) | bit(u[static_cast<std::size_t>(d)]));
        e2.insert(rest | bit(w0) | bit(wd));
        e2.insert(rest | bit(u[0]) | bit(u[static_cast<std::size_t>(d)]));
      }
      std::set<Mask> want = et;
      want.insert(ec.begin(), ec.end());
      want.insert(e1.begin(), e1.end());
      for (Mask e : e2) want.erase(e);
      ok = ok && oracle_edges(r.seq) == want && gen::oracle_valid(r.seq.entries, d, false);
    }
  return {ok, std::to_string(done) + " random insertions match (old + cycle + E1) - E2"};
}

std::pair<bool, std::string> johnson() {
  auto t0 = Clock::now();
  auto a = johnson_longest_induced_path(5, 3, exhaustive(1));
  double ta = seconds_since(t0);
  t0 = Clock::now();
  auto b = johnson_longest_induced_path(6, 3, exhaustive(60));
  double tb = seconds_since(t0);
  t0 = Clock::now();
  auto c = johnson_longest_induced_path(7, 3, exhaustive(600));
  double tc = seconds_since(t0);
  auto induced_path = [](const std::vector<Mask> &w) {
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j)
        if ((popcount(w[i] & w[j]) == 2) != (j == i + 1)) return false;
    return true;
  };
  bool ok = a.length == 3 && a.proven && ta < 1 && b.length == 5 && b.proven && tb < 60 && c.length == 9 &&
            c.proven && c.status == SearchStatus::found && tc < 600 && induced_path(c.witness) &&
            c.witness.size() == 10;
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << "J(5,3)=" << a.length << " in " << ta << " s, J(6,3)=" << b.length
    << " in " << tb << " s, J(7,3)=" << c.length << " (" << to_string(c.status) << ") in " << tc << " s";
  return {ok, o.str()};
}

std::pair<bool, std::string> degree_fixing() {
  bool ok = true;
  for (int n : {7, 8, 11}) {
    const int d = 2;
    auto g = complete(n, d);
    auto m = end_avoiding_matching(n, d, compute_s(n, d));
    auto e = Endpoints::standard(n, d);
    for (auto strat : {DigraphStrategy::sweep, DigraphStrategy::balanced}) {
      auto dg = fix_digraph(g, m, e, strat);
      std::set<Mask> dropped(m.begin(), m.end());
      std::vector<long long> val(static_cast<std::size_t>(n) + 1, 0), load(static_cast<std::size_t>(n) + 1, 0);
      for (Vertex a = 1; a <= n; ++a)
        for (Vertex b = a + 1; b <= n; ++b)
          if (!dropped.count(bit(a) | bit(b))) {
            ++val[static_cast<std::size_t>(a)];
            ++val[static_cast<std::size_t>(b)];
          }
      std::set<Mask> forbidden = dropped;
      forbidden.insert(bit(1) | bit(2));
      forbidden.insert(bit(n) | bit(n - 1));
      for (auto &arc : dg.arcs) {
        val[static_cast<std::size_t>(arc.from)] += d - 1;
        val[static_cast<std::size_t>(arc.to)] -= d - 1;
        ++load[static_cast<std::size_t>(arc.from)];
        ++load[static_cast<std::size_t>(arc.to)];
        ok = ok && !forbidden.count(bit(arc.from) | bit(arc.to));
      }
      for (Vertex v = 1; v <= n; ++v) {
        long long target = 0;
        if (v == 1 || v == n) target = d;           // distance 1 from an end
        if (v == 2 || v == n - 1) target = 2 * d - 1; // distance 2
        ok = ok && ((val[static_cast<std::size_t>(v)] - target) % 4 + 4) % 4 == 0;
        ok = ok && load[static_cast<std::size_t>(v)] <= 5 * d * d;
      }
      ok = ok && check_fix_digraph(g, m, e, dg).ok();
    }
  }
  return {ok, "clauses (i)-(iii) on K7, K8, K11 for both strategies"};
}

std::pair<bool, std::string> stationarity() {
  auto g = complete(6, 2);
  auto x = fractional_decomposition(g, 0.9);
  const std::size_t steps = 1'000'000;
  const double p = 1.0 / 30, se = std::sqrt(p * (1 - p) / static_cast<double>(steps));
  bool ok = true;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto st = start_walk(g, seed, false);
    std::map<std::pair<Vertex, Vertex>, std::size_t> count;
    for (std::size_t i = 0; i < steps; ++i) {
      walk_step(st, x);
      ++count[{st.current[0], st.current[1]}];
    }
    ok = ok && count.size() == 30;
    for (auto &[pair, c] : count) {
      double dev = std::abs(static_cast<double>(c) / static_cast<double>(steps) - p);
      worst = std::max(worst, dev / se);
      ok = ok && dev <= 4 * se && pair.first != pair.second;
    }
    ok = ok && stationarity_check(g, x, steps, seed).within;
  }
  std::ostringstream o;
  o << "seeds 1-5, worst deviation " << std::fixed << std::setprecision(2) << worst << " SE";
  return {ok, o.str()};
}

std::pair<bool, std::string> fractional() {
  auto edge_error = [](const DGraph &g, const FractionalDecomp &x) {
    double worst = 0;
    for (Mask e : g.edges()) {
      double s = 0;
      for (std::size_t i = 0; i < x.cliques.size(); ++i)
        if ((x.cliques[i] & e) == e) {
          if (x.weights[i] < -1e-12) return 1.0;
          s += x.weights[i];
        }
      worst = std::max(worst, std::abs(s - 1));
    }
    return worst;
  };
  bool ok = true;
  double worst = 0;
  for (int n = 3; n <= 30; ++n) {
    auto g = complete(n, 2);
    auto x = fractional_decomposition(g, 0.9);
    double err = edge_error(g, x);
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9 && x.method == DecompMethod::closed_form;
    // 0.9-normal exactly when 1/(n-2) <= 1/(0.9 n)
    ok = ok && x.normal == (n - 2 >= 0.9 * n);
  }
  std::vector<Mask> matching;
  for (Vertex v = 1; v <= 11; v += 2) matching.push_back(bit(v) | bit(v + 1));
  auto g = without(complete(12, 2), matching);
  for (auto method : {DecompMethod::automatic, DecompMethod::scaling, DecompMethod::lp}) {
    DecompOptions opt;
    opt.method = method;
    double err = edge_error(g, fractional_decomposition(g, 0.9, opt));
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
  }
  std::ostringstream o;
  o << "complete n=3..30 and K12 minus a matching, max |sum - 1| = " << std::scientific << std::setprecision(1)
    << worst;
  return {ok, o.str()};
}

std::pair<bool, std::string> greedy() {
  const int n = 30;
  const double gamma = 0.25;
  auto g = complete(n, 2);
  auto p = greedy_approx_decomposition(g, 10, gamma, 12);
  std::set<Mask> used;
  bool ok = true;
  std::map<Vertex, int> ends_at;
  for (auto &s : p.paths) {
    ok = ok && s.size() == 10 && gen::oracle_valid(s.entries, 2, false);
    for (Mask e : oracle_edges(s)) ok = ok && used.insert(e).second;
    ++ends_at[s.entries.front()];
    ++ends_at[s.entries[1]];
    ++ends_at[s.entries[s.size() - 1]];
    ++ends_at[s.entries[s.size() - 2]];
  }
  std::vector<int> codeg(n + 1, 0);
  std::size_t left = 0;
  for (Mask e : g.edges())
    if (!used.count(e)) {
      ++left;
      for (Vertex v : vertices_of(e)) ++codeg[static_cast<std::size_t>(v)];
    }
  int delta = *std::max_element(codeg.begin(), codeg.end());
  int cap = static_cast<int>(std::floor(gamma * n));
  int worst_end = 0;
  for (auto &[v, c] : ends_at) worst_end = std::max(worst_end, c);
  ok = ok && left == p.leftover.size() && delta == p.leftover_max_codegree && delta <= gamma * n &&
       worst_end <= cap;
  return {ok, std::to_string(p.paths.size()) + " paths, leftover max codegree " + std::to_string(delta) +
                  ", max end multiplicity " + std::to_string(worst_end) + " (cap " + std::to_string(cap) + ")"};
}

}  // namespace

int main() {
  run(1, k5_tour);
  run(2, divisibility_vectors);
  run(3, trail_degree_profile);
  run(4, shadow_identities);
  run(5, tour_search);
  run(6, switcher);
  run(7, cycle_insertion);
  run(8, johnson);
  run(9, degree_fixing);
  run(10, stationarity);
  run(11, fractional);
  run(12, greedy);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing" << std::endl;
  return failures ? 1 : 0;
}
