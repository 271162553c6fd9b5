// Command-line front end. Every command prints one JSON document (or a flat
// text rendering of it) that echoes the run configuration.
//
// Exit codes: 0 success/valid, 1 negative result, 2 input error, 3 budget hit.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "xtt/xtt.hpp"

namespace {

using xtt::json;

constexpr int kOk = 0, kNegative = 1, kInputError = 2, kBudget = 3;

struct RunConfig {
  std::uint64_t seed = 1;
  double budget_secs = 60;
  std::uint64_t budget_nodes = 1'000'000'000ULL;
  std::string mode = "exhaustive";
  std::string format = "json";
  std::string out;
  int threads = 1;
  double gamma = 0.25;
  double mu = 0.9;
  int t = 8;

  xtt::SearchBudget budget() const {
    xtt::SearchBudget b;
    b.max_seconds = budget_secs;
    b.max_nodes = budget_nodes;
    b.mode = mode == "first_found" ? xtt::SearchMode::first_found : xtt::SearchMode::exhaustive;
    return b;
  }

  json echo() const {
    return {{"seed", seed}, {"budget_secs", budget_secs}, {"budget_nodes", budget_nodes}, {"mode", mode},
            {"format", format}, {"threads", threads}, {"gamma", gamma}, {"mu", mu}, {"t", t}};
  }
};

void flatten(const json &j, const std::string &prefix, std::ostream &o) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), o);
  } else {
    o << prefix << ": " << j.dump() << '\n';
  }
}

void emit(const RunConfig &cfg, json body) {
  json doc = {{"config", cfg.echo()}};
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  std::ostringstream o;
  if (cfg.format == "text") flatten(doc, "", o);
  else o << doc.dump(2) << '\n';
  if (cfg.out.empty()) {
    std::cout << o.str();
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw xtt::ParseError("cannot write " + cfg.out);
    f << o.str();
  }
}

std::string slurp(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw xtt::ParseError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int status_code(xtt::SearchStatus s) {
  switch (s) {
    case xtt::SearchStatus::found: return kOk;
    case xtt::SearchStatus::none: return kNegative;
    case xtt::SearchStatus::timeout: return kBudget;
  }
  return kNegative;
}

int cmd_verify(const RunConfig &cfg, const std::string &seq_path, const std::string &host_path) {
  auto seq = xtt::parse_sequence(slurp(seq_path));
  auto host = xtt::parse_graph(slurp(host_path));
  auto report = xtt::validate(seq, host);
  bool euler = report.valid && report.covered.size() == host.size();
  emit(cfg, {{"report", xtt::to_json(report)}, {"covers_host", euler}});
  return report.valid ? kOk : kNegative;
}

struct SearchArgs {
  std::string kind;
  int n = 0, d = 2, k = 3;
  std::string host;
  std::vector<int> start, finish;
};

xtt::DGraph host_or_complete(const std::string &path, int n, int d) {
  return path.empty() ? xtt::complete(n, d) : xtt::parse_graph(slurp(path));
}

int cmd_search(const RunConfig &cfg, const SearchArgs &a) {
  const auto budget = cfg.budget();
  if (a.kind == "tour") {
    auto r = xtt::find_euler_tour(host_or_complete(a.host, a.n, a.d), budget);
    emit(cfg, {{"kind", "tour"}, {"result", xtt::to_json(r)}});
    return status_code(r.status);
  }
  if (a.kind == "trail") {
    auto g = host_or_complete(a.host, a.n, a.d);
    auto r = xtt::find_euler_trail(g, a.start, a.finish, budget);
    emit(cfg, {{"kind", "trail"}, {"result", xtt::to_json(r)}});
    return status_code(r.status);
  }
  if (a.kind == "johnson") {
    auto r = xtt::johnson_longest_induced_path(a.n, a.k, budget);
    emit(cfg, {{"kind", "johnson"}, {"result", xtt::to_json(r)}});
    return status_code(r.status);
  }
  auto r = xtt::max_diameter_complex(a.n, a.d, budget);
  emit(cfg, {{"kind", "diameter"}, {"result", xtt::to_json(r)}});
  return status_code(r.status);
}

// d = 2 and n = 1 mod 4: Euler tour of K_n, then drop one facet of its cyclic
// complex. Otherwise the induced-path search.
int cmd_construct(const RunConfig &cfg, int n, int d) {
  auto budget = cfg.budget();
  budget.mode = xtt::SearchMode::first_found;
  std::string fallback;
  if (d == 2 && n % 4 == 1) {
    auto tour = xtt::find_euler_tour(xtt::complete(n, d), budget);
    if (tour.status == xtt::SearchStatus::found) {
      auto cyc = xtt::facets_of(*tour.witness, n);
      std::vector<xtt::Mask> rest(cyc.facets().begin() + 1, cyc.facets().end());
      xtt::FacetFamily f(n, d, rest);
      auto cert = xtt::certify_extremal(f);
      emit(cfg, {{"route", "tour"},
                 {"tour", tour.witness->entries},
                 {"complex", xtt::to_json(f)},
                 {"diameter", cert.diameter ? json(*cert.diameter) : json(nullptr)},
                 {"certificate", xtt::to_json(cert)}});
      return cert.extremal ? kOk : kNegative;
    }
    // no tour (K_9 has none) or out of budget: fall back to the induced-path search
    fallback = std::string("tour search: ") + xtt::to_string(tour.status);
  }
  auto r = xtt::max_diameter_complex(n, d, budget);
  json out = {{"route", "johnson"},
              {"complex", xtt::to_json(r.complex)},
              {"diameter", r.diameter},
              {"proven", r.proven},
              {"certificate", xtt::to_json(r.certificate)}};
  if (!fallback.empty()) out["fallback_reason"] = fallback;
  emit(cfg, out);
  return r.status == xtt::SearchStatus::found ? kOk : kBudget;
}

struct SampleArgs {
  std::string kind;
  int n = 6, d = 2;
  std::size_t steps = 1'000'000;
  std::size_t samples = 1000;
  int skip = 0;
  std::string host;
};

int cmd_sample(const RunConfig &cfg, const SampleArgs &a) {
  auto g = host_or_complete(a.host, a.n, a.d);
  if (a.kind == "decomp") {
    auto p = xtt::greedy_approx_decomposition(g, cfg.t, cfg.gamma, cfg.seed);
    emit(cfg, {{"kind", "decomp"}, {"report", xtt::to_json(p)}});
    return kOk;
  }
  auto x = xtt::fractional_decomposition(g, cfg.mu);
  if (a.kind == "fractional") {
    emit(cfg, {{"kind", "fractional"}, {"decomposition", xtt::to_json(x)}});
    return x.converged ? kOk : kNegative;
  }
  if (a.kind == "walk") {
    auto r = xtt::stationarity_check(g, x, a.steps, cfg.seed, a.skip);
    emit(cfg, {{"kind", "walk"}, {"report", xtt::to_json(r)}});
    return r.within ? kOk : kNegative;
  }
  xtt::Rng rng(cfg.seed);
  std::size_t attempts = 0;
  json paths = json::array();
  for (std::size_t i = 0; i < a.samples; ++i) {
    auto s = xtt::sample_path(g, x, cfg.t, rng);
    attempts += s.attempts;
    if (i < 20) paths.push_back(s.path.entries);
  }
  emit(cfg, {{"kind", "paths"},
             {"samples", a.samples},
             {"attempts", attempts},
             {"acceptance_rate", static_cast<double>(a.samples) / static_cast<double>(attempts)},
             {"first_paths", paths}});
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"extra-tight trails, tours and straight complexes"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App *c) {
    c->add_option("--seed", cfg.seed, "RNG seed");
    c->add_option("--budget-secs", cfg.budget_secs, "wall-clock cap for searches")->check(CLI::PositiveNumber);
    c->add_option("--budget-nodes", cfg.budget_nodes, "node cap for searches")->check(CLI::PositiveNumber);
    c->add_option("--mode", cfg.mode, "exhaustive or first_found")
        ->check(CLI::IsMember({"exhaustive", "first_found"}));
    c->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    c->add_option("--out", cfg.out, "write the report here instead of stdout");
    c->add_option("--threads", cfg.threads, "worker cap (all commands run single-threaded)")
        ->check(CLI::PositiveNumber);
    c->add_option("--gamma", cfg.gamma, "end-multiplicity factor for packings");
    c->add_option("--mu", cfg.mu, "normality parameter for decompositions");
    c->add_option("--t", cfg.t, "path order");
  };

  std::string seq_path, host_path;
  auto *verify = app.add_subcommand("verify", "validate a sequence against a host graph");
  verify->add_option("sequence", seq_path)->required();
  verify->add_option("host", host_path)->required();
  common(verify);

  SearchArgs sa;
  auto *search = app.add_subcommand("search", "exact searches");
  search->add_option("kind", sa.kind)->required()->check(CLI::IsMember({"tour", "trail", "johnson", "diameter"}));
  search->add_option("--n", sa.n)->check(CLI::Range(1, xtt::kMaxVertices));
  search->add_option("--d", sa.d)->check(CLI::PositiveNumber);
  search->add_option("--k", sa.k)->check(CLI::PositiveNumber);
  search->add_option("--host", sa.host, "graph JSON (default: complete graph)");
  search->add_option("--start", sa.start, "first d entries of a trail")->delimiter(',');
  search->add_option("--finish", sa.finish, "last d entries of a trail")->delimiter(',');
  common(search);

  int cn = 0, cd = 2;
  auto *construct = app.add_subcommand("construct", "long-diameter straight complex with certificate");
  construct->add_option("--n", cn)->required()->check(CLI::Range(3, xtt::kMaxVertices));
  construct->add_option("--d", cd)->check(CLI::PositiveNumber);
  common(construct);

  SampleArgs ma;
  auto *sample = app.add_subcommand("sample", "random-walk experiments");
  sample->add_option("kind", ma.kind)->required()->check(CLI::IsMember({"walk", "paths", "decomp", "fractional"}));
  sample->add_option("--n", ma.n)->check(CLI::Range(2, xtt::kMaxVertices));
  sample->add_option("--d", ma.d)->check(CLI::PositiveNumber);
  sample->add_option("--steps", ma.steps)->check(CLI::PositiveNumber);
  sample->add_option("--samples", ma.samples)->check(CLI::PositiveNumber);
  sample->add_option("--skip", ma.skip, "window offset to drop (0 = consecutive)");
  sample->add_option("--host", ma.host, "graph JSON (default: complete graph)");
  common(sample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*verify) return cmd_verify(cfg, seq_path, host_path);
    if (*search) return cmd_search(cfg, sa);
    if (*construct) return cmd_construct(cfg, cn, cd);
    if (*sample) return cmd_sample(cfg, ma);
  } catch (const xtt::ParseError &e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument &e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const xtt::Infeasible &e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kNegative;
  }
  return kInputError;
}
