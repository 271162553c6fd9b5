#pragma once

// JSON and text formats. Graphs: {"n", "d", "edges": [[v, ...], ...]} with each
// edge ascending. Sequences: "d k open|closed" then k vertex ids.

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "complex.hpp"
#include "divisibility.hpp"
#include "hypergraph.hpp"
#include "randwalk.hpp"
#include "search.hpp"
#include "surgery.hpp"
#include "trails.hpp"

namespace xtt {

using json = nlohmann::ordered_json;

inline json to_json(Mask m) { return vertices_of(m); }

inline json to_json(const std::vector<Mask> &ms) {
  json a = json::array();
  for (Mask m : ms) a.push_back(to_json(m));
  return a;
}

inline json to_json(const DGraph &g) { return {{"n", g.n()}, {"d", g.d()}, {"edges", to_json(g.edges())}}; }

inline json to_json(const FacetFamily &f) { return {{"n", f.n()}, {"d", f.d()}, {"facets", to_json(f.facets())}}; }

namespace detail {

inline const json &field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline int int_field(const json &j, const char *key) {
  const json &v = field(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field \"") + key + "\" is not an integer");
  return v.get<int>();
}

inline std::vector<Mask> parse_sets(const json &a, const char *what) {
  if (!a.is_array()) throw ParseError(std::string(what) + " must be an array");
  std::vector<Mask> out;
  for (const json &e : a) {
    if (!e.is_array()) throw ParseError(std::string(what) + " entries must be arrays");
    Mask m = 0;
    Vertex prev = 0;
    for (const json &v : e) {
      if (!v.is_number_integer()) throw ParseError("vertex ids must be integers");
      Vertex x = v.get<Vertex>();
      if (x <= prev) throw ParseError(std::string(what) + " entry is not strictly ascending");
      if (x > kMaxVertices) throw ParseError("vertex id above 63");
      prev = x;
      m |= bit(x);
    }
    out.push_back(m);
  }
  return out;
}

inline json parse_text(const std::string &text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

/// Throws ParseError on malformed input and ParameterError on invariant
/// violations (wrong edge size, duplicates, vertex out of range).
inline DGraph graph_from_json(const json &j) {
  int n = detail::int_field(j, "n"), d = detail::int_field(j, "d");
  return DGraph(n, d, detail::parse_sets(detail::field(j, "edges"), "edges"));
}

inline DGraph parse_graph(const std::string &text) { return graph_from_json(detail::parse_text(text)); }

inline FacetFamily facets_from_json(const json &j) {
  int n = detail::int_field(j, "n"), d = detail::int_field(j, "d");
  return FacetFamily(n, d, detail::parse_sets(detail::field(j, "facets"), "facets"));
}

inline std::string format_sequence(const VertexSeq &s) {
  std::ostringstream o;
  o << s.d << ' ' << s.size() << ' ' << (s.closed ? "closed" : "open") << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) o << (i ? " " : "") << s.entries[i];
  o << '\n';
  return o.str();
}

inline VertexSeq parse_sequence(std::istream &in) {
  VertexSeq s;
  long long k = 0;
  std::string kind;
  if (!(in >> s.d >> k >> kind)) throw ParseError("sequence header must be `d k open|closed`");
  if (kind == "closed") s.closed = true;
  else if (kind != "open") throw ParseError("sequence kind must be open or closed, got " + kind);
  if (k < 0 || k > 1'000'000) throw ParseError("sequence length out of range");
  for (long long i = 0; i < k; ++i) {
    Vertex v = 0;
    if (!(in >> v)) throw ParseError("expected " + std::to_string(k) + " vertex ids, got " + std::to_string(i));
    s.entries.push_back(v);
  }
  std::string extra;
  if (in >> extra) throw ParseError("trailing data after sequence: " + extra);
  return s;
}

inline VertexSeq parse_sequence(const std::string &text) {
  std::istringstream in(text);
  return parse_sequence(in);
}

inline json to_json(const VertexSeq &s) {
  return {{"d", s.d}, {"closed", s.closed}, {"entries", s.entries}};
}

inline json to_json(const CoverageReport &r) {
  json covered = json::array(), dups = json::array();
  for (auto &c : r.covered) covered.push_back({{"iota", c.iota}, {"sigma", c.sigma}, {"edge", to_json(c.edge)}});
  for (auto &dup : r.duplicates)
    dups.push_back({{"edge", to_json(dup.edge)}, {"first", dup.first}, {"second", dup.second}});
  json j = {{"valid", r.valid}, {"covered_count", r.covered.size()}, {"duplicates", dups},
            {"missing_from_host", to_json(r.missing_from_host)}, {"covered", covered}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline json to_json(const ExtremalCertificate &c) {
  json j = {{"extremal", c.extremal},
            {"shape", to_string(c.shape)},
            {"connected", c.connected},
            {"facets", c.facets},
            {"shadow_size", c.shadow_size},
            {"shadow_identity", c.shadow_identity},
            {"diameter", nullptr},
            {"bound", c.bound},
            {"missing", to_json(c.missing)}};
  if (c.diameter) j["diameter"] = *c.diameter;
  return j;
}

inline json to_json(const ResidueTable &t) {
  json rows = json::object();
  for (auto &[v, r] : t.rows)
    rows[std::to_string(v)] = {{"degree", r.degree}, {"residue", r.residue}, {"target", r.target}};
  return {{"modulus", t.modulus}, {"feasible", t.feasible}, {"offenders", t.offenders()}, {"rows", rows}};
}

inline json to_json(const DivVector &v) { return v.g; }

inline json to_json(const ExchangePair &x) {
  return {{"u", x.u}, {"w0", x.w0}, {"wd", x.wd}, {"e1", to_json(x.e1)}, {"e2", to_json(x.e2)}};
}

inline json to_json(const FixDigraph &g) {
  json arcs = json::array();
  for (auto &a : g.arcs) arcs.push_back({a.from, a.to});
  return {{"arcs", arcs}, {"bound", g.bound}, {"log", g.log}};
}

inline json to_json(const TurnPlan &p) {
  return {{"n", p.n},
          {"d", p.d},
          {"sequence", to_json(p.seq)},
          {"matching", to_json(p.matching)},
          {"digraph", to_json(p.digraph)},
          {"complex", to_json(p.complex)},
          {"residual_edges", p.residual.size()},
          {"start", p.start},
          {"finish", p.finish},
          {"residues", to_json(p.residues)},
          {"log", p.log}};
}

inline json to_json(const TourResult &r) {
  json j = {{"status", to_string(r.status)}, {"witness", nullptr}, {"nodes_expanded", r.nodes}, {"seconds", r.seconds}};
  if (r.witness) j["witness"] = r.witness->entries;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  return j;
}

inline json to_json(const TrailResult &r) {
  json j = {{"status", to_string(r.status)}, {"witness", nullptr}, {"nodes_expanded", r.nodes}, {"seconds", r.seconds}};
  if (r.witness) j["witness"] = r.witness->entries;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.residues) j["residues"] = to_json(*r.residues);
  return j;
}

inline json to_json(const JohnsonResult &r) {
  return {{"status", to_string(r.status)}, {"length", r.length},    {"proven", r.proven},
          {"witness", to_json(r.witness)}, {"nodes_expanded", r.nodes}, {"seconds", r.seconds}};
}

inline json to_json(const DiameterResult &r) {
  return {{"status", to_string(r.status)}, {"length", r.diameter}, {"proven", r.proven},
          {"witness", to_json(r.complex.facets())}, {"certificate", to_json(r.certificate)},
          {"nodes_expanded", r.nodes}, {"seconds", r.seconds}};
}

inline json to_json(const FractionalDecomp &x) {
  json list = json::array();
  for (std::size_t i = 0; i < x.cliques.size(); ++i)
    list.push_back({{"clique", to_json(x.cliques[i])}, {"weight", x.weights[i]}});
  return {{"n", x.n}, {"d", x.d}, {"method", to_string(x.method)}, {"mu", x.mu}, {"normal", x.normal},
          {"residual", x.residual}, {"sweeps", x.sweeps}, {"weights", list}};
}

inline json to_json(const StationarityReport &r) {
  return {{"seed", r.seed},
          {"steps", r.steps},
          {"skip", r.skip},
          {"tuples", r.tuples},
          {"expected", r.expected},
          {"max_deviation", r.max_deviation},
          {"tolerance", r.tolerance},
          {"within", r.within},
          {"worst", r.worst}};
}

inline json to_json(const Packing &p) {
  json ends = json::array();
  int worst = 0;
  for (auto &[s, c] : p.end_counts) worst = std::max(worst, c);
  json paths = json::array();
  for (auto &s : p.paths) paths.push_back(s.entries);
  return {{"seed", p.seed},
          {"paths", p.paths.size()},
          {"leftover_edges", p.leftover.size()},
          {"leftover_max_codegree", p.leftover_max_codegree},
          {"end_cap", p.end_cap},
          {"max_end_count", worst},
          {"packing", paths}};
}

}  // namespace xtt
