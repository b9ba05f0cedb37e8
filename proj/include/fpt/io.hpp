#pragma once

// Input parsing (trees, pmf specs) and JSON / CSV serialization of every
// report type. The JSON object key order is fixed, so output is byte-stable.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fpt/error.hpp"
#include "fpt/finite_trees.hpp"
#include "fpt/gw_exact.hpp"
#include "fpt/gw_sim.hpp"
#include "fpt/numeric.hpp"
#include "fpt/pmf.hpp"
#include "fpt/tree.hpp"

namespace fpt::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips the double.
inline std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Inline JSON if the text starts with '{', otherwise a path to a file.
inline std::string inline_or_file(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return arg;
  return read_file(arg);
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Trees

struct TreeInput {
  std::vector<Edge> edges;
  std::optional<Vertex> root;
};

inline Vertex parse_vertex(const Json& j) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw Error(Errc::InvalidInput, "vertex ids must be non-negative integers");
  return static_cast<Vertex>(j.get<long long>());
}

/// `{"edges": [[u,v],...], "root": r}` or whitespace-separated `u v` lines
/// ('#' starts a comment).
inline TreeInput parse_tree_input(const std::string& text) {
  TreeInput in;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const Json j = parse_json(text);
    if (!j.contains("edges") || !j["edges"].is_array()) throw Error(Errc::InvalidInput, "tree JSON needs an \"edges\" array");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2) throw Error(Errc::InvalidInput, "each edge must be a pair [u, v]");
      in.edges.push_back({parse_vertex(e[0]), parse_vertex(e[1])});
    }
    if (j.contains("root")) in.root = parse_vertex(j["root"]);
    return in;
  }
  std::istringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    auto to_id = [&](const std::string& s) {
      Vertex v{};
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::InvalidInput, "line " + std::to_string(line_no) + ": bad vertex id '" + s + "'");
      }
      return v;
    };
    if (!(ls >> b) || (ls >> extra)) {
      throw Error(Errc::InvalidInput, "line " + std::to_string(line_no) + ": expected exactly two vertex ids");
    }
    in.edges.push_back({to_id(a), to_id(b)});
  }
  return in;
}

inline Tree load_tree(const std::string& text, std::optional<Vertex> root_override = std::nullopt) {
  TreeInput in = parse_tree_input(text);
  return build_tree(std::span<const Edge>(in.edges), root_override.value_or(in.root.value_or(0)));
}

// ---------------------------------------------------------------------------
// Pmf specs

/// A pmf as given by the user: explicit (value, probability-text) entries or a
/// truncated Poisson law. Probabilities keep their text so exact mode sees the
/// decimal the user wrote.
struct PmfSpec {
  std::vector<std::pair<std::size_t, std::string>> entries;
  std::optional<double> poisson;
  double eps = kDefaultPoissonEps;
  std::string label;

  [[nodiscard]] bool is_poisson() const noexcept { return poisson.has_value(); }
};

inline PmfSpec poisson_spec(double lambda, double eps = kDefaultPoissonEps) {
  PmfSpec s;
  s.poisson = lambda;
  s.eps = eps;
  return s;
}

inline PmfSpec parse_pmf_spec(const Json& j) {
  PmfSpec s;
  if (!j.is_object()) throw Error(Errc::InvalidInput, "pmf spec must be a JSON object");
  if (j.contains("label") && j["label"].is_string()) s.label = j["label"].get<std::string>();
  if (j.contains("eps")) {
    if (!j["eps"].is_number()) throw Error(Errc::InvalidInput, "\"eps\" must be a number");
    s.eps = j["eps"].get<double>();
  }
  if (j.contains("poisson")) {
    if (!j["poisson"].is_number()) throw Error(Errc::InvalidInput, "\"poisson\" must be a number");
    s.poisson = j["poisson"].get<double>();
    return s;
  }
  if (!j.contains("pmf") || !j["pmf"].is_object()) {
    throw Error(Errc::InvalidInput, "pmf spec needs a \"pmf\" object or a \"poisson\" rate");
  }
  for (const auto& [key, val] : j["pmf"].items()) {
    std::size_t k{};
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), k);
    if (ec != std::errc{} || ptr != key.data() + key.size()) {
      throw Error(Errc::InvalidInput, "pmf key '" + key + "' is not a non-negative integer");
    }
    if (val.is_number()) {
      s.entries.emplace_back(k, val.dump());
    } else if (val.is_string()) {
      s.entries.emplace_back(k, val.get<std::string>());
    } else {
      throw Error(Errc::InvalidInput, "pmf weight for " + key + " must be a number or a string");
    }
  }
  return s;
}

inline PmfSpec parse_pmf_spec(const std::string& text) { return parse_pmf_spec(parse_json(text)); }

inline double parse_probability(const std::string& text) {
  if (text.find('/') != std::string::npos) return to_double(parse_rational(text));
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw Error(Errc::InvalidInput, "not a probability: '" + text + "'");
  return v;
}

inline std::string default_label(const PmfSpec& s) {
  if (!s.label.empty()) return s.label;
  if (s.poisson) return "Poisson(" + fmt(*s.poisson) + ")";
  std::string out = "{";
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s.entries[i].first) + ": " + s.entries[i].second;
  }
  return out + "}";
}

inline Pmf to_float_pmf(const PmfSpec& s) {
  if (s.poisson) {
    Pmf p = poisson_truncated(*s.poisson, s.eps);
    p.set_label(default_label(s));
    return p;
  }
  std::vector<std::pair<std::size_t, double>> e;
  for (const auto& [k, txt] : s.entries) e.emplace_back(k, parse_probability(txt));
  return make_pmf<double>(e, default_label(s));
}

inline ExactPmf to_exact_pmf(const PmfSpec& s) {
  if (s.poisson) throw Error(Errc::InvalidInput, "a Poisson law has irrational weights; use --mode float");
  std::vector<std::pair<std::size_t, Rational>> e;
  for (const auto& [k, txt] : s.entries) e.emplace_back(k, parse_rational(txt));
  return make_pmf<Rational>(e, default_label(s));
}

/// Spec JSON that parses back to the same spec.
inline Json to_json(const PmfSpec& s) {
  Json j;
  if (s.poisson) {
    j["poisson"] = *s.poisson;
    j["eps"] = s.eps;
  } else {
    Json w = Json::object();
    for (const auto& [k, txt] : s.entries) {
      // Plain decimals go back out as numbers, fractions as strings.
      if (txt.find('/') == std::string::npos) {
        w[std::to_string(k)] = Json::parse(txt);
      } else {
        w[std::to_string(k)] = txt;
      }
    }
    j["pmf"] = w;
  }
  if (!s.label.empty()) j["label"] = s.label;
  return j;
}

// ---------------------------------------------------------------------------
// Scalars and type-indexed maps

inline Json num(double x) { return x; }
inline Json num(const Rational& x) { return to_double(x); }

inline std::string type_key(VertexType t) { return std::string(1, symbol(t)); }

template <class T>
Json type_map_json(const TypeMap<T>& m) {
  Json j;
  for (VertexType t : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
    j[type_key(t)] = num(m[index_of(t)]);
  }
  return j;
}

template <class T>
Json edge_map_json(const EdgeMap<T>& m) {
  Json j;
  for (VertexType a : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
    for (VertexType b : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
      j[type_key(a) + type_key(b)] = num(m[index_of(a)][index_of(b)]);
    }
  }
  return j;
}

template <class T>
Json exact_type_map_json(const TypeMap<T>& m) {
  Json j;
  for (VertexType t : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
    j[type_key(t)] = to_string(m[index_of(t)]);
  }
  return j;
}

template <class T>
Json exact_edge_map_json(const EdgeMap<T>& m) {
  Json j;
  for (VertexType a : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
    for (VertexType b : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
      j[type_key(a) + type_key(b)] = to_string(m[index_of(a)][index_of(b)]);
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Finite trees

inline Json counts_json(const TypeCounts& c) {
  return Json{{"n_plus", c.n_plus}, {"n_zero", c.n_zero}, {"n_minus", c.n_minus}};
}

inline Json types_json(const std::vector<VertexType>& types) {
  Json m = Json::object();
  for (std::size_t v = 0; v < types.size(); ++v) m[std::to_string(v)] = type_key(types[v]);
  return m;
}

inline Json theorem_json(const TheoremReport& r) {
  return Json{{"n_plus_minus_gap", r.n_plus_minus_gap},
              {"bound", r.bound},
              {"is_path", r.is_path},
              {"holds", r.holds},
              {"significant", r.significant},
              {"strictly_significant", r.strictly_significant},
              {"counts", counts_json(r.counts)}};
}

inline Json analyze_json(const Tree& t) {
  Json j;
  j["n"] = t.size();
  j["root"] = t.root();
  j["types"] = types_json(vertex_types(t));
  j["average_bias"] = to_string(average_bias(t));
  j["theorem"] = theorem_json(verify_theorem(t));
  return j;
}

inline Json trace_json(const ExplorationTrace& tr) {
  Json steps = Json::array();
  for (const StepRecord& s : tr.steps) {
    Json j;
    j["step"] = s.step_index;
    j["case"] = std::string(to_string(s.case_tag));
    if (s.expanded != kNoVertex) {
      j["expanded"] = s.expanded;
      j["expanded_degree"] = s.expanded_degree;
    }
    j["added"] = s.added_vertices;
    j["counts_after"] = counts_json(s.counts_after);
    j["delta"] = s.delta;
    j["claimed_min_delta"] = s.claimed_min_delta;
    j["guaranteed_min_delta"] = s.guaranteed_min_delta;
    j["meets_claim"] = s.meets_claim();
    j["meets_guarantee"] = s.meets_guarantee();
    if (s.case_tag == StepCase::PathExtension) {
      j["parent_degree"] = s.parent_degree;
      j["neutral_condition"] = s.neutral_condition;
      j["expanded_neutral_after"] = s.expanded_neutral_after;
    }
    steps.push_back(std::move(j));
  }
  return Json{{"root", tr.root},
              {"lower_bound", tr.lower_bound},
              {"final_counts", counts_json(tr.final_counts)},
              {"final_gap", tr.final_counts.gap()},
              {"steps", std::move(steps)}};
}

inline Json edges_json(const std::vector<Edge>& edges) {
  Json a = Json::array();
  for (const Edge& e : edges) a.push_back({e.u, e.v});
  return a;
}

inline Json exhaustive_json(const ExhaustiveSummary& s) {
  Json sizes = Json::array();
  for (const SizeSummary& z : s.sizes) {
    Json j{{"n", z.n},
           {"trees", z.trees},
           {"violations", z.violations},
           {"tight", z.tight},
           {"paths", z.paths},
           {"significance_violations", z.significance_violations}};
    if (z.min_slack != std::numeric_limits<std::int64_t>::max()) j["min_slack"] = z.min_slack;
    if (z.first_violation) j["first_violation"] = edges_json(*z.first_violation);
    sizes.push_back(std::move(j));
  }
  return Json{{"n_max", s.sizes.empty() ? 0 : s.sizes.back().n},
              {"trees", s.trees()},
              {"violations", s.violations()},
              {"significance_violations", s.significance_violations()},
              {"sizes", std::move(sizes)}};
}

// ---------------------------------------------------------------------------
// Exact densities

template <class T>
Json density_json(const DensityReport<T>& r, const PmfSpec& spec) {
  Json j;
  j["pmf_spec"] = to_json(spec);
  j["mode"] = is_exact_v<T> ? "exact" : "float";
  j["mean"] = num(r.mean);
  j["f"] = type_map_json(r.f);
  j["f_edge"] = edge_map_json(r.f_edge);
  j["f_parent"] = type_map_json(r.f_parent);
  j["correlation_gap"] = num(r.correlation_gap());
  j["correlation"] = r.correlation_gap() > 0 ? "positive" : (r.correlation_gap() < 0 ? "negative" : "zero");
  j["significance"] = std::string(to_string(r.significance));
  j["truncation_error"] = r.truncation_error;
  if constexpr (is_exact_v<T>) {
    j["exact"] = Json{{"f", exact_type_map_json(r.f)},
                      {"f_edge", exact_edge_map_json(r.f_edge)},
                      {"f_parent", exact_type_map_json(r.f_parent)},
                      {"correlation_gap", to_string(r.correlation_gap())}};
  }
  j["warnings"] = r.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// Monotonicity

template <class T>
Json mono_json(const MonoResult<T>& r, const PmfSpec& spec, bool with_points = false) {
  Json j;
  j["pmf_spec"] = to_json(spec);
  j["verdict"] = std::string(to_string(r.verdict));
  if (r.witness) {
    const auto& w = *r.witness;
    j["witness"] = Json{{"k_tilde", w.k_tilde},
                        {"k", w.k},
                        {"k_next", w.k_next},
                        {"value_k", num(w.value_k)},
                        {"value_next", num(w.value_next)}};
  } else {
    j["witness"] = nullptr;
  }
  j["certified_k_range"] = {r.certified_k_range.first, r.certified_k_range.second};
  j["k_tildes"] = r.k_tildes;
  if (r.tail) {
    j["tail"] = Json{{"k_tilde", r.tail->k_tilde}, {"k", r.tail->k}, {"value", num(r.tail->value)}, {"slack", num(r.tail->slack)}};
  }
  j["notes"] = r.notes;
  if (with_points) {
    Json pts = Json::array();
    for (const auto& p : r.points) pts.push_back({p.k_tilde, p.k, num(p.value)});
    j["points"] = std::move(pts);
  }
  return j;
}

inline Json scan_json(const MonoScan& s, double lo, double hi, double step) {
  Json pts = Json::array();
  for (const auto& p : s.points) pts.push_back(Json{{"lambda", p.lambda}, {"verdict", std::string(to_string(p.verdict))}});
  Json trans = Json::array();
  for (const auto& t : s.transitions) {
    trans.push_back(Json{{"lambda_lo", t.lambda_lo},
                         {"lambda_hi", t.lambda_hi},
                         {"from", std::string(to_string(t.from))},
                         {"to", std::string(to_string(t.to))}});
  }
  return Json{{"scan", {{"lo", lo}, {"hi", hi}, {"step", step}}}, {"points", std::move(pts)}, {"transitions", std::move(trans)}};
}

/// Figure-2 style grid: k_tilde,k,lambda,f.
template <class T>
void write_mono_grid_csv(std::ostream& os, const MonoResult<T>& r, double lambda, bool header = true) {
  if (header) os << "k_tilde,k,lambda,f\n";
  for (const auto& p : r.points) os << p.k_tilde << ',' << p.k << ',' << fmt(lambda) << ',' << fmt(to_double(p.value)) << '\n';
}

// ---------------------------------------------------------------------------
// Simulation

inline Json stat_json(const Stat& s) { return Json{{"ratio", s.mean}, {"stderr", s.se}}; }

inline Json sim_json(const SimEstimate& e, const PmfSpec& spec) {
  Json v, ed;
  for (VertexType t : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) v[type_key(t)] = stat_json(e.of(t));
  for (VertexType a : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
    for (VertexType b : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
      ed[type_key(a) + type_key(b)] = stat_json(e.of(a, b));
    }
  }
  return Json{{"pmf_spec", to_json(spec)},
              {"pmf", e.pmf_label},
              {"seed", e.seed},
              {"depth", e.m},
              {"replicas", e.replicas},
              {"surviving", e.surviving},
              {"survival_rate", e.survival_rate},
              {"vertex", std::move(v)},
              {"edge", std::move(ed)},
              {"warnings", e.warnings}};
}

inline void write_csv_header(std::ostream& os, std::uint64_t seed, const std::string& pmf) {
  os << "# seed=" << seed << " pmf=" << pmf << '\n';
}

/// m,type,ratio,stderr
inline void write_vertex_csv(std::ostream& os, const SimEstimate& e, bool header = true) {
  if (header) {
    write_csv_header(os, e.seed, e.pmf_label);
    os << "m,type,ratio,stderr\n";
  }
  for (VertexType t : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
    os << e.m << ',' << symbol(t) << ',' << fmt(e.of(t).mean) << ',' << fmt(e.of(t).se) << '\n';
  }
}

/// m,parent_type,child_type,ratio,stderr
inline void write_edge_csv(std::ostream& os, const SimEstimate& e, bool header = true) {
  if (header) {
    write_csv_header(os, e.seed, e.pmf_label);
    os << "m,parent_type,child_type,ratio,stderr\n";
  }
  for (VertexType a : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
    for (VertexType b : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
      os << e.m << ',' << symbol(a) << ',' << symbol(b) << ',' << fmt(e.of(a, b).mean) << ',' << fmt(e.of(a, b).se)
         << '\n';
    }
  }
}

/// Single-tree trace, one row per (m, type); stderr is empty.
inline void write_trace_csv(std::ostream& os, const ConvergenceTrace& tr) {
  os << "# seed=" << tr.seed << " replica=" << tr.replica << " pmf=" << tr.pmf_label << '\n';
  os << "m,type,ratio,stderr\n";
  for (const auto& row : tr.rows) {
    for (VertexType t : {VertexType::Positive, VertexType::Neutral, VertexType::Negative}) {
      os << row.m << ',' << symbol(t) << ',' << fmt(row.vertex[index_of(t)]) << ",\n";
    }
  }
}

inline Json trace_json(const ConvergenceTrace& tr) {
  Json rows = Json::array();
  for (const auto& r : tr.rows) {
    rows.push_back(Json{{"m", r.m}, {"n_m", r.n_m}, {"vertex", type_map_json(r.vertex)}, {"edge", edge_map_json(r.edge)}});
  }
  return Json{{"pmf", tr.pmf_label}, {"seed", tr.seed}, {"replica", tr.replica}, {"rows", std::move(rows)}};
}

}  // namespace fpt::io
