// fpt: command-line front end for friendship-paradox computations on trees.
//
// Exit codes: 0 the checked claim holds (or the command simply succeeded),
// 1 the claim fails, 2 usage or input error, 3 inconclusive.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fpt/fpt.hpp"

namespace {

using fpt::io::Json;

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

struct Common {
  std::string pmf;
  std::optional<double> poisson;
  double eps = fpt::kDefaultPoissonEps;
  std::size_t depth = 10;
  std::size_t replicas = 200;
  std::uint64_t seed = fpt::kDefaultSeed;
  std::string format = "json";
  std::string mode = "auto";
  unsigned threads = 1;
  std::string out;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw fpt::Error(fpt::Errc::InvalidInput, "cannot write '" + c.out + "'");
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

fpt::io::PmfSpec pmf_spec(const Common& c) {
  if (c.poisson && !c.pmf.empty()) throw fpt::Error(fpt::Errc::InvalidInput, "give either --pmf or --poisson, not both");
  if (c.poisson) return fpt::io::poisson_spec(*c.poisson, c.eps);
  if (c.pmf.empty()) throw fpt::Error(fpt::Errc::InvalidInput, "a pmf is required (--pmf or --poisson)");
  auto spec = fpt::io::parse_pmf_spec(fpt::io::inline_or_file(c.pmf));
  if (spec.poisson && c.eps != fpt::kDefaultPoissonEps) spec.eps = c.eps;
  return spec;
}

bool exact_mode(const Common& c, const fpt::io::PmfSpec& spec) {
  if (c.mode == "exact") return true;
  if (c.mode == "float") return false;
  // "auto": rational whenever the weights are.
  return !spec.is_poisson();
}

void add_pmf_flags(CLI::App* app, Common& c) {
  app->add_option("--pmf", c.pmf, "pmf spec: inline JSON or a file path");
  app->add_option("--poisson", c.poisson, "truncated Poisson(lambda) offspring law");
  app->add_option("--eps", c.eps, "Poisson truncation tail mass")->capture_default_str();
}

void add_output_flags(CLI::App* app, Common& c, std::vector<std::string> formats) {
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember(formats))->capture_default_str();
  app->add_option("--out", c.out, "write output to this file instead of stdout");
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Common& c, const std::string& path, std::optional<fpt::Vertex> root) {
  const fpt::Tree t = fpt::io::load_tree(fpt::io::read_file(path), root);
  const auto report = fpt::verify_theorem(t);
  if (c.format == "dot") {
    emit(c, fpt::export_colored_dot(t, fpt::vertex_types(t), path));
  } else {
    emit(c, dump(fpt::io::analyze_json(t)));
  }
  return report.holds ? kExitHolds : kExitFails;
}

int cmd_enumerate(const Common& c, std::size_t n_max) {
  const auto summary = fpt::exhaustive_check(n_max, c.threads);
  emit(c, dump(fpt::io::exhaustive_json(summary)));
  return summary.violations() == 0 ? kExitHolds : kExitFails;
}

int cmd_construct(const Common& c, const std::string& path, std::optional<fpt::Vertex> root) {
  const fpt::Tree t = fpt::io::load_tree(fpt::io::read_file(path), root);
  const auto trace = fpt::exploration_construction(t);
  emit(c, dump(fpt::io::trace_json(trace)));
  bool ok = trace.final_counts == fpt::type_counts(t);
  for (const auto& s : trace.steps) ok = ok && s.meets_claim();
  return ok ? kExitHolds : kExitFails;
}

template <class T>
int finish_exact(const Common& c, const fpt::BasicPmf<T>& p, const fpt::io::PmfSpec& spec) {
  const auto r = fpt::density_report(p);
  emit(c, dump(fpt::io::density_json(r, spec)));
  return r.significance == fpt::Significance::Insignificant ? kExitFails : kExitHolds;
}

int cmd_exact(const Common& c) {
  const auto spec = pmf_spec(c);
  if (exact_mode(c, spec)) return finish_exact(c, fpt::io::to_exact_pmf(spec), spec);
  return finish_exact(c, fpt::io::to_float_pmf(spec), spec);
}

struct MonoFlags {
  std::vector<double> scan;
  std::optional<std::size_t> k_max;
  double cert_eps = 1e-9;
  std::vector<std::size_t> k_tildes;
  bool all_points = false;
};

fpt::MonoOptions mono_options(const MonoFlags& m) {
  fpt::MonoOptions o;
  o.k_max = m.k_max;
  o.cert_eps = m.cert_eps;
  if (!m.k_tildes.empty()) o.k_tildes = m.k_tildes;
  o.stop_at_first = !m.all_points;
  return o;
}

int verdict_exit(fpt::MonoVerdict v) {
  switch (v) {
    case fpt::MonoVerdict::Holds: return kExitHolds;
    case fpt::MonoVerdict::Fails: return kExitFails;
    case fpt::MonoVerdict::Inconclusive: return kExitInconclusive;
  }
  return kExitUsage;
}

template <class T>
int finish_mono(const Common& c, const MonoFlags& m, const fpt::BasicPmf<T>& p, const fpt::io::PmfSpec& spec) {
  auto opt = mono_options(m);
  if (c.format == "csv") opt.stop_at_first = false;
  const auto r = fpt::mono_condition(p, opt);
  if (c.format == "csv") {
    std::ostringstream os;
    os << "# pmf=" << p.label() << " verdict=" << to_string(r.verdict) << '\n';
    fpt::io::write_mono_grid_csv(os, r, spec.poisson.value_or(0.0));
    emit(c, os.str());
  } else {
    emit(c, dump(fpt::io::mono_json(r, spec, m.all_points)));
  }
  return verdict_exit(r.verdict);
}

int cmd_mono(const Common& c, const MonoFlags& m) {
  if (!m.scan.empty()) {
    if (m.scan.size() != 3) throw fpt::Error(fpt::Errc::InvalidInput, "--scan takes lo hi step");
    const auto s = fpt::scan_poisson_mono(m.scan[0], m.scan[1], m.scan[2], mono_options(m), c.eps);
    emit(c, dump(fpt::io::scan_json(s, m.scan[0], m.scan[1], m.scan[2])));
    return kExitHolds;
  }
  const auto spec = pmf_spec(c);
  if (exact_mode(c, spec)) return finish_mono(c, m, fpt::io::to_exact_pmf(spec), spec);
  return finish_mono(c, m, fpt::io::to_float_pmf(spec), spec);
}

int cmd_simulate(const Common& c, const std::string& table, std::optional<std::uint64_t> replica) {
  const auto spec = pmf_spec(c);
  const fpt::Pmf p = fpt::io::to_float_pmf(spec);
  if (c.format == "dot") {
    std::uint64_t r = 0;
    if (replica) {
      r = *replica;
    } else if (auto alive = fpt::first_surviving_replica(p, c.depth, c.seed)) {
      r = *alive;
    }
    emit(c, fpt::export_colored_dot(fpt::sample_tree(p, c.depth, c.seed, r)));
    return kExitHolds;
  }
  if (table == "trace") {
    const auto tr = fpt::convergence_trace(p, c.depth, c.seed);
    if (c.format == "csv") {
      std::ostringstream os;
      fpt::io::write_trace_csv(os, tr);
      emit(c, os.str());
    } else {
      emit(c, dump(fpt::io::trace_json(tr)));
    }
    return kExitHolds;
  }
  const auto est = fpt::estimate(p, {c.depth, c.replicas, c.seed, c.threads});
  if (c.format == "csv") {
    std::ostringstream os;
    if (table == "edge") {
      fpt::io::write_edge_csv(os, est);
    } else {
      fpt::io::write_vertex_csv(os, est);
    }
    emit(c, os.str());
  } else {
    emit(c, dump(fpt::io::sim_json(est, spec)));
  }
  return kExitHolds;
}

// Figure presets: parameters pinned to the figure captions.
constexpr double kFig1Lambdas[] = {0.1, 0.5, 1.0, 2.0};
constexpr std::size_t kFig1Depth = 6;
constexpr double kFig2Lambdas[] = {1.5, 2.0, 3.0, 7.0};
const std::vector<std::size_t> kFig2KTildes = {1, 2, 5, 8, 10};

std::string fig1_dot(double lambda, std::uint64_t seed, Json& meta) {
  const fpt::Pmf p = fpt::poisson_truncated(lambda);
  if (auto r = fpt::first_surviving_replica(p, kFig1Depth, seed)) {
    meta["replica"] = *r;
    meta["survived"] = true;
    return fpt::export_colored_dot(fpt::sample_tree(p, kFig1Depth, seed, *r));
  }
  // Every attempt died out: show the first non-trivial tree. An extinct tree
  // is complete, so its finite-tree types are exact.
  meta["survived"] = false;
  for (std::uint64_t r = 0; r < fpt::kMaxSurvivalAttempts; ++r) {
    const auto st = fpt::sample_tree(p, kFig1Depth, seed, r);
    if (st.tree.size() >= 2) {
      meta["replica"] = r;
      return fpt::export_colored_dot(st.tree, fpt::vertex_types(st.tree),
                                     "extinct tree, seed " + std::to_string(seed) + " replica " + std::to_string(r));
    }
  }
  meta["replica"] = 0;
  return fpt::export_colored_dot(fpt::sample_tree(p, kFig1Depth, seed, 0));
}

int cmd_figures(const Common& c, const std::string& which) {
  namespace fs = std::filesystem;
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  Json summary;
  summary["figure"] = which;
  summary["seed"] = c.seed;
  Json files = Json::array();
  if (which == "fig1") {
    for (double lambda : kFig1Lambdas) {
      Json meta{{"lambda", lambda}, {"depth", kFig1Depth}};
      const std::string dot = fig1_dot(lambda, c.seed, meta);
      const fs::path file = dir / ("fig1_lambda_" + fpt::io::fmt(lambda) + ".dot");
      std::ofstream(file, std::ios::binary) << dot;
      meta["file"] = file.string();
      files.push_back(std::move(meta));
    }
  } else {
    const fs::path file = dir / "fig2.csv";
    std::ofstream os(file, std::ios::binary);
    os << "k_tilde,k,lambda,f\n";
    for (double lambda : kFig2Lambdas) {
      fpt::MonoOptions opt;
      opt.k_tildes = kFig2KTildes;
      opt.stop_at_first = false;
      const auto r = fpt::mono_condition_poisson(lambda, opt);
      fpt::io::write_mono_grid_csv(os, r, lambda, false);
      files.push_back(Json{{"lambda", lambda}, {"verdict", std::string(to_string(r.verdict))}, {"file", file.string()}});
    }
  }
  summary["outputs"] = std::move(files);
  std::cout << dump(summary);
  return kExitHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Friendship-paradox analyses on finite and Galton-Watson trees"};
  app.require_subcommand(1);
  Common c;

  std::string tree_path;
  std::optional<fpt::Vertex> root;
  auto* analyze = app.add_subcommand("analyze", "vertex types of a tree and the significance bound");
  analyze->add_option("tree", tree_path, "edge list or tree JSON file")->required();
  analyze->add_option("--root", root, "root vertex (default: from input, else 0)");
  add_output_flags(analyze, c, {"json", "dot"});

  std::size_t n_max = 8;
  auto* enumerate = app.add_subcommand("enumerate", "check the bound on every labelled tree up to n_max vertices");
  enumerate->add_option("n_max", n_max, "largest tree size")->capture_default_str();
  enumerate->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  add_output_flags(enumerate, c, {"json"});

  auto* construct = app.add_subcommand("construct", "replay the exploration construction on a tree");
  construct->add_option("tree", tree_path, "edge list or tree JSON file")->required();
  construct->add_option("--root", root, "root vertex for input parsing");
  add_output_flags(construct, c, {"json"});

  auto* exact = app.add_subcommand("exact", "limiting vertex and edge type densities");
  add_pmf_flags(exact, c);
  exact->add_option("--mode", c.mode, "arithmetic")->check(CLI::IsMember({"exact", "float", "auto"}))->capture_default_str();
  add_output_flags(exact, c, {"json"});

  MonoFlags mf;
  auto* mono = app.add_subcommand("mono", "monotonicity criterion for negative ++ correlation");
  add_pmf_flags(mono, c);
  mono->add_option("--mode", c.mode, "arithmetic")->check(CLI::IsMember({"exact", "float", "auto"}))->capture_default_str();
  mono->add_option("--scan", mf.scan, "scan Poisson rates: lo hi step")->expected(3);
  mono->add_option("--k-max", mf.k_max, "largest k compared");
  mono->add_option("--cert-eps", mf.cert_eps, "tail certification threshold")->capture_default_str();
  mono->add_option("--k-tilde", mf.k_tildes, "restrict k~ values")->delimiter(',');
  mono->add_flag("--all-points", mf.all_points, "evaluate and report the whole grid");
  add_output_flags(mono, c, {"json", "csv"});

  std::string table = "vertex";
  std::optional<std::uint64_t> replica;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates on sampled Galton-Watson trees");
  add_pmf_flags(simulate, c);
  simulate->add_option("--depth", c.depth, "depth m")->capture_default_str();
  simulate->add_option("--replicas", c.replicas, "number of sampled trees")->capture_default_str();
  simulate->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
  simulate->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  simulate->add_option("--table", table, "csv table")->check(CLI::IsMember({"vertex", "edge", "trace"}))->capture_default_str();
  simulate->add_option("--replica", replica, "replica stream for --format dot");
  add_output_flags(simulate, c, {"json", "csv", "dot"});

  std::string which;
  auto* figures = app.add_subcommand("figures", "regenerate figure data (--out is a directory)");
  figures->add_option("which", which, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
  figures->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
  figures->add_option("--out", c.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(c, tree_path, root);
    if (*enumerate) return cmd_enumerate(c, n_max);
    if (*construct) return cmd_construct(c, tree_path, root);
    if (*exact) return cmd_exact(c);
    if (*mono) return cmd_mono(c, mf);
    if (*simulate) return cmd_simulate(c, table, replica);
    if (*figures) return cmd_figures(c, which);
  } catch (const fpt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
