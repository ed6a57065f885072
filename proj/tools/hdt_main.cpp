#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "hdt/analysis.hpp"
#include "hdt/config.hpp"
#include "hdt/engine.hpp"
#include "hdt/errors.hpp"
#include "hdt/graph.hpp"
#include "hdt/metrics.hpp"
#include "hdt/report.hpp"

namespace {

using namespace hdt;

const std::vector<std::string> kConfigKeys = {
    "sampler",     "alpha",         "mtm_k",        "mtm_h",           "target",  "total_steps",
    "burn_in_fraction", "fake_count", "lru_ratio",  "initial_state",   "replications", "base_seed",
    "snapshot_stride",  "budget",     "label_p",    "nrmse_truth"};

/// Options shared by `run` and `budget`: a config file plus one flag per key.
struct ExperimentOptions {
  std::string config_path;
  std::string graph;
  std::string output;
  unsigned threads = 0;
  std::map<std::string, std::string> flags;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "key = value config file");
    cmd.add_option("--graph", graph, "edge list (overrides the config's graph key)");
    cmd.add_option("-o,--output", output, "CSV path (default stdout)");
    cmd.add_option("--threads", threads, "worker threads (0 = all cores)");
    for (const auto& key : kConfigKeys) cmd.add_option("--" + key, flags[key]);
  }

  /// Config file keys, then flags given on the command line.
  KeyValues resolve(const CLI::App& cmd) const {
    KeyValues kv;
    if (!config_path.empty()) kv = load_config_file(config_path);
    if (!graph.empty()) kv["graph"] = graph;
    for (const auto& [key, value] : flags) {
      if (cmd.count("--" + key) > 0) kv[key] = value;
    }
    if (!kv.count("graph")) throw ConfigError("no graph given (use --graph or a 'graph' config key)");
    return kv;
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DataError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> header_lines(const std::string& graph_path, const Graph& g,
                                      const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back("config: graph = " + graph_path);
  for (const auto& [k, v] : describe(cfg)) lines.push_back("config: " + k + " = " + v);
  lines.push_back("graph: nodes=" + std::to_string(g.node_count()) + " edges=" +
                  std::to_string(g.edge_count()) + " fingerprint=" + std::to_string(g.fingerprint()));
  lines.push_back("seeds: replication r uses base_seed + r = " + std::to_string(cfg.base_seed) + ".." +
                  std::to_string(cfg.base_seed + cfg.replications - 1));
  if (cfg.fake_count == FakeCountMode::non_unif) {
    lines.push_back("note: non_unif fake counts are one Dirichlet(0.5) draw, summing to 1");
  }
  if (cfg.fake_count == FakeCountMode::deg) {
    lines.push_back("note: deg fake counts are degree proportions, summing to 1");
  }
  if (cfg.sampler == SamplerKind::mtm || cfg.sampler == SamplerKind::two_cycle) {
    lines.push_back("note: multiple-try steps are charged 2K cost units");
  }
  if (cfg.sampler == SamplerKind::mhda) {
    lines.push_back("note: the delayed re-proposal is charged 2 extra cost units when it fires");
  }
  return lines;
}

std::string diagnostics(const std::string& name, const AggregatedCurve& c) {
  return "diagnostics: " + name + (name.empty() ? "" : " ") + "mean_steps=" + format_double(c.mean_steps) +
         " mean_cost=" + format_double(c.mean_cost) + " accept_rate=" + format_double(c.accept_rate) +
         " clamped_self_loops=" + std::to_string(c.clamped_self_loops);
}

void echo(const std::vector<std::string>& lines) {
  for (const auto& l : lines) {
    if (l.rfind("config: ", 0) == 0) std::cerr << l.substr(8) << '\n';
  }
}

int cmd_ingest(const std::string& path, bool reciprocal_only) {
  const Graph g = load_normalized_graph(path, !reciprocal_only);
  char buf[128];
  std::snprintf(buf, sizeof buf, "nodes=%zu edges=%zu avg_degree=%.3f", g.node_count(), g.edge_count(),
                g.average_degree());
  std::cout << buf << '\n';
  return 0;
}

int cmd_run(const ExperimentOptions& opts, const CLI::App& cmd) {
  const KeyValues kv = opts.resolve(cmd);
  const ExperimentConfig cfg = make_config(kv, {"graph"});
  cfg.validate();
  if (cfg.budget) throw ConfigError("'run' counts steps; use the 'budget' subcommand for budget runs");
  const Graph g = load_normalized_graph(kv.at("graph"));
  const TargetWeights w = resolve_target(cfg.target, g);
  const auto mu = w.normalized();
  const LabelAssignment labels = experiment_labels(g, mu, cfg.label_p, cfg.base_seed);
  const Experiment exp(g, w, cfg, &labels);
  const auto lines = header_lines(kv.at("graph"), g, cfg);
  echo(lines);
  const AggregatedCurve curve = run_replicated(exp, opts.threads);
  auto all = lines;
  all.push_back(diagnostics("", curve));
  Output out(opts.output);
  write_curve_csv(out.stream(), all, {{"", &curve}});
  return 0;
}

int cmd_budget(const ExperimentOptions& opts, const CLI::App& cmd) {
  const KeyValues kv = opts.resolve(cmd);
  ExperimentConfig cfg = make_config(kv, {"graph"});
  if (!cfg.budget) throw ConfigError("'budget' needs a budget");
  if (cfg.sampler == SamplerKind::srrw) throw ConfigError("'budget' compares an HDT sampler against SRRW; pick a non-SRRW sampler");
  cfg.total_steps = 0;
  cfg.validate();
  ExperimentConfig srrw = cfg;
  srrw.sampler = SamplerKind::srrw;
  srrw.lru_ratio.reset();

  const Graph g = load_normalized_graph(kv.at("graph"));
  const TargetWeights w = resolve_target(cfg.target, g);
  const auto mu = w.normalized();
  const LabelAssignment labels = experiment_labels(g, mu, cfg.label_p, cfg.base_seed);
  const Experiment hdt_exp(g, w, cfg, &labels);
  const Experiment srrw_exp(g, w, srrw, &labels);
  auto lines = header_lines(kv.at("graph"), g, cfg);
  echo(lines);
  const std::string hdt_name = "hdt-" + std::string(to_string(cfg.sampler));
  lines.push_back("curves: " + hdt_name + " and srrw share alpha, budget, target and seeds; rows sit on a "
                  "budget/100 cost grid and 'step' is the mean step count reached");
  const AggregatedCurve a = run_replicated(hdt_exp, opts.threads);
  const AggregatedCurve b = run_replicated(srrw_exp, opts.threads);
  lines.push_back(diagnostics(hdt_name, a));
  lines.push_back(diagnostics("srrw", b));
  Output out(opts.output);
  write_curve_csv(out.stream(), lines, {{hdt_name, &a}, {"srrw", &b}});
  return 0;
}

int cmd_spectral(const std::string& graph_path, const std::string& target, double alpha,
                 const std::string& output) {
  const Graph g = load_normalized_graph(graph_path);
  if (g.node_count() > kDenseNodeCap) {
    throw ConfigError("spectral analysis is limited to " + std::to_string(kDenseNodeCap) + " nodes (graph has " +
                      std::to_string(g.node_count()) + ")");
  }
  const TargetWeights w = resolve_target(target, g);
  const auto mu = w.normalized();
  const KernelMatrix k = build_mh_kernel(g, mu);
  const SpectralReport s = reversible_spectrum(k);
  const Matrix base = covariance_base(s);
  nlohmann::ordered_json meta;
  meta["graph"] = graph_path;
  meta["graph_fingerprint"] = std::to_string(g.fingerprint());
  meta["nodes"] = g.node_count();
  meta["alpha"] = alpha;
  meta["target"] = target;
  meta["formulas"] = {
      {"kernel", "MH, uniform neighbor proposal"},
      {"V_base", "sum_{i>=2} (1+l_i)/(1-l_i) u_i u_i^T"},
      {"V_hdt", "V_base / (2 alpha + 1)"},
      {"V_srrw", "sum_{i>=2} (1+l_i)/((1-l_i)(2 alpha (l_i+1) + 1)) u_i u_i^T"},
  };
  Output out(output);
  write_matrix_csv(out.stream(), meta.dump(),
                   {{"P", k.P},
                    {"eigenvalues", s.eigenvalues},
                    {"V_base", base},
                    {"V_hdt", covariance_hdt(base, alpha)},
                    {"V_srrw", covariance_srrw(s, alpha)}});
  return 0;
}

Vector parse_vector(const std::string& spec, const char* what) {
  if (spec.rfind("uniform:", 0) == 0) {
    const auto n = std::stoul(spec.substr(8));
    if (n == 0) throw ConfigError(std::string(what) + ": uniform:<n> needs n >= 1");
    return Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  }
  std::vector<double> values;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": bad number '" + item + "'");
    }
  }
  Vector v = to_vector(values);
  if (v.size() == 0 || (v.array() <= 0.0).any()) {
    throw ConfigError(std::string(what) + ": expected positive comma-separated values or uniform:<n>");
  }
  return v / v.sum();
}

int cmd_ode(const std::string& mu_spec, const std::string& x0_spec, double alpha, double h, std::size_t steps,
            const std::string& output) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  const Vector mu = parse_vector(mu_spec, "mu");
  const Vector x0 = x0_spec.empty() ? mu : parse_vector(x0_spec, "x0");
  if (x0.size() != mu.size()) throw ConfigError("x0 and mu differ in dimension");
  const OdeTrajectory t = ode_integrate(mu, alpha, x0, h, steps);
  Output out(output);
  write_trajectory_csv(out.stream(),
                       {"mu = " + mu_spec, "x0 = " + (x0_spec.empty() ? mu_spec : x0_spec),
                        "alpha = " + format_double(alpha), "h = " + format_double(h),
                        "steps = " + std::to_string(steps), "integrator: RK4 on dx/dt = pi[x] - x"},
                       t, mu, alpha);
  return 0;
}

int cmd_labels(const std::string& graph_path, double p, std::uint64_t seed, const std::string& output) {
  const Graph g = load_normalized_graph(graph_path);
  const auto mu = TargetWeights::uniform(g).normalized();
  const LabelAssignment labels = experiment_labels(g, mu, p, seed);
  Output out(output);
  write_labels(out.stream(), g, labels);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"History-driven target MCMC samplers for graphs"};
  app.require_subcommand(1);

  std::string graph_path;
  bool reciprocal_only = false;
  auto* ingest = app.add_subcommand("ingest", "Print node/edge statistics of the largest component");
  ingest->add_option("graph", graph_path, "edge list")->required();
  ingest->add_flag("--reciprocal-only", reciprocal_only, "keep only edges listed in both directions");

  ExperimentOptions run_opts;
  auto* run = app.add_subcommand("run", "Replicated fixed-length runs; CSV of TVD/estimate/NRMSE vs step");
  run_opts.attach(*run);

  ExperimentOptions budget_opts;
  auto* budget = app.add_subcommand("budget", "HDT sampler vs SRRW under one cost budget; CSV vs cost");
  budget_opts.attach(*budget);

  std::string target = "uniform";
  double alpha = 1.0;
  std::string output;
  auto* spectral = app.add_subcommand("spectral", "Kernel spectrum and covariance matrices (<= 2000 nodes)");
  spectral->add_option("--graph", graph_path)->required();
  spectral->add_option("--target", target, "uniform | degree | file:<path>");
  spectral->add_option("--alpha", alpha);
  spectral->add_option("-o,--output", output);

  std::string mu_spec, x0_spec;
  double h = 0.01;
  std::size_t steps = 1000;
  auto* ode = app.add_subcommand("ode", "Integrate dx/dt = pi[x] - x");
  ode->add_option("--mu", mu_spec, "comma-separated weights or uniform:<n>")->required();
  ode->add_option("--x0", x0_spec, "start point (default mu)");
  ode->add_option("--alpha", alpha);
  ode->add_option("--step-size", h, "integrator step");
  ode->add_option("--steps", steps);
  ode->add_option("-o,--output", output);

  double label_p = 0.3;
  std::uint64_t seed = 1;
  auto* labels = app.add_subcommand("labels", "Draw Bernoulli(p) node labels");
  labels->add_option("--graph", graph_path)->required();
  labels->add_option("--p", label_p);
  labels->add_option("--seed", seed);
  labels->add_option("-o,--output", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return cmd_ingest(graph_path, reciprocal_only);
    if (*run) return cmd_run(run_opts, *run);
    if (*budget) return cmd_budget(budget_opts, *budget);
    if (*spectral) return cmd_spectral(graph_path, target, alpha, output);
    if (*ode) return cmd_ode(mu_spec, x0_spec, alpha, h, steps, output);
    if (*labels) {
      if (!(label_p >= 0.0 && label_p <= 1.0)) throw ConfigError("--p must lie in [0, 1]");
      return cmd_labels(graph_path, label_p, seed, output);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
