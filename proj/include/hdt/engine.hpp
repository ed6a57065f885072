#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdt/graph.hpp"
#include "hdt/metrics.hpp"
#include "hdt/samplers.hpp"
#include "hdt/target.hpp"

namespace hdt {

enum class InitialStateMode { uniform_random, low_degree, high_degree, fixed };

struct InitialState {
  InitialStateMode mode = InitialStateMode::uniform_random;
  std::uint64_t label = 0;  // original node label, for `fixed`
};

/// Which truth the NRMSE column is measured against, and hence which
/// estimator produces it: the plain chain average estimates sum_i mu_i f(i),
/// the importance-reweighted one estimates the uniform average of f.
enum class NrmseTruth { mu, uniform };

struct ExperimentConfig {
  SamplerKind sampler = SamplerKind::mhrw;
  double alpha = 0.0;
  MtmConfig mtm;
  std::string target = "uniform";  // uniform | degree | file:<path>
  std::uint64_t total_steps = 0;   // 0 when only a budget is given
  std::optional<double> burn_in_fraction;  // default 1/3 for step runs, none for budget runs
  FakeCountMode fake_count = FakeCountMode::unif;
  std::optional<double> lru_ratio;
  InitialState initial_state;
  std::size_t replications = 1;
  std::uint64_t base_seed = 1;
  std::optional<std::uint64_t> snapshot_stride;
  std::optional<double> budget;
  double label_p = 0.3;
  std::optional<NrmseTruth> nrmse_truth;

  /// Throws ConfigError on out-of-range values or invalid combinations.
  void validate() const;
  /// burn-in fraction actually used: the explicit value, else 1/3 for step
  /// runs and 0 for budget runs.
  double effective_burn_in_fraction() const;
  std::uint64_t burn_in_steps() const;
  std::uint64_t effective_stride() const;
};

struct Snapshot {
  std::uint64_t step = 0;
  double cost = 0.0;
  double tvd = 0.0;
  double estimate = 0.0;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<double> final_empirical_measure;  // post-burn-in visit frequencies
  std::uint64_t steps = 0;
  double cost = 0.0;
  double accept_rate = 0.0;
  std::uint64_t delayed_fire_count = 0;
  std::uint64_t clamped_self_loops = 0;
  std::vector<NodeId> trajectory;  // X_0..X_T, only when requested
};

/// Everything a chain needs besides its seed. Weights, labels and the graph
/// are shared read-only by all replications.
struct Experiment {
  const Graph* graph = nullptr;
  const TargetWeights* weights = nullptr;
  std::vector<double> mu;                  // normalized weights
  const LabelAssignment* labels = nullptr;  // optional; estimate column is 0 without it
  ExperimentConfig config;
  bool record_trajectory = false;

  Experiment(const Graph& g, const TargetWeights& w, ExperimentConfig cfg,
             const LabelAssignment* labels = nullptr);
};

NodeId pick_initial_state(const Graph& graph, const InitialState& init, Rng& rng);

/// One chain of total_steps steps (or until the budget would be exceeded
/// when config.budget is set). Visit counts feeding the target start at step
/// 0; the empirical measure and metrics use only post-burn-in samples.
RunResult run_chain(const Experiment& exp, std::uint64_t seed);

/// run_chain with config.budget required; snapshots sit on a cost grid of
/// budget / 100.
RunResult run_budget(const Experiment& exp, std::uint64_t seed);

struct CurveRow {
  double step = 0.0;  // mean over runs when rows are cost-indexed
  double cost = 0.0;  // mean over runs when rows are step-indexed
  MeanStderr tvd;
  MeanStderr estimate;
  std::optional<Nrmse> nrmse;
};

struct AggregatedCurve {
  std::vector<CurveRow> rows;
  std::vector<double> final_tvd;       // per replication, in seed order
  std::vector<double> final_estimate;  // per replication, in seed order
  double mean_steps = 0.0;
  double mean_cost = 0.0;
  double accept_rate = 0.0;
  std::uint64_t clamped_self_loops = 0;
};

/// Runs replications with seeds base_seed + r on up to `threads` worker
/// threads (0 picks the hardware concurrency) and aggregates in seed order.
AggregatedCurve run_replicated(const Experiment& exp, unsigned threads = 0);

/// Aggregates finished runs (all with the same snapshot schedule).
AggregatedCurve aggregate(const std::vector<RunResult>& runs, std::optional<double> truth,
                          bool cost_indexed);

/// Labels drawn once per experiment from the labels stream of `base_seed`.
LabelAssignment experiment_labels(const Graph& graph, std::span<const double> mu, double p,
                                  std::uint64_t base_seed);

/// Runs `count` jobs job(0..count-1) across worker threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job);

}  // namespace hdt
