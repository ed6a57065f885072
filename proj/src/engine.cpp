#include "hdt/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "hdt/errors.hpp"

namespace hdt {

void ExperimentConfig::validate() const {
  if (!budget && total_steps == 0) throw ConfigError("either total_steps or budget must be set");
  if (budget && !(*budget > 0.0)) throw ConfigError("budget must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and >= 0");
  mtm.validate();
  if (burn_in_fraction && !(*burn_in_fraction >= 0.0 && *burn_in_fraction < 1.0)) {
    throw ConfigError("burn_in_fraction must lie in [0, 1)");
  }
  if (lru_ratio) {
    if (!(*lru_ratio > 0.0 && *lru_ratio < 1.0)) throw ConfigError("lru_ratio must lie in (0, 1)");
    if (sampler == SamplerKind::srrw) {
      throw ConfigError("lru_ratio cannot be combined with sampler=srrw (SRRW needs exact counts)");
    }
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (snapshot_stride && *snapshot_stride == 0) throw ConfigError("snapshot_stride must be >= 1");
  if (!(label_p >= 0.0 && label_p <= 1.0)) throw ConfigError("label_p must lie in [0, 1]");
}

double ExperimentConfig::effective_burn_in_fraction() const {
  if (burn_in_fraction) return *burn_in_fraction;
  return budget ? 0.0 : 1.0 / 3.0;
}

std::uint64_t ExperimentConfig::burn_in_steps() const {
  return static_cast<std::uint64_t>(
      std::floor(effective_burn_in_fraction() * static_cast<double>(total_steps)));
}

std::uint64_t ExperimentConfig::effective_stride() const {
  if (snapshot_stride) return *snapshot_stride;
  return std::max<std::uint64_t>(1, total_steps / 100);
}

Experiment::Experiment(const Graph& g, const TargetWeights& w, ExperimentConfig cfg,
                       const LabelAssignment* label_set)
    : graph(&g), weights(&w), mu(w.normalized()), labels(label_set), config(std::move(cfg)) {
  if (w.size() != g.node_count()) throw ConfigError("target weights do not match the graph");
  if (g.node_count() < 2 || !g.is_connected()) {
    throw DataError("sampling needs a connected graph with at least two nodes");
  }
  config.validate();
  if (labels && !w.is_uniform() && !config.nrmse_truth) {
    throw ConfigError("non-uniform target: set nrmse_truth to 'mu' or 'uniform'");
  }
}

NodeId pick_initial_state(const Graph& graph, const InitialState& init, Rng& rng) {
  const std::size_t n = graph.node_count();
  switch (init.mode) {
    case InitialStateMode::uniform_random:
      return static_cast<NodeId>(uniform_index(rng, n));
    case InitialStateMode::fixed: {
      for (NodeId i = 0; i < n; ++i) {
        if (graph.original_label(i) == init.label) return i;
      }
      throw ConfigError("initial node " + std::to_string(init.label) + " is not in the graph");
    }
    case InitialStateMode::low_degree:
    case InitialStateMode::high_degree: {
      const double avg = graph.average_degree();
      const bool low = init.mode == InitialStateMode::low_degree;
      std::vector<NodeId> group;
      for (NodeId i = 0; i < n; ++i) {
        const auto d = static_cast<double>(graph.degree(i));
        if (low ? d < avg : d >= avg) group.push_back(i);
      }
      if (group.empty()) throw ConfigError("initial-state degree group is empty");
      return group[uniform_index(rng, group.size())];
    }
  }
  throw ConfigError("unknown initial state mode");
}

LabelAssignment experiment_labels(const Graph& graph, std::span<const double> mu, double p,
                                  std::uint64_t base_seed) {
  Rng rng = make_stream(base_seed, StreamDomain::labels);
  return assign_labels(graph, p, mu, rng);
}

namespace {

/// Post-burn-in measurement state, kept apart from the target's visit store.
class Recorder {
 public:
  explicit Recorder(const Experiment& exp) : exp_(exp), counts_(exp.graph->node_count(), 0.0) {
    if (exp.labels) {
      f_ = exp.labels->as_function();
      importance_ = exp.config.nrmse_truth == NrmseTruth::uniform;
    }
  }

  void record(NodeId x) {
    counts_[x] += 1.0;
    total_ += 1.0;
    if (!f_.empty()) {
      if (importance_) {
        const double w = 1.0 / exp_.weights->mu_tilde(x);
        num_ += f_[x] * w;
        den_ += w;
      } else {
        num_ += f_[x];
        den_ += 1.0;
      }
    }
  }

  Snapshot snapshot(std::uint64_t step, double cost) const {
    Snapshot s{step, cost, 0.0, 0.0};
    double l1 = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      const double x = total_ > 0.0 ? counts_[i] / total_ : 0.0;
      l1 += std::abs(x - exp_.mu[i]);
    }
    s.tvd = 0.5 * l1;
    s.estimate = den_ > 0.0 ? num_ / den_ : 0.0;
    return s;
  }

  std::vector<double> measure() const {
    std::vector<double> x(counts_.size(), 0.0);
    if (total_ > 0.0) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = counts_[i] / total_;
    }
    return x;
  }

 private:
  const Experiment& exp_;
  std::vector<double> counts_;
  double total_ = 0.0;
  std::vector<double> f_;
  bool importance_ = false;
  double num_ = 0.0;
  double den_ = 0.0;
};

template <class Oracle>
RunResult simulate(const Experiment& exp, Oracle& target, NodeId start, std::uint64_t seed) {
  const Graph& g = *exp.graph;
  const ExperimentConfig& cfg = exp.config;
  ChainRng rng(seed);
  ChainState state = ChainState::start_at(start);
  Recorder recorder(exp);
  RunResult result;
  if (exp.record_trajectory) result.trajectory.push_back(start);

  std::uint64_t accepted = 0;
  const bool budgeted = cfg.budget.has_value();
  const double budget = budgeted ? *cfg.budget : 0.0;
  const double burn_cost = cfg.effective_burn_in_fraction() * budget;
  const std::uint64_t burn_steps = budgeted ? 0 : cfg.burn_in_steps();
  const std::uint64_t stride = cfg.effective_stride();
  constexpr int kGridPoints = 100;
  int next_grid = 1;
  auto grid_cost = [&](int k) { return budget * k / kGridPoints; };

  while (budgeted || state.step < cfg.total_steps) {
    target.observe_position(state.current);
    const StepOutcome out = sampler_step(cfg.sampler, g, target, cfg.mtm, state, rng);
    if (budgeted && state.cumulative_cost + out.cost > budget) break;
    advance(state, out);
    target.record_visit(state.current);
    if (out.accepted) ++accepted;
    if (out.delayed_fired) ++result.delayed_fire_count;
    if (out.clamped_self_loop) ++result.clamped_self_loops;
    if (exp.record_trajectory) result.trajectory.push_back(state.current);

    if (budgeted) {
      if (state.cumulative_cost > burn_cost) recorder.record(state.current);
      for (; next_grid <= kGridPoints && grid_cost(next_grid) <= state.cumulative_cost; ++next_grid) {
        if (grid_cost(next_grid) > burn_cost) {
          result.snapshots.push_back(recorder.snapshot(state.step, grid_cost(next_grid)));
        }
      }
    } else if (state.step > burn_steps) {
      recorder.record(state.current);
      if (state.step % stride == 0 || state.step == cfg.total_steps) {
        result.snapshots.push_back(recorder.snapshot(state.step, state.cumulative_cost));
      }
    }
  }
  // Budget points the chain could not reach exactly report its final state.
  for (; budgeted && next_grid <= kGridPoints; ++next_grid) {
    if (grid_cost(next_grid) > burn_cost) {
      result.snapshots.push_back(recorder.snapshot(state.step, grid_cost(next_grid)));
    }
  }

  result.steps = state.step;
  result.cost = state.cumulative_cost;
  result.accept_rate = state.step ? static_cast<double>(accepted) / static_cast<double>(state.step) : 0.0;
  result.final_empirical_measure = recorder.measure();
  return result;
}

}  // namespace

RunResult run_chain(const Experiment& exp, std::uint64_t seed) {
  const Graph& g = *exp.graph;
  const ExperimentConfig& cfg = exp.config;
  Rng init_rng = make_stream(seed, StreamDomain::initial_state);
  const NodeId start = pick_initial_state(g, cfg.initial_state, init_rng);

  if (cfg.lru_ratio) {
    HistoryTarget target(cfg.alpha, *exp.weights, LruVisitStore::with_ratio(*cfg.lru_ratio, g, *exp.weights));
    return simulate(exp, target, start, seed);
  }
  Rng fake_rng = make_stream(seed, StreamDomain::fake_counts);
  HistoryTarget target(cfg.alpha, *exp.weights,
                       ExactVisitStore(make_fake_counts(cfg.fake_count, g, fake_rng)));
  return simulate(exp, target, start, seed);
}

RunResult run_budget(const Experiment& exp, std::uint64_t seed) {
  if (!exp.config.budget) throw ConfigError("run_budget needs a budget");
  return run_chain(exp, seed);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

AggregatedCurve aggregate(const std::vector<RunResult>& runs, std::optional<double> truth,
                          bool cost_indexed) {
  AggregatedCurve curve;
  if (runs.empty()) return curve;
  const std::size_t rows = runs.front().snapshots.size();
  for (const auto& r : runs) {
    if (r.snapshots.size() != rows) throw std::logic_error("replications have different snapshot schedules");
  }
  const double n = static_cast<double>(runs.size());
  std::vector<double> tvds(runs.size()), ests(runs.size());
  for (std::size_t k = 0; k < rows; ++k) {
    CurveRow row;
    double steps = 0.0, cost = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const Snapshot& s = runs[r].snapshots[k];
      steps += static_cast<double>(s.step);
      cost += s.cost;
      tvds[r] = s.tvd;
      ests[r] = s.estimate;
    }
    row.step = steps / n;
    row.cost = cost / n;
    if (!cost_indexed) row.step = static_cast<double>(runs.front().snapshots[k].step);
    else row.cost = runs.front().snapshots[k].cost;
    row.tvd = mean_stderr(tvds);
    row.estimate = mean_stderr(ests);
    if (truth) row.nrmse = nrmse(ests, *truth);
    curve.rows.push_back(row);
  }
  for (const auto& r : runs) {
    curve.final_tvd.push_back(r.snapshots.empty() ? 0.0 : r.snapshots.back().tvd);
    curve.final_estimate.push_back(r.snapshots.empty() ? 0.0 : r.snapshots.back().estimate);
    curve.mean_steps += static_cast<double>(r.steps) / n;
    curve.mean_cost += r.cost / n;
    curve.accept_rate += r.accept_rate / n;
    curve.clamped_self_loops += r.clamped_self_loops;
  }
  return curve;
}

AggregatedCurve run_replicated(const Experiment& exp, unsigned threads) {
  const std::size_t R = exp.config.replications;
  std::vector<RunResult> runs(R);
  parallel_for(R, threads, [&](std::size_t r) {
    runs[r] = run_chain(exp, exp.config.base_seed + r);
    runs[r].final_empirical_measure.clear();
    runs[r].final_empirical_measure.shrink_to_fit();
  });
  std::optional<double> truth;
  if (exp.labels) {
    truth = exp.config.nrmse_truth == NrmseTruth::uniform ? exp.labels->truth_uniform : exp.labels->truth_mu;
    if (*truth == 0.0) truth.reset();
  }
  return aggregate(runs, truth, exp.config.budget.has_value());
}

}  // namespace hdt
