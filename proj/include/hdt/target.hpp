#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdt/errors.hpp"
#include "hdt/graph.hpp"
#include "hdt/lru_cache.hpp"
#include "hdt/rng.hpp"

namespace hdt {

enum class WeightKind { uniform, degree, explicit_weights, energy };

/// Unnormalized target weights over the nodes of one graph. All weights are
/// strictly positive; logs are precomputed because every acceptance ratio is
/// evaluated in log space.
class TargetWeights {
 public:
  static TargetWeights uniform(const Graph& graph);
  static TargetWeights degree(const Graph& graph);
  /// Throws ConfigError if any weight is non-positive or non-finite.
  static TargetWeights explicit_weights(std::vector<double> weights);
  /// mu_i = exp(-energy(i)).
  static TargetWeights energy(const Graph& graph, const std::function<double(NodeId)>& energy);

  WeightKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return mu_.size(); }
  double mu_tilde(NodeId i) const { return mu_.at(i); }
  double log_mu_tilde(NodeId i) const noexcept { return log_mu_[i]; }

  /// The normalized target mu.
  std::vector<double> normalized() const;
  bool is_uniform() const noexcept { return kind_ == WeightKind::uniform; }

 private:
  TargetWeights(WeightKind kind, std::vector<double> log_mu);

  WeightKind kind_ = WeightKind::uniform;
  std::vector<double> mu_;
  std::vector<double> log_mu_;
};

/// Reads "<node> <weight>" lines ('#' comments allowed) where <node> is the
/// original label used in the graph's edge list. Every node must be covered.
TargetWeights load_target_weights(std::istream& in, const Graph& graph);
TargetWeights load_target_weights_file(const std::string& path, const Graph& graph);

WeightKind parse_weight_kind(std::string_view name);

/// Initial ("fake") visit counts that keep the history target well defined
/// before any real visit.
enum class FakeCountMode {
  unif,      // every node starts at 1
  deg,       // x_i = |N(i)| / sum_k |N(k)|
  non_unif,  // one Dirichlet(0.5) draw (sums to 1)
};

FakeCountMode parse_fake_count_mode(std::string_view name);
std::string_view to_string(FakeCountMode mode);

std::vector<double> make_fake_counts(FakeCountMode mode, const Graph& graph, Rng& rng);

/// Exact per-node visit counts. Counts start at the supplied (strictly
/// positive) fake counts and only ever grow, so every queried count is > 0.
class ExactVisitStore {
 public:
  explicit ExactVisitStore(std::vector<double> initial_counts);
  static ExactVisitStore with_default(std::size_t node_count, double default_count = 1.0);

  std::size_t size() const noexcept { return counts_.size(); }
  double count(NodeId i) const { return counts_.at(i); }
  double log_count(NodeId i) const noexcept { return log_counts_[i]; }
  std::uint64_t total_increments() const noexcept { return increments_; }

  void record_visit(NodeId i);
  void set_anchor(NodeId) noexcept {}

 private:
  std::vector<double> counts_;
  std::vector<double> log_counts_;
  std::uint64_t increments_ = 0;
};

/// Visit counts for at most `capacity` recently visited nodes. Counts of
/// untracked nodes are approximated from the cached part of the walker's
/// expanded neighborhood:
///
///   x_j ~ mu_j * mean_{k in N(i)+{i}, k cached} x_k / mu_k
///
/// where i is the anchor (the walker's current node). With no cached node in
/// that neighborhood the ratio x_j / mu_j is taken as 1.
///
/// Count lookups made while evaluating acceptance ratios do not refresh
/// recency; only `access` and `record_visit` do.
class LruVisitStore {
 public:
  LruVisitStore(std::size_t capacity, const Graph& graph, const TargetWeights& weights);
  /// Capacity ceil(ratio * node_count) for ratio in (0, 1).
  static LruVisitStore with_ratio(double ratio, const Graph& graph, const TargetWeights& weights);

  std::size_t capacity() const noexcept { return cache_.capacity(); }
  std::size_t size() const noexcept { return cache_.size(); }
  bool contains(NodeId i) const { return cache_.contains(i); }
  std::optional<double> peek(NodeId i) const { return cache_.peek(i); }
  /// Cached count of `i`, refreshing its recency.
  std::optional<double> access(NodeId i) { return cache_.get(i); }
  std::uint64_t total_increments() const noexcept { return increments_; }
  const LruCache<NodeId, double>& cache() const noexcept { return cache_; }

  void set_anchor(NodeId current) noexcept;
  NodeId anchor() const noexcept { return anchor_; }

  /// Estimated count of an untracked node `j` seen from `current`.
  double estimate(NodeId current, NodeId j) const;
  /// Count of `i`: cached value, else the estimate seen from the anchor.
  double count(NodeId i) const;
  double log_count(NodeId i) const { return std::log(count(i)); }

  /// Adds one visit to `i`. An untracked node is first materialized at its
  /// estimated count; inserting may evict the least recently used node.
  void record_visit(NodeId i);

 private:
  double mean_ratio(NodeId current) const;

  const Graph* graph_;
  const TargetWeights* weights_;
  LruCache<NodeId, double> cache_;
  NodeId anchor_ = 0;
  mutable std::optional<double> anchor_ratio_;
  std::uint64_t increments_ = 0;
};

template <class S>
concept VisitStore = requires(S& s, const S& cs, NodeId i) {
  { cs.log_count(i) } -> std::convertible_to<double>;
  s.record_visit(i);
  s.set_anchor(i);
};

/// History-free oracle: target ratios come from mu alone.
class PlainTarget {
 public:
  explicit PlainTarget(const TargetWeights& weights) : weights_(&weights) {}

  const TargetWeights& weights() const noexcept { return *weights_; }
  double alpha() const noexcept { return 0.0; }
  double log_ratio(NodeId i, NodeId j) const noexcept {
    return weights_->log_mu_tilde(j) - weights_->log_mu_tilde(i);
  }
  double log_repulsion(NodeId) const noexcept { return 0.0; }
  void observe_position(NodeId) noexcept {}
  void record_visit(NodeId) noexcept {}

 private:
  const TargetWeights* weights_;
};

/// History-driven target: pi_i ~ mu_i (x_i / mu_i)^(-alpha) evaluated on
/// unnormalized weights and visit counts.
template <VisitStore Store>
class HistoryTarget {
 public:
  HistoryTarget(double alpha, const TargetWeights& weights, Store store)
      : alpha_(alpha), weights_(&weights), store_(std::move(store)) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw ConfigError("alpha must be finite and >= 0");
    }
  }

  const TargetWeights& weights() const noexcept { return *weights_; }
  double alpha() const noexcept { return alpha_; }
  Store& store() noexcept { return store_; }
  const Store& store() const noexcept { return store_; }

  /// log(x_i / mu_i), the over-visit level of node i.
  double log_excess(NodeId i) const {
    return store_.log_count(i) - weights_->log_mu_tilde(i);
  }
  double log_pi_tilde(NodeId i) const { return weights_->log_mu_tilde(i) - alpha_ * log_excess(i); }
  double pi_tilde(NodeId i) const { return std::exp(log_pi_tilde(i)); }

  /// log(pi_j / pi_i). At alpha = 0 this is bit-identical to PlainTarget.
  double log_ratio(NodeId i, NodeId j) const {
    return (weights_->log_mu_tilde(j) - weights_->log_mu_tilde(i)) -
           alpha_ * (log_excess(j) - log_excess(i));
  }
  /// -alpha log(x_i / mu_i), the self-repellent factor used by SRRW.
  double log_repulsion(NodeId i) const { return -alpha_ * log_excess(i); }

  void observe_position(NodeId current) { store_.set_anchor(current); }
  void record_visit(NodeId i) { store_.record_visit(i); }

 private:
  double alpha_;
  const TargetWeights* weights_;
  Store store_;
};

template <class T>
concept TargetOracle = requires(T& t, const T& ct, NodeId i, NodeId j) {
  { ct.log_ratio(i, j) } -> std::convertible_to<double>;
  { ct.log_repulsion(i) } -> std::convertible_to<double>;
  { ct.weights() } -> std::same_as<const TargetWeights&>;
  t.observe_position(i);
  t.record_visit(i);
};

/// Normalized pi over all nodes, computed with a max-shift in log space.
template <class Oracle>
std::vector<double> normalized_history_target(const Oracle& target, std::size_t node_count) {
  std::vector<double> logs(node_count);
  double peak = -INFINITY;
  for (NodeId i = 0; i < node_count; ++i) {
    logs[i] = target.log_pi_tilde(i);
    peak = std::max(peak, logs[i]);
  }
  double total = 0.0;
  for (auto& v : logs) {
    v = std::exp(v - peak);
    total += v;
  }
  for (auto& v : logs) v /= total;
  return logs;
}

}  // namespace hdt
