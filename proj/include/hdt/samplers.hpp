#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hdt/errors.hpp"
#include "hdt/graph.hpp"
#include "hdt/rng.hpp"
#include "hdt/target.hpp"

namespace hdt {

enum class SamplerKind { mhrw, mtm, mhda, two_cycle, srrw };

SamplerKind parse_sampler_kind(std::string_view name);
std::string_view to_string(SamplerKind kind);

/// Locally balanced weight functions for multiple-try proposals. Each
/// satisfies h(u) = u h(1/u).
enum class BalanceFunction {
  sqrt,       // sqrt(u)
  min1,       // min(1, u)
  max1,       // max(1, u)
  barker,     // u / (1 + u)
  one_plus,   // 1 + u
};

BalanceFunction parse_balance_function(std::string_view name);
std::string_view to_string(BalanceFunction h);

/// log h(exp(log_u)), stable for large |log_u|.
double log_balance(BalanceFunction h, double log_u) noexcept;

struct MtmConfig {
  std::size_t num_candidates = 3;
  BalanceFunction balance = BalanceFunction::sqrt;

  void validate() const {
    if (num_candidates < 1) throw ConfigError("mtm_k must be >= 1");
  }
};

struct ChainState {
  NodeId current = 0;
  NodeId last_visit = 0;  // MHDA: the node visited before `current`
  bool phase = false;     // 2-cycle: false runs MH, true runs MTM
  std::uint64_t step = 0;
  double cumulative_cost = 0.0;

  static ChainState start_at(NodeId node) { return ChainState{node, node, false, 0, 0.0}; }
};

struct StepOutcome {
  NodeId next = 0;
  NodeId last_visit = 0;
  bool accepted = false;
  bool delayed_fired = false;    // MHDA re-proposal branch was evaluated
  bool clamped_self_loop = false;  // SRRW base row had a negative self-loop
  double cost = 0.0;
};

/// Cost units charged per step.
inline constexpr double kMhCost = 2.0;
inline constexpr double kDelayedBranchCost = 2.0;
inline double mtm_cost(const MtmConfig& cfg) { return 2.0 * static_cast<double>(cfg.num_candidates); }
inline double srrw_cost(const Graph& g, NodeId i) { return 2.0 * static_cast<double>(g.degree_unchecked(i) + 1); }

/// Applies a step outcome: moves, counts the step, charges its cost and flips
/// the 2-cycle phase.
inline void advance(ChainState& state, const StepOutcome& out) {
  state.current = out.next;
  state.last_visit = out.last_visit;
  state.phase = !state.phase;
  ++state.step;
  state.cumulative_cost += out.cost;
}

/// log of the Hastings-corrected target ratio for a uniform-neighbor proposal
/// i -> j: log(pi_j d_i / (pi_i d_j)).
template <TargetOracle Oracle>
double log_mh_ratio(const Graph& g, const Oracle& target, NodeId i, NodeId j) {
  return target.log_ratio(i, j) + std::log(static_cast<double>(g.degree_unchecked(i))) -
         std::log(static_cast<double>(g.degree_unchecked(j)));
}

inline double accept_probability(double log_ratio) { return std::exp(std::min(0.0, log_ratio)); }

inline NodeId uniform_neighbor(const Graph& g, NodeId i, Rng& rng) {
  const auto nb = g.neighbors_unchecked(i);
  if (nb.empty()) throw DataError("node " + std::to_string(i) + " has no neighbors");
  return nb[uniform_index(rng, nb.size())];
}

template <TargetOracle Oracle>
StepOutcome mh_step(const Graph& g, const Oracle& target, const ChainState& s, ChainRng& rng) {
  const NodeId j = uniform_neighbor(g, s.current, rng.proposal);
  const double u = uniform01(rng.acceptance);
  const bool accept = u < accept_probability(log_mh_ratio(g, target, s.current, j));
  StepOutcome out;
  out.accepted = accept;
  out.next = accept ? j : s.current;
  out.last_visit = accept ? s.current : s.last_visit;
  out.cost = kMhCost;
  return out;
}

/// log w(to | from) = log h(pi_to d_from / (pi_from d_to)).
template <TargetOracle Oracle>
double mtm_log_weight(const Graph& g, const Oracle& target, BalanceFunction h, NodeId from, NodeId to) {
  return log_balance(h, log_mh_ratio(g, target, from, to));
}

inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -INFINITY;
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (double v : values) total += std::exp(v - peak);
  return peak + std::log(total);
}

/// Log acceptance probability of a multiple-try move from x to
/// candidates[selected] given the reference points drawn around it:
///   min{1, sum_j w(cand_j|x) / (w(x|y) + sum_j w(ref_j|y))}.
template <TargetOracle Oracle>
double mtm_log_acceptance(const Graph& g, const Oracle& target, BalanceFunction h, NodeId x,
                          std::span<const NodeId> candidates, std::size_t selected,
                          std::span<const NodeId> references) {
  const NodeId y = candidates[selected];
  std::vector<double> forward;
  forward.reserve(candidates.size());
  for (NodeId c : candidates) forward.push_back(mtm_log_weight(g, target, h, x, c));
  std::vector<double> backward;
  backward.reserve(references.size() + 1);
  backward.push_back(mtm_log_weight(g, target, h, y, x));
  for (NodeId r : references) backward.push_back(mtm_log_weight(g, target, h, y, r));
  return std::min(0.0, log_sum_exp(forward) - log_sum_exp(backward));
}

template <TargetOracle Oracle>
StepOutcome mtm_step(const Graph& g, const Oracle& target, const MtmConfig& cfg, const ChainState& s,
                     ChainRng& rng) {
  const NodeId x = s.current;
  const std::size_t k = cfg.num_candidates;
  std::vector<NodeId> candidates(k);
  for (auto& c : candidates) c = uniform_neighbor(g, x, rng.proposal);

  std::vector<double> logw(k);
  for (std::size_t j = 0; j < k; ++j) logw[j] = mtm_log_weight(g, target, cfg.balance, x, candidates[j]);
  const double peak = *std::max_element(logw.begin(), logw.end());
  std::vector<double> cdf(k);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    total += std::exp(logw[j] - peak);
    cdf[j] = total;
  }
  const double pick = uniform01(rng.acceptance) * total;
  std::size_t selected = static_cast<std::size_t>(
      std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin());
  selected = std::min(selected, k - 1);
  const NodeId y = candidates[selected];

  std::vector<NodeId> references(k - 1);
  for (auto& r : references) r = uniform_neighbor(g, y, rng.proposal);

  const double u = uniform01(rng.acceptance);
  const double log_a = mtm_log_acceptance(g, target, cfg.balance, x, candidates, selected, references);
  const bool accept = u < std::exp(log_a);

  StepOutcome out;
  out.accepted = accept;
  out.next = accept ? y : x;
  out.last_visit = accept ? x : s.last_visit;
  out.cost = mtm_cost(cfg);
  return out;
}

/// Delayed-acceptance step: a first MH test on k; if it passes and k is the
/// node we just came from, try once more with another neighbor r != k.
template <TargetOracle Oracle>
StepOutcome mhda_step(const Graph& g, const Oracle& target, const ChainState& s, ChainRng& rng) {
  const NodeId x = s.current;
  const NodeId k = uniform_neighbor(g, x, rng.proposal);
  const double p = uniform01(rng.acceptance);
  StepOutcome out;
  out.cost = kMhCost;
  if (!(p <= accept_probability(log_mh_ratio(g, target, x, k)))) {
    out.next = x;
    out.last_visit = s.last_visit;
    return out;
  }
  out.accepted = true;
  out.last_visit = x;
  out.next = k;
  const auto nb = g.neighbors_unchecked(x);
  if (k == s.last_visit && nb.size() > 1) {
    out.delayed_fired = true;
    out.cost += kDelayedBranchCost;
    // Uniform over N(x) \ {k}: draw among d-1 slots and skip k's position.
    const auto k_pos = static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), k) - nb.begin());
    std::size_t slot = uniform_index(rng.proposal, nb.size() - 1);
    if (slot >= k_pos) ++slot;
    const NodeId r = nb[slot];
    const double q = uniform01(rng.acceptance);
    const double to_r = std::min(0.0, 2.0 * log_mh_ratio(g, target, x, r));
    const double back_from_k = std::max(0.0, 2.0 * log_mh_ratio(g, target, k, x));
    if (q <= accept_probability(to_r + back_from_k)) out.next = r;
  }
  return out;
}

template <TargetOracle Oracle>
StepOutcome two_cycle_step(const Graph& g, const Oracle& target, const MtmConfig& cfg,
                           const ChainState& s, ChainRng& rng) {
  return s.phase ? mtm_step(g, target, cfg, s, rng) : mh_step(g, target, s, rng);
}

/// Base MH probability i -> j (j a neighbor of i) for target mu with a
/// uniform-neighbor proposal: (1/d_i) min{1, mu_j d_i / (mu_i d_j)}.
double mh_base_probability(const Graph& g, const TargetWeights& mu, NodeId i, NodeId j);

/// Row i of the base MH kernel over the expanded neighborhood, in ascending
/// node order. The self-loop entry is 1 - sum of the others, clamped at 0.
struct KernelRow {
  std::vector<NodeId> nodes;
  std::vector<double> probs;
  bool clamped = false;
};
KernelRow mh_base_row(const Graph& g, const TargetWeights& mu, NodeId i);

/// Self-repellent walk step: K_ij ~ P_ij (x_j / mu_j)^(-alpha) over the
/// expanded neighborhood of i, sampled by inverse CDF in node order.
template <TargetOracle Oracle>
StepOutcome srrw_step(const Graph& g, const Oracle& target, const ChainState& s, ChainRng& rng) {
  const NodeId i = s.current;
  const KernelRow row = mh_base_row(g, target.weights(), i);
  std::vector<double> logw(row.nodes.size());
  double peak = -INFINITY;
  for (std::size_t t = 0; t < row.nodes.size(); ++t) {
    logw[t] = row.probs[t] > 0.0 ? std::log(row.probs[t]) + target.log_repulsion(row.nodes[t]) : -INFINITY;
    peak = std::max(peak, logw[t]);
  }
  std::vector<double> cdf(row.nodes.size());
  double total = 0.0;
  for (std::size_t t = 0; t < row.nodes.size(); ++t) {
    total += std::exp(logw[t] - peak);
    cdf[t] = total;
  }
  const double pick = uniform01(rng.acceptance) * total;
  auto t = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin());
  t = std::min(t, row.nodes.size() - 1);
  // Never land on a zero-probability entry at the top of the CDF.
  while (t > 0 && logw[t] == -INFINITY) --t;

  StepOutcome out;
  out.next = row.nodes[t];
  out.accepted = out.next != i;
  out.last_visit = out.accepted ? i : s.last_visit;
  out.clamped_self_loop = row.clamped;
  out.cost = srrw_cost(g, i);
  return out;
}

template <TargetOracle Oracle>
StepOutcome sampler_step(SamplerKind kind, const Graph& g, const Oracle& target, const MtmConfig& cfg,
                         const ChainState& s, ChainRng& rng) {
  switch (kind) {
    case SamplerKind::mhrw: return mh_step(g, target, s, rng);
    case SamplerKind::mtm: return mtm_step(g, target, cfg, s, rng);
    case SamplerKind::mhda: return mhda_step(g, target, s, rng);
    case SamplerKind::two_cycle: return two_cycle_step(g, target, cfg, s, rng);
    case SamplerKind::srrw: return srrw_step(g, target, s, rng);
  }
  throw ConfigError("unknown sampler");
}

}  // namespace hdt
