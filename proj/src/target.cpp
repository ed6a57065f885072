#include "hdt/target.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace hdt {

TargetWeights::TargetWeights(WeightKind kind, std::vector<double> log_mu)
    : kind_(kind), log_mu_(std::move(log_mu)) {
  mu_.reserve(log_mu_.size());
  for (double l : log_mu_) mu_.push_back(std::exp(l));
}

TargetWeights TargetWeights::uniform(const Graph& graph) {
  return TargetWeights(WeightKind::uniform, std::vector<double>(graph.node_count(), 0.0));
}

TargetWeights TargetWeights::degree(const Graph& graph) {
  std::vector<double> logs(graph.node_count());
  for (NodeId i = 0; i < logs.size(); ++i) {
    const auto d = graph.degree(i);
    if (d == 0) throw DataError("degree target undefined on isolated node " + std::to_string(i));
    logs[i] = std::log(static_cast<double>(d));
  }
  return TargetWeights(WeightKind::degree, std::move(logs));
}

TargetWeights TargetWeights::explicit_weights(std::vector<double> weights) {
  if (weights.empty()) throw ConfigError("explicit target has no weights");
  std::vector<double> logs(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw ConfigError("target weight of node " + std::to_string(i) + " must be positive");
    }
    logs[i] = std::log(weights[i]);
  }
  TargetWeights w(WeightKind::explicit_weights, std::move(logs));
  // Keep the caller's values exactly rather than exp(log(w)).
  w.mu_ = std::move(weights);
  return w;
}

TargetWeights TargetWeights::energy(const Graph& graph, const std::function<double(NodeId)>& energy) {
  std::vector<double> logs(graph.node_count());
  for (NodeId i = 0; i < logs.size(); ++i) {
    const double h = energy(i);
    if (!std::isfinite(h)) throw ConfigError("energy must be finite");
    logs[i] = -h;
  }
  return TargetWeights(WeightKind::energy, std::move(logs));
}

std::vector<double> TargetWeights::normalized() const {
  const double peak = *std::max_element(log_mu_.begin(), log_mu_.end());
  std::vector<double> out(log_mu_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(log_mu_[i] - peak);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return out;
}

TargetWeights load_target_weights(std::istream& in, const Graph& graph) {
  std::unordered_map<std::uint64_t, NodeId> by_label;
  for (NodeId i = 0; i < graph.node_count(); ++i) by_label.emplace(graph.original_label(i), i);

  std::vector<double> weights(graph.node_count(), 0.0);
  std::vector<char> seen(graph.node_count(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string node_tok;
    if (!(fields >> node_tok) || node_tok.front() == '#') continue;
    std::uint64_t label = 0;
    auto [ptr, ec] = std::from_chars(node_tok.data(), node_tok.data() + node_tok.size(), label);
    if (ec != std::errc{} || ptr != node_tok.data() + node_tok.size()) {
      throw ParseError(line_no, "bad node id '" + node_tok + "'");
    }
    double weight = 0.0;
    std::string extra;
    if (!(fields >> weight) || (fields >> extra)) {
      throw ParseError(line_no, "expected '<node> <weight>'");
    }
    auto it = by_label.find(label);
    if (it == by_label.end()) continue;  // node outside the sampled component
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      throw ConfigError("line " + std::to_string(line_no) + ": target weight must be positive");
    }
    weights[it->second] = weight;
    seen[it->second] = 1;
  }
  for (NodeId i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw DataError("target file has no weight for node " + std::to_string(graph.original_label(i)));
    }
  }
  return TargetWeights::explicit_weights(std::move(weights));
}

TargetWeights load_target_weights_file(const std::string& path, const Graph& graph) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open target file '" + path + "'");
  return load_target_weights(in, graph);
}

WeightKind parse_weight_kind(std::string_view name) {
  if (name == "uniform") return WeightKind::uniform;
  if (name == "degree") return WeightKind::degree;
  if (name == "explicit") return WeightKind::explicit_weights;
  if (name == "energy") return WeightKind::energy;
  throw ConfigError("unknown target kind '" + std::string(name) + "'");
}

FakeCountMode parse_fake_count_mode(std::string_view name) {
  if (name == "unif") return FakeCountMode::unif;
  if (name == "deg") return FakeCountMode::deg;
  if (name == "non_unif") return FakeCountMode::non_unif;
  throw ConfigError("unknown fake_count '" + std::string(name) + "' (expected unif, deg or non_unif)");
}

std::string_view to_string(FakeCountMode mode) {
  switch (mode) {
    case FakeCountMode::unif: return "unif";
    case FakeCountMode::deg: return "deg";
    case FakeCountMode::non_unif: return "non_unif";
  }
  return "?";
}

std::vector<double> make_fake_counts(FakeCountMode mode, const Graph& graph, Rng& rng) {
  const std::size_t n = graph.node_count();
  std::vector<double> counts(n, 1.0);
  switch (mode) {
    case FakeCountMode::unif:
      break;
    case FakeCountMode::deg: {
      // Degree proportions summing to 1, like the Dirichlet draw below. Raw
      // degrees would outweigh thousands of real visits on dense graphs.
      double total = 0.0;
      for (NodeId i = 0; i < n; ++i) {
        counts[i] = static_cast<double>(std::max<std::size_t>(graph.degree(i), 1));
        total += counts[i];
      }
      for (auto& c : counts) c /= total;
      break;
    }
    case FakeCountMode::non_unif: {
      // Dirichlet(0.5) via normalized Gamma(0.5, 1) draws.
      std::gamma_distribution<double> gamma(0.5, 1.0);
      double total = 0.0;
      for (auto& c : counts) {
        c = gamma(rng);
        total += c;
      }
      for (auto& c : counts) c = std::max(c / total, std::numeric_limits<double>::min());
      break;
    }
  }
  return counts;
}

ExactVisitStore::ExactVisitStore(std::vector<double> initial_counts)
    : counts_(std::move(initial_counts)) {
  log_counts_.reserve(counts_.size());
  for (double c : counts_) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("initial visit counts must be positive");
    log_counts_.push_back(std::log(c));
  }
}

ExactVisitStore ExactVisitStore::with_default(std::size_t node_count, double default_count) {
  return ExactVisitStore(std::vector<double>(node_count, default_count));
}

void ExactVisitStore::record_visit(NodeId i) {
  counts_.at(i) += 1.0;
  log_counts_[i] = std::log(counts_[i]);
  ++increments_;
}

LruVisitStore::LruVisitStore(std::size_t capacity, const Graph& graph, const TargetWeights& weights)
    : graph_(&graph), weights_(&weights), cache_(capacity) {
  if (weights.size() != graph.node_count()) {
    throw ConfigError("target weights do not match the graph");
  }
}

LruVisitStore LruVisitStore::with_ratio(double ratio, const Graph& graph,
                                        const TargetWeights& weights) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("lru_ratio must lie in (0, 1)");
  const auto cap = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(graph.node_count())));
  return LruVisitStore(std::max<std::size_t>(cap, 1), graph, weights);
}

void LruVisitStore::set_anchor(NodeId current) noexcept {
  if (current != anchor_) {
    anchor_ = current;
    anchor_ratio_.reset();
  }
}

double LruVisitStore::mean_ratio(NodeId current) const {
  double sum = 0.0;
  std::size_t hits = 0;
  auto add = [&](NodeId k) {
    if (auto c = cache_.peek(k)) {
      sum += *c / weights_->mu_tilde(k);
      ++hits;
    }
  };
  add(current);
  for (NodeId k : graph_->neighbors(current)) add(k);
  return hits == 0 ? 1.0 : sum / static_cast<double>(hits);
}

double LruVisitStore::estimate(NodeId current, NodeId j) const {
  const double ratio = current == anchor_
                           ? (anchor_ratio_ ? *anchor_ratio_ : *(anchor_ratio_ = mean_ratio(current)))
                           : mean_ratio(current);
  return weights_->mu_tilde(j) * ratio;
}

double LruVisitStore::count(NodeId i) const {
  if (auto c = cache_.peek(i)) return *c;
  return estimate(anchor_, i);
}

void LruVisitStore::record_visit(NodeId i) {
  const double next = count(i) + 1.0;
  cache_.put(i, next);
  anchor_ratio_.reset();
  ++increments_;
}

}  // namespace hdt
