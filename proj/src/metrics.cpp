#include "hdt/metrics.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "hdt/errors.hpp"

namespace hdt {

double tvd(std::span<const double> x, std::span<const double> mu) {
  if (x.size() != mu.size()) throw std::invalid_argument("tvd: dimension mismatch");
  double l1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) l1 += std::abs(x[i] - mu[i]);
  return 0.5 * l1;
}

std::vector<double> empirical_measure(std::span<const NodeId> samples, std::size_t node_count) {
  if (samples.empty()) throw std::invalid_argument("empirical measure of an empty sample");
  std::vector<double> x(node_count, 0.0);
  for (NodeId s : samples) x.at(s) += 1.0;
  const double n = static_cast<double>(samples.size());
  for (auto& v : x) v /= n;
  return x;
}

double estimator(std::span<const NodeId> samples, std::span<const double> f) {
  if (samples.empty()) throw std::invalid_argument("estimator of an empty sample");
  double sum = 0.0;
  for (NodeId s : samples) sum += f[s];
  return sum / static_cast<double>(samples.size());
}

double is_estimator(std::span<const NodeId> samples, std::span<const double> f,
                    std::span<const double> mu_tilde) {
  if (samples.empty()) throw std::invalid_argument("estimator of an empty sample");
  double num = 0.0;
  double den = 0.0;
  for (NodeId s : samples) {
    const double w = 1.0 / mu_tilde[s];
    num += f[s] * w;
    den += w;
  }
  return num / den;
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

Nrmse nrmse(std::span<const double> estimates, double truth) {
  if (truth == 0.0) throw std::invalid_argument("nrmse undefined for truth = 0");
  if (estimates.empty()) throw std::invalid_argument("nrmse needs at least one estimate");
  std::vector<double> sq(estimates.size());
  for (std::size_t r = 0; r < sq.size(); ++r) sq[r] = (estimates[r] - truth) * (estimates[r] - truth);
  const auto mse = mean_stderr(sq);
  Nrmse out;
  const double rmse = std::sqrt(mse.mean);
  out.value = rmse / std::abs(truth);
  // d sqrt(m) / dm = 1 / (2 sqrt(m))
  out.std_error = rmse > 0.0 ? mse.std_error / (2.0 * rmse * std::abs(truth)) : 0.0;
  return out;
}

namespace {

void fill_truths(LabelAssignment& la, std::span<const double> mu) {
  if (mu.size() != la.labels.size()) throw std::invalid_argument("labels and mu differ in size");
  double pos = 0.0;
  la.truth_mu = 0.0;
  for (std::size_t i = 0; i < la.labels.size(); ++i) {
    if (la.labels[i]) {
      pos += 1.0;
      la.truth_mu += mu[i];
    }
  }
  la.truth_uniform = pos / static_cast<double>(la.labels.size());
}

}  // namespace

LabelAssignment assign_labels(const Graph& graph, double p, std::span<const double> mu, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("label_p must lie in [0, 1]");
  LabelAssignment la;
  la.probability = p;
  la.labels.resize(graph.node_count());
  std::bernoulli_distribution coin(p);
  for (auto& l : la.labels) l = coin(rng) ? 1 : 0;
  fill_truths(la, mu);
  return la;
}

void write_labels(std::ostream& out, const Graph& graph, const LabelAssignment& labels) {
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    out << graph.original_label(i) << ' ' << static_cast<int>(labels.labels[i]) << '\n';
  }
}

LabelAssignment read_labels(std::istream& in, const Graph& graph, std::span<const double> mu) {
  std::unordered_map<std::uint64_t, NodeId> by_label;
  for (NodeId i = 0; i < graph.node_count(); ++i) by_label.emplace(graph.original_label(i), i);
  LabelAssignment la;
  la.labels.assign(graph.node_count(), 0);
  std::vector<char> seen(graph.node_count(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::uint64_t node = 0;
    int label = 0;
    std::string first;
    if (!(fields >> first) || first.front() == '#') continue;
    std::istringstream node_in(first);
    if (!(node_in >> node) || !(fields >> label) || (label != 0 && label != 1)) {
      throw ParseError(line_no, "expected '<node> <0|1>'");
    }
    auto it = by_label.find(node);
    if (it == by_label.end()) continue;
    la.labels[it->second] = static_cast<std::uint8_t>(label);
    seen[it->second] = 1;
  }
  for (NodeId i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw DataError("label file has no entry for node " + std::to_string(graph.original_label(i)));
  }
  double pos = 0.0;
  for (auto l : la.labels) pos += l;
  la.probability = pos / static_cast<double>(la.labels.size());
  fill_truths(la, mu);
  return la;
}

}  // namespace hdt
