#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hdt/graph.hpp"
#include "hdt/rng.hpp"

namespace hdt {

/// Half the L1 distance. Throws std::invalid_argument on a size mismatch.
double tvd(std::span<const double> x, std::span<const double> mu);

/// Visit frequencies of `samples` over `node_count` nodes.
std::vector<double> empirical_measure(std::span<const NodeId> samples, std::size_t node_count);

/// Plain MCMC average (1/T) sum f(X_s). Throws on an empty sample.
double estimator(std::span<const NodeId> samples, std::span<const double> f);

/// Self-normalized importance-weighted average
///   sum f(X_s)/mu(X_s) / sum 1/mu(X_s),
/// which estimates the uniform average of f from a chain targeting mu.
double is_estimator(std::span<const NodeId> samples, std::span<const double> f,
                    std::span<const double> mu_tilde);

struct Nrmse {
  double value = 0.0;
  double std_error = 0.0;  // delta-method standard error over runs
};

/// sqrt(mean (estimate - truth)^2) / truth. Throws if truth == 0 or no estimates.
Nrmse nrmse(std::span<const double> estimates, double truth);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};
/// Mean and standard error (sample sd / sqrt(n)); stderr is 0 for n < 2.
MeanStderr mean_stderr(std::span<const double> values);

/// Random binary node labels used as the test function for estimation.
struct LabelAssignment {
  std::vector<std::uint8_t> labels;
  double probability = 0.3;
  double truth_mu = 0.0;       // sum_i mu_i f(i)
  double truth_uniform = 0.0;  // |{i : f(i) = 1}| / N

  std::vector<double> as_function() const { return {labels.begin(), labels.end()}; }
};

/// Independent Bernoulli(p) label per node, drawn in node order from `rng`.
LabelAssignment assign_labels(const Graph& graph, double p, std::span<const double> mu, Rng& rng);

/// "<original_label> <label>" lines.
void write_labels(std::ostream& out, const Graph& graph, const LabelAssignment& labels);
LabelAssignment read_labels(std::istream& in, const Graph& graph, std::span<const double> mu);

}  // namespace hdt
