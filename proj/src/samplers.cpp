#include "hdt/samplers.hpp"

#include <string>

namespace hdt {

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "mhrw") return SamplerKind::mhrw;
  if (name == "mtm") return SamplerKind::mtm;
  if (name == "mhda") return SamplerKind::mhda;
  if (name == "two_cycle") return SamplerKind::two_cycle;
  if (name == "srrw") return SamplerKind::srrw;
  throw ConfigError("unknown sampler '" + std::string(name) +
                    "' (expected mhrw, mtm, mhda, two_cycle or srrw)");
}

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::mhrw: return "mhrw";
    case SamplerKind::mtm: return "mtm";
    case SamplerKind::mhda: return "mhda";
    case SamplerKind::two_cycle: return "two_cycle";
    case SamplerKind::srrw: return "srrw";
  }
  return "?";
}

BalanceFunction parse_balance_function(std::string_view name) {
  if (name == "sqrt") return BalanceFunction::sqrt;
  if (name == "min1") return BalanceFunction::min1;
  if (name == "max1") return BalanceFunction::max1;
  if (name == "barker") return BalanceFunction::barker;
  if (name == "one_plus") return BalanceFunction::one_plus;
  throw ConfigError("unknown mtm_h '" + std::string(name) +
                    "' (expected sqrt, min1, max1, barker or one_plus)");
}

std::string_view to_string(BalanceFunction h) {
  switch (h) {
    case BalanceFunction::sqrt: return "sqrt";
    case BalanceFunction::min1: return "min1";
    case BalanceFunction::max1: return "max1";
    case BalanceFunction::barker: return "barker";
    case BalanceFunction::one_plus: return "one_plus";
  }
  return "?";
}

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double log_balance(BalanceFunction h, double log_u) noexcept {
  switch (h) {
    case BalanceFunction::sqrt: return 0.5 * log_u;
    case BalanceFunction::min1: return std::min(0.0, log_u);
    case BalanceFunction::max1: return std::max(0.0, log_u);
    case BalanceFunction::barker: return -softplus(-log_u);
    case BalanceFunction::one_plus: return softplus(log_u);
  }
  return log_u;
}

double mh_base_probability(const Graph& g, const TargetWeights& mu, NodeId i, NodeId j) {
  const double di = static_cast<double>(g.degree(i));
  const double dj = static_cast<double>(g.degree(j));
  const double log_r = mu.log_mu_tilde(j) - mu.log_mu_tilde(i) + std::log(di) - std::log(dj);
  return accept_probability(log_r) / di;
}

KernelRow mh_base_row(const Graph& g, const TargetWeights& mu, NodeId i) {
  const auto nb = g.neighbors(i);
  KernelRow row;
  row.nodes.reserve(nb.size() + 1);
  row.probs.reserve(nb.size() + 1);
  double off = 0.0;
  std::size_t self_pos = nb.size();
  for (std::size_t t = 0; t < nb.size(); ++t) {
    if (self_pos == nb.size() && nb[t] > i) {
      self_pos = t;
      row.nodes.push_back(i);
      row.probs.push_back(0.0);
    }
    const double p = mh_base_probability(g, mu, i, nb[t]);
    row.nodes.push_back(nb[t]);
    row.probs.push_back(p);
    off += p;
  }
  if (self_pos == nb.size()) {
    row.nodes.push_back(i);
    row.probs.push_back(0.0);
  }
  double self = 1.0 - off;
  if (self < 0.0) {
    self = 0.0;
    row.clamped = true;
  }
  row.probs[self_pos] = self;
  return row;
}

}  // namespace hdt
