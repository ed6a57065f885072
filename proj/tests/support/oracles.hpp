#pragma once

// Independent reference computations. Deliberately written without the
// library's log-space helpers so that tests compare two different routes.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "hdt/graph.hpp"

namespace hdt::testing {

using Dense = Eigen::MatrixXd;
using Col = Eigen::VectorXd;

/// P_ij = Q_ij A_ij with Q uniform over neighbors, A the MH acceptance.
inline Dense oracle_mh_kernel(const Graph& g, const std::vector<double>& mu) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Dense p = Dense::Zero(n, n);
  for (NodeId i = 0; i < n; ++i) {
    double stay = 1.0;
    for (NodeId j : g.neighbors(i)) {
      const double qij = 1.0 / static_cast<double>(g.degree(i));
      const double qji = 1.0 / static_cast<double>(g.degree(j));
      const double a = std::min(1.0, (mu[j] * qji) / (mu[i] * qij));
      p(i, j) = qij * a;
      stay -= qij * a;
    }
    p(i, i) = stay;
  }
  return p;
}

/// Asymptotic covariance of the empirical measure via the fundamental
/// matrix Z = (I - P + 1 mu^T)^{-1}: D Z + Z^T D - D - mu mu^T.
inline Dense oracle_fundamental_covariance(const Dense& p, const Col& mu) {
  const auto n = p.rows();
  const Dense pi = Col::Ones(n) * mu.transpose();
  const Dense z = (Dense::Identity(n, n) - p + pi).inverse();
  const Dense d = mu.asDiagonal();
  return d * z + z.transpose() * d - d - mu * mu.transpose();
}

inline double oracle_balance(int which, double u) {
  switch (which) {
    case 0: return std::sqrt(u);
    case 1: return std::min(1.0, u);
    case 2: return std::max(1.0, u);
    case 3: return u / (1.0 + u);
    default: return 1.0 + u;
  }
}

/// Multiple-try weight w(to | from) = h(pi_to d_from / (pi_from d_to)).
inline double oracle_mtm_weight(const Graph& g, const std::vector<double>& pi, int h, NodeId from, NodeId to) {
  const double u = (pi[to] * static_cast<double>(g.degree(from))) / (pi[from] * static_cast<double>(g.degree(to)));
  return oracle_balance(h, u);
}

/// Acceptance of a multiple-try move in plain arithmetic.
inline double oracle_mtm_acceptance(const Graph& g, const std::vector<double>& pi, int h, NodeId x,
                                    const std::vector<NodeId>& candidates, std::size_t selected,
                                    const std::vector<NodeId>& references) {
  const NodeId y = candidates[selected];
  double num = 0.0;
  for (NodeId c : candidates) num += oracle_mtm_weight(g, pi, h, x, c);
  double den = oracle_mtm_weight(g, pi, h, y, x);
  for (NodeId r : references) den += oracle_mtm_weight(g, pi, h, y, r);
  return std::min(1.0, num / den);
}

/// Calls visit(tuple) for every length-k tuple over `alphabet`.
inline void for_each_tuple(const std::vector<NodeId>& alphabet, std::size_t k,
                           const std::function<void(const std::vector<NodeId>&)>& visit) {
  std::vector<std::size_t> idx(k, 0);
  std::vector<NodeId> tuple(k);
  while (true) {
    for (std::size_t t = 0; t < k; ++t) tuple[t] = alphabet[idx[t]];
    visit(tuple);
    std::size_t t = 0;
    while (t < k && ++idx[t] == alphabet.size()) idx[t++] = 0;
    if (t == k) return;
  }
}

inline std::vector<NodeId> neighbor_vector(const Graph& g, NodeId i) {
  auto nb = g.neighbors(i);
  return {nb.begin(), nb.end()};
}

/// Exact multiple-try kernel for a static target, by enumerating every
/// candidate tuple, selection and reference tuple.
inline Dense oracle_mtm_kernel(const Graph& g, const std::vector<double>& pi, int h, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Dense p = Dense::Zero(n, n);
  for (NodeId x = 0; x < n; ++x) {
    const auto nx = neighbor_vector(g, x);
    const double p_tuple = std::pow(1.0 / static_cast<double>(nx.size()), static_cast<double>(k));
    for_each_tuple(nx, k, [&](const std::vector<NodeId>& cand) {
      double wsum = 0.0;
      for (NodeId c : cand) wsum += oracle_mtm_weight(g, pi, h, x, c);
      for (std::size_t s = 0; s < k; ++s) {
        const NodeId y = cand[s];
        const double p_sel = oracle_mtm_weight(g, pi, h, x, y) / wsum;
        const auto ny = neighbor_vector(g, y);
        const double p_refs = std::pow(1.0 / static_cast<double>(ny.size()), static_cast<double>(k - 1));
        auto add = [&](const std::vector<NodeId>& refs) {
          const double a = oracle_mtm_acceptance(g, pi, h, x, cand, s, refs);
          const double mass = p_tuple * p_sel * p_refs;
          p(x, y) += mass * a;
          p(x, x) += mass * (1.0 - a);
        };
        if (k == 1) add({});
        else for_each_tuple(ny, k - 1, add);
      }
    });
  }
  return p;
}

/// Exact kernel of the delayed-acceptance chain on pairs (x, y = previous
/// node) for a static target. State (x, y) is indexed x * n + y.
inline Dense oracle_mhda_lifted_kernel(const Graph& g, const std::vector<double>& pi) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Dense p = Dense::Zero(n * n, n * n);
  auto d = [&](NodeId i) { return static_cast<double>(g.degree(i)); };
  for (NodeId x = 0; x < n; ++x) {
    for (NodeId y = 0; y < n; ++y) {
      const Eigen::Index from = x * n + y;
      const auto nx = neighbor_vector(g, x);
      for (NodeId k : nx) {
        const double pk = 1.0 / d(x);
        const double a1 = std::min(1.0, (pi[k] * d(x)) / (pi[x] * d(k)));
        p(from, from) += pk * (1.0 - a1);
        if (k == y && nx.size() > 1) {
          for (NodeId r : nx) {
            if (r == k) continue;
            const double pr = 1.0 / (d(x) - 1.0);
            const double t1 = std::min(1.0, std::pow((pi[r] * d(x)) / (pi[x] * d(r)), 2.0));
            const double t2 = std::max(1.0, std::pow((pi[x] * d(k)) / (pi[k] * d(x)), 2.0));
            const double a2 = std::min(1.0, t1 * t2);
            p(from, r * n + x) += pk * a1 * pr * a2;
            p(from, k * n + x) += pk * a1 * pr * (1.0 - a2);
          }
        } else {
          p(from, k * n + x) += pk * a1;
        }
      }
    }
  }
  return p;
}

/// Stationary row vector of a finite kernel by power iteration on the lazy
/// chain (I + P) / 2 from uniform.
inline Col oracle_stationary(const Dense& p, int iterations = 20000) {
  const auto n = p.rows();
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const Dense lazy = 0.5 * (Dense::Identity(n, n) + p);
  for (int t = 0; t < iterations; ++t) v = v * lazy;
  return v.transpose() / v.sum();
}

}  // namespace hdt::testing
