#include "hdt/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hdt/errors.hpp"

namespace hdt {

Vector to_vector(std::span<const double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

namespace {

void check_dense(const Graph& graph) {
  if (graph.node_count() > kDenseNodeCap) {
    throw ConfigError("dense analysis is limited to " + std::to_string(kDenseNodeCap) + " nodes (graph has " +
                      std::to_string(graph.node_count()) + ")");
  }
}

Vector normalized_positive(std::span<const double> mu, std::size_t n, const char* what) {
  if (mu.size() != n) throw std::invalid_argument(std::string(what) + " has the wrong dimension");
  Vector v = to_vector(mu);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0) || !std::isfinite(v(i))) {
      throw std::invalid_argument(std::string(what) + " must be strictly positive");
    }
  }
  return v / v.sum();
}

}  // namespace

KernelMatrix build_mh_kernel(const Graph& graph, std::span<const double> mu) {
  check_dense(graph);
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  KernelMatrix k;
  k.target = normalized_positive(mu, graph.node_count(), "mu");
  k.P = Matrix::Zero(n, n);
  for (NodeId i = 0; i < n; ++i) {
    const double di = static_cast<double>(graph.degree(i));
    double off = 0.0;
    for (NodeId j : graph.neighbors(i)) {
      const double dj = static_cast<double>(graph.degree(j));
      const double p = std::min(1.0, (k.target(j) * di) / (k.target(i) * dj)) / di;
      k.P(i, j) = p;
      off += p;
    }
    k.P(i, i) = std::max(0.0, 1.0 - off);
  }
  return k;
}

KernelMatrix build_srrw_kernel(const Graph& graph, std::span<const double> mu, std::span<const double> x,
                               double alpha) {
  KernelMatrix base = build_mh_kernel(graph, mu);
  const Vector xv = normalized_positive(x, graph.node_count(), "x");
  const Vector& m = base.target;
  const auto n = m.size();
  Vector repel(n);
  for (Eigen::Index i = 0; i < n; ++i) repel(i) = std::pow(xv(i) / m(i), -alpha);

  KernelMatrix k;
  k.P = Matrix::Zero(n, n);
  k.target = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (base.P(i, j) > 0.0) {
        k.P(i, j) = base.P(i, j) * repel(j);
        z += k.P(i, j);
      }
    }
    k.P.row(i) /= z;
    k.target(i) = m(i) * repel(i) * z;
  }
  k.target /= k.target.sum();
  return k;
}

double detailed_balance_residual(const KernelMatrix& k) {
  const Matrix flow = k.target.asDiagonal() * k.P;
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

double row_sum_residual(const KernelMatrix& k) {
  return (k.P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

SpectralReport reversible_spectrum(const KernelMatrix& k, double tolerance) {
  if (detailed_balance_residual(k) > tolerance) {
    throw std::invalid_argument(
        "kernel is not reversible with respect to its target; estimate the covariance with "
        "empirical_clt_covariance instead");
  }
  const Vector sq = k.target.array().sqrt();
  const Vector inv_sq = sq.cwiseInverse();
  Matrix s = sq.asDiagonal() * k.P * inv_sq.asDiagonal();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  const auto n = s.rows();
  SpectralReport r;
  r.mu = k.target;
  r.eigenvalues.resize(n);
  r.left.resize(n, n);
  r.right.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index src = n - 1 - c;  // solver sorts ascending
    double lambda = solver.eigenvalues()(src);
    // Exact +-1 matter downstream: (1 + l)/(1 - l) must vanish at l = -1.
    if (std::abs(lambda - 1.0) < 1e-12) lambda = 1.0;
    if (std::abs(lambda + 1.0) < 1e-12) lambda = -1.0;
    r.eigenvalues(c) = lambda;
    Vector phi = solver.eigenvectors().col(src);
    Vector v = inv_sq.cwiseProduct(phi);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) {
          phi = -phi;
          v = -v;
        }
        break;
      }
    }
    r.right.col(c) = v;
    r.left.col(c) = sq.cwiseProduct(phi);
  }
  return r;
}

namespace {

template <class Factor>
Matrix spectral_sum(const SpectralReport& s, Factor factor) {
  const auto n = s.eigenvalues.size();
  Matrix v = Matrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double lambda = s.eigenvalues(i);
    if (lambda >= 1.0 - 1e-10) {
      throw std::domain_error("second eigenvalue is 1: the chain is reducible and has no finite covariance");
    }
    const double f = factor(lambda);
    if (f == 0.0) continue;
    v += f * s.left.col(i) * s.left.col(i).transpose();
  }
  return v;
}

}  // namespace

Matrix covariance_base(const SpectralReport& s) {
  return spectral_sum(s, [](double l) { return (1.0 + l) / (1.0 - l); });
}

Matrix covariance_hdt(const Matrix& v_base, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  return v_base / (2.0 * alpha + 1.0);
}

Matrix covariance_srrw(const SpectralReport& s, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  return spectral_sum(s, [alpha](double l) {
    return (1.0 + l) / ((1.0 - l) * (2.0 * alpha * (l + 1.0) + 1.0));
  });
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (symmetric + symmetric.transpose()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

CostComparison cost_scaled_comparison(const SpectralReport& s, const Graph& graph,
                                      std::span<const double> mu, double alpha) {
  const Vector m = normalized_positive(mu, graph.node_count(), "mu");
  CostComparison c;
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    c.expected_expanded_degree += m(i) * static_cast<double>(graph.degree(i) + 1);
  }
  c.cost_hdt = 2.0;
  c.cost_srrw = 2.0 * c.expected_expanded_degree;
  const Matrix base = covariance_base(s);
  c.hdt_scaled = c.cost_hdt * covariance_hdt(base, alpha);
  c.srrw_scaled = (2.0 / c.expected_expanded_degree) * c.cost_srrw * covariance_srrw(s, alpha);
  c.min_eigenvalue = min_eigenvalue(c.srrw_scaled - c.hdt_scaled);
  return c;
}

Vector history_target(const Vector& mu, const Vector& x, double alpha) {
  Vector logw(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    logw(i) = std::log(mu(i)) - alpha * (std::log(x(i)) - std::log(mu(i)));
  }
  Vector w = (logw.array() - logw.maxCoeff()).exp();
  return w / w.sum();
}

namespace {

bool interior(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0.0) || !std::isfinite(x(i))) return false;
  }
  return true;
}

Vector drift(const Vector& mu, double alpha, const Vector& x) { return history_target(mu, x, alpha) - x; }

}  // namespace

OdeTrajectory ode_integrate(const Vector& mu, double alpha, const Vector& x0, double h, std::size_t steps) {
  if (!interior(x0)) throw std::invalid_argument("ode start point must be strictly positive");
  if (!(h > 0.0)) throw std::invalid_argument("ode step must be positive");
  OdeTrajectory t;
  t.step = h;
  t.points.reserve(steps + 1);
  t.points.push_back(x0);
  Vector x = x0;
  for (std::size_t s = 0; s < steps; ++s) {
    auto at = [&](const Vector& p) {
      if (!interior(p)) {
        throw std::runtime_error("ode trajectory left the simplex interior at step " + std::to_string(s) +
                                 "; use a smaller step size");
      }
      return drift(mu, alpha, p);
    };
    const Vector k1 = at(x);
    const Vector k2 = at(x + 0.5 * h * k1);
    const Vector k3 = at(x + 0.5 * h * k2);
    const Vector k4 = at(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!interior(x)) at(x);
    t.points.push_back(x);
  }
  return t;
}

double lyapunov(const Vector& mu, double alpha, const Vector& x) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) v += mu(i) * std::pow(x(i) / mu(i), -alpha);
  return v;
}

bool lyapunov_descent_check(const OdeTrajectory& t, const Vector& mu, double alpha, double slack) {
  for (std::size_t s = 1; s < t.points.size(); ++s) {
    if (lyapunov(mu, alpha, t.points[s]) > lyapunov(mu, alpha, t.points[s - 1]) + slack) return false;
  }
  return true;
}

Matrix jacobian_at_mu(const Vector& mu, double alpha) {
  const auto n = mu.size();
  return alpha * mu * Vector::Ones(n).transpose() - (alpha + 1.0) * Matrix::Identity(n, n);
}

Matrix ode_jacobian(const Vector& mu, double alpha, const Vector& x) {
  const Vector pi = history_target(mu, x, alpha);
  const auto n = mu.size();
  Matrix j(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) j(r, c) = alpha * pi(r) * pi(c) / x(c);
    j(r, r) = -alpha * pi(r) * (1.0 - pi(r)) / x(r) - 1.0;
  }
  return j;
}

Matrix ode_jacobian_fd(const Vector& mu, double alpha, const Vector& x, double epsilon) {
  const auto n = mu.size();
  Matrix j(n, n);
  auto shifted = [&](Eigen::Index c, double by) {
    Vector p = x;
    p(c) += by;
    return drift(mu, alpha, p);
  };
  // Five-point central stencil: the O(eps^2) two-point error grows like
  // (alpha / x)^3 and is too coarse near small coordinates.
  for (Eigen::Index c = 0; c < n; ++c) {
    j.col(c) = (8.0 * (shifted(c, epsilon) - shifted(c, -epsilon)) - (shifted(c, 2 * epsilon) - shifted(c, -2 * epsilon))) /
               (12.0 * epsilon);
  }
  return j;
}

double jacobian_fd_check(const Vector& mu, double alpha, double epsilon) {
  return (ode_jacobian_fd(mu, alpha, mu, epsilon) - jacobian_at_mu(mu, alpha)).cwiseAbs().maxCoeff();
}

Matrix empirical_clt_covariance(const Vector& mu, std::size_t runs, std::size_t horizon,
                                const std::function<std::vector<double>(std::size_t)>& final_measure,
                                unsigned threads) {
  if (runs < 2) throw std::invalid_argument("need at least two runs for a covariance");
  const auto n = mu.size();
  Matrix z(n, static_cast<Eigen::Index>(runs));
  const double scale = std::sqrt(static_cast<double>(horizon));
  parallel_for(runs, threads, [&](std::size_t r) {
    const std::vector<double> x = final_measure(r);
    if (static_cast<Eigen::Index>(x.size()) != n) throw std::invalid_argument("measure has the wrong dimension");
    z.col(static_cast<Eigen::Index>(r)) = scale * (to_vector(x) - mu);
  });
  const Vector mean = z.rowwise().mean();
  z.colwise() -= mean;
  return (z * z.transpose()) / static_cast<double>(runs - 1);
}

Matrix empirical_clt_covariance(const Graph& graph, const TargetWeights& weights, ExperimentConfig config,
                                std::size_t runs, std::size_t horizon, unsigned threads) {
  config.total_steps = horizon;
  config.budget.reset();
  config.burn_in_fraction = 0.0;
  config.snapshot_stride = horizon;
  config.replications = runs;
  const Experiment exp(graph, weights, config);
  return empirical_clt_covariance(to_vector(exp.mu), runs, horizon,
                                  [&](std::size_t r) { return run_chain(exp, config.base_seed + r).final_empirical_measure; },
                                  threads);
}

}  // namespace hdt
