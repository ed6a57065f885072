#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hdt/engine.hpp"
#include "hdt/graph.hpp"
#include "hdt/target.hpp"

namespace hdt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest graph handled by the dense routines below.
inline constexpr std::size_t kDenseNodeCap = 2000;

/// Dense row-stochastic kernel together with its stationary distribution.
struct KernelMatrix {
  Matrix P;
  Vector target;
};

Vector to_vector(std::span<const double> v);

/// MH kernel with uniform-neighbor proposal targeting `mu` (normalized or
/// not; the stored target is normalized). Throws on non-positive mu.
KernelMatrix build_mh_kernel(const Graph& graph, std::span<const double> mu);

/// Self-repellent kernel K[x]_ij ~ P_ij (x_j/mu_j)^(-alpha) built on the MH
/// kernel for mu. The stored target is the distribution K[x] is reversible
/// for: pi_i ~ mu_i (x_i/mu_i)^(-alpha) sum_{j in N(i)+{i}} P_ij (x_j/mu_j)^(-alpha).
KernelMatrix build_srrw_kernel(const Graph& graph, std::span<const double> mu,
                               std::span<const double> x, double alpha);

/// max_ij |target_i P_ij - target_j P_ji|
double detailed_balance_residual(const KernelMatrix& k);
/// max_i |sum_j P_ij - 1|
double row_sum_residual(const KernelMatrix& k);

/// Eigenpairs of a reversible kernel. Column i of `left` is u_i, of `right`
/// is v_i, with u_i^T v_i = 1, u_1 = mu, v_1 = 1 and u_i = D_mu v_i.
/// Eigenvalues are sorted descending; the first nonzero entry of each v_i is
/// positive.
struct SpectralReport {
  Vector eigenvalues;
  Matrix left;
  Matrix right;
  Vector mu;
};

/// Throws std::invalid_argument for non-reversible kernels (use
/// empirical_clt_covariance there).
SpectralReport reversible_spectrum(const KernelMatrix& k, double tolerance = 1e-10);

/// sum_{i>=2} (1+l_i)/(1-l_i) u_i u_i^T. Throws std::domain_error when a
/// second eigenvalue equals 1 (disconnected chain).
Matrix covariance_base(const SpectralReport& s);
Matrix covariance_hdt(const Matrix& v_base, double alpha);
/// sum_{i>=2} (1+l_i)/((1-l_i)(2 alpha (l_i+1) + 1)) u_i u_i^T
Matrix covariance_srrw(const SpectralReport& s, double alpha);

double min_eigenvalue(const Matrix& symmetric);

struct CostComparison {
  double expected_expanded_degree = 0.0;  // E_mu[|N(i)| + 1]
  double cost_hdt = 2.0;
  double cost_srrw = 0.0;
  Matrix hdt_scaled;   // cost_hdt * V_hdt
  Matrix srrw_scaled;  // (2 / E) * cost_srrw * V_srrw
  double min_eigenvalue = 0.0;  // of srrw_scaled - hdt_scaled
};

CostComparison cost_scaled_comparison(const SpectralReport& s, const Graph& graph,
                                      std::span<const double> mu, double alpha);

/// Normalized pi[x]_i ~ mu_i (x_i/mu_i)^(-alpha).
Vector history_target(const Vector& mu, const Vector& x, double alpha);

struct OdeTrajectory {
  double step = 0.0;
  std::vector<Vector> points;  // x(0), x(h), ..., x(m h)
};

/// Fixed-step RK4 for dx/dt = pi[x] - x. Throws std::runtime_error if the
/// trajectory leaves the open simplex.
OdeTrajectory ode_integrate(const Vector& mu, double alpha, const Vector& x0, double h, std::size_t steps);

/// sum_i mu_i (x_i/mu_i)^(-alpha)
double lyapunov(const Vector& mu, double alpha, const Vector& x);
/// True when lyapunov() never grows by more than `slack` between points.
bool lyapunov_descent_check(const OdeTrajectory& t, const Vector& mu, double alpha, double slack = 1e-12);

/// Jacobian of pi[x] - x at x = mu: alpha mu 1^T - (alpha + 1) I.
Matrix jacobian_at_mu(const Vector& mu, double alpha);
/// Jacobian of pi[x] - x at an arbitrary interior x.
Matrix ode_jacobian(const Vector& mu, double alpha, const Vector& x);
/// Five-point central finite differences of pi[x] - x.
Matrix ode_jacobian_fd(const Vector& mu, double alpha, const Vector& x, double epsilon);
/// max |fd - analytic| at mu.
double jacobian_fd_check(const Vector& mu, double alpha, double epsilon);

/// Sample covariance of sqrt(n) (x_r - mu) over runs r, where x_r =
/// final_measure(r) is the empirical measure of run r after n steps.
Matrix empirical_clt_covariance(const Vector& mu, std::size_t runs, std::size_t horizon,
                                const std::function<std::vector<double>(std::size_t)>& final_measure,
                                unsigned threads = 0);

/// Same, with run r = run_chain(seed base_seed + r) over `horizon` steps and
/// no burn-in.
Matrix empirical_clt_covariance(const Graph& graph, const TargetWeights& weights,
                                ExperimentConfig config, std::size_t runs, std::size_t horizon,
                                unsigned threads = 0);

}  // namespace hdt
