#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "generators.hpp"
#include "hdt/analysis.hpp"
#include "oracles.hpp"

using namespace hdt;
using namespace hdt::testing;

namespace {

std::vector<double> uniform_mu(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

// Values frozen from the independent closed forms below.
// Triangle MH kernel, uniform target: V_base = (1/3)(D - mu mu^T).
constexpr double kTriangleBaseDiag = 2.0 / 27.0;
constexpr double kTriangleHdtDiag = 2.0 / 81.0;   // / (2*1 + 1)
constexpr double kTriangleSrrwDiag = 1.0 / 27.0;  // factor 1/(2*(1/2) + 1) on lambda = -1/2
constexpr double kStarExpandedDegree = 8.0 / 3.0;
constexpr double kLyapunovExample = 10.0 / 9.0;

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("frozen triangle values agree with their closed forms") {
    const Col mu = Col::Constant(3, 1.0 / 3.0);
    const Dense closed = (1.0 / 3.0) * (Dense(mu.asDiagonal()) - mu * mu.transpose());
    CHECK(closed(0, 0) == doctest::Approx(kTriangleBaseDiag).epsilon(1e-15));
    CHECK(closed(0, 0) / 3.0 == doctest::Approx(kTriangleHdtDiag).epsilon(1e-15));
    CHECK(closed(0, 0) / 2.0 == doctest::Approx(kTriangleSrrwDiag).epsilon(1e-15));
    CHECK((6.0 + 5.0 * 2.0) / 6.0 == doctest::Approx(kStarExpandedDegree));
    CHECK((1.0 / 3.0) * (2.0 / 3.0 + 4.0 / 3.0 + 4.0 / 3.0) == doctest::Approx(kLyapunovExample));
  }

  TEST_CASE("mh kernel examples") {
    const auto tri = build_mh_kernel(triangle(), uniform_mu(3));
    CHECK(tri.P(0, 0) == 0.0);
    CHECK(tri.P(0, 1) == doctest::Approx(0.5));
    const auto p2 = build_mh_kernel(path(2), uniform_mu(2));
    CHECK(p2.P(0, 1) == 1.0);
    CHECK(p2.P(0, 0) == 0.0);
    const auto st = build_mh_kernel(star(5), uniform_mu(6));
    CHECK(st.P(1, 0) == doctest::Approx(0.2));
    CHECK(st.P(1, 1) == doctest::Approx(0.8));
    CHECK(st.P(0, 1) == doctest::Approx(0.2));
    CHECK(st.P(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(build_mh_kernel(triangle(), std::vector<double>{0.5, 0.5, 0.0}), std::invalid_argument);
  }

  TEST_CASE("property: kernels are stochastic, supported on neighborhoods and reversible") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 25);
      const Graph g = random_connected(n, n, rng);
      const auto mu = random_simplex_point(n, rng);
      const auto k = build_mh_kernel(g, mu);
      CHECK(row_sum_residual(k) < 1e-12);
      CHECK(detailed_balance_residual(k) < 1e-12);
      CHECK((k.P - oracle_mh_kernel(g, mu)).cwiseAbs().maxCoeff() < 1e-15);
      for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
          if (k.P(i, j) != 0.0) CHECK((i == j || g.has_edge(i, j)));

      const auto x = random_simplex_point(n, rng);
      const double alpha = random_real(rng, 0.0, 5.0);
      const auto s = build_srrw_kernel(g, mu, x, alpha);
      CHECK(row_sum_residual(s) < 1e-12);
      CHECK(detailed_balance_residual(s) < 1e-12);
      CHECK((s.P.array() >= 0.0).all());
    }
  }

  TEST_CASE("srrw kernel reduces to the base kernel") {
    Rng rng(3);
    const Graph g = random_connected(8, 6, rng);
    const auto mu = random_simplex_point(8, rng);
    const auto base = build_mh_kernel(g, mu);
    const auto a0 = build_srrw_kernel(g, mu, random_simplex_point(8, rng), 0.0);
    CHECK((a0.P - base.P).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a0.target - base.target).cwiseAbs().maxCoeff() < 1e-14);
    const auto fixed = build_srrw_kernel(g, mu, mu, 3.0);
    CHECK((fixed.P - base.P).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(build_srrw_kernel(g, mu, std::vector<double>(8, 0.0), 1.0), std::invalid_argument);

    // Triangle, x = (1/2, 1/4, 1/4), alpha = 1: repulsion (2/3, 4/3, 4/3).
    const auto t = build_srrw_kernel(triangle(), uniform_mu(3), std::vector<double>{0.5, 0.25, 0.25}, 1.0);
    CHECK(t.P(0, 1) == doctest::Approx(0.5));
    CHECK(t.P(1, 0) == doctest::Approx((0.5 * 2.0 / 3.0) / (0.5 * 2.0 / 3.0 + 0.5 * 4.0 / 3.0)));
    CHECK(detailed_balance_residual(t) < 1e-12);
  }

  TEST_CASE("spectra of small kernels") {
    const auto p2 = reversible_spectrum(build_mh_kernel(path(2), uniform_mu(2)));
    CHECK(p2.eigenvalues(0) == 1.0);
    CHECK(p2.eigenvalues(1) == -1.0);
    const auto tri = reversible_spectrum(build_mh_kernel(triangle(), uniform_mu(3)));
    CHECK(tri.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(tri.eigenvalues(1) == doctest::Approx(-0.5));
    CHECK(tri.eigenvalues(2) == doctest::Approx(-0.5));
  }

  TEST_CASE("property: eigenvector normalization") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 15);
      const Graph g = random_connected(n, n / 2, rng);
      const auto k = build_mh_kernel(g, random_simplex_point(n, rng));
      const auto s = reversible_spectrum(k);
      const auto m = static_cast<Eigen::Index>(n);
      CHECK((s.left.col(0) - k.target).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((s.right.col(0) - Col::Ones(m)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((s.left.transpose() * s.right - Dense::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((s.left - k.target.asDiagonal() * s.right).cwiseAbs().maxCoeff() < 1e-10);
      for (Eigen::Index i = 0; i < m; ++i) {
        CHECK(std::abs(s.eigenvalues(i)) <= 1.0 + 1e-12);
        if (i > 0) CHECK(s.eigenvalues(i) <= s.eigenvalues(i - 1));
        CHECK((k.P * s.right.col(i) - s.eigenvalues(i) * s.right.col(i)).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }

  TEST_CASE("non-reversible kernels are rejected") {
    KernelMatrix k;
    k.P = Dense{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}};
    k.target = Col::Constant(3, 1.0 / 3.0);
    CHECK_THROWS_AS(reversible_spectrum(k), std::invalid_argument);
  }

  TEST_CASE("covariance formulas on the triangle and the 2-path") {
    const auto tri = reversible_spectrum(build_mh_kernel(triangle(), uniform_mu(3)));
    const Matrix base = covariance_base(tri);
    const Matrix hdt = covariance_hdt(base, 1.0);
    const Matrix srrw = covariance_srrw(tri, 1.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(base(i, i) - kTriangleBaseDiag) < 1e-10);
      CHECK(std::abs(hdt(i, i) - kTriangleHdtDiag) < 1e-10);
      CHECK(std::abs(srrw(i, i) - kTriangleSrrwDiag) < 1e-10);
    }
    CHECK((covariance_hdt(base, 0.0) - base).cwiseAbs().maxCoeff() == 0.0);
    CHECK((covariance_hdt(base, 5.0) - base / 11.0).cwiseAbs().maxCoeff() < 1e-16);
    CHECK((covariance_srrw(tri, 0.0) - base).cwiseAbs().maxCoeff() < 1e-15);

    const Matrix zero = covariance_base(reversible_spectrum(build_mh_kernel(path(2), uniform_mu(2))));
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("property: spectral covariance equals the fundamental-matrix route") {
    Rng rng(29);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 20);
      const Graph g = random_connected(n, n, rng);
      const auto mu = random_simplex_point(n, rng, 0.05);
      const auto k = build_mh_kernel(g, mu);
      const auto s = reversible_spectrum(k);
      const Matrix base = covariance_base(s);
      const Dense oracle = oracle_fundamental_covariance(k.P, k.target);
      CHECK((base - oracle).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
      CHECK((base * Col::Ones(static_cast<Eigen::Index>(n))).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(min_eigenvalue(base) > -1e-10);
      for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
        const Matrix hdt = covariance_hdt(base, alpha);
        CHECK(min_eigenvalue(covariance_srrw(s, alpha) - 0.5 * hdt) > -1e-10);
        const auto cmp = cost_scaled_comparison(s, g, mu, alpha);
        CHECK(cmp.min_eigenvalue > -1e-10);
      }
    }
  }

  TEST_CASE("cost-scaled comparison factors") {
    const auto tri = reversible_spectrum(build_mh_kernel(triangle(), uniform_mu(3)));
    const auto c = cost_scaled_comparison(tri, triangle(), uniform_mu(3), 1.0);
    CHECK(c.expected_expanded_degree == doctest::Approx(3.0));
    CHECK(c.cost_srrw == doctest::Approx(6.0));
    CHECK(c.min_eigenvalue > -1e-10);
    const Graph s = star(5);
    const auto st = reversible_spectrum(build_mh_kernel(s, uniform_mu(6)));
    const auto cs = cost_scaled_comparison(st, s, uniform_mu(6), 0.0);
    CHECK(cs.expected_expanded_degree == doctest::Approx(kStarExpandedDegree));
    CHECK(cs.min_eigenvalue > -1e-10);
  }

  TEST_CASE("ode fixed point and alpha = 0 closed form") {
    const Col mu = to_vector(std::vector<double>{0.2, 0.3, 0.5});
    const auto still = ode_integrate(mu, 3.0, mu, 0.05, 100);
    for (const auto& p : still.points) CHECK((p - mu).cwiseAbs().maxCoeff() < 1e-15);

    const Col x0 = to_vector(std::vector<double>{0.6, 0.3, 0.1});
    const double h = 0.1;
    const auto lin = ode_integrate(mu, 0.0, x0, h, 50);
    const Col exact = mu + std::exp(-5.0) * (x0 - mu);
    // RK4 local error is O(h^5); global O(h^4) with a small constant here.
    CHECK((lin.points.back() - exact).cwiseAbs().maxCoeff() < 1e-6);
    const auto fine = ode_integrate(mu, 0.0, x0, h / 2, 100);
    const double coarse_err = (lin.points.back() - exact).cwiseAbs().maxCoeff();
    const double fine_err = (fine.points.back() - exact).cwiseAbs().maxCoeff();
    CHECK(coarse_err / fine_err == doctest::Approx(16.0).epsilon(0.1));
  }

  TEST_CASE("ode converges and the Lyapunov function descends") {
    Rng rng(37);
    const Col mu = to_vector(random_simplex_point(6, rng));
    const Col x0 = to_vector(random_simplex_point(6, rng));
    const auto t = ode_integrate(mu, 2.0, x0, 0.01, 4000);
    CHECK((t.points.back() - mu).cwiseAbs().sum() < 1e-6);
    CHECK(lyapunov_descent_check(t, mu, 2.0));
    CHECK(lyapunov(mu, 2.0, mu) == doctest::Approx(1.0));
    CHECK_THROWS_AS(ode_integrate(mu, 1.0, Col::Zero(6), 0.01, 1), std::invalid_argument);
    // An absurd step overshoots the boundary.
    CHECK_THROWS_AS(ode_integrate(mu, 50.0, x0, 5.0, 10), std::runtime_error);
  }

  TEST_CASE("lyapunov example and global minimum on the 3-simplex") {
    const Col mu = Col::Constant(3, 1.0 / 3.0);
    CHECK(lyapunov(mu, 1.0, to_vector(std::vector<double>{0.5, 0.25, 0.25})) == doctest::Approx(kLyapunovExample));
    for (int a = 1; a < 60; ++a) {
      for (int b = 1; a + b < 60; ++b) {
        const Col x = to_vector(std::vector<double>{a / 60.0, b / 60.0, (60 - a - b) / 60.0});
        const double v = lyapunov(mu, 1.5, x);
        if ((x - mu).cwiseAbs().maxCoeff() < 1e-12) CHECK(v == doctest::Approx(1.0));
        else CHECK(v > 1.0);
      }
    }
  }

  TEST_CASE("jacobian at mu") {
    const Col mu3 = Col::Constant(3, 1.0 / 3.0);
    CHECK((jacobian_at_mu(mu3, 0.0) + Dense::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    const Dense j = jacobian_at_mu(mu3, 1.0);
    CHECK((j - ((1.0 / 3.0) * Dense::Ones(3, 3) - 2.0 * Dense::Identity(3, 3))).cwiseAbs().maxCoeff() < 1e-15);
    Eigen::EigenSolver<Dense> es(j);
    std::vector<double> ev;
    for (int i = 0; i < 3; ++i) ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(-2.0));
    CHECK(ev[1] == doctest::Approx(-2.0));
    CHECK(ev[2] == doctest::Approx(-1.0));

    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
      const Col mu = to_vector(random_simplex_point(2 + uniform_index(rng, 8), rng, 0.05));
      const double alpha = random_real(rng, 0.0, 6.0);
      CHECK(jacobian_fd_check(mu, alpha, 1e-5) < 1e-6);
      const Col x = to_vector(random_simplex_point(static_cast<std::size_t>(mu.size()), rng, 0.05));
      CHECK((ode_jacobian(mu, alpha, x) - ode_jacobian_fd(mu, alpha, x, 1e-5)).cwiseAbs().maxCoeff() < 1e-5);
      CHECK((ode_jacobian(mu, alpha, mu) - jacobian_at_mu(mu, alpha)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("empirical covariance of iid sampling approaches the multinomial covariance") {
    const Col mu = to_vector(std::vector<double>{0.5, 0.3, 0.2});
    const std::size_t horizon = 400;
    const std::size_t runs = 4000;
    const Matrix v = empirical_clt_covariance(mu, runs, horizon, [&](std::size_t r) {
      Rng rng(9000 + r);
      std::discrete_distribution<int> draw({0.5, 0.3, 0.2});
      std::vector<double> x(3, 0.0);
      for (std::size_t s = 0; s < horizon; ++s) x[draw(rng)] += 1.0 / horizon;
      return x;
    }, 1);
    const Dense expected = Dense(mu.asDiagonal()) - mu * mu.transpose();
    // Sample covariance entries have relative sd ~ sqrt(2 / runs) ~ 2%.
    CHECK((v - expected).cwiseAbs().maxCoeff() < 0.03);
    CHECK(v.trace() == doctest::Approx(expected.trace()).epsilon(0.06));
  }
}
