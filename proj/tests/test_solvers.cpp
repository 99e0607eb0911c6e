#include <doctest.h>

#include <cmath>

#include "seqcs/ensembles.hpp"
#include "seqcs/errors.hpp"
#include "seqcs/random.hpp"
#include "seqcs/solvers.hpp"

using namespace seqcs;

namespace {

Matrix gaussian_matrix(int m, int n, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

// Largest violation of the l1 stationarity conditions at x: the smooth
// gradient must sit inside [-lambda, lambda] at zeros and at the matching
// endpoint at nonzeros.
double stationarity_gap(const Matrix& a, const Vector& y, double lambda, const Vector& x) {
  const Vector g = a.transpose() * (a * x - y);
  double worst = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double v = x[i] != 0.0 ? std::abs(g[i] + lambda * (x[i] > 0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(g[i]) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("greedy fit of a zero observation is the zero vector") {
    const Matrix a = gaussian_matrix(5, 12, 1);
    const Vector x = omp(a, Vector::Zero(5));
    CHECK(x.norm() == 0.0);
  }

  TEST_CASE("greedy fit solves orthonormal systems outright") {
    const Matrix q = Eigen::HouseholderQR<Matrix>(gaussian_matrix(6, 6, 2)).householderQ();
    RngStream rng(3);
    Vector y(6);
    for (int i = 0; i < 6; ++i) y[i] = rng.normal();
    const Vector x = omp(q, y);
    CHECK((x - q.transpose() * y).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + y.norm()));

    // A single active column is found in one step.
    const Vector y1 = q.col(2) * 3.5;
    const Vector x1 = omp(q, y1);
    CHECK((x1.array().abs() > 1e-10).count() == 1);
    CHECK(x1[2] == doctest::Approx(3.5).epsilon(1e-10));
  }

  TEST_CASE("greedy fit recovers well-separated sparse signals") {
    const Matrix a = gaussian_matrix(20, 50, 4);
    Vector x = Vector::Zero(50);
    x[7] = 9.0;
    x[23] = -7.0;
    x[41] = 5.0;
    const Vector y = a * x;
    const Vector xhat = omp(a, y);
    CHECK((xhat - x).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK((a * xhat - y).norm() <= 1e-8 * (1.0 + y.norm()));
  }

  TEST_CASE("greedy fit reports stagnation instead of looping") {
    // All columns lie on one line; anything off that line is unreachable.
    Matrix a(2, 4);
    a.row(0) << 1, 2, -1, 0.5;
    a.row(1).setZero();
    Vector y(2);
    y << 0, 1;
    CHECK_THROWS_AS(omp(a, y), NoProgressError);
  }

  TEST_CASE("heavy penalties shrink the solution to zero") {
    const Matrix a = gaussian_matrix(10, 25, 5);
    RngStream rng(6);
    Vector y(10);
    for (int i = 0; i < 10; ++i) y[i] = rng.normal();
    const double lam = 1.01 * (a.transpose() * y).lpNorm<Eigen::Infinity>();
    const BpdnReport r = bpdn(a, y, lam);
    CHECK(r.solution.norm() == 0.0);
  }

  TEST_CASE("identity designs soft-threshold coordinatewise") {
    RngStream rng(7);
    Vector y(12);
    for (int i = 0; i < 12; ++i) y[i] = 3.0 * rng.normal();
    const double lam = 0.8;
    const BpdnReport r = bpdn(Matrix::Identity(12, 12), y, lam);
    for (int i = 0; i < 12; ++i) {
      const double want = std::copysign(std::max(std::abs(y[i]) - lam, 0.0), y[i]);
      CHECK(r.solution[i] == doctest::Approx(want).epsilon(1e-8));
    }
  }

  TEST_CASE("denoised solve is stationary and matches a long-run reference") {
    const Matrix a = gaussian_matrix(50, 200, 8);
    const Vector xstar = generate_signal(SignalSpec::exact_sparse(200, 10), 9);
    RngStream noise(10);
    Vector y = a * xstar;
    for (int i = 0; i < y.size(); ++i) y[i] += 0.05 * noise.normal();
    const double lam = 0.1 * (a.transpose() * y).lpNorm<Eigen::Infinity>();

    const BpdnReport fast = bpdn(a, y, lam);
    CHECK(stationarity_gap(a, y, lam, fast.solution) <= 1e-7 * std::max(1.0, lam));

    BpdnOptions tight;
    tight.convergence_tol = 1e-9;
    tight.max_iterations = 2000000;
    const BpdnReport ref = bpdn(a, y, lam, tight);
    CHECK(std::abs(fast.objective - ref.objective) <= 1e-6 * std::max(1.0, ref.objective));
  }

  TEST_CASE("warm starts converge and honor the supplied point") {
    const Matrix a = gaussian_matrix(30, 80, 11);
    const Vector xstar = generate_signal(SignalSpec::exact_sparse(80, 6), 12);
    const Vector y = a * xstar;
    const double lam = 0.5;
    const BpdnReport cold = bpdn(a, y, lam);
    BpdnOptions opts;
    opts.x0 = cold.solution;
    const BpdnReport warm = bpdn(a, y, lam, opts);
    CHECK(warm.iterations <= cold.iterations);
    CHECK(std::abs(warm.objective - cold.objective) <= 1e-6 * std::max(1.0, cold.objective));
  }

  TEST_CASE("the iteration cap is enforced") {
    const Matrix a = gaussian_matrix(40, 120, 13);
    const Vector xstar = generate_signal(SignalSpec::exact_sparse(120, 8), 14);
    const Vector y = a * xstar;
    BpdnOptions opts;
    opts.max_iterations = 2;
    CHECK_THROWS_AS(bpdn(a, y, 0.01, opts), IterationLimitError);
  }

  TEST_CASE("penalty schedule follows the square-root law") {
    CHECK(lambda_schedule(100, 1000, 1.0) == doctest::Approx(26.2826).epsilon(1e-5));
    const double base = lambda_schedule(25, 500, 0.1);
    CHECK(lambda_schedule(100, 500, 0.1) == doctest::Approx(2.0 * base).epsilon(1e-12));
    CHECK_THROWS_AS(lambda_schedule(0, 100, 1.0), Error);
    CHECK_THROWS_AS(lambda_schedule(10, 1, 1.0), Error);
    CHECK_THROWS_AS(lambda_schedule(10, 100, 0.0), Error);
  }
}
