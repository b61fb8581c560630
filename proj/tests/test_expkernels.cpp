#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"
#include "xrk/errors.hpp"
#include "xrk/exp_cache.hpp"
#include "xrk/expm.hpp"

using namespace xrk;
using xrk::testing::random_matrix;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix scaled_to_norm1(Matrix a, double target) {
  return a * (target / a.cwiseAbs().colwise().sum().maxCoeff());
}

Matrix scalar(double z) { return Matrix::Constant(1, 1, z); }

}  // namespace

TEST_CASE("expm of the zero matrix is the identity") {
  for (Index n : {1, 3, 7}) {
    CHECK(max_abs(expm(Matrix::Zero(n, n)) - Matrix::Identity(n, n)) == 0.0);
  }
}

TEST_CASE("expm of a quarter-turn generator is the rotation") {
  Matrix a(2, 2);
  a << 0.0, -EIGEN_PI / 2, EIGEN_PI / 2, 0.0;
  Matrix expected(2, 2);
  expected << 0.0, -1.0, 1.0, 0.0;
  CHECK(max_abs(expm(a) - expected) <= 1e-15);
}

TEST_CASE("expm matches a 30-term Taylor sum when ||A||_1 <= 1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> norm(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = scaled_to_norm1(random_matrix(rng, 4, 4), norm(rng));
    CHECK(max_abs(expm(a) - testing::taylor_exp(a, 30)) <= 1e-13);
  }
}

TEST_CASE("expm across the scaling-and-squaring branches") {
  std::mt19937_64 rng(12);
  const Matrix base = random_matrix(rng, 5, 5);
  // One norm per Pade degree, plus two values that need squaring.
  for (double target : {0.01, 0.2, 0.9, 2.0, 5.0, 12.0, 40.0}) {
    const Matrix a = scaled_to_norm1(base, target);
    const Matrix e = expm(a);
    // Semigroup: e^{A/2} e^{A/2} = e^{A}; inverse: e^{A} e^{-A} = I.
    const Matrix half = expm(0.5 * a);
    CHECK(max_abs(half * half - e) <= 1e-11 * std::max(1.0, max_abs(e)));
    const Matrix inv = expm(-a);
    CHECK(max_abs(e * inv - Matrix::Identity(5, 5)) <=
          1e-11 * std::max(1.0, max_abs(e) * max_abs(inv)));
  }
}

TEST_CASE("expm of a skew matrix is orthogonal") {
  std::mt19937_64 rng(13);
  const Matrix r = random_matrix(rng, 6, 6);
  const Matrix q = expm(3.0 * (r - r.transpose()));
  CHECK(max_abs(q.transpose() * q - Matrix::Identity(6, 6)) <= 1e-12);
}

TEST_CASE("expm1 equals expm minus the identity and keeps relative accuracy") {
  std::mt19937_64 rng(14);
  const Matrix base = random_matrix(rng, 4, 4);
  for (double target : {0.2, 3.0, 20.0}) {
    const Matrix a = scaled_to_norm1(base, target);
    const Matrix e = expm(a);
    CHECK(max_abs(expm1(a) - (e - Matrix::Identity(4, 4))) <= 1e-12 * std::max(1.0, max_abs(e)));
  }
  // For tiny A, e^A - I = A + A^2/2 + ..., far below the identity's ulp.
  const Matrix tiny = 1e-9 * base;
  const Matrix series = tiny + 0.5 * tiny * tiny;
  CHECK(max_abs(expm1(tiny) - series) <= 1e-15 * max_abs(series));
}

TEST_CASE("phi_1 at scalar points") {
  CHECK(phi(1, scalar(0.0))(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(phi(1, scalar(1.0))(0, 0) - (std::exp(1.0) - 1.0)) <= 1e-15);
}

TEST_CASE("phi_k matches the power-series oracle") {
  for (int k = 1; k <= 3; ++k) {
    for (double z : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
      INFO("k = " << k << ", z = " << z);
      CHECK(std::abs(phi(k, scalar(z))(0, 0) - testing::phi_series(k, z)) <= 1e-13);
    }
  }
}

TEST_CASE("phi_k on matrices satisfies the recurrence") {
  std::mt19937_64 rng(15);
  const Matrix a = random_matrix(rng, 4, 4);
  const Matrix id = Matrix::Identity(4, 4);
  const Matrix p1 = phi(1, a);
  const Matrix p2 = phi(2, a);
  const Matrix p3 = phi(3, a);
  // A phi_{k+1}(A) = phi_k(A) - I/k!, and A phi_1(A) = e^A - I.
  CHECK(max_abs(a * p1 - (expm(a) - id)) <= 1e-13);
  CHECK(max_abs(a * p2 - (p1 - id)) <= 1e-13);
  CHECK(max_abs(a * p3 - (p2 - 0.5 * id)) <= 1e-13);
}

TEST_CASE("phi_k of a singular matrix is well defined") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = 1.0;  // nilpotent
  const Matrix p2 = phi(2, a);
  Matrix expected = 0.5 * Matrix::Identity(3, 3);
  expected(0, 1) = 1.0 / 6.0;
  CHECK(max_abs(p2 - expected) <= 1e-15);
}

TEST_CASE("kernel input errors") {
  CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), DimensionError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(expm(bad), DomainError);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(expm1(bad), DomainError);
  CHECK_THROWS_AS(phi(4, Matrix::Identity(2, 2)), UnsupportedError);
  CHECK_THROWS_AS(phi(0, Matrix::Identity(2, 2)), UnsupportedError);
  CHECK_THROWS_AS(phi(1, Matrix::Zero(3, 2)), DimensionError);
}

TEST_CASE("expm is templated on the scalar type") {
  Eigen::Matrix2f af;
  af << 0.0f, 1.0f, -1.0f, 0.0f;
  const Eigen::MatrixXf ef = expm(af);
  CHECK(std::abs(ef(0, 0) - std::cos(1.0f)) <= 1e-6f);
  Eigen::Matrix<long double, 2, 2> al;
  al << 0.0L, 1.0L, -1.0L, 0.0L;
  const auto el = expm(al);
  CHECK(std::abs(el(0, 1) - std::sin(1.0L)) <= 1e-18L);
}

TEST_CASE("ExpCache: node 0 is the identity and costs no build") {
  std::mt19937_64 rng(16);
  auto m = std::make_shared<Matrix>(random_matrix(rng, 3, 3));
  ExpCache cache(m, 0.1);
  CHECK(max_abs(cache.exp(Rational(0)) - Matrix::Identity(3, 3)) == 0.0);
  CHECK(max_abs(cache.exp_minus_identity(Rational(0))) == 0.0);
  CHECK(cache.builds() == 0);
}

TEST_CASE("ExpCache: repeated requests reuse one build") {
  std::mt19937_64 rng(17);
  auto m = std::make_shared<Matrix>(random_matrix(rng, 3, 3));
  ExpCache cache(m, 0.1);
  const Matrix first = cache.exp(Rational(1));
  const Matrix second = cache.exp(Rational(1));
  cache.exp_minus_identity(Rational(1));
  CHECK(cache.builds() == 1);
  CHECK(max_abs(first - second) == 0.0);
  CHECK(max_abs(first - expm(0.1 * *m)) <= 1e-15);
  cache.phi(1, Rational(1));
  CHECK(cache.builds() == 2);
}

TEST_CASE("ExpCache: half-step exponential squares to the full step") {
  std::mt19937_64 rng(18);
  auto m = std::make_shared<Matrix>(5.0 * random_matrix(rng, 4, 4));
  ExpCache cache(m, 0.3);
  const Matrix half = cache.exp(Rational(1, 2));
  CHECK(max_abs(half * half - cache.exp(Rational(1))) <= 1e-11 * max_abs(cache.exp(Rational(1))));
}

TEST_CASE("ExpCache: reset drops entries and changes the stepsize") {
  auto m = std::make_shared<Matrix>(Matrix::Identity(2, 2));
  ExpCache cache(m, 0.5);
  cache.exp(Rational(1));
  CHECK(cache.size() == 1);
  cache.reset(0.25);
  CHECK(cache.size() == 0);
  CHECK(cache.stepsize() == 0.25);
  CHECK(cache.exp(Rational(1))(0, 0) == doctest::Approx(std::exp(0.25)).epsilon(1e-15));
  CHECK(cache.builds() == 2);
  CHECK_THROWS_AS(cache.reset(0.0), ConfigError);
}

TEST_CASE("ExpCache: invalid construction") {
  CHECK_THROWS_AS(ExpCache(nullptr, 0.1), ConfigError);
  CHECK_THROWS_AS(ExpCache(std::make_shared<Matrix>(Matrix::Zero(2, 3)), 0.1), DimensionError);
  CHECK_THROWS_AS(ExpCache(std::make_shared<Matrix>(Matrix::Zero(2, 2)), -1.0), ConfigError);
}
