#pragma once

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "xrk/system.hpp"
#include "xrk/types.hpp"

namespace xrk::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Index n) { return random_matrix(rng, n, 1); }

// Sum of A^k / k! for k < terms.
inline Matrix taylor_exp(const Matrix& a, int terms) {
  Matrix sum = Matrix::Identity(a.rows(), a.cols());
  Matrix term = sum;
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

// phi_k(z) = sum_j z^j / (j + k)!
inline double phi_series(int k, double z, int terms = 40) {
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  double term = 1.0 / fact;
  double sum = term;
  for (int j = 1; j < terms; ++j) {
    term *= z / static_cast<double>(j + k);
    sum += term;
  }
  return sum;
}

inline SemiLinearSystem system_with(Matrix m, Nonlinearity f, JacobianAction jvp, Vector y0,
                                    double t_end) {
  SemiLinearSystem sys;
  sys.name = "test";
  sys.linear = std::make_shared<Matrix>(std::move(m));
  sys.f = std::move(f);
  sys.jvp = std::move(jvp);
  sys.y0 = std::move(y0);
  sys.t_end = t_end;
  return sys;
}

inline SemiLinearSystem linear_only(Matrix m, Vector y0, double t_end) {
  return system_with(
      std::move(m), [](const Vector& y) { return Vector(Vector::Zero(y.size())); },
      [](const Vector& y, const Vector&) { return Vector(Vector::Zero(y.size())); },
      std::move(y0), t_end);
}

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("xrk-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace xrk::testing
